use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use stretchmetrics_core::{
    MetricsConfig, MotionParams, ProtocolParams, SegmentConfig, SensorParams, TestConfig,
};

use crate::Failure;

/// Every analysis threshold, in one flat JSON object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub test: TestConfig<f64>,
    #[serde(flatten)]
    pub segment: SegmentConfig<f64>,
    #[serde(flatten)]
    pub metrics: MetricsConfig<f64>,
    pub n_bins: usize,
    pub min_angle_deg: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            test: TestConfig::default(),
            segment: SegmentConfig::default(),
            metrics: MetricsConfig::default(),
            n_bins: 100,
            min_angle_deg: 5.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> stretchmetrics_core::Result<()> {
        self.test.validate()?;
        self.segment.validate()?;
        self.metrics.validate()?;
        if self.n_bins < 2 {
            return Err(invalid("n_bins", "must be >= 2"));
        }
        if !(self.min_angle_deg >= 0.0 && self.min_angle_deg <= 180.0) {
            return Err(invalid("min_angle_deg", "must be in [0, 180]"));
        }
        Ok(())
    }
}

/// Simulator inputs. `hysteresis_target_pct`, when set, replaces
/// `sensor.delta_max` with the half-width that yields that hysteresis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub sensor: SensorParams<f64>,
    pub protocol: ProtocolParams<f64>,
    pub motion: MotionParams<f64>,
    pub hysteresis_target_pct: Option<f64>,
    pub calibration_angles_deg: Vec<f64>,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            sensor: SensorParams::default(),
            protocol: ProtocolParams::default(),
            motion: MotionParams::default(),
            hysteresis_target_pct: None,
            calibration_angles_deg: (0..=6).map(|i| i as f64 * 15.0).collect(),
        }
    }
}

impl SimParams {
    pub fn resolved_sensor(&self) -> SensorParams<f64> {
        let mut s = self.sensor;
        if let Some(h) = self.hysteresis_target_pct {
            s.delta_max = stretchmetrics_core::simulate::delta_max_for_hysteresis(
                h,
                s.gf,
                self.protocol.peak_strain,
            );
        }
        s
    }

    pub fn validate(&self) -> stretchmetrics_core::Result<()> {
        if let Some(h) = self.hysteresis_target_pct {
            if !(0.0..200.0).contains(&h) {
                return Err(invalid("hysteresis_target_pct", "must be in [0, 200)"));
            }
        }
        if self.calibration_angles_deg.len() < 2 {
            return Err(invalid("calibration_angles_deg", "need at least 2 angles"));
        }
        if self
            .calibration_angles_deg
            .iter()
            .any(|a| !(0.0..=180.0).contains(a))
        {
            return Err(invalid(
                "calibration_angles_deg",
                "angles must be in [0, 180]",
            ));
        }
        self.resolved_sensor().validate()?;
        self.protocol.validate()?;
        self.motion.validate()
    }
}

fn invalid(field: &str, reason: &str) -> stretchmetrics_core::Error {
    stretchmetrics_core::Error::InvalidParams {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

/// Defaults, overlaid with an optional JSON file, then with `key=value`
/// overrides. Dotted keys address nested objects. Unknown keys are rejected.
pub fn load<T: Default + Serialize + DeserializeOwned>(
    file: Option<&Path>,
    sets: &[String],
) -> Result<T, Failure> {
    let mut merged = serde_json::to_value(T::default()).expect("defaults serialize");
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let overlay: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
        overlay_value(&mut merged, &overlay, "")?;
    }
    for kv in sets {
        let (key, raw) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects key=value, got `{kv}`")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut merged, key, value)?;
    }
    serde_json::from_value(merged)
        .map_err(|e| Failure::Usage(format!("invalid configuration: {e}")))
}

fn overlay_value(base: &mut Value, overlay: &Value, prefix: &str) -> Result<(), Failure> {
    let Value::Object(over) = overlay else {
        return Err(Failure::Usage(format!(
            "`{}` must be a JSON object",
            display_key(prefix)
        )));
    };
    for (k, v) in over {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        let Some(slot) = base.as_object_mut().and_then(|m| m.get_mut(k)) else {
            return Err(Failure::Usage(format!("unknown key `{path}`")));
        };
        if slot.is_object() {
            overlay_value(slot, v, &path)?;
        } else {
            *slot = v.clone();
        }
    }
    Ok(())
}

fn set_path(base: &mut Value, key: &str, value: Value) -> Result<(), Failure> {
    let mut slot = base;
    for part in key.split('.') {
        slot = slot
            .as_object_mut()
            .and_then(|m| m.get_mut(part))
            .ok_or_else(|| Failure::Usage(format!("unknown key `{key}`")))?;
    }
    if slot.is_object() {
        return Err(Failure::Usage(format!(
            "`{key}` is a section, set one of its fields"
        )));
    }
    *slot = value;
    Ok(())
}

fn display_key(prefix: &str) -> &str {
    if prefix.is_empty() {
        "<root>"
    } else {
        prefix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stretchmetrics_core::FailMode;

    #[test]
    fn set_overrides_flat_and_nested() {
        let c: RunConfig =
            load(None, &["r2_floor=0.99".into(), "gauge_length_mm=50".into()]).unwrap();
        assert_eq!(c.metrics.r2_floor, 0.99);
        assert_eq!(c.test.gauge_length_mm, 50.0);
        let p: SimParams = load(
            None,
            &["sensor.gf=12".into(), "sensor.fail_mode=electrical".into()],
        )
        .unwrap();
        assert_eq!(p.sensor.gf, 12.0);
        assert_eq!(p.sensor.fail_mode, FailMode::Electrical);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            load::<RunConfig>(None, &["nope=1".into()]),
            Err(Failure::Usage(_))
        ));
        assert!(matches!(
            load::<SimParams>(None, &["sensor.nope=1".into()]),
            Err(Failure::Usage(_))
        ));
    }

    #[test]
    fn optional_reference_resistance() {
        let c: RunConfig = load(None, &["reference_resistance_ohm=1000".into()]).unwrap();
        assert_eq!(c.test.reference_resistance_ohm, Some(1000.0));
    }
}

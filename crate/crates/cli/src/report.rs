use serde::Serialize;
use serde_json::{Map, Value};
use stretchmetrics_core::{FailureReport, MetricsReport};

use crate::config::RunConfig;

/// `report` fields at the top level plus a `config` echo.
pub fn json_document<R: Serialize>(report: &R, config: &RunConfig) -> String {
    let mut doc = match serde_json::to_value(report).expect("report serializes") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    doc.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0)
        .max("Metric".len());
    let mut out = format!("{:<width$}  Value\n", "Metric");
    out.push_str(&format!("{}  {}\n", "-".repeat(width), "-".repeat(12)));
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

pub fn cyclic_table(r: &MetricsReport<f64>) -> String {
    table(&[
        ("Sensitivity (GF)", format!("{:.2}", r.gauge_factor)),
        ("Linearity (R²)", format!("{:.4}", r.linearity_r2)),
        ("Hysteresis [%]", format!("{:.1}", r.hysteresis_pct)),
        (
            "Rel. Baseline Drift/Cycle [%]",
            format!("{:.3}", r.baseline_drift_pct_per_cycle),
        ),
        (
            "Rel. Peak Drift/Cycle [%]",
            format!("{:.3}", r.peak_drift_pct_per_cycle),
        ),
        ("Cycles", r.n_cycles.to_string()),
    ])
}

pub fn failure_table(r: &FailureReport<f64>) -> String {
    table(&[
        (
            "Stretchability [%]",
            format!("{:.1}", 100.0 * r.failure_strain),
        ),
        ("Failure mode", r.failure_mode.to_string()),
        (
            "Linear range [%]",
            format!("{:.0}", 100.0 * r.linear_range_end),
        ),
        (
            "Max force in linear range [N]",
            format!("{:.2}", r.max_force_in_linear_range),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use stretchmetrics_core::FailureMode;

    #[test]
    fn document_flattens_report() {
        let r = FailureReport {
            failure_strain: 1.2,
            failure_mode: FailureMode::Mechanical,
            linear_range_end: 0.6,
            max_force_in_linear_range: 15.0,
        };
        let v: Value = serde_json::from_str(&json_document(&r, &RunConfig::default())).unwrap();
        assert_eq!(v["failure_mode"], "mechanical");
        assert_eq!(v["config"]["n_bins"], 100);
        assert_eq!(v.as_object().unwrap().len(), 5);
    }

    #[test]
    fn table_aligns() {
        let t = failure_table(&FailureReport {
            failure_strain: 1.2,
            failure_mode: FailureMode::None,
            linear_range_end: 0.6,
            max_force_in_linear_range: 15.0,
        });
        let w = "Max force in linear range [N]".len();
        for line in t.lines() {
            let c: Vec<char> = line.chars().collect();
            assert!(c[w] == ' ' && c[w + 1] == ' ' && c[w + 2] != ' ', "{line}");
        }
        assert!(t.contains("120.0"));
    }
}

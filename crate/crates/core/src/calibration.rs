//! Linear ΔR/R -> joint-angle calibration and scoring against ground truth.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ingest::{data_rows, number, read_text};
use crate::numeric::{interp, ols};
use crate::sync::SyncedTrace;
use crate::{Error, Result, Scalar};

pub const POINTS_HEADER: &str = "dR_over_R,angle_deg";
pub const ANGLE_HEADER: &str = "t_s,angle_deg";

pub const MAX_ANGLE_DEG: f64 = 180.0;

/// `angle = slope * ΔR/R + intercept`, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AngleModel<T> {
    pub slope: T,
    pub intercept: T,
    pub fit_r2: T,
}

impl<T: Scalar> AngleModel<T> {
    pub fn angle(&self, d_r_over_r: T) -> T {
        self.slope * d_r_over_r + self.intercept
    }

    /// ΔR/R the model associates with `angle`.
    pub fn inverse(&self, angle: T) -> T {
        (angle - self.intercept) / self.slope
    }

    pub fn validate(&self) -> Result<()> {
        if !self.slope.is_finite() || self.slope == T::zero() {
            return Err(Error::invalid("slope", "must be finite and nonzero"));
        }
        if !self.intercept.is_finite() {
            return Err(Error::invalid("intercept", "must be finite"));
        }
        if !(self.fit_r2 >= T::zero() && self.fit_r2 <= T::one()) {
            return Err(Error::invalid("fit_r2", "must be in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AngleSample<T> {
    pub t: T,
    pub angle: T,
    /// Set when the estimate was clamped into `[0, 180]`.
    #[serde(default)]
    pub clamped: bool,
}

/// Joint-angle series in degrees; time strictly increasing, angles in `[0, 180]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AngleTrace<T> {
    samples: Vec<AngleSample<T>>,
}

impl<T: Scalar> AngleTrace<T> {
    pub fn new(samples: Vec<AngleSample<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            if !s.t.is_finite() || !s.angle.is_finite() {
                return Err(Error::NonFiniteValue { row });
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::NonMonotonicTime { row });
            }
            if s.angle < T::zero() || s.angle > T::lit(MAX_ANGLE_DEG) {
                return Err(Error::AngleOutOfRange {
                    row,
                    angle: s.angle.as_f64(),
                });
            }
        }
        Ok(Self { samples })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(t, angle)| AngleSample {
                    t,
                    angle,
                    clamped: false,
                })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[AngleSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn angles(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.angle).collect()
    }

    pub fn n_clamped(&self) -> usize {
        self.samples.iter().filter(|s| s.clamped).count()
    }
}

/// Least-squares line of angle on ΔR/R through static calibration points.
pub fn fit_angle_model<T: Scalar>(points: &[(T, T)]) -> Result<AngleModel<T>> {
    if points.len() < 2 {
        return Err(Error::DegeneratePoints(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let (x, y): (Vec<T>, Vec<T>) = points.iter().copied().unzip();
    let fit =
        ols(&x, &y).ok_or_else(|| Error::DegeneratePoints("all ΔR/R values are equal".into()))?;
    let model = AngleModel {
        slope: fit.slope,
        intercept: fit.intercept,
        fit_r2: fit.r2,
    };
    if model.slope == T::zero() {
        return Err(Error::DegeneratePoints(
            "angle does not vary with ΔR/R".into(),
        ));
    }
    Ok(model)
}

/// Maps `(t, ΔR/R)` pairs through the model, clamping into `[0, 180]`.
pub fn estimate_angles_from<T: Scalar>(
    model: &AngleModel<T>,
    series: impl IntoIterator<Item = (T, T)>,
) -> Result<AngleTrace<T>> {
    model.validate()?;
    let max = T::lit(MAX_ANGLE_DEG);
    let samples = series
        .into_iter()
        .map(|(t, d)| {
            let raw = model.angle(d);
            let angle = if raw.is_nan() {
                max
            } else {
                raw.max(T::zero()).min(max)
            };
            AngleSample {
                t,
                angle,
                clamped: angle != raw,
            }
        })
        .collect();
    AngleTrace::new(samples)
}

/// Per-sample angle estimate on the trace's own timebase. Open-circuit
/// samples map to the clamp limit in the direction of the model slope.
pub fn estimate_angles<T: Scalar>(
    model: &AngleModel<T>,
    trace: &SyncedTrace<T>,
) -> Result<AngleTrace<T>> {
    estimate_angles_from(model, trace.samples().iter().map(|s| (s.t, s.d_r_over_r)))
}

/// Mean absolute percentage error and the number of samples it covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MapeScore<T> {
    pub mape_pct: T,
    pub n_scored: usize,
    pub min_angle_deg: T,
}

/// MAPE of `estimated` against `truth`, with truth linearly interpolated
/// onto the estimate timebase. Samples whose true angle is below
/// `min_angle` are excluded.
pub fn mape<T: Scalar>(
    estimated: &AngleTrace<T>,
    truth: &AngleTrace<T>,
    min_angle: T,
) -> Result<MapeScore<T>> {
    let tt = truth.times();
    let ta = truth.angles();
    let mut overlap = 0usize;
    let mut n = 0usize;
    let mut sum = T::zero();
    for s in estimated.samples() {
        let Some(theta) = interp(&tt, &ta, s.t) else {
            continue;
        };
        overlap += 1;
        if theta < min_angle || theta <= T::zero() {
            continue;
        }
        sum = sum + (s.angle - theta).abs() / theta;
        n += 1;
    }
    if overlap == 0 {
        return Err(Error::NoOverlap { min_s: 0.0 });
    }
    if n == 0 {
        return Err(Error::AllSamplesBelowThreshold {
            min_angle_deg: min_angle.as_f64(),
        });
    }
    Ok(MapeScore {
        mape_pct: T::lit(100.0) * sum / T::from_count(n),
        n_scored: n,
        min_angle_deg: min_angle,
    })
}

pub fn read_points_csv<T: Scalar>(text: &str) -> Result<Vec<(T, T)>> {
    let mut points = Vec::new();
    for item in data_rows(text, POINTS_HEADER)? {
        let (row, fields) = item?;
        points.push((
            number(fields[0], row, "dR_over_R")?,
            number(fields[1], row, "angle_deg")?,
        ));
    }
    Ok(points)
}

pub fn read_angle_csv<T: Scalar>(text: &str) -> Result<AngleTrace<T>> {
    let mut samples: Vec<AngleSample<T>> = Vec::new();
    for item in data_rows(text, ANGLE_HEADER)? {
        let (row, fields) = item?;
        let t = number(fields[0], row, "t_s")?;
        if let Some(prev) = samples.last() {
            if !(t > prev.t) {
                return Err(Error::NonMonotonicTime { row });
            }
        }
        samples.push(AngleSample {
            t,
            angle: number(fields[1], row, "angle_deg")?,
            clamped: false,
        });
    }
    AngleTrace::new(samples)
}

pub fn parse_points_file<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<(T, T)>> {
    read_points_csv(&read_text(path.as_ref())?)
}

pub fn parse_angle_file<T: Scalar>(path: impl AsRef<Path>) -> Result<AngleTrace<T>> {
    read_angle_csv(&read_text(path.as_ref())?)
}

pub fn write_points_csv<T: Scalar, W: Write>(mut w: W, points: &[(T, T)]) -> io::Result<()> {
    writeln!(w, "{POINTS_HEADER}")?;
    for (d, a) in points {
        writeln!(w, "{d},{a}")?;
    }
    Ok(())
}

pub fn write_angle_csv<T: Scalar, W: Write>(mut w: W, trace: &AngleTrace<T>) -> io::Result<()> {
    writeln!(w, "{ANGLE_HEADER}")?;
    for s in trace.samples() {
        writeln!(w, "{},{}", s.t, s.angle)?;
    }
    Ok(())
}

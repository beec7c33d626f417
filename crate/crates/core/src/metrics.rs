//! Sensor performance metrics: gauge factor and linearity, hysteresis,
//! cyclic drift, and stretch-to-failure analysis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cycles::{
    midpoint_curve, per_cycle_extrema, segment_cycles, split_branches, Cycle, CycleExtrema,
    MidpointCurve, SegmentConfig,
};
use crate::numeric::{ols, ols_through_origin, trapezoid};
use crate::sync::SyncedTrace;
use crate::{Error, Result, Scalar};

/// Detector thresholds for the metric operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct MetricsConfig<T> {
    /// Mechanical failure when force falls below `(1 - force_drop_frac)` of its running max.
    pub force_drop_frac: T,
    /// Running max must exceed this before a force drop counts.
    pub force_floor_n: T,
    /// ΔR/R above this is treated as an open circuit.
    pub open_ratio: T,
    /// Minimum R² for the linear-range fit.
    pub r2_floor: T,
    /// Linear-range search starts here and grows by `linear_step`.
    pub linear_start: T,
    pub linear_step: T,
    /// Fit the gauge factor with a free intercept (default) or through the origin.
    pub fit_intercept: bool,
}

impl<T: Scalar> Default for MetricsConfig<T> {
    fn default() -> Self {
        Self {
            force_drop_frac: T::lit(0.5),
            force_floor_n: T::lit(0.5),
            open_ratio: T::lit(100.0),
            r2_floor: T::lit(0.9999),
            linear_start: T::lit(0.10),
            linear_step: T::lit(0.01),
            fit_intercept: true,
        }
    }
}

impl<T: Scalar> MetricsConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.force_drop_frac > T::zero() && self.force_drop_frac < T::one()) {
            return Err(Error::invalid("force_drop_frac", "must be in (0, 1)"));
        }
        if !(self.force_floor_n >= T::zero()) {
            return Err(Error::invalid("force_floor_n", "must be >= 0"));
        }
        if !(self.open_ratio > T::zero()) {
            return Err(Error::invalid("open_ratio", "must be > 0"));
        }
        if !(self.r2_floor > T::zero() && self.r2_floor <= T::one()) {
            return Err(Error::invalid("r2_floor", "must be in (0, 1]"));
        }
        if !(self.linear_start > T::zero()) {
            return Err(Error::invalid("linear_start", "must be > 0"));
        }
        if !(self.linear_step > T::zero()) {
            return Err(Error::invalid("linear_step", "must be > 0"));
        }
        Ok(())
    }
}

/// Cyclic-test metric bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricsReport<T> {
    pub gauge_factor: T,
    pub linearity_r2: T,
    pub hysteresis_pct: T,
    pub baseline_drift_pct_per_cycle: T,
    pub peak_drift_pct_per_cycle: T,
    pub n_cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureMode {
    Mechanical,
    Electrical,
    None,
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureMode::Mechanical => "mechanical",
            FailureMode::Electrical => "electrical",
            FailureMode::None => "none",
        })
    }
}

/// Stretch-to-failure outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FailureReport<T> {
    pub failure_strain: T,
    pub failure_mode: FailureMode,
    pub linear_range_end: T,
    pub max_force_in_linear_range: T,
}

/// Slope and R² of the least-squares line through the midpoint curve.
pub fn gauge_factor_and_linearity<T: Scalar>(mc: &MidpointCurve<T>) -> Result<(T, T)> {
    fit_midpoint(mc, true)
}

/// As [`gauge_factor_and_linearity`], optionally forcing the line through
/// the origin. In that mode a flat curve has R² = 0.
pub fn fit_midpoint<T: Scalar>(mc: &MidpointCurve<T>, fit_intercept: bool) -> Result<(T, T)> {
    if mc.strain_grid.len() < 3 {
        return Err(Error::DegenerateGrid);
    }
    let fit = if fit_intercept {
        ols(&mc.strain_grid, &mc.mean_mid)
    } else {
        ols_through_origin(&mc.strain_grid, &mc.mean_mid)
    }
    .ok_or(Error::DegenerateGrid)?;
    Ok((fit.slope, fit.r2))
}

/// Hysteresis of one cycle: `100 * |A_load - A_unload| / A_load`, with each
/// area the trapezoidal integral of ΔR/R over strain along its branch.
pub fn cycle_hysteresis<T: Scalar>(trace: &SyncedTrace<T>, c: &Cycle) -> Option<T> {
    let (load, unload) = split_branches(trace, c);
    let a_load = trapezoid(&load.strain, &load.response);
    let a_unload = trapezoid(&unload.strain, &unload.response);
    (a_load > T::zero()).then(|| T::lit(100.0) * (a_load - a_unload).abs() / a_load)
}

/// Mean per-cycle hysteresis in percent.
pub fn hysteresis_percent<T: Scalar>(trace: &SyncedTrace<T>, cycles: &[Cycle]) -> Result<T> {
    if cycles.is_empty() {
        return Err(Error::NoCyclesFound);
    }
    let per_cycle = cycles
        .iter()
        .enumerate()
        .map(|(k, c)| cycle_hysteresis(trace, c).ok_or(Error::ZeroLoadingArea { cycle: k }))
        .collect::<Result<Vec<T>>>()?;
    Ok(per_cycle.iter().copied().sum::<T>() / T::from_count(per_cycle.len()))
}

/// Relative drift rates, percent per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DriftRates<T> {
    pub baseline_pct_per_cycle: T,
    pub peak_pct_per_cycle: T,
}

fn relative_trend<T: Scalar>(series: &[T]) -> Result<T> {
    let k: Vec<T> = (0..series.len()).map(T::from_count).collect();
    let fit = ols(&k, series).ok_or(Error::TooFewCycles {
        needed: 3,
        got: series.len(),
    })?;
    if !(fit.intercept > T::zero()) {
        return Err(Error::NonPositiveIntercept);
    }
    Ok(T::lit(100.0) * fit.slope / fit.intercept)
}

/// Least-squares trend of baseline and peak resistance against cycle index,
/// normalized by the fitted intercept.
pub fn drift_rates<T: Scalar>(extrema: &[CycleExtrema<T>]) -> Result<DriftRates<T>> {
    if extrema.len() < 3 {
        return Err(Error::TooFewCycles {
            needed: 3,
            got: extrema.len(),
        });
    }
    let base: Vec<T> = extrema.iter().map(|e| e.baseline_r).collect();
    let peak: Vec<T> = extrema.iter().map(|e| e.peak_r).collect();
    Ok(DriftRates {
        baseline_pct_per_cycle: relative_trend(&base)?,
        peak_pct_per_cycle: relative_trend(&peak)?,
    })
}

/// Locates mechanical or electrical failure in a monotonic stretch and the
/// extent of the linear ΔR/R-strain region before it.
pub fn failure_analysis<T: Scalar>(
    trace: &SyncedTrace<T>,
    cfg: &MetricsConfig<T>,
) -> Result<FailureReport<T>> {
    cfg.validate()?;
    if !trace.has_force() {
        return Err(Error::MissingForce);
    }
    let s = trace.samples();
    if let Some(i) = s.windows(2).position(|w| w[1].strain < w[0].strain) {
        return Err(Error::NonMonotonicStrain { index: i + 1 });
    }
    let force = |i: usize| s[i].force.expect("force checked above");

    let mut running_max = T::neg_infinity();
    let mut mechanical = None;
    for i in 0..s.len() {
        let f = force(i);
        if running_max > cfg.force_floor_n && f < (T::one() - cfg.force_drop_frac) * running_max {
            mechanical = Some(i);
            break;
        }
        running_max = running_max.max(f);
    }
    let electrical = s
        .iter()
        .position(|x| x.open_circuit || x.d_r_over_r > cfg.open_ratio);

    let (failure_idx, failure_mode) = match (mechanical, electrical) {
        (Some(m), Some(e)) if e < m => (Some(e), FailureMode::Electrical),
        (Some(m), _) => (Some(m), FailureMode::Mechanical),
        (None, Some(e)) => (Some(e), FailureMode::Electrical),
        (None, None) => (None, FailureMode::None),
    };
    let failure_strain = s[failure_idx.unwrap_or(s.len() - 1)].strain;
    let intact = &s[..failure_idx.unwrap_or(s.len())];
    let intact: Vec<_> = intact.iter().filter(|x| !x.open_circuit).collect();

    let max_strain = intact
        .iter()
        .map(|x| x.strain)
        .fold(T::neg_infinity(), T::max);
    let slack = T::lit(1e-9);
    let mut linear_range_end = None;
    for k in 0.. {
        let candidate = cfg.linear_start + cfg.linear_step * T::from_count(k);
        if candidate > max_strain + slack {
            break;
        }
        let (x, y): (Vec<T>, Vec<T>) = intact
            .iter()
            .filter(|p| p.strain <= candidate + slack)
            .map(|p| (p.strain, p.d_r_over_r))
            .unzip();
        match ols(&x, &y) {
            Some(fit) if x.len() >= 3 && fit.r2 >= cfg.r2_floor => {
                linear_range_end = Some(candidate)
            }
            _ => break,
        }
    }
    let linear_range_end = linear_range_end.ok_or(Error::NoLinearRange)?;
    let max_force_in_linear_range = intact
        .iter()
        .filter(|p| p.strain <= linear_range_end + slack)
        .filter_map(|p| p.force)
        .fold(T::neg_infinity(), T::max);

    Ok(FailureReport {
        failure_strain,
        failure_mode,
        linear_range_end,
        max_force_in_linear_range,
    })
}

/// Composes the cyclic metrics from precomputed segmentation products.
pub fn build_report<T: Scalar>(
    mc: &MidpointCurve<T>,
    trace: &SyncedTrace<T>,
    cycles: &[Cycle],
    extrema: &[CycleExtrema<T>],
    cfg: &MetricsConfig<T>,
) -> Result<MetricsReport<T>> {
    let (gauge_factor, linearity_r2) = fit_midpoint(mc, cfg.fit_intercept)?;
    let hysteresis_pct = hysteresis_percent(trace, cycles)?;
    let drift = drift_rates(extrema)?;
    Ok(MetricsReport {
        gauge_factor,
        linearity_r2,
        hysteresis_pct,
        baseline_drift_pct_per_cycle: drift.baseline_pct_per_cycle,
        peak_drift_pct_per_cycle: drift.peak_pct_per_cycle,
        n_cycles: cycles.len(),
    })
}

/// Everything a cyclic analysis produces, kept together for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicAnalysis<T> {
    pub cycles: Vec<Cycle>,
    pub midpoint: MidpointCurve<T>,
    pub extrema: Vec<CycleExtrema<T>>,
    pub report: MetricsReport<T>,
}

/// Segment, average and score a synchronized cyclic trace.
pub fn analyze_cyclic<T: Scalar>(
    trace: &SyncedTrace<T>,
    seg: &SegmentConfig<T>,
    n_bins: usize,
    cfg: &MetricsConfig<T>,
) -> Result<CyclicAnalysis<T>> {
    let cycles = segment_cycles(trace, seg)?;
    let midpoint = midpoint_curve(trace, &cycles, n_bins)?;
    let extrema = per_cycle_extrema(trace, &cycles);
    let report = build_report(&midpoint, trace, &cycles, &extrema, cfg)?;
    Ok(CyclicAnalysis {
        cycles,
        midpoint,
        extrema,
        report,
    })
}

//! Alignment of the resistance and tensile streams on one timebase.
//!
//! The resistance timebase is the master: displacement and force are
//! linearly interpolated onto it, resistance is never resampled.

use std::io::{self, Write};

use serde::Serialize;

use crate::ingest::{
    baseline_resistance, ResistanceTrace, TensileTrace, TestConfig, OPEN_CIRCUIT_TOKEN,
};
use crate::numeric::interp;
use crate::{Error, Result, Scalar};

pub const SYNCED_HEADER: &str = "t_s,strain,dR_over_R,force_N";

/// Minimum shared time span required to synchronize two traces.
const MIN_OVERLAP_S: f64 = 1.0;
/// Relative tolerance on sample spacing.
const SPACING_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SyncedSample<T> {
    pub t: T,
    /// Dimensionless engineering strain.
    pub strain: T,
    /// `(R - R0) / R0`; `+inf` at open-circuit samples.
    pub d_r_over_r: T,
    pub force: Option<T>,
    pub open_circuit: bool,
}

impl<T: Scalar> SyncedSample<T> {
    pub fn new(t: T, strain: T, d_r_over_r: T, force: Option<T>) -> Self {
        Self {
            t,
            strain,
            d_r_over_r,
            force,
            open_circuit: false,
        }
    }
}

/// Uniformly sampled strain / ΔR/R / force series.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SyncedTrace<T> {
    samples: Vec<SyncedSample<T>>,
    r0: T,
    gauge_length_mm: T,
}

impl<T: Scalar> SyncedTrace<T> {
    pub fn new(samples: Vec<SyncedSample<T>>, r0: T, gauge_length_mm: T) -> Result<Self> {
        if !(r0 > T::zero()) {
            return Err(Error::invalid("r0", "must be > 0"));
        }
        if !(gauge_length_mm > T::zero()) {
            return Err(Error::invalid("gauge_length_mm", "must be > 0"));
        }
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        check_uniform(&samples)?;
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            if !s.strain.is_finite() || (!s.open_circuit && !s.d_r_over_r.is_finite()) {
                return Err(Error::NonFiniteValue { row });
            }
            if s.strain < T::zero() {
                return Err(Error::invalid("strain", format!("negative at sample {i}")));
            }
        }
        Ok(Self {
            samples,
            r0,
            gauge_length_mm,
        })
    }

    pub fn samples(&self) -> &[SyncedSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn gauge_length_mm(&self) -> T {
        self.gauge_length_mm
    }

    pub fn has_force(&self) -> bool {
        self.samples.iter().all(|s| s.force.is_some())
    }

    pub fn strains(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.strain).collect()
    }

    /// Absolute resistance of sample `i`, `None` when open circuit.
    pub fn resistance(&self, i: usize) -> Option<T> {
        let s = &self.samples[i];
        (!s.open_circuit).then(|| self.r0 * (T::one() + s.d_r_over_r))
    }

    /// Same samples with ΔR/R replaced by `f(ΔR/R)`.
    pub fn map_response(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| SyncedSample {
                d_r_over_r: if s.open_circuit {
                    s.d_r_over_r
                } else {
                    f(s.d_r_over_r)
                },
                ..*s
            })
            .collect();
        Self::new(samples, self.r0, self.gauge_length_mm)
    }
}

fn check_uniform<T: Scalar>(samples: &[SyncedSample<T>]) -> Result<()> {
    let n = samples.len();
    let span = samples[n - 1].t - samples[0].t;
    let dt = span / T::from_count(n - 1);
    if !(dt > T::zero()) {
        return Err(Error::NonMonotonicTime { row: 2 });
    }
    // widen for narrow scalars, whose timestamps cannot resolve 1e-9 of dt
    let t_scale = samples[0].t.abs().max(samples[n - 1].t.abs());
    let tol = T::lit(SPACING_RTOL).max(T::lit(4.0) * T::epsilon() * t_scale / dt);
    for (i, w) in samples.windows(2).enumerate() {
        let step = w[1].t - w[0].t;
        if !(step > T::zero()) {
            return Err(Error::NonMonotonicTime { row: i + 2 });
        }
        if ((step - dt) / dt).abs() > tol {
            return Err(Error::NonUniformTimebase { index: i + 1 });
        }
    }
    Ok(())
}

fn relative_change<T: Scalar>(r: Option<T>, r0: T) -> (T, bool) {
    match r {
        Some(r) => ((r - r0) / r0, false),
        None => (T::infinity(), true),
    }
}

/// Interpolates tensile data onto the resistance timebase over the shared
/// time span and derives strain and ΔR/R.
///
/// Zero strain is taken at the minimum displacement of the tensile trace.
pub fn synchronize<T: Scalar>(
    r: &ResistanceTrace<T>,
    ten: &TensileTrace<T>,
    cfg: &TestConfig<T>,
) -> Result<SyncedTrace<T>> {
    cfg.validate()?;
    if ten.len() < 2 {
        return Err(Error::DegenerateTensileTrace);
    }
    let ts: Vec<T> = ten
        .samples()
        .iter()
        .map(|s| s.t + cfg.time_offset_s)
        .collect();
    let disp: Vec<T> = ten.samples().iter().map(|s| s.displacement).collect();
    let force: Option<Vec<T>> = ten.samples().iter().map(|s| s.force).collect();
    let d_min = disp.iter().copied().fold(T::infinity(), T::min);

    let rs = r.samples();
    let lo = rs[0].t.max(ts[0]);
    let hi = rs[rs.len() - 1].t.min(ts[ts.len() - 1]);
    if !(hi - lo >= T::lit(MIN_OVERLAP_S)) {
        return Err(Error::NoOverlap {
            min_s: MIN_OVERLAP_S,
        });
    }
    let r0 = baseline_resistance(r, cfg)?;

    let samples = rs
        .iter()
        .filter(|s| s.t >= lo && s.t <= hi)
        .map(|s| {
            let d = interp(&ts, &disp, s.t).expect("sample inside tensile span");
            let f = force.as_ref().and_then(|fv| interp(&ts, fv, s.t));
            let (d_r_over_r, open_circuit) = relative_change(s.reading.ohms(), r0);
            SyncedSample {
                t: s.t,
                strain: (d - d_min) / cfg.gauge_length_mm,
                d_r_over_r,
                force: f,
                open_circuit,
            }
        })
        .collect();
    SyncedTrace::new(samples, r0, cfg.gauge_length_mm)
}

/// ΔR/R of a resistance-only recording (wearable use, no tensile tester).
/// Strain is reported as zero and force as absent.
pub fn normalize_resistance<T: Scalar>(
    r: &ResistanceTrace<T>,
    cfg: &TestConfig<T>,
) -> Result<SyncedTrace<T>> {
    cfg.validate()?;
    let r0 = baseline_resistance(r, cfg)?;
    let samples = r
        .samples()
        .iter()
        .map(|s| {
            let (d_r_over_r, open_circuit) = relative_change(s.reading.ohms(), r0);
            SyncedSample {
                t: s.t,
                strain: T::zero(),
                d_r_over_r,
                force: None,
                open_circuit,
            }
        })
        .collect();
    SyncedTrace::new(samples, r0, cfg.gauge_length_mm)
}

/// Strain series of a tensile trace on its own timebase.
pub fn strain_only<T: Scalar>(ten: &TensileTrace<T>, cfg: &TestConfig<T>) -> Result<Vec<(T, T)>> {
    cfg.validate()?;
    if ten.len() < 2 {
        return Err(Error::DegenerateTensileTrace);
    }
    let d_min = ten
        .samples()
        .iter()
        .map(|s| s.displacement)
        .fold(T::infinity(), T::min);
    Ok(ten
        .samples()
        .iter()
        .map(|s| (s.t, (s.displacement - d_min) / cfg.gauge_length_mm))
        .collect())
}

pub fn write_synced_csv<T: Scalar, W: Write>(mut w: W, trace: &SyncedTrace<T>) -> io::Result<()> {
    writeln!(w, "{SYNCED_HEADER}")?;
    for s in trace.samples() {
        write!(w, "{},{},", s.t, s.strain)?;
        if s.open_circuit {
            write!(w, "{OPEN_CIRCUIT_TOKEN},")?;
        } else {
            write!(w, "{},", s.d_r_over_r)?;
        }
        match s.force {
            Some(f) => writeln!(w, "{f}")?,
            None => writeln!(w)?,
        }
    }
    Ok(())
}

//! Segmentation of a cyclic test into loading-unloading cycles and the
//! cycle-averaged midpoint curve.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::numeric::{interp, mean_and_std, median};
use crate::sync::SyncedTrace;
use crate::{Error, Result, Scalar};

/// Peak-detection thresholds, all relative to the global strain range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct SegmentConfig<T> {
    /// Minimum peak prominence as a fraction of the strain range.
    pub prominence_frac: T,
    /// Minimum peak spacing as a fraction of the median peak spacing.
    pub min_separation_frac: T,
    /// A valley must lie within this fraction of the range above the minimum.
    pub valley_tol_frac: T,
}

impl<T: Scalar> Default for SegmentConfig<T> {
    fn default() -> Self {
        Self {
            prominence_frac: T::lit(0.5),
            min_separation_frac: T::lit(0.25),
            valley_tol_frac: T::lit(0.1),
        }
    }
}

impl<T: Scalar> SegmentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v <= T::one();
        if !unit(self.prominence_frac) {
            return Err(Error::invalid("prominence_frac", "must be in (0, 1]"));
        }
        if !(self.min_separation_frac >= T::zero() && self.min_separation_frac < T::one()) {
            return Err(Error::invalid("min_separation_frac", "must be in [0, 1)"));
        }
        if !unit(self.valley_tol_frac) {
            return Err(Error::invalid("valley_tol_frac", "must be in (0, 1]"));
        }
        Ok(())
    }
}

/// One valley -> peak -> valley excursion, as indices into a [`SyncedTrace`].
///
/// Consecutive cycles share their boundary valley sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub start_idx: usize,
    pub peak_idx: usize,
    pub end_idx: usize,
}

/// A branch of the loop with strictly increasing strain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Branch<T> {
    pub strain: Vec<T>,
    pub response: Vec<T>,
}

impl<T: Scalar> Branch<T> {
    pub fn len(&self) -> usize {
        self.strain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strain.is_empty()
    }

    pub fn at(&self, strain: T) -> Option<T> {
        interp(&self.strain, &self.response, strain)
    }

    /// Builds a branch from samples in traversal order, keeping the first of
    /// any run whose strain does not increase.
    fn from_ordered(points: impl Iterator<Item = (T, T)>) -> Self {
        let mut b = Branch {
            strain: Vec::new(),
            response: Vec::new(),
        };
        for (s, r) in points {
            if b.strain.last().is_none_or(|&last| s > last) {
                b.strain.push(s);
                b.response.push(r);
            }
        }
        b
    }
}

/// Strain maxima whose prominence exceeds `min_prominence`, plateau tops
/// reported at their first sample.
fn prominent_peaks<T: Scalar>(s: &[T], min_prominence: T) -> Vec<usize> {
    let n = s.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if s[i] > s[i - 1] {
            let mut j = i;
            while j + 1 < n && s[j + 1] == s[i] {
                j += 1;
            }
            if j + 1 < n && s[j + 1] < s[i] && prominence(s, i, j) >= min_prominence {
                peaks.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height of the peak plateau `[first, last]` above the higher of its two
/// bases; each base is the lowest point before the signal climbs above the peak.
fn prominence<T: Scalar>(s: &[T], first: usize, last: usize) -> T {
    let h = s[first];
    let mut left_min = h;
    for &v in s[..first].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &s[last + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Drops peaks closer than `min_distance` samples to a higher kept peak.
fn enforce_separation<T: Scalar>(s: &[T], peaks: Vec<usize>, min_distance: usize) -> Vec<usize> {
    if min_distance <= 1 {
        return peaks;
    }
    let mut by_height = peaks.clone();
    by_height.sort_by(|&a, &b| {
        s[b].partial_cmp(&s[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for p in by_height {
        if kept.iter().all(|&k| k.abs_diff(p) >= min_distance) {
            kept.push(p);
        }
    }
    kept.sort_unstable();
    kept
}

fn argmin<T: Scalar>(s: &[T], lo: usize, hi: usize) -> usize {
    (lo..=hi).fold(lo, |best, i| if s[i] < s[best] { i } else { best })
}

fn argmax<T: Scalar>(s: &[T], lo: usize, hi: usize) -> usize {
    (lo..=hi).fold(lo, |best, i| if s[i] > s[best] { i } else { best })
}

/// Splits the strain signal into valley -> peak -> valley cycles.
pub fn segment_cycles<T: Scalar>(
    trace: &SyncedTrace<T>,
    cfg: &SegmentConfig<T>,
) -> Result<Vec<Cycle>> {
    cfg.validate()?;
    let s = trace.strains();
    let lo = s.iter().copied().fold(T::infinity(), T::min);
    let hi = s.iter().copied().fold(T::neg_infinity(), T::max);
    let range = hi - lo;
    if !(range > T::zero()) {
        return Err(Error::NoCyclesFound);
    }

    let mut peaks = prominent_peaks(&s, cfg.prominence_frac * range);
    if peaks.len() >= 2 {
        let gaps: Vec<T> = peaks
            .windows(2)
            .map(|w| T::from_count(w[1] - w[0]))
            .collect();
        let period = median(&gaps).unwrap_or(T::zero());
        let min_distance = (period * cfg.min_separation_frac).to_usize().unwrap_or(0);
        peaks = enforce_separation(&s, peaks, min_distance);
    }

    let valley_ceiling = lo + cfg.valley_tol_frac * range;
    let last = s.len() - 1;
    let mut cycles = Vec::with_capacity(peaks.len());
    for (j, &p) in peaks.iter().enumerate() {
        let before = if j == 0 { 0 } else { peaks[j - 1] };
        let after = peaks.get(j + 1).copied().unwrap_or(last);
        let start = argmin(&s, before, p);
        let end = argmin(&s, p, after);
        if start >= p || end <= p || s[start] > valley_ceiling || s[end] > valley_ceiling {
            continue;
        }
        cycles.push(Cycle {
            start_idx: start,
            peak_idx: argmax(&s, start, end),
            end_idx: end,
        });
    }
    if cycles.is_empty() {
        return Err(Error::NoCyclesFound);
    }
    Ok(cycles)
}

/// Loading branch `[start, peak]` and unloading branch `[peak, end]` (the
/// latter reversed to ascending strain) as (strain, ΔR/R) pairs.
/// Open-circuit samples are excluded.
pub fn split_branches<T: Scalar>(trace: &SyncedTrace<T>, c: &Cycle) -> (Branch<T>, Branch<T>) {
    let s = trace.samples();
    let valid = |x: &&crate::sync::SyncedSample<T>| !x.open_circuit;
    let loading = Branch::from_ordered(
        s[c.start_idx..=c.peak_idx]
            .iter()
            .filter(valid)
            .map(|x| (x.strain, x.d_r_over_r)),
    );
    let unloading = Branch::from_ordered(
        s[c.peak_idx..=c.end_idx]
            .iter()
            .rev()
            .filter(valid)
            .map(|x| (x.strain, x.d_r_over_r)),
    );
    (loading, unloading)
}

/// Cycle-averaged midline of the hysteresis loop on a common strain grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct MidpointCurve<T> {
    pub strain_grid: Vec<T>,
    pub mean_mid: Vec<T>,
    pub std_mid: Vec<T>,
    pub n_cycles: usize,
}

/// Mean ± population std of the loading and unloading branches on the
/// same grid as the midpoint curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LoopEnvelope<T> {
    pub strain_grid: Vec<T>,
    pub loading_mean: Vec<T>,
    pub loading_std: Vec<T>,
    pub unloading_mean: Vec<T>,
    pub unloading_std: Vec<T>,
}

struct GriddedLoops<T> {
    grid: Vec<T>,
    /// `[cycle][grid point]`
    loading: Vec<Vec<T>>,
    unloading: Vec<Vec<T>>,
}

fn grid_loops<T: Scalar>(
    trace: &SyncedTrace<T>,
    cycles: &[Cycle],
    n_bins: usize,
) -> Result<GriddedLoops<T>> {
    if cycles.is_empty() {
        return Err(Error::NoCyclesFound);
    }
    if n_bins < 2 {
        return Err(Error::invalid("n_bins", "must be >= 2"));
    }
    let branches: Vec<(Branch<T>, Branch<T>)> =
        cycles.iter().map(|c| split_branches(trace, c)).collect();
    if branches.iter().any(|(l, u)| l.len() < 2 || u.len() < 2) {
        return Err(Error::DegenerateGrid);
    }
    // no extrapolation: the grid spans only strain every branch covers
    let lo = branches
        .iter()
        .flat_map(|(l, u)| [l.strain[0], u.strain[0]])
        .fold(T::zero(), T::max);
    let hi = branches
        .iter()
        .flat_map(|(l, u)| [l.strain[l.len() - 1], u.strain[u.len() - 1]])
        .fold(T::infinity(), T::min);
    if !(hi > lo) {
        return Err(Error::DegenerateGrid);
    }
    let step = (hi - lo) / T::from_count(n_bins - 1);
    let grid: Vec<T> = (0..n_bins)
        .map(|i| {
            if i == n_bins - 1 {
                hi
            } else {
                lo + step * T::from_count(i)
            }
        })
        .collect();
    let on_grid = |b: &Branch<T>| -> Vec<T> {
        grid.iter()
            .map(|&g| b.at(g).expect("grid lies inside every branch"))
            .collect()
    };
    let (loading, unloading) = branches
        .iter()
        .map(|(l, u)| (on_grid(l), on_grid(u)))
        .unzip();
    Ok(GriddedLoops {
        grid,
        loading,
        unloading,
    })
}

fn column_stats<T: Scalar>(rows: &[Vec<T>], j: usize) -> (T, T) {
    let col: Vec<T> = rows.iter().map(|r| r[j]).collect();
    mean_and_std(&col)
}

/// Averages `(loading + unloading) / 2` over all cycles on `n_bins` equally
/// spaced strains, from the lowest strain covered by every branch up to the
/// smallest per-cycle peak strain.
pub fn midpoint_curve<T: Scalar>(
    trace: &SyncedTrace<T>,
    cycles: &[Cycle],
    n_bins: usize,
) -> Result<MidpointCurve<T>> {
    let g = grid_loops(trace, cycles, n_bins)?;
    let half = T::lit(0.5);
    let mids: Vec<Vec<T>> = g
        .loading
        .iter()
        .zip(&g.unloading)
        .map(|(l, u)| l.iter().zip(u).map(|(&a, &b)| (a + b) * half).collect())
        .collect();
    let (mean_mid, std_mid) = (0..g.grid.len()).map(|j| column_stats(&mids, j)).unzip();
    Ok(MidpointCurve {
        strain_grid: g.grid,
        mean_mid,
        std_mid,
        n_cycles: cycles.len(),
    })
}

pub fn loop_envelope<T: Scalar>(
    trace: &SyncedTrace<T>,
    cycles: &[Cycle],
    n_bins: usize,
) -> Result<LoopEnvelope<T>> {
    let g = grid_loops(trace, cycles, n_bins)?;
    let n = g.grid.len();
    let (loading_mean, loading_std) = (0..n).map(|j| column_stats(&g.loading, j)).unzip();
    let (unloading_mean, unloading_std) = (0..n).map(|j| column_stats(&g.unloading, j)).unzip();
    Ok(LoopEnvelope {
        strain_grid: g.grid,
        loading_mean,
        loading_std,
        unloading_mean,
        unloading_std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CycleExtrema<T> {
    /// Resistance at the trailing valley of the cycle.
    pub baseline_r: T,
    /// Maximum resistance within the cycle.
    pub peak_r: T,
}

/// Per-cycle baseline and peak resistance. The baseline is read at the
/// trailing valley; if that sample is open circuit the nearest earlier
/// valid sample of the cycle is used.
pub fn per_cycle_extrema<T: Scalar>(
    trace: &SyncedTrace<T>,
    cycles: &[Cycle],
) -> Vec<CycleExtrema<T>> {
    cycles
        .iter()
        .filter_map(|c| {
            let baseline_r = (c.start_idx..=c.end_idx)
                .rev()
                .find_map(|i| trace.resistance(i))?;
            let peak_r = (c.start_idx..=c.end_idx)
                .filter_map(|i| trace.resistance(i))
                .fold(T::neg_infinity(), T::max);
            Some(CycleExtrema { baseline_r, peak_r })
        })
        .collect()
}

pub fn write_midpoint_csv<T: Scalar, W: Write>(mut w: W, mc: &MidpointCurve<T>) -> io::Result<()> {
    writeln!(w, "strain,mean_mid,std_mid")?;
    for ((s, m), sd) in mc.strain_grid.iter().zip(&mc.mean_mid).zip(&mc.std_mid) {
        writeln!(w, "{s},{m},{sd}")?;
    }
    Ok(())
}

pub fn write_envelope_csv<T: Scalar, W: Write>(mut w: W, env: &LoopEnvelope<T>) -> io::Result<()> {
    writeln!(
        w,
        "strain,loading_mean,loading_std,unloading_mean,unloading_std"
    )?;
    for j in 0..env.strain_grid.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            env.strain_grid[j],
            env.loading_mean[j],
            env.loading_std[j],
            env.unloading_mean[j],
            env.unloading_std[j]
        )?;
    }
    Ok(())
}

pub fn write_extrema_csv<T: Scalar, W: Write>(
    mut w: W,
    extrema: &[CycleExtrema<T>],
) -> io::Result<()> {
    writeln!(w, "cycle,baseline_ohm,peak_ohm")?;
    for (k, e) in extrema.iter().enumerate() {
        writeln!(w, "{k},{},{}", e.baseline_r, e.peak_r)?;
    }
    Ok(())
}

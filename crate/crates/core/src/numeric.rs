//! Small numerical kernels: least squares, trapezoidal integration,
//! linear interpolation and order statistics.

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Straight-line least-squares fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r2: T,
}

impl<T: Scalar> LinearFit<T> {
    pub fn predict(&self, x: T) -> T {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares with a free intercept.
///
/// Returns `None` when fewer than two points are given or `x` has zero
/// spread. A perfectly flat `y` yields `r2 = 1` since the fit is exact.
pub fn ols<T: Scalar>(x: &[T], y: &[T]) -> Option<LinearFit<T>> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = T::from_count(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if !(sxx > T::zero()) || x.iter().all(|&xi| xi == x[0]) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: T = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let r2 = if syy > T::zero() {
        clamp01(T::one() - ss_res / syy)
    } else {
        T::one()
    };
    Some(LinearFit {
        slope,
        intercept,
        r2,
    })
}

/// Least squares constrained through the origin.
///
/// R² is the centered form `1 - SS_res / SS_tot`, clamped to `[0, 1]`; it is
/// defined as 0 when `y` has no spread.
pub fn ols_through_origin<T: Scalar>(x: &[T], y: &[T]) -> Option<LinearFit<T>> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let sxx: T = x.iter().map(|&v| v * v).sum();
    if !(sxx > T::zero()) {
        return None;
    }
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
    let slope = sxy / sxx;
    let my = y.iter().copied().sum::<T>() / T::from_count(y.len());
    let ss_tot: T = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let ss_res: T = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (b - slope * a) * (b - slope * a))
        .sum();
    let r2 = if ss_tot > T::zero() {
        clamp01(T::one() - ss_res / ss_tot)
    } else {
        T::zero()
    };
    Some(LinearFit {
        slope,
        intercept: T::zero(),
        r2,
    })
}

fn clamp01<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Composite trapezoidal rule over paired samples. Fewer than two points
/// integrate to zero.
pub fn trapezoid<T: Scalar>(x: &[T], y: &[T]) -> T {
    let half = T::lit(0.5);
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| half * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Median of a non-empty slice; the mean of the middle pair for even counts.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * T::lit(0.5)
    })
}

/// Linear interpolation on strictly increasing knots.
///
/// Returns `None` outside `[xs[0], xs[last]]`; at a knot the knot value is
/// returned exactly.
pub fn interp<T: Scalar>(xs: &[T], ys: &[T], x: T) -> Option<T> {
    let n = xs.len();
    if n == 0 || n != ys.len() || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    // first knot strictly greater than x
    let hi = xs.partition_point(|&k| k <= x);
    if hi == 0 {
        return None;
    }
    let lo = hi - 1;
    if hi == n || xs[lo] == x {
        return Some(ys[lo]);
    }
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Some(ys[lo] + (ys[hi] - ys[lo]) * w)
}

/// Mean and population standard deviation.
pub fn mean_and_std<T: Scalar>(values: &[T]) -> (T, T) {
    if values.is_empty() {
        return (T::nan(), T::nan());
    }
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

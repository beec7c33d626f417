//! Synthetic sensor with known ground truth.
//!
//! The response is a midline that is linear up to `eps_linear_end` and
//! continues with slope `gf_saturated` beyond it. Cyclic loops add a
//! lens-shaped half-width `δ(ε) = 4·delta_max·u(1 - u)`, `u = ε / ε_peak`,
//! above the midline on loading and below it on unloading. That loop has
//! the closed-form hysteresis given by [`lens_loop_hysteresis_pct`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::calibration::{AngleModel, AngleTrace};
use crate::ingest::{Reading, ResistanceSample, ResistanceTrace, TensileSample, TensileTrace};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailMode {
    Mechanical,
    Electrical,
}

/// Ground-truth sensor description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct SensorParams<T> {
    /// Relaxed resistance, ohms.
    pub r0: T,
    pub gf: T,
    /// Peak half-width of the hysteresis loop in ΔR/R units.
    pub delta_max: T,
    /// Fractional baseline growth per cycle.
    pub baseline_drift: T,
    /// Fractional peak growth per cycle.
    pub peak_drift: T,
    pub eps_linear_end: T,
    /// Midline slope past `eps_linear_end`.
    pub gf_saturated: T,
    pub eps_fail: T,
    pub fail_mode: FailMode,
    /// Gaussian resistance noise, as a fraction of `r0`.
    pub noise_sigma: T,
    pub seed: u64,
    /// Tensile force at `eps_linear_end`, newtons.
    pub force_at_linear_end_n: T,
    /// Loading branch above the unloading branch (the usual sign).
    pub loading_above: bool,
}

impl<T: Scalar> Default for SensorParams<T> {
    fn default() -> Self {
        let gf = T::lit(31.42);
        Self {
            r0: T::lit(2.5e6),
            gf,
            delta_max: delta_max_for_hysteresis(T::lit(22.9), gf, T::lit(0.5)),
            baseline_drift: T::lit(0.00135),
            peak_drift: T::lit(0.00236),
            eps_linear_end: T::lit(0.6),
            gf_saturated: T::lit(-2.0),
            eps_fail: T::lit(1.2),
            fail_mode: FailMode::Mechanical,
            noise_sigma: T::zero(),
            seed: 0,
            force_at_linear_end_n: T::lit(15.0),
            loading_above: true,
        }
    }
}

impl<T: Scalar> SensorParams<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("r0", self.r0),
            ("gf", self.gf),
            ("delta_max", self.delta_max),
            ("baseline_drift", self.baseline_drift),
            ("peak_drift", self.peak_drift),
            ("eps_linear_end", self.eps_linear_end),
            ("gf_saturated", self.gf_saturated),
            ("eps_fail", self.eps_fail),
            ("noise_sigma", self.noise_sigma),
            ("force_at_linear_end_n", self.force_at_linear_end_n),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(name, "must be finite"));
        }
        if !(self.r0 > T::zero()) {
            return Err(Error::invalid("r0", "must be > 0"));
        }
        if !(self.eps_linear_end > T::zero()) {
            return Err(Error::invalid("eps_linear_end", "must be > 0"));
        }
        if self.eps_linear_end > self.eps_fail {
            return Err(Error::invalid("eps_linear_end", "must not exceed eps_fail"));
        }
        if self.noise_sigma < T::zero() {
            return Err(Error::invalid("noise_sigma", "must be >= 0"));
        }
        if self.delta_max < T::zero() {
            return Err(Error::invalid("delta_max", "must be >= 0"));
        }
        if !(self.force_at_linear_end_n > T::zero()) {
            return Err(Error::invalid("force_at_linear_end_n", "must be > 0"));
        }
        Ok(())
    }
}

/// Test-machine protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct ProtocolParams<T> {
    /// Cyclic amplitude as strain.
    pub peak_strain: T,
    pub n_cycles: usize,
    pub crosshead_rate_mm_min: T,
    pub gauge_length_mm: T,
    pub sample_rate_hz: T,
    /// Relaxed hold at zero strain before the first cycle or ramp.
    pub rest_s: T,
    /// Strain the failure ramp continues past `eps_fail`.
    pub failure_overrun: T,
}

impl<T: Scalar> Default for ProtocolParams<T> {
    fn default() -> Self {
        Self {
            peak_strain: T::lit(0.5),
            n_cycles: 80,
            crosshead_rate_mm_min: T::lit(60.0),
            gauge_length_mm: T::lit(100.0),
            sample_rate_hz: T::lit(10.0),
            rest_s: T::lit(5.0),
            failure_overrun: T::lit(0.1),
        }
    }
}

impl<T: Scalar> ProtocolParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("peak_strain", self.peak_strain),
            ("crosshead_rate_mm_min", self.crosshead_rate_mm_min),
            ("gauge_length_mm", self.gauge_length_mm),
            ("sample_rate_hz", self.sample_rate_hz),
        ];
        if let Some((name, _)) = positive
            .iter()
            .find(|(_, v)| !(*v > T::zero() && v.is_finite()))
        {
            return Err(Error::invalid(name, "must be > 0"));
        }
        if self.n_cycles == 0 {
            return Err(Error::invalid("n_cycles", "must be > 0"));
        }
        if !(self.rest_s >= T::zero()) {
            return Err(Error::invalid("rest_s", "must be >= 0"));
        }
        if !(self.failure_overrun >= T::zero()) {
            return Err(Error::invalid("failure_overrun", "must be >= 0"));
        }
        Ok(())
    }

    /// Duration of one triangular strain cycle in seconds.
    pub fn cycle_period_s(&self) -> T {
        T::lit(2.0) * self.peak_strain * self.gauge_length_mm / self.crosshead_rate_s()
    }

    fn crosshead_rate_s(&self) -> T {
        self.crosshead_rate_mm_min / T::lit(60.0)
    }
}

/// Piecewise-linear midline ΔR/R, continuous at `eps_linear_end`.
pub fn midline<T: Scalar>(params: &SensorParams<T>, strain: T) -> T {
    if strain <= params.eps_linear_end {
        params.gf * strain
    } else {
        params.gf * params.eps_linear_end + params.gf_saturated * (strain - params.eps_linear_end)
    }
}

/// Loop half-width at `strain` for a cycle peaking at `peak`.
pub fn half_width<T: Scalar>(delta_max: T, strain: T, peak: T) -> T {
    if !(peak > T::zero()) {
        return T::zero();
    }
    let u = strain / peak;
    T::lit(4.0) * delta_max * u * (T::one() - u)
}

/// Closed-form hysteresis (percent) of a lens loop around a linear midline:
/// `100 · (4/3)·δ·ε / (gf·ε²/2 + (2/3)·δ·ε)`.
pub fn lens_loop_hysteresis_pct<T: Scalar>(gf: T, delta_max: T, peak: T) -> T {
    let two_thirds = T::lit(2.0 / 3.0);
    let diff = T::lit(4.0 / 3.0) * delta_max * peak;
    let load = gf * peak * peak * T::lit(0.5) + two_thirds * delta_max * peak;
    T::lit(100.0) * diff / load
}

/// `delta_max` giving `hysteresis_pct` for a linear midline of slope `gf`
/// cycled to `peak`. Inverse of [`lens_loop_hysteresis_pct`].
pub fn delta_max_for_hysteresis<T: Scalar>(hysteresis_pct: T, gf: T, peak: T) -> T {
    let h = hysteresis_pct / T::lit(100.0);
    T::lit(3.0) * h * gf * peak / (T::lit(8.0) - T::lit(4.0) * h)
}

/// Smooth stiffening force law, `F(ε_lin)` equal to `force_at_linear_end_n`.
pub fn force_law<T: Scalar>(params: &SensorParams<T>, strain: T) -> T {
    let x = strain / params.eps_linear_end;
    params.force_at_linear_end_n * (T::lit(2.0 / 3.0) * x + T::lit(1.0 / 3.0) * x * x * x)
}

struct Noise {
    rng: ChaCha8Rng,
    dist: Option<Normal<f64>>,
}

impl Noise {
    fn new<T: Scalar>(params: &SensorParams<T>) -> Result<Self> {
        let sd = (params.noise_sigma * params.r0).as_f64();
        let dist = if sd > 0.0 {
            Some(Normal::new(0.0, sd).map_err(|e| Error::invalid("noise_sigma", e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            dist,
        })
    }

    fn sample<T: Scalar>(&mut self) -> T {
        match &self.dist {
            Some(d) => T::lit(d.sample(&mut self.rng)),
            None => T::zero(),
        }
    }
}

fn sample_count<T: Scalar>(duration: T, rate: T) -> usize {
    (duration * rate + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0)
        + 1
}

fn ohms<T: Scalar>(r: T) -> Result<Reading<T>> {
    if r > T::zero() {
        Ok(Reading::Ohms(r))
    } else {
        Err(Error::invalid(
            "noise_sigma",
            "noise drove resistance non-positive",
        ))
    }
}

/// Position inside the cyclic schedule: cycle index and phase in `(0, 1]`,
/// or `None` during the leading rest.
fn cycle_phase<T: Scalar>(t: T, rest: T, period: T, n_cycles: usize) -> Option<(usize, T)> {
    let pos = (t - rest) / period;
    let nearest = pos.round();
    let pos = if (pos - nearest).abs() < T::lit(1e-9) {
        nearest
    } else {
        pos
    };
    if pos <= T::zero() {
        return None;
    }
    // a valley sample closes the cycle before it
    let k = (pos.ceil().to_usize().unwrap_or(1) - 1).min(n_cycles - 1);
    Some((k, pos - T::from_count(k)))
}

/// Triangular strain cycling with a lens loop per cycle and affine
/// baseline and peak drift.
///
/// Cycle `k` reads `R = B_k + A_k · y`, `y` the loop branch value and
/// `B_k = r0·(1 + baseline_drift·k)`. `A_k` makes the cycle peak
/// `P₀·(1 + peak_drift·k)`; `P₀` is chosen so the mean of `A_k` over the
/// run equals `r0`, so a cycle-averaged analysis normalized by `r0` sees
/// slope `gf`. Without drift `P₀` is the drift-free peak `r0·(1 + midline(ε_peak))`.
pub fn simulate_cyclic<T: Scalar>(
    params: &SensorParams<T>,
    proto: &ProtocolParams<T>,
) -> Result<(ResistanceTrace<T>, TensileTrace<T>)> {
    params.validate()?;
    proto.validate()?;
    if proto.peak_strain > params.eps_fail {
        return Err(Error::invalid("peak_strain", "must not exceed eps_fail"));
    }
    let peak = proto.peak_strain;
    let m_peak = midline(params, peak);
    if !(m_peak > T::zero()) {
        return Err(Error::invalid(
            "gf",
            "midline at peak strain must be positive",
        ));
    }
    let r0 = params.r0;
    let k_mean = T::from_count(proto.n_cycles - 1) * T::lit(0.5);
    let p0 = r0 * (T::one() + m_peak + params.baseline_drift * k_mean)
        / (T::one() + params.peak_drift * k_mean);
    let base = |k: T| r0 * (T::one() + params.baseline_drift * k);
    let amp = |k: T| (p0 * (T::one() + params.peak_drift * k) - base(k)) / m_peak;
    for k in [0, proto.n_cycles - 1] {
        let (b, a) = (base(T::from_count(k)), amp(T::from_count(k)));
        if !(b > T::zero()) {
            return Err(Error::invalid(
                "baseline_drift",
                "baseline turns non-positive",
            ));
        }
        if !(a > T::zero()) {
            return Err(Error::invalid("peak_drift", "peak falls below baseline"));
        }
    }

    let period = proto.cycle_period_s();
    let n = sample_count(
        proto.rest_s + period * T::from_count(proto.n_cycles),
        proto.sample_rate_hz,
    );
    let sign = if params.loading_above {
        T::one()
    } else {
        -T::one()
    };
    let half = T::lit(0.5);
    let mut noise = Noise::new(params)?;
    let mut res = Vec::with_capacity(n);
    let mut ten = Vec::with_capacity(n);
    for i in 0..n {
        let t = T::from_count(i) / proto.sample_rate_hz;
        let (k, strain, y) = match cycle_phase(t, proto.rest_s, period, proto.n_cycles) {
            None => (0, T::zero(), T::zero()),
            Some((k, frac)) => {
                let loading = frac <= half;
                let strain = if loading {
                    T::lit(2.0) * frac * peak
                } else {
                    T::lit(2.0) * (T::one() - frac) * peak
                };
                let d = sign * half_width(params.delta_max, strain, peak);
                (
                    k,
                    strain,
                    midline(params, strain) + if loading { d } else { -d },
                )
            }
        };
        let kf = T::from_count(k);
        let r = base(kf) + amp(kf) * y + noise.sample();
        res.push(ResistanceSample {
            t,
            reading: ohms(r)?,
        });
        ten.push(TensileSample {
            t,
            displacement: strain * proto.gauge_length_mm,
            force: Some(force_law(params, strain)),
        });
    }
    Ok((ResistanceTrace::new(res)?, TensileTrace::new(ten)?))
}

/// Monotonic ramp from rest to `eps_fail + failure_overrun`.
///
/// Mechanical failure drops force to 5 % of its running maximum at the first
/// sample at or beyond `eps_fail` and keeps it there; electrical failure
/// reports an open circuit from that sample on while force keeps rising.
pub fn simulate_failure<T: Scalar>(
    params: &SensorParams<T>,
    proto: &ProtocolParams<T>,
) -> Result<(ResistanceTrace<T>, TensileTrace<T>)> {
    params.validate()?;
    proto.validate()?;
    let rate = proto.crosshead_rate_s() / proto.gauge_length_mm;
    let end_strain = params.eps_fail + proto.failure_overrun;
    let n = sample_count(proto.rest_s + end_strain / rate, proto.sample_rate_hz);
    let residual = T::lit(0.05);
    let mut noise = Noise::new(params)?;
    let mut running_max = T::zero();
    let mut res = Vec::with_capacity(n);
    let mut ten = Vec::with_capacity(n);
    for i in 0..n {
        let t = T::from_count(i) / proto.sample_rate_hz;
        let strain = ((t - proto.rest_s) * rate).max(T::zero());
        let failed = strain >= params.eps_fail;
        let r = params.r0 * (T::one() + midline(params, strain)) + noise.sample();
        let reading = match params.fail_mode {
            FailMode::Electrical if failed => Reading::OpenCircuit,
            _ => ohms(r)?,
        };
        let force = match params.fail_mode {
            FailMode::Mechanical if failed => residual * running_max,
            _ => {
                let f = force_law(params, strain);
                running_max = running_max.max(f);
                f
            }
        };
        res.push(ResistanceSample { t, reading });
        ten.push(TensileSample {
            t,
            displacement: strain * proto.gauge_length_mm,
            force: Some(force),
        });
    }
    Ok((ResistanceTrace::new(res)?, TensileTrace::new(ten)?))
}

/// Joint flexion protocol: a rest at 0° followed by raised-cosine flexions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct MotionParams<T> {
    pub peak_angle_deg: T,
    pub period_s: T,
    pub n_flexions: usize,
    pub rest_s: T,
    /// Meter rate for the resistance log.
    pub sample_rate_hz: T,
    /// Frame rate of the ground-truth angle log.
    pub truth_rate_hz: T,
    /// True angle per unit ΔR/R of the joint-sensor pairing.
    pub model_slope: T,
    pub model_intercept: T,
}

impl<T: Scalar> Default for MotionParams<T> {
    fn default() -> Self {
        Self {
            peak_angle_deg: T::lit(90.0),
            period_s: T::lit(4.0),
            n_flexions: 5,
            rest_s: T::lit(5.0),
            sample_rate_hz: T::lit(10.0),
            truth_rate_hz: T::lit(30.0),
            model_slope: T::lit(8.0),
            model_intercept: T::zero(),
        }
    }
}

impl<T: Scalar> MotionParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("peak_angle_deg", self.peak_angle_deg),
            ("period_s", self.period_s),
            ("sample_rate_hz", self.sample_rate_hz),
            ("truth_rate_hz", self.truth_rate_hz),
        ];
        if let Some((name, _)) = positive
            .iter()
            .find(|(_, v)| !(*v > T::zero() && v.is_finite()))
        {
            return Err(Error::invalid(name, "must be > 0"));
        }
        if self.peak_angle_deg > T::lit(crate::calibration::MAX_ANGLE_DEG) {
            return Err(Error::invalid("peak_angle_deg", "must be <= 180"));
        }
        if self.n_flexions == 0 {
            return Err(Error::invalid("n_flexions", "must be > 0"));
        }
        if !(self.rest_s >= T::zero()) {
            return Err(Error::invalid("rest_s", "must be >= 0"));
        }
        self.model()
            .validate()
            .map_err(|_| Error::invalid("model_slope", "must be finite and nonzero"))
    }

    pub fn model(&self) -> AngleModel<T> {
        AngleModel {
            slope: self.model_slope,
            intercept: self.model_intercept,
            fit_r2: T::one(),
        }
    }

    pub fn duration_s(&self) -> T {
        self.rest_s + self.period_s * T::from_count(self.n_flexions)
    }

    pub fn angle_at(&self, t: T) -> T {
        let s = t - self.rest_s;
        if s <= T::zero() || s >= self.period_s * T::from_count(self.n_flexions) {
            return T::zero();
        }
        let phase = T::lit(std::f64::consts::TAU) * s / self.period_s;
        self.peak_angle_deg * T::lit(0.5) * (T::one() - phase.cos())
    }

    /// Angle trace sampled at `rate_hz` over the whole protocol.
    pub fn profile(&self, rate_hz: T) -> Result<AngleTrace<T>> {
        self.validate()?;
        let n = sample_count(self.duration_s(), rate_hz);
        AngleTrace::from_pairs((0..n).map(|i| {
            let t = T::from_count(i) / rate_hz;
            (t, self.angle_at(t))
        }))
    }
}

/// Strain that the calibration `model` attributes to `angle`, assuming the
/// sensor's linear sensitivity. Clamped at zero.
pub fn strain_for_angle<T: Scalar>(params: &SensorParams<T>, model: &AngleModel<T>, angle: T) -> T {
    (model.inverse(angle) / params.gf).max(T::zero())
}

/// Resistance recorded while a joint follows `motion`.
///
/// Each angle is mapped to strain through the inverse calibration and then
/// through the sensor midline, so strains past `eps_linear_end` read low.
/// The loop half-width uses the largest strain of the motion as its peak;
/// rising strain takes the loading branch.
pub fn simulate_motion<T: Scalar>(
    params: &SensorParams<T>,
    motion: &AngleTrace<T>,
    model: &AngleModel<T>,
) -> Result<ResistanceTrace<T>> {
    params.validate()?;
    model.validate()?;
    if !(params.gf > T::zero()) {
        return Err(Error::invalid("gf", "must be > 0"));
    }
    let strains: Vec<T> = motion
        .samples()
        .iter()
        .map(|s| strain_for_angle(params, model, s.angle))
        .collect();
    let peak = strains.iter().copied().fold(T::zero(), T::max);
    let sign = if params.loading_above {
        T::one()
    } else {
        -T::one()
    };
    let mut noise = Noise::new(params)?;
    let mut prev = T::zero();
    let mut res = Vec::with_capacity(strains.len());
    for (s, &strain) in motion.samples().iter().zip(&strains) {
        let d = sign * half_width(params.delta_max, strain, peak);
        let y = midline(params, strain) + if strain >= prev { d } else { -d };
        prev = strain;
        let r = params.r0 * (T::one() + y) + noise.sample();
        res.push(ResistanceSample {
            t: s.t,
            reading: ohms(r)?,
        });
    }
    ResistanceTrace::new(res)
}

/// Static calibration points: noiseless midline ΔR/R at each angle.
pub fn calibration_points<T: Scalar>(
    params: &SensorParams<T>,
    model: &AngleModel<T>,
    angles: &[T],
) -> Vec<(T, T)> {
    angles
        .iter()
        .map(|&a| (midline(params, strain_for_angle(params, model, a)), a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midline_examples() {
        let p = SensorParams::<f64> {
            eps_linear_end: 0.6,
            gf_saturated: -2.0,
            ..SensorParams::default()
        };
        assert_eq!(midline(&p, 0.0), 0.0);
        assert!((midline(&p, 0.5) - 15.71).abs() < 1e-12);
        assert!((midline(&p, 0.7) - 18.652).abs() < 1e-12);
        // continuity at the knee
        assert!((midline(&p, 0.6) - midline(&p, 0.6 + 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn lens_closed_form_matches_fine_quadrature() {
        // independent midpoint-rule integration of both branches
        let (gf, peak) = (31.42, 0.5);
        let dm = delta_max_for_hysteresis(22.9, gf, peak);
        let n = 200_000;
        let h = peak / n as f64;
        let (mut load, mut unload) = (0.0, 0.0);
        for i in 0..n {
            let e = (i as f64 + 0.5) * h;
            let u = e / peak;
            let d = 4.0 * dm * u * (1.0 - u);
            load += (gf * e + d) * h;
            unload += (gf * e - d) * h;
        }
        let numeric = 100.0 * (load - unload) / load;
        assert!((numeric - 22.9).abs() < 1e-6, "{numeric}");
        assert!((lens_loop_hysteresis_pct(gf, dm, peak) - 22.9).abs() < 1e-12);
    }

    #[test]
    fn period_at_defaults() {
        assert_eq!(ProtocolParams::<f64>::default().cycle_period_s(), 100.0);
    }

    #[test]
    fn seed_reproducible() {
        let p = SensorParams::<f64> {
            noise_sigma: 0.002,
            seed: 7,
            ..SensorParams::default()
        };
        let proto = ProtocolParams {
            n_cycles: 3,
            ..ProtocolParams::default()
        };
        let a = simulate_cyclic(&p, &proto).unwrap();
        let b = simulate_cyclic(&p, &proto).unwrap();
        assert_eq!(a, b);
        let c = simulate_cyclic(&SensorParams { seed: 8, ..p }, &proto).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn loops_separate_by_twice_half_width() {
        let p = SensorParams::<f64> {
            baseline_drift: 0.0,
            peak_drift: 0.0,
            ..SensorParams::default()
        };
        let proto = ProtocolParams {
            n_cycles: 1,
            rest_s: 0.0,
            ..ProtocolParams::default()
        };
        let (r, ten) = simulate_cyclic(&p, &proto).unwrap();
        // sample j on loading mirrors sample 1000 - j on unloading
        for j in [50usize, 200, 250, 400, 499] {
            let up = r.samples()[j].reading.ohms().unwrap();
            let down = r.samples()[1000 - j].reading.ohms().unwrap();
            let e = ten.samples()[j].displacement / 100.0;
            let expect = 2.0 * half_width(p.delta_max, e, 0.5) * p.r0;
            assert!((up - down - expect).abs() < 1e-6 * p.r0, "j={j}");
        }
    }

    #[test]
    fn failure_force_budget() {
        let p = SensorParams::<f64>::default();
        assert!(force_law(&p, 0.6) < 20.0);
        let (_, ten) = simulate_failure(&p, &ProtocolParams::default()).unwrap();
        let last = ten.samples().last().unwrap();
        assert!((last.displacement / 100.0 - 1.3).abs() < 1e-9);
    }

    #[test]
    fn invalid_params() {
        let p = SensorParams::<f64> {
            eps_linear_end: 1.5,
            eps_fail: 1.2,
            ..SensorParams::default()
        };
        assert!(
            matches!(p.validate(), Err(Error::InvalidParams { ref field, .. }) if field == "eps_linear_end")
        );
        let p = SensorParams::<f64> {
            noise_sigma: -1.0,
            ..SensorParams::default()
        };
        assert!(simulate_cyclic(&p, &ProtocolParams::default()).is_err());
    }

    #[test]
    fn constant_angle_constant_resistance() {
        let p = SensorParams::<f64>::default();
        let model = AngleModel {
            slope: 8.0,
            intercept: 0.0,
            fit_r2: 1.0,
        };
        let motion = AngleTrace::from_pairs((0..20).map(|i| (i as f64 * 0.1, 45.0))).unwrap();
        let r = simulate_motion(&p, &motion, &model).unwrap();
        let first = r.samples()[0].reading.ohms().unwrap();
        assert!(r.samples().iter().all(|s| s.reading.ohms() == Some(first)));
    }
}

use stretchmetrics_core::calibration::{estimate_angles, fit_angle_model, mape};
use stretchmetrics_core::metrics::failure_analysis;
use stretchmetrics_core::simulate::{calibration_points, lens_loop_hysteresis_pct};
use stretchmetrics_core::{
    analyze_cyclic, normalize_resistance, simulate_cyclic, simulate_failure, simulate_motion,
    synchronize, FailMode, FailureMode, MetricsConfig, MotionParams, ProtocolParams, SegmentConfig,
    SensorParams, TestConfig,
};

fn run_cyclic(
    p: &SensorParams<f64>,
    proto: &ProtocolParams<f64>,
) -> stretchmetrics_core::MetricsReport<f64> {
    let (r, ten) = simulate_cyclic(p, proto).unwrap();
    let synced = synchronize(&r, &ten, &TestConfig::default()).unwrap();
    analyze_cyclic(
        &synced,
        &SegmentConfig::default(),
        100,
        &MetricsConfig::default(),
    )
    .unwrap()
    .report
}

#[test]
fn defaults_recover_programmed_metrics() {
    let p = SensorParams::default();
    let rep = run_cyclic(&p, &ProtocolParams::default());
    assert_eq!(rep.n_cycles, 80);
    assert!((rep.gauge_factor / 31.42 - 1.0).abs() < 1e-3, "{rep:?}");
    assert!(rep.linearity_r2 > 0.9999);
    assert!((rep.hysteresis_pct - 22.9).abs() < 0.5, "{rep:?}");
    assert!(
        (rep.baseline_drift_pct_per_cycle / 0.135 - 1.0).abs() < 1e-6,
        "{rep:?}"
    );
    assert!(
        (rep.peak_drift_pct_per_cycle / 0.236 - 1.0).abs() < 1e-6,
        "{rep:?}"
    );
}

#[test]
fn driftless_loop_matches_closed_form() {
    let p = SensorParams {
        baseline_drift: 0.0,
        peak_drift: 0.0,
        ..SensorParams::default()
    };
    let proto = ProtocolParams {
        n_cycles: 5,
        ..ProtocolParams::default()
    };
    let rep = run_cyclic(&p, &proto);
    let closed = lens_loop_hysteresis_pct(p.gf, p.delta_max, 0.5);
    assert!((closed - 22.9).abs() < 1e-9);
    assert!(
        (rep.hysteresis_pct - 22.9).abs() < 0.05,
        "{}",
        rep.hysteresis_pct
    );
    assert!(
        (rep.gauge_factor - 31.42).abs() < 1e-6,
        "{}",
        rep.gauge_factor
    );
}

#[test]
fn zero_width_loop_scores_no_hysteresis() {
    let p = SensorParams {
        delta_max: 0.0,
        baseline_drift: 0.0,
        peak_drift: 0.0,
        ..SensorParams::default()
    };
    let rep = run_cyclic(
        &p,
        &ProtocolParams {
            n_cycles: 4,
            ..ProtocolParams::default()
        },
    );
    assert!(rep.hysteresis_pct.abs() < 1e-9, "{}", rep.hysteresis_pct);
    assert!(rep.baseline_drift_pct_per_cycle.abs() < 1e-9);
    assert!(rep.peak_drift_pct_per_cycle.abs() < 1e-9);
    assert!((rep.gauge_factor - 31.42).abs() < 1e-9);
}

#[test]
fn halving_sample_period_barely_moves_hysteresis() {
    let p = SensorParams {
        baseline_drift: 0.0,
        peak_drift: 0.0,
        ..SensorParams::default()
    };
    let coarse = ProtocolParams {
        n_cycles: 3,
        ..ProtocolParams::default()
    };
    let fine = ProtocolParams {
        sample_rate_hz: 20.0,
        ..coarse
    };
    let a = run_cyclic(&p, &coarse).hysteresis_pct;
    let b = run_cyclic(&p, &fine).hysteresis_pct;
    assert!((a - b).abs() < 0.05, "{a} vs {b}");
}

#[test]
fn failure_strain_and_linear_range() {
    let p = SensorParams::<f64>::default();
    let (r, ten) = simulate_failure(&p, &ProtocolParams::default()).unwrap();
    let synced = synchronize(&r, &ten, &TestConfig::default()).unwrap();
    let rep = failure_analysis(&synced, &MetricsConfig::default()).unwrap();
    assert_eq!(rep.failure_mode, FailureMode::Mechanical);
    assert!((rep.failure_strain - 1.2).abs() <= 1e-3 + 1e-12, "{rep:?}");
    assert!((rep.linear_range_end - 0.6).abs() <= 0.02, "{rep:?}");
    assert!(rep.max_force_in_linear_range < 20.0);

    let p = SensorParams {
        fail_mode: FailMode::Electrical,
        ..p
    };
    let (r, ten) = simulate_failure(&p, &ProtocolParams::default()).unwrap();
    let synced = synchronize(&r, &ten, &TestConfig::default()).unwrap();
    let rep = failure_analysis(&synced, &MetricsConfig::default()).unwrap();
    assert_eq!(rep.failure_mode, FailureMode::Electrical);
    assert!((rep.failure_strain - 1.2).abs() <= 1e-3 + 1e-12, "{rep:?}");
}

fn motion_round_trip(peak_angle: f64) -> (f64, stretchmetrics_core::AngleModel<f64>) {
    let p = SensorParams {
        delta_max: 0.0,
        ..SensorParams::default()
    };
    let mp = MotionParams {
        peak_angle_deg: peak_angle,
        ..MotionParams::default()
    };
    let truth_model = mp.model();
    let angles: Vec<f64> = (0..=6).map(|i| i as f64 * 15.0).collect();
    let fitted = fit_angle_model(&calibration_points(&p, &truth_model, &angles)).unwrap();
    let motion = mp.profile(mp.sample_rate_hz).unwrap();
    let r = simulate_motion(&p, &motion, &truth_model).unwrap();
    let synced = normalize_resistance(&r, &TestConfig::default()).unwrap();
    let est = estimate_angles(&fitted, &synced).unwrap();
    let truth = mp.profile(mp.truth_rate_hz).unwrap();
    (mape(&est, &truth, 5.0).unwrap().mape_pct, fitted)
}

#[test]
fn motion_calibration_round_trip() {
    let (score, fitted) = motion_round_trip(90.0);
    assert!((fitted.slope - 8.0).abs() < 1e-6);
    assert!(fitted.intercept.abs() < 1e-6);
    assert!(score < 1.0, "{score}");
}

#[test]
fn mape_grows_past_linear_range() {
    // 8°/unit ΔR/R puts the knee (ΔR/R 18.85) near 151°
    let scores: Vec<f64> = [140.0, 160.0, 180.0]
        .iter()
        .map(|&a| motion_round_trip(a).0)
        .collect();
    assert!(scores[0] < scores[1] && scores[1] < scores[2], "{scores:?}");
}

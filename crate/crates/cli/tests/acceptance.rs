//! Acceptance gate: runs each criterion, prints one verdict line per
//! criterion and exits non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use stretchmetrics_core::calibration::{estimate_angles, fit_angle_model, mape};
use stretchmetrics_core::cycles::{midpoint_curve, segment_cycles, CycleExtrema};
use stretchmetrics_core::metrics::{drift_rates, failure_analysis};
use stretchmetrics_core::simulate::{calibration_points, force_law, midline};
use stretchmetrics_core::{
    analyze_cyclic, normalize_resistance, simulate_cyclic, simulate_failure, simulate_motion,
    synchronize, AngleTrace, FailMode, FailureMode, MetricsConfig, MetricsReport, MotionParams,
    ProtocolParams, SegmentConfig, SensorParams, TestConfig,
};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const BIN: &str = env!("CARGO_BIN_EXE_stretchmetrics");

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("STRETCHMETRICS_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn sim_and_analyze(
    dir: &Path,
    sets: &[&str],
    envs: &[(&str, &str)],
) -> Result<(PathBuf, PathBuf), String> {
    let sim = dir.join("sim");
    let an = dir.join("analysis");
    let mut args = vec!["simulate", "cyclic", "--out", path(&sim)];
    for s in sets {
        args.extend(["--set", s]);
    }
    let o = run(&args, envs);
    if !o.status.success() {
        return Err(format!(
            "simulate failed: {}",
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    let r = sim.join("resistance.csv");
    let t = sim.join("tensile.csv");
    let o = run(
        &[
            "analyze",
            "cyclic",
            "--resistance",
            path(&r),
            "--tensile",
            path(&t),
            "--out",
            path(&an),
        ],
        envs,
    );
    if !o.status.success() {
        return Err(format!(
            "analyze failed: {}",
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    Ok((sim, an))
}

fn criterion_1() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (_, an) = sim_and_analyze(dir.path(), &["hysteresis_target_pct=22.9"], &[])?;
    let secs = start.elapsed().as_secs_f64();
    let rep: Value = serde_json::from_str(
        &fs::read_to_string(an.join("report.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let f = |k: &str| rep[k].as_f64().unwrap_or(f64::NAN);
    let (gf, r2, h, bd, pd) = (
        f("gauge_factor"),
        f("linearity_r2"),
        f("hysteresis_pct"),
        f("baseline_drift_pct_per_cycle"),
        f("peak_drift_pct_per_cycle"),
    );
    let n = rep["n_cycles"].as_u64().unwrap_or(0);
    let ok = rel(gf, 31.42) <= 0.01
        && r2 >= 0.99
        && (h - 22.9).abs() <= 0.5
        && rel(bd, 0.135) <= 0.02
        && rel(pd, 0.236) <= 0.02
        && n == 80
        && secs < 10.0;
    check(
        ok,
        format!("GF {gf:.4}, R² {r2:.6}, H {h:.3}%, drift {bd:.5}/{pd:.5} %/cycle, {n} cycles, {secs:.2} s"),
    )
}

fn failure_report(
    p: &SensorParams<f64>,
) -> Result<stretchmetrics_core::FailureReport<f64>, String> {
    let (r, ten) = simulate_failure(p, &ProtocolParams::default()).map_err(|e| e.to_string())?;
    let trace = synchronize(&r, &ten, &TestConfig::default()).map_err(|e| e.to_string())?;
    failure_analysis(&trace, &MetricsConfig::default()).map_err(|e| e.to_string())
}

fn criterion_2() -> Verdict {
    let p = SensorParams {
        eps_fail: 1.2,
        fail_mode: FailMode::Mechanical,
        ..SensorParams::default()
    };
    let mech = failure_report(&p)?;
    let elec = failure_report(&SensorParams {
        fail_mode: FailMode::Electrical,
        ..p
    })?;
    // one sample at 10 Hz and 1 mm/s over a 100 mm gauge
    let tol = 1e-3 + 1e-12;
    let ok = (mech.failure_strain - 1.2).abs() <= tol
        && mech.failure_mode == FailureMode::Mechanical
        && elec.failure_mode == FailureMode::Electrical
        && (elec.failure_strain - 1.2).abs() <= tol;
    check(
        ok,
        format!(
            "mechanical at {:.4}, electrical variant {} at {:.4}",
            mech.failure_strain, elec.failure_mode, elec.failure_strain
        ),
    )
}

fn criterion_3() -> Verdict {
    let p = SensorParams {
        eps_linear_end: 0.6,
        gf_saturated: -2.0,
        ..SensorParams::<f64>::default()
    };
    let rep = failure_report(&p)?;
    let f06 = force_law(&p, 0.6);
    let ok = (rep.linear_range_end - 0.6).abs() <= 0.02
        && f06 < 20.0
        && rep.max_force_in_linear_range < 20.0
        && (rep.max_force_in_linear_range - force_law(&p, rep.linear_range_end)).abs() < 1e-6;
    check(
        ok,
        format!(
            "linear range end {:.3}, force at 0.60 {f06:.2} N, max force in range {:.2} N",
            rep.linear_range_end, rep.max_force_in_linear_range
        ),
    )
}

fn cyclic_report(p: &SensorParams<f64>) -> Result<MetricsReport<f64>, String> {
    let (r, ten) = simulate_cyclic(p, &ProtocolParams::default()).map_err(|e| e.to_string())?;
    let trace = synchronize(&r, &ten, &TestConfig::default()).map_err(|e| e.to_string())?;
    analyze_cyclic(
        &trace,
        &SegmentConfig::default(),
        100,
        &MetricsConfig::default(),
    )
    .map(|a| a.report)
    .map_err(|e| e.to_string())
}

fn criterion_4() -> Verdict {
    let rep = cyclic_report(&SensorParams {
        delta_max: 0.0,
        ..SensorParams::default()
    })?;
    check(
        rep.hysteresis_pct <= 0.1,
        format!("H {:.3e}%", rep.hysteresis_pct),
    )
}

fn criterion_5() -> Verdict {
    let series: Vec<CycleExtrema<f64>> = (0..80)
        .map(|k| CycleExtrema {
            baseline_r: 2.5e6 * (1.0 + 0.00135 * k as f64),
            peak_r: 5.0e6 * (1.0 + 0.00236 * k as f64),
        })
        .collect();
    let d = drift_rates(&series).map_err(|e| e.to_string())?;
    let (eb, ep) = (
        rel(d.baseline_pct_per_cycle, 0.135),
        rel(d.peak_pct_per_cycle, 0.236),
    );
    check(
        eb <= 1e-9 && ep <= 1e-9,
        format!("relative errors {eb:.2e} / {ep:.2e}"),
    )
}

fn criterion_6() -> Verdict {
    let p = SensorParams {
        baseline_drift: 0.0,
        peak_drift: 0.0,
        ..SensorParams::<f64>::default()
    };
    let proto = ProtocolParams {
        n_cycles: 10,
        ..ProtocolParams::default()
    };
    let (r, ten) = simulate_cyclic(&p, &proto).map_err(|e| e.to_string())?;
    let trace = synchronize(&r, &ten, &TestConfig::default()).map_err(|e| e.to_string())?;
    let cycles = segment_cycles(&trace, &SegmentConfig::default()).map_err(|e| e.to_string())?;
    let mc = midpoint_curve(&trace, &cycles, 100).map_err(|e| e.to_string())?;
    let dev = mc
        .strain_grid
        .iter()
        .zip(&mc.mean_mid)
        .map(|(&e, &m)| (m - midline(&p, e)).abs())
        .fold(0.0, f64::max);
    let sd = mc.std_mid.iter().copied().fold(0.0, f64::max);
    check(
        dev <= 1e-9 && sd <= 1e-9,
        format!(
            "max |mean_mid - midline| {dev:.2e}, max std_mid {sd:.2e} over {} points",
            mc.strain_grid.len()
        ),
    )
}

fn criterion_7() -> Verdict {
    let p = SensorParams {
        delta_max: 0.0,
        ..SensorParams::<f64>::default()
    };
    let mp = MotionParams::<f64>::default();
    let truth_model = mp.model();
    let pts = calibration_points(&p, &truth_model, &[0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0]);
    let fitted = fit_angle_model(&pts).map_err(|e| e.to_string())?;
    let motion = mp.profile(mp.sample_rate_hz).map_err(|e| e.to_string())?;
    let r = simulate_motion(&p, &motion, &truth_model).map_err(|e| e.to_string())?;
    let synced = normalize_resistance(&r, &TestConfig::default()).map_err(|e| e.to_string())?;
    let est = estimate_angles(&fitted, &synced).map_err(|e| e.to_string())?;
    let truth = mp.profile(mp.truth_rate_hz).map_err(|e| e.to_string())?;
    let score = mape(&est, &truth, 5.0).map_err(|e| e.to_string())?.mape_pct;
    let self_score = mape(&truth, &truth, 5.0)
        .map_err(|e| e.to_string())?
        .mape_pct;
    let a = AngleTrace::from_pairs([(0.0, 90.0), (1.0, 100.0)]).map_err(|e| e.to_string())?;
    let b = AngleTrace::from_pairs([(0.0, 100.0), (1.0, 100.0)]).map_err(|e| e.to_string())?;
    let hand: f64 = mape(&a, &b, 5.0).map_err(|e| e.to_string())?.mape_pct;
    let line_err = (fitted.slope - truth_model.slope)
        .abs()
        .max((fitted.intercept - truth_model.intercept).abs());
    let ok = line_err <= 1e-6 && score < 1.0 && self_score == 0.0 && (hand - 5.0).abs() < 1e-9;
    check(
        ok,
        format!(
            "line error {line_err:.2e}, MAPE {score:.2e}%, self {self_score}, hand case {hand:.3}%"
        ),
    )
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for sub in ["sim", "analysis"] {
        let mut entries: Vec<_> = fs::read_dir(dir.join(sub))
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for p in entries {
            let name = format!(
                "{sub}/{}",
                p.file_name().unwrap_or_default().to_string_lossy()
            );
            files.push((name, fs::read(&p).map_err(|e| e.to_string())?));
        }
    }
    Ok(files)
}

fn criterion_8() -> Verdict {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sets = ["sensor.noise_sigma=0.002", "protocol.n_cycles=10"];
    sim_and_analyze(a.path(), &sets, &[("STRETCHMETRICS_SEED", "42")])?;
    sim_and_analyze(b.path(), &sets, &[("STRETCHMETRICS_SEED", "42")])?;
    sim_and_analyze(c.path(), &sets, &[("STRETCHMETRICS_SEED", "43")])?;
    let (sa, sb, sc) = (
        snapshot(a.path())?,
        snapshot(b.path())?,
        snapshot(c.path())?,
    );
    let identical = sa == sb;
    let seed_matters = sa
        .iter()
        .zip(&sc)
        .any(|(x, y)| x.0.ends_with("resistance.csv") && x.1 != y.1);
    check(
        identical && seed_matters && sa.len() >= 10,
        format!(
            "{} files byte-identical: {identical}; different seed changes traces: {seed_matters}",
            sa.len()
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 1..=5u64 {
        let p = SensorParams {
            noise_sigma: 0.002,
            seed,
            ..SensorParams::default()
        };
        let rep = cyclic_report(&p)?;
        let pass = rel(rep.gauge_factor, 31.42) <= 0.03
            && (rep.hysteresis_pct - 22.9).abs() <= 1.5
            && rel(rep.baseline_drift_pct_per_cycle, 0.135) <= 0.10
            && rel(rep.peak_drift_pct_per_cycle, 0.236) <= 0.10;
        ok &= pass;
        lines.push(format!(
            "seed {seed}: GF {:.3} H {:.2} drift {:.4}/{:.4}{}",
            rep.gauge_factor,
            rep.hysteresis_pct,
            rep.baseline_drift_pct_per_cycle,
            rep.peak_drift_pct_per_cycle,
            if pass { "" } else { " (out of tolerance)" }
        ));
    }
    check(ok, lines.join("; "))
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, body: &str| -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).expect("temp write");
        p
    };
    let good_r = write(
        "good_r.csv",
        "t_s,R_ohm\n0.0,2500000\n0.1,2600000\n0.2,2550000\n",
    );
    let good_t = write(
        "good_t.csv",
        "t_s,disp_mm,force_N\n0.0,0.0,0.0\n0.1,0.1,0.05\n0.2,0.2,0.1\n",
    );
    let cases: Vec<(&str, PathBuf, PathBuf, &[&str])> = vec![
        (
            "empty body",
            write("empty.csv", "t_s,R_ohm\n"),
            good_t.clone(),
            &["SchemaMismatch", "TooFewSamples"],
        ),
        (
            "duplicate timestamp",
            write(
                "dup.csv",
                "t_s,R_ohm\n0.0,2500000\n0.1,2500000\n0.1,2500000\n",
            ),
            good_t.clone(),
            &["NonMonotonicTime"],
        ),
        (
            "wrong header",
            write("hdr.csv", "time,R\n0.0,1\n0.1,1\n"),
            good_t.clone(),
            &["SchemaMismatch"],
        ),
        (
            "non-positive resistance",
            write("neg_r.csv", "t_s,R_ohm\n0.0,2500000\n0.1,0\n"),
            good_t.clone(),
            &["NonPositiveResistance"],
        ),
        (
            "malformed row",
            write("short.csv", "t_s,R_ohm\n0.0,2500000\n0.1\n"),
            good_t.clone(),
            &["MalformedRow"],
        ),
        (
            "missing file",
            dir.path().join("absent.csv"),
            good_t.clone(),
            &["FileMissing"],
        ),
        (
            "negative displacement",
            good_r.clone(),
            write(
                "neg_d.csv",
                "t_s,disp_mm,force_N\n0.0,0.0,0.0\n0.1,-0.1,0.0\n",
            ),
            &["NegativeDisplacement"],
        ),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    let out = dir.path().join("out");
    for (label, r, t, expected) in &cases {
        let o = run(
            &[
                "analyze",
                "cyclic",
                "--resistance",
                path(r),
                "--tensile",
                path(t),
                "--out",
                path(&out),
            ],
            &[],
        );
        let stderr = String::from_utf8_lossy(&o.stderr);
        let name = stderr.split(':').next().unwrap_or("").trim().to_string();
        let pass = !o.status.success() && expected.contains(&name.as_str());
        ok &= pass;
        details.push(format!(
            "{label} -> {name} (exit {})",
            o.status.code().unwrap_or(-1)
        ));
    }
    check(ok, details.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "cyclic round trip reproduces the metrics table",
            criterion_1,
        ),
        ("stretchability and failure mode", criterion_2),
        ("linear-range detection and force budget", criterion_3),
        ("zero-width loop has no hysteresis", criterion_4),
        ("affine drift recovered exactly", criterion_5),
        ("midpoint cancellation", criterion_6),
        ("calibration round trip and scoring", criterion_7),
        ("byte-identical outputs for identical seeds", criterion_8),
        ("noise robustness across 5 seeds", criterion_9),
        ("parser strictness through the command line", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} [{detail}]", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

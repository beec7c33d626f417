use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use stretchmetrics_core::calibration::{
    estimate_angles, fit_angle_model, mape, parse_angle_file, parse_points_file, write_angle_csv,
    write_points_csv,
};
use stretchmetrics_core::cycles::{
    loop_envelope, write_envelope_csv, write_extrema_csv, write_midpoint_csv,
};
use stretchmetrics_core::ingest::{
    parse_resistance_log, parse_tensile_log, write_resistance_csv, write_tensile_csv,
};
use stretchmetrics_core::metrics::{analyze_cyclic, failure_analysis};
use stretchmetrics_core::numeric::{ols, ols_through_origin};
use stretchmetrics_core::simulate::{
    calibration_points, lens_loop_hysteresis_pct, simulate_cyclic, simulate_failure,
    simulate_motion,
};
use stretchmetrics_core::sync::{normalize_resistance, synchronize, write_synced_csv};
use stretchmetrics_core::{AngleModel, AngleTrace, Error, FailMode, ResistanceTrace, SyncedTrace};

use crate::config::{RunConfig, SimParams};
use crate::plot::{Band, Chart, Series, PALETTE};
use crate::report;
use crate::Failure;

pub const SEED_ENV: &str = "STRETCHMETRICS_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimKind {
    Cyclic,
    Failure,
    Motion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AnalyzeKind {
    Cyclic,
    Failure,
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    fn write_with(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let io = |e: std::io::Error| Failure::Domain(Error::Io(format!("{}: {e}", path.display())));
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        f(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }

    fn text(&self, name: &str, s: &str) -> Result<(), Failure> {
        self.write_with(name, |w| w.write_all(s.as_bytes()))
    }

    fn json<T: Serialize>(&self, name: &str, v: &T) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(v).expect("json");
        s.push('\n');
        self.text(name, &s)
    }
}

fn seed_override() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
        }),
        Err(_) => Ok(None),
    }
}

pub fn simulate(kind: SimKind, mut params: SimParams, out_dir: &Path) -> Result<(), Failure> {
    if let Some(seed) = seed_override()? {
        params.sensor.seed = seed;
    }
    params.validate()?;
    let sensor = params.resolved_sensor();
    let proto = params.protocol;
    let out = Out::create(out_dir)?;
    let mut resolved = params.clone();
    resolved.sensor = sensor;

    match kind {
        SimKind::Cyclic | SimKind::Failure => {
            let (r, ten) = if kind == SimKind::Cyclic {
                simulate_cyclic(&sensor, &proto)?
            } else {
                simulate_failure(&sensor, &proto)?
            };
            out.write_with("resistance.csv", |w| write_resistance_csv(w, &r))?;
            out.write_with("tensile.csv", |w| write_tensile_csv(w, &ten))?;
            let expected = if kind == SimKind::Cyclic {
                json!({
                    "gauge_factor": sensor.gf,
                    "hysteresis_pct": lens_loop_hysteresis_pct(sensor.gf, sensor.delta_max, proto.peak_strain),
                    "baseline_drift_pct_per_cycle": 100.0 * sensor.baseline_drift,
                    "peak_drift_pct_per_cycle": 100.0 * sensor.peak_drift,
                    "n_cycles": proto.n_cycles,
                })
            } else {
                json!({
                    "failure_strain": sensor.eps_fail,
                    "failure_mode": match sensor.fail_mode {
                        FailMode::Mechanical => "mechanical",
                        FailMode::Electrical => "electrical",
                    },
                    "linear_range_end": sensor.eps_linear_end,
                    "force_at_linear_end_n": sensor.force_at_linear_end_n,
                })
            };
            out.json(
                "truth.json",
                &json!({ "params": resolved, "expected": expected }),
            )
        }
        SimKind::Motion => {
            let mp = params.motion;
            let model = mp.model();
            let motion = mp.profile(mp.sample_rate_hz)?;
            let truth = mp.profile(mp.truth_rate_hz)?;
            let r = simulate_motion(&sensor, &motion, &model)?;
            let points = calibration_points(&sensor, &model, &params.calibration_angles_deg);
            out.write_with("resistance.csv", |w| write_resistance_csv(w, &r))?;
            out.write_with("angles_truth.csv", |w| write_angle_csv(w, &truth))?;
            out.write_with("calibration_points.csv", |w| write_points_csv(w, &points))?;
            out.json(
                "truth.json",
                &json!({
                    "params": resolved,
                    "expected": { "slope": model.slope, "intercept": model.intercept },
                }),
            )
        }
    }
}

fn plot_resistance_time(trace: &SyncedTrace<f64>) -> String {
    let pts = (0..trace.len())
        .filter_map(|i| trace.resistance(i).map(|r| (trace.samples()[i].t, r / 1e6)))
        .collect();
    let mut c = Chart::new("Resistance over time", "time [s]", "resistance [MΩ]");
    c.series.push(Series::line("R", pts, PALETTE[0]));
    c.render()
}

fn plot_force_response(trace: &SyncedTrace<f64>, title: &str) -> String {
    let s = trace.samples();
    let resp = s
        .iter()
        .filter(|x| !x.open_circuit)
        .map(|x| (100.0 * x.strain, x.d_r_over_r))
        .collect();
    let force = s
        .iter()
        .filter_map(|x| x.force.map(|f| (100.0 * x.strain, f)))
        .collect();
    let mut c = Chart::new(title, "strain [%]", "ΔR/R");
    c.y2_label = Some("force [N]".into());
    c.series.push(Series::line("ΔR/R", resp, PALETTE[0]));
    c.series
        .push(Series::line("force", force, PALETTE[1]).on_secondary());
    c.render()
}

pub fn analyze(
    kind: AnalyzeKind,
    resistance: &Path,
    tensile: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(), Failure> {
    cfg.validate()?;
    let r = parse_resistance_log::<f64>(resistance)?;
    let ten = parse_tensile_log::<f64>(tensile)?;
    let trace = synchronize(&r, &ten, &cfg.test)?;
    match kind {
        AnalyzeKind::Cyclic => {
            let a = analyze_cyclic(&trace, &cfg.segment, cfg.n_bins, &cfg.metrics)?;
            let env = loop_envelope(&trace, &a.cycles, cfg.n_bins)?;
            let out = Out::create(out_dir)?;
            out.text("report.json", &report::json_document(&a.report, cfg))?;
            out.text("report.txt", &report::cyclic_table(&a.report))?;
            out.write_with("synced.csv", |w| write_synced_csv(w, &trace))?;
            out.write_with("midpoint.csv", |w| write_midpoint_csv(w, &a.midpoint))?;
            out.write_with("envelope.csv", |w| write_envelope_csv(w, &env))?;
            out.write_with("extrema.csv", |w| write_extrema_csv(w, &a.extrema))?;

            let pct = |v: &[f64]| v.iter().map(|e| 100.0 * e).collect::<Vec<_>>();
            let grid = pct(&env.strain_grid);
            let band = |mean: &[f64], std: &[f64], color| Band {
                xs: grid.clone(),
                lower: mean.iter().zip(std).map(|(m, s)| m - s).collect(),
                upper: mean.iter().zip(std).map(|(m, s)| m + s).collect(),
                color,
            };
            let line = |ys: &[f64]| {
                grid.iter()
                    .copied()
                    .zip(ys.iter().copied())
                    .collect::<Vec<_>>()
            };
            let mut c = Chart::new("Hysteresis loop", "strain [%]", "ΔR/R");
            c.bands
                .push(band(&env.loading_mean, &env.loading_std, PALETTE[0]));
            c.bands
                .push(band(&env.unloading_mean, &env.unloading_std, PALETTE[1]));
            c.series
                .push(Series::line("loading", line(&env.loading_mean), PALETTE[0]));
            c.series.push(Series::line(
                "unloading",
                line(&env.unloading_mean),
                PALETTE[1],
            ));
            let mid_grid = pct(&a.midpoint.strain_grid);
            let mid: Vec<_> = mid_grid
                .iter()
                .copied()
                .zip(a.midpoint.mean_mid.iter().copied())
                .collect();
            c.series.push(Series::line("midpoint", mid, PALETTE[2]));
            let mc = &a.midpoint;
            let fit = if cfg.metrics.fit_intercept {
                ols(&mc.strain_grid, &mc.mean_mid)
            } else {
                ols_through_origin(&mc.strain_grid, &mc.mean_mid)
            }
            .ok_or(Error::DegenerateGrid)?;
            let reg = a
                .midpoint
                .strain_grid
                .iter()
                .map(|&e| (100.0 * e, fit.predict(e)))
                .collect();
            c.series.push(
                Series::line(&format!("fit, GF = {:.2}", fit.slope), reg, PALETTE[4]).dashed(),
            );
            out.text("hysteresis.svg", &c.render())?;
            out.text("resistance_time.svg", &plot_resistance_time(&trace))?;
            out.text(
                "force_response.svg",
                &plot_force_response(&trace, "Force and ΔR/R vs strain"),
            )
        }
        AnalyzeKind::Failure => {
            let rep = failure_analysis(&trace, &cfg.metrics)?;
            let out = Out::create(out_dir)?;
            out.text("report.json", &report::json_document(&rep, cfg))?;
            out.text("report.txt", &report::failure_table(&rep))?;
            out.write_with("synced.csv", |w| write_synced_csv(w, &trace))?;
            out.text(
                "force_response.svg",
                &plot_force_response(&trace, "Stretch to failure"),
            )?;
            out.text("resistance_time.svg", &plot_resistance_time(&trace))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    slope: f64,
    intercept: f64,
    fit_r2: f64,
}

fn estimate_and_score(
    model: &AngleModel<f64>,
    resistance: Option<&Path>,
    truth: Option<&Path>,
    cfg: &RunConfig,
    out: &Out,
) -> Result<(), Failure> {
    let Some(resistance) = resistance else {
        if truth.is_some() {
            return Err(Failure::Usage("--truth needs --resistance".into()));
        }
        return Ok(());
    };
    let r: ResistanceTrace<f64> = parse_resistance_log(resistance)?;
    let synced = normalize_resistance(&r, &cfg.test)?;
    let est = estimate_angles(model, &synced)?;
    out.write_with("angles_est.csv", |w| write_angle_csv(w, &est))?;
    let Some(truth) = truth else { return Ok(()) };
    let truth: AngleTrace<f64> = parse_angle_file(truth)?;
    let score = mape(&est, &truth, cfg.min_angle_deg)?;
    out.json("score.json", &score)?;
    let mut c = Chart::new(
        &format!("Joint angle, MAPE = {:.1}%", score.mape_pct),
        "time [s]",
        "angle [°]",
    );
    let pts = |t: &AngleTrace<f64>| t.samples().iter().map(|s| (s.t, s.angle)).collect();
    c.series
        .push(Series::line("ground truth", pts(&truth), PALETTE[4]));
    c.series
        .push(Series::line("sensor estimate", pts(&est), PALETTE[0]));
    out.text("calibration.svg", &c.render())
}

pub fn calibrate(
    points: &Path,
    resistance: Option<&Path>,
    truth: Option<&Path>,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(), Failure> {
    cfg.validate()?;
    let pts = parse_points_file::<f64>(points)?;
    let model = fit_angle_model(&pts)?;
    let out = Out::create(out_dir)?;
    out.json(
        "model.json",
        &ModelFile {
            slope: model.slope,
            intercept: model.intercept,
            fit_r2: model.fit_r2,
        },
    )?;
    estimate_and_score(&model, resistance, truth, cfg, &out)
}

pub fn estimate(
    model: &Path,
    resistance: &Path,
    truth: Option<&Path>,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(), Failure> {
    cfg.validate()?;
    let text = fs::read_to_string(model)
        .map_err(|_| Failure::Domain(Error::FileMissing(model.display().to_string())))?;
    let m: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Domain(Error::SchemaMismatch(format!("{}: {e}", model.display()))))?;
    let model = AngleModel {
        slope: m.slope,
        intercept: m.intercept,
        fit_r2: m.fit_r2,
    };
    model.validate()?;
    let out = Out::create(out_dir)?;
    estimate_and_score(&model, Some(resistance), truth, cfg, &out)
}

//! Analysis of stretchable strain sensors under cyclic and monotonic tensile loading.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the precision.

// `!(x > 0)` comparisons are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cycles;
mod error;
pub mod ingest;
pub mod metrics;
pub mod numeric;
mod scalar;
pub mod simulate;
pub mod sync;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use calibration::{
    estimate_angles, fit_angle_model, mape, AngleModel, AngleSample, AngleTrace, MapeScore,
};
pub use cycles::{
    loop_envelope, midpoint_curve, per_cycle_extrema, segment_cycles, split_branches, Branch,
    Cycle, CycleExtrema, LoopEnvelope, MidpointCurve, SegmentConfig,
};
pub use ingest::{
    baseline_resistance, parse_resistance_log, parse_tensile_log, Reading, ResistanceSample,
    ResistanceTrace, TensileSample, TensileTrace, TestConfig,
};
pub use metrics::{
    analyze_cyclic, drift_rates, failure_analysis, gauge_factor_and_linearity, hysteresis_percent,
    CyclicAnalysis, DriftRates, FailureMode, FailureReport, MetricsConfig, MetricsReport,
};
pub use simulate::{
    simulate_cyclic, simulate_failure, simulate_motion, FailMode, MotionParams, ProtocolParams,
    SensorParams,
};
pub use sync::{normalize_resistance, synchronize, SyncedSample, SyncedTrace};

pub type ResistanceTraceF64 = ResistanceTrace<f64>;
pub type TensileTraceF64 = TensileTrace<f64>;
pub type SyncedTraceF64 = SyncedTrace<f64>;
pub type AngleTraceF64 = AngleTrace<f64>;
pub type AngleModelF64 = AngleModel<f64>;
pub type TestConfigF64 = TestConfig<f64>;
pub type MetricsConfigF64 = MetricsConfig<f64>;
pub type MetricsReportF64 = MetricsReport<f64>;
pub type FailureReportF64 = FailureReport<f64>;
pub type SensorParamsF64 = SensorParams<f64>;
pub type ProtocolParamsF64 = ProtocolParams<f64>;

pub type ResistanceTraceF32 = ResistanceTrace<f32>;
pub type TensileTraceF32 = TensileTrace<f32>;
pub type SyncedTraceF32 = SyncedTrace<f32>;
pub type AngleTraceF32 = AngleTrace<f32>;
pub type AngleModelF32 = AngleModel<f32>;
pub type TestConfigF32 = TestConfig<f32>;
pub type MetricsConfigF32 = MetricsConfig<f32>;
pub type MetricsReportF32 = MetricsReport<f32>;
pub type FailureReportF32 = FailureReport<f32>;
pub type SensorParamsF32 = SensorParams<f32>;
pub type ProtocolParamsF32 = ProtocolParams<f32>;
pub type MotionParamsF32 = MotionParams<f32>;
pub type MotionParamsF64 = MotionParams<f64>;

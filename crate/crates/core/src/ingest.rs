//! Instrument log ingestion.
//!
//! Two CSV schemas are accepted, both with an exact header line:
//!
//! * resistance meter: `t_s,R_ohm`, where `R_ohm` may be the literal `OVER`
//!   for an open circuit;
//! * tensile tester: `t_s,disp_mm,force_N`, where `force_N` may be empty.
//!
//! Parsing is strict: the first malformed row aborts with its row number
//! (1-based, header excluded).

use std::fmt;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::numeric::median;
use crate::{Error, Result, Scalar};

pub const RESISTANCE_HEADER: &str = "t_s,R_ohm";
pub const TENSILE_HEADER: &str = "t_s,disp_mm,force_N";
/// Meter token for a reading beyond measurement range.
pub const OPEN_CIRCUIT_TOKEN: &str = "OVER";

/// One resistance meter reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum Reading<T> {
    Ohms(T),
    OpenCircuit,
}

impl<T: Scalar> Reading<T> {
    pub fn ohms(&self) -> Option<T> {
        match *self {
            Reading::Ohms(r) => Some(r),
            Reading::OpenCircuit => None,
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Reading::OpenCircuit)
    }
}

impl<T: Scalar> fmt::Display for Reading<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reading::Ohms(r) => write!(f, "{r}"),
            Reading::OpenCircuit => f.write_str(OPEN_CIRCUIT_TOKEN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ResistanceSample<T> {
    pub t: T,
    pub reading: Reading<T>,
}

/// Time-stamped resistance series from the meter.
///
/// Invariants: at least two samples, strictly increasing time, every
/// numeric reading finite and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ResistanceTrace<T> {
    samples: Vec<ResistanceSample<T>>,
}

impl<T: Scalar> ResistanceTrace<T> {
    pub fn new(samples: Vec<ResistanceSample<T>>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            if !s.t.is_finite() {
                return Err(Error::NonFiniteValue { row });
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::NonMonotonicTime { row });
            }
            if let Reading::Ohms(r) = s.reading {
                if !r.is_finite() {
                    return Err(Error::NonFiniteValue { row });
                }
                if !(r > T::zero()) {
                    return Err(Error::NonPositiveResistance { row });
                }
            }
        }
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        Ok(Self { samples })
    }

    /// Convenience constructor from `(t, ohms)` pairs with no open-circuit samples.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(t, r)| ResistanceSample {
                    t,
                    reading: Reading::Ohms(r),
                })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[ResistanceSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TensileSample<T> {
    pub t: T,
    pub displacement: T,
    pub force: Option<T>,
}

/// Time-stamped crosshead displacement (mm) and force (N).
///
/// Invariants: at least one sample, strictly increasing time, displacement
/// non-negative, force finite where present.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct TensileTrace<T> {
    samples: Vec<TensileSample<T>>,
}

impl<T: Scalar> TensileTrace<T> {
    pub fn new(samples: Vec<TensileSample<T>>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            let force_ok = s.force.is_none_or(|f| f.is_finite());
            if !s.t.is_finite() || !s.displacement.is_finite() || !force_ok {
                return Err(Error::NonFiniteValue { row });
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::NonMonotonicTime { row });
            }
            if s.displacement < T::zero() {
                return Err(Error::NegativeDisplacement { row });
            }
        }
        if samples.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[TensileSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_force(&self) -> bool {
        self.samples.iter().all(|s| s.force.is_some())
    }
}

/// Acquisition settings shared by synchronization and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct TestConfig<T> {
    /// Clamp separation used to turn displacement into strain.
    pub gauge_length_mm: T,
    /// Leading window over which the relaxed resistance is taken.
    pub baseline_window_s: T,
    pub sample_rate_hint_hz: T,
    /// Added to tensile timestamps before alignment.
    pub time_offset_s: T,
    /// Known relaxed resistance; bypasses the baseline window when set.
    pub reference_resistance_ohm: Option<T>,
}

impl<T: Scalar> Default for TestConfig<T> {
    fn default() -> Self {
        Self {
            gauge_length_mm: T::lit(100.0),
            baseline_window_s: T::lit(2.0),
            sample_rate_hint_hz: T::lit(10.0),
            time_offset_s: T::zero(),
            reference_resistance_ohm: None,
        }
    }
}

impl<T: Scalar> TestConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.gauge_length_mm > T::zero()) || !self.gauge_length_mm.is_finite() {
            return Err(Error::invalid("gauge_length_mm", "must be > 0"));
        }
        if !(self.baseline_window_s > T::zero()) || !self.baseline_window_s.is_finite() {
            return Err(Error::invalid("baseline_window_s", "must be > 0"));
        }
        if !(self.sample_rate_hint_hz > T::zero()) {
            return Err(Error::invalid("sample_rate_hint_hz", "must be > 0"));
        }
        if !self.time_offset_s.is_finite() {
            return Err(Error::invalid("time_offset_s", "must be finite"));
        }
        if let Some(r) = self.reference_resistance_ohm {
            if !(r > T::zero()) || !r.is_finite() {
                return Err(Error::invalid("reference_resistance_ohm", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Relaxed resistance R₀: the median of the numeric readings in the
/// leading `baseline_window_s` of the trace (measured from its first sample).
pub fn baseline_resistance<T: Scalar>(
    trace: &ResistanceTrace<T>,
    cfg: &TestConfig<T>,
) -> Result<T> {
    if let Some(r0) = cfg.reference_resistance_ohm {
        return Ok(r0);
    }
    let samples = trace.samples();
    let t0 = samples[0].t;
    let window_end = t0 + cfg.baseline_window_s;
    let too_short = Error::WindowTooShort {
        window_s: cfg.baseline_window_s.as_f64(),
    };
    if samples[samples.len() - 1].t < window_end {
        return Err(too_short);
    }
    let in_window: Vec<T> = samples
        .iter()
        .take_while(|s| s.t < window_end)
        .filter_map(|s| s.reading.ohms())
        .collect();
    median(&in_window).ok_or(too_short)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::FileMissing(path.display().to_string()));
    }
    let mut f = std::fs::File::open(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut bytes = Vec::new();
    f.read_to_end(&mut bytes)
        .map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|_| Error::SchemaMismatch("file is not valid UTF-8".into()))
}

/// Splits text into `(row, fields)` after checking the header. A single
/// trailing newline is allowed; any other empty line is a malformed row.
pub(crate) fn data_rows<'a>(
    text: &'a str,
    header: &'a str,
) -> Result<impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
    let found = lines.next().unwrap_or("");
    if found != header {
        return Err(Error::SchemaMismatch(format!(
            "expected header `{header}`, found `{found}`"
        )));
    }
    let columns = header.split(',').count();
    Ok(lines.enumerate().map(move |(i, line)| {
        let row = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if line.is_empty() || fields.len() != columns {
            return Err(Error::MalformedRow {
                row,
                reason: format!("expected {columns} fields, found `{line}`"),
            });
        }
        Ok((row, fields))
    }))
}

pub(crate) fn number<T: Scalar>(field: &str, row: usize, column: &str) -> Result<T> {
    let v: T = field.trim().parse().map_err(|_| Error::MalformedRow {
        row,
        reason: format!("`{field}` in column {column} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFiniteValue { row });
    }
    Ok(v)
}

/// Parses resistance CSV text. Validation is row by row, so the first
/// offending row is the one reported.
pub fn read_resistance_csv<T: Scalar>(text: &str) -> Result<ResistanceTrace<T>> {
    let mut samples: Vec<ResistanceSample<T>> = Vec::new();
    for item in data_rows(text, RESISTANCE_HEADER)? {
        let (row, fields) = item?;
        let t = number(fields[0], row, "t_s")?;
        let reading = if fields[1].trim() == OPEN_CIRCUIT_TOKEN {
            Reading::OpenCircuit
        } else {
            let r: T = number(fields[1], row, "R_ohm")?;
            if !(r > T::zero()) {
                return Err(Error::NonPositiveResistance { row });
            }
            Reading::Ohms(r)
        };
        if let Some(prev) = samples.last() {
            if !(t > prev.t) {
                return Err(Error::NonMonotonicTime { row });
            }
        }
        samples.push(ResistanceSample { t, reading });
    }
    ResistanceTrace::new(samples)
}

pub fn read_tensile_csv<T: Scalar>(text: &str) -> Result<TensileTrace<T>> {
    let mut samples: Vec<TensileSample<T>> = Vec::new();
    for item in data_rows(text, TENSILE_HEADER)? {
        let (row, fields) = item?;
        let t = number(fields[0], row, "t_s")?;
        let displacement: T = number(fields[1], row, "disp_mm")?;
        let force = if fields[2].trim().is_empty() {
            None
        } else {
            Some(number(fields[2], row, "force_N")?)
        };
        if let Some(prev) = samples.last() {
            if !(t > prev.t) {
                return Err(Error::NonMonotonicTime { row });
            }
        }
        if displacement < T::zero() {
            return Err(Error::NegativeDisplacement { row });
        }
        samples.push(TensileSample {
            t,
            displacement,
            force,
        });
    }
    TensileTrace::new(samples)
}

pub fn parse_resistance_log<T: Scalar>(path: impl AsRef<Path>) -> Result<ResistanceTrace<T>> {
    read_resistance_csv(&read_text(path.as_ref())?)
}

pub fn parse_tensile_log<T: Scalar>(path: impl AsRef<Path>) -> Result<TensileTrace<T>> {
    read_tensile_csv(&read_text(path.as_ref())?)
}

pub fn write_resistance_csv<T: Scalar, W: Write>(
    mut w: W,
    trace: &ResistanceTrace<T>,
) -> io::Result<()> {
    writeln!(w, "{RESISTANCE_HEADER}")?;
    for s in trace.samples() {
        writeln!(w, "{},{}", s.t, s.reading)?;
    }
    Ok(())
}

pub fn write_tensile_csv<T: Scalar, W: Write>(mut w: W, trace: &TensileTrace<T>) -> io::Result<()> {
    writeln!(w, "{TENSILE_HEADER}")?;
    for s in trace.samples() {
        match s.force {
            Some(f) => writeln!(w, "{},{},{}", s.t, s.displacement, f)?,
            None => writeln!(w, "{},{},", s.t, s.displacement)?,
        }
    }
    Ok(())
}

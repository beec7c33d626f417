//! Minimal deterministic SVG line charts.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
/// Longer series are thinned by a fixed stride.
const MAX_POINTS: usize = 4000;

pub const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#555555"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
    /// Plot against the right-hand axis.
    pub secondary: bool,
}

impl Series {
    pub fn line(label: &str, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            label: label.to_string(),
            points,
            color,
            dashed: false,
            secondary: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn on_secondary(mut self) -> Self {
        self.secondary = true;
        self
    }
}

/// Shaded region between `lower` and `upper`, sharing x values.
pub struct Band {
    pub xs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub color: &'static str,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y2_label: Option<String>,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
}

#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        let step = nice_step((hi - lo) / 5.0);
        Self {
            lo: (lo / step).floor() * step,
            hi: (hi / step).ceil() * step,
            step,
        }
    }

    fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            y2_label: None,
            series: Vec::new(),
            bands: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let primary = |s: &&Series| !s.secondary;
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(self.bands.iter().flat_map(|b| b.xs.iter().copied()));
        let x = Axis::fit(xs);
        let ys = self
            .series
            .iter()
            .filter(primary)
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(
                self.bands
                    .iter()
                    .flat_map(|b| b.lower.iter().chain(&b.upper).copied()),
            );
        let y = Axis::fit(ys);
        let has_y2 = self.series.iter().any(|s| s.secondary);
        let y2 = Axis::fit(
            self.series
                .iter()
                .filter(|s| s.secondary)
                .flat_map(|s| s.points.iter().map(|p| p.1)),
        );

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let px = |v: f64| LEFT + x.frac(v) * pw;
        let py = |a: &Axis, v: f64| TOP + (1.0 - a.frac(v)) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        for t in x.ticks() {
            let cx = px(t);
            let _ = writeln!(
                out,
                r##"<line x1="{cx:.2}" y1="{TOP}" x2="{cx:.2}" y2="{:.2}" stroke="#e5e5e5"/><text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 16.0,
                tick_label(t, x.step)
            );
        }
        for t in y.ticks() {
            let cy = py(&y, t);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="#e5e5e5"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                cy + 4.0,
                tick_label(t, y.step)
            );
        }
        if has_y2 {
            for t in y2.ticks() {
                let cy = py(&y2, t);
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="start">{}</text>"#,
                    LEFT + pw + 6.0,
                    cy + 4.0,
                    tick_label(t, y2.step)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text transform="translate(20 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        if let (true, Some(label)) = (has_y2, &self.y2_label) {
            let _ = writeln!(
                out,
                r#"<text transform="translate({:.1} {:.1}) rotate(90)" text-anchor="middle">{}</text>"#,
                WIDTH - 20.0,
                TOP + ph / 2.0,
                escape(label)
            );
        }

        for b in &self.bands {
            let mut pts = String::new();
            for (xv, yv) in b.xs.iter().zip(&b.upper) {
                let _ = write!(pts, "{:.2},{:.2} ", px(*xv), py(&y, *yv));
            }
            for (xv, yv) in b.xs.iter().zip(&b.lower).rev() {
                let _ = write!(pts, "{:.2},{:.2} ", px(*xv), py(&y, *yv));
            }
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
                pts.trim_end(),
                b.color
            );
        }
        for s in &self.series {
            let axis = if s.secondary { &y2 } else { &y };
            let mut pts = String::new();
            let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
            for &(xv, yv) in s
                .points
                .iter()
                .step_by(stride)
                .filter(|p| p.0.is_finite() && p.1.is_finite())
            {
                let _ = write!(pts, "{:.2},{:.2} ", px(xv), py(axis, yv));
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                pts.trim_end(),
                s.color
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let ly = TOP + 16.0 + i as f64 * 16.0;
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                LEFT + 10.0,
                LEFT + 30.0,
                s.color,
                LEFT + 36.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

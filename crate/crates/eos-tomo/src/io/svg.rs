//! Minimal deterministic SVG: polylines, rects, text and a linear color map.
//!
//! All coordinates are printed with fixed precision, so identical input
//! renders to identical bytes.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write;

const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;
const COLORBAR: f64 = 70.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Stops of the heatmap color scale (low to high).
const COLOR_STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Reference annotations drawn over the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Marker {
    Vertical { x: f64, label: String },
    Horizontal { y: f64, label: String },
    Point { x: f64, y: f64, label: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinePlot {
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
    /// Fixed ranges; data extents when `None`.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

/// Values on a rectilinear grid, `values[iy][ix]`; non-finite cells are masked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub markers: Vec<Marker>,
    pub color_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PlotKind {
    Line(LinePlot),
    Heatmap(Heatmap),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    pub kind: PlotKind,
}

impl PlotSpec {
    pub fn line(title: &str, x_label: &str, y_label: &str, plot: LinePlot) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 720,
            height: 440,
            kind: PlotKind::Line(plot),
        }
    }

    pub fn heatmap(title: &str, x_label: &str, y_label: &str, map: Heatmap) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 640,
            height: 520,
            kind: PlotKind::Heatmap(map),
        }
    }

    /// The full document, with `metadata` embedded as JSON.
    pub fn render(&self, metadata: &Value) -> String {
        let mut out = String::new();
        let (w, h) = (self.width as f64, self.height as f64);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
            self.width, self.height, self.width, self.height
        );
        let meta = serde_json::to_string(metadata).expect("metadata serializes");
        let _ = writeln!(
            out,
            "<metadata><![CDATA[{}]]></metadata>",
            meta.replace("]]>", "]]]]><![CDATA[>")
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
        );

        let right = match self.kind {
            PlotKind::Line(_) => MARGIN_RIGHT,
            PlotKind::Heatmap(_) => MARGIN_RIGHT + COLORBAR,
        };
        let frame = Frame {
            left: MARGIN_LEFT,
            top: MARGIN_TOP,
            width: w - MARGIN_LEFT - right,
            height: h - MARGIN_TOP - MARGIN_BOTTOM,
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        };
        match &self.kind {
            PlotKind::Line(p) => render_line(&mut out, frame, p),
            PlotKind::Heatmap(m) => render_heatmap(&mut out, frame, m),
        }

        let _ = writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            fmt(w / 2.0),
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            fmt(frame.left + frame.width / 2.0),
            fmt(h - 12.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            fmt(frame.top + frame.height / 2.0),
            fmt(frame.top + frame.height / 2.0),
            escape(&self.y_label)
        );
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + (1.0 - (y - self.y.0) / (self.y.1 - self.y.0)) * self.height
    }

    fn axes(&self, out: &mut String) {
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            fmt(self.left),
            fmt(self.top),
            fmt(self.width),
            fmt(self.height)
        );
        let bottom = self.top + self.height;
        for t in ticks(self.x.0, self.x.1) {
            let x = self.px(t);
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle">{4}</text>"#,
                fmt(x),
                fmt(bottom),
                fmt(bottom + 5.0),
                fmt(bottom + 18.0),
                tick_label(t)
            );
        }
        for t in ticks(self.y.0, self.y.1) {
            let y = self.py(t);
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" text-anchor="end">{5}</text>"#,
                fmt(self.left - 5.0),
                fmt(y),
                fmt(self.left),
                fmt(self.left - 8.0),
                fmt(y + 4.0),
                tick_label(t)
            );
        }
    }

    fn markers(&self, out: &mut String, markers: &[Marker]) {
        for m in markers {
            match m {
                Marker::Vertical { x, label } => {
                    if !(self.x.0..=self.x.1).contains(x) {
                        continue;
                    }
                    let px = self.px(*x);
                    let _ = writeln!(
                        out,
                        r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#555" stroke-dasharray="4 3"/><text x="{3}" y="{4}" fill="#555" font-size="10">{5}</text>"##,
                        fmt(px),
                        fmt(self.top),
                        fmt(self.top + self.height),
                        fmt(px + 3.0),
                        fmt(self.top + 12.0),
                        escape(label)
                    );
                }
                Marker::Horizontal { y, label } => {
                    if !(self.y.0..=self.y.1).contains(y) {
                        continue;
                    }
                    let py = self.py(*y);
                    let _ = writeln!(
                        out,
                        r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#555" stroke-dasharray="4 3"/><text x="{3}" y="{4}" fill="#555" font-size="10">{5}</text>"##,
                        fmt(self.left),
                        fmt(py),
                        fmt(self.left + self.width),
                        fmt(self.left + 4.0),
                        fmt(py - 3.0),
                        escape(label)
                    );
                }
                Marker::Point { x, y, label } => {
                    let (px, py) = (self.px(*x), self.py(*y));
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{}" cy="{}" r="4" fill="none" stroke="white" stroke-width="2"/><text x="{}" y="{}" fill="white" font-size="10">{}</text>"#,
                        fmt(px),
                        fmt(py),
                        fmt(px + 6.0),
                        fmt(py - 6.0),
                        escape(label)
                    );
                }
            }
        }
    }
}

fn render_line(out: &mut String, mut frame: Frame, plot: &LinePlot) {
    let finite = |f: fn(&(f64, f64)) -> f64| {
        plot.series
            .iter()
            .flat_map(|s| {
                s.points
                    .iter()
                    .filter(|p| p.0.is_finite() && p.1.is_finite())
                    .map(f)
            })
            .collect::<Vec<_>>()
    };
    frame.x = plot
        .x_range
        .unwrap_or_else(|| padded(&finite(|p| p.0), 0.0));
    frame.y = plot
        .y_range
        .unwrap_or_else(|| padded(&finite(|p| p.1), 0.05));
    frame.axes(out);

    let _ = writeln!(
        out,
        r#"<clipPath id="plot-area"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
        fmt(frame.left),
        fmt(frame.top),
        fmt(frame.width),
        fmt(frame.height)
    );
    for (k, s) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        // Non-finite points split the curve.
        for run in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.is_empty() {
                continue;
            }
            let mut pts = String::new();
            for (i, p) in run.iter().enumerate() {
                if i > 0 {
                    pts.push(' ');
                }
                let _ = write!(pts, "{},{}", fmt(frame.px(p.0)), fmt(frame.py(p.1)));
            }
            let _ = writeln!(
                out,
                r#"<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash} clip-path="url(#plot-area)"/>"#
            );
        }
        let ly = frame.top + 14.0 + 15.0 * k as f64;
        let lx = frame.left + frame.width - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            fmt(lx),
            fmt(ly - 4.0),
            fmt(lx + 20.0),
            fmt(ly - 4.0),
            fmt(lx + 26.0),
            fmt(ly),
            escape(&s.label)
        );
    }
    frame.markers(out, &plot.markers);
}

fn render_heatmap(out: &mut String, mut frame: Frame, map: &Heatmap) {
    let edges = |c: &[f64]| -> Vec<f64> {
        match c.len() {
            0 => vec![0.0, 1.0],
            1 => vec![c[0] - 0.5, c[0] + 0.5],
            n => {
                let mut e = Vec::with_capacity(n + 1);
                e.push(c[0] - (c[1] - c[0]) / 2.0);
                e.extend(c.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                e.push(c[n - 1] + (c[n - 1] - c[n - 2]) / 2.0);
                e
            }
        }
    };
    let (ex, ey) = (edges(&map.xs), edges(&map.ys));
    frame.x = (ex[0], ex[ex.len() - 1]);
    frame.y = (ey[0], ey[ey.len() - 1]);

    let finite: Vec<f64> = map
        .values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let (lo, hi) = map.color_range.unwrap_or_else(|| padded(&finite, 0.0));

    for (iy, row) in map.values.iter().enumerate().take(map.ys.len()) {
        for (ix, v) in row.iter().enumerate().take(map.xs.len()) {
            let (x0, x1) = (frame.px(ex[ix]), frame.px(ex[ix + 1]));
            let (y0, y1) = (frame.py(ey[iy + 1]), frame.py(ey[iy]));
            let fill = if v.is_finite() {
                color((v - lo) / (hi - lo))
            } else {
                "#bbbbbb".to_owned()
            };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
                fmt(x0.min(x1)),
                fmt(y0.min(y1)),
                fmt((x1 - x0).abs() + 0.05),
                fmt((y1 - y0).abs() + 0.05)
            );
        }
    }
    frame.axes(out);
    frame.markers(out, &map.markers);

    // Color bar.
    let bx = frame.left + frame.width + 16.0;
    let steps = 64;
    let dh = frame.height / steps as f64;
    for k in 0..steps {
        let t = (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="14" height="{}" fill="{}"/>"#,
            fmt(bx),
            fmt(frame.top + frame.height - (k + 1) as f64 * dh),
            fmt(dh + 0.05),
            color(t)
        );
    }
    for (t, v) in [(0.0, lo), (1.0, hi)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            fmt(bx + 18.0),
            fmt(frame.top + (1.0 - t) * frame.height + 4.0),
            tick_label(v)
        );
    }
}

fn color(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let s = t * (COLOR_STOPS.len() - 1) as f64;
    let i = (s.floor() as usize).min(COLOR_STOPS.len() - 2);
    let f = s - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (COLOR_STOPS[i][k] * (1.0 - f) + COLOR_STOPS[i + 1][k] * f).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Data range widened by `pad` of its width; degenerate ranges get unit width.
fn padded(values: &[f64], pad: f64) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300_f64.max(1e-12 * hi.abs().max(lo.abs())) {
        return (lo - 0.5, hi + 0.5);
    }
    let d = (hi - lo) * pad;
    (lo - d, hi + d)
}

/// Round tick positions (1-2-5 steps) inside [lo, hi].
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0 && span.is_finite()) {
        return Vec::new();
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        let t = ticks(0.0, 1.0);
        assert_eq!(t.len(), 6);
        assert!(t
            .iter()
            .enumerate()
            .all(|(k, v)| (v - 0.2 * k as f64).abs() < 1e-12));
        assert!(ticks(1.0, 1.0).is_empty());
    }

    #[test]
    fn color_scale_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#440154");
    }
}

//! Minimal SVG plots: framed axes with end labels, one polyline per series,
//! optional log axes, and heat grids of filled rectangles.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeatPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Cells as `(x, y, value)`; `NaN` values are drawn grey.
    pub cells: Vec<(f64, f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> Option<f64> {
        let v = if self.log { v.log10() } else { v };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn label(&self, at_hi: bool) -> String {
        let v = if at_hi { self.hi } else { self.lo };
        if self.log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    out.push('\n');
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn frame(out: &mut String, x: &Axis, y: &Axis, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-size="11">{}</text>"#,
        y0 + 16.0,
        x.label(false)
    );
    let _ = writeln!(
        out,
        r#"<text x="{x1}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        y0 + 16.0,
        x.label(true)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{y0}" font-size="11" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        y.label(false)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        y1 + 10.0,
        y.label(true)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn to_px(x: &Axis, y: &Axis, p: (f64, f64)) -> Option<(f64, f64)> {
    let fx = x.frac(p.0)?;
    let fy = y.frac(p.1)?;
    Some((
        MARGIN + fx * (WIDTH - 2.0 * MARGIN),
        HEIGHT - MARGIN - fy * (HEIGHT - 2.0 * MARGIN),
    ))
}

impl LinePlot {
    pub fn render(&self) -> String {
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let x = Axis::fit(all().map(|p| p.0), self.log_x);
        let y = Axis::fit(all().map(|p| p.1), self.log_y);
        let mut out = String::new();
        header(&mut out, &self.title);
        frame(&mut out, &x, &y, &self.x_label, &self.y_label);
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter_map(|&p| to_px(&x, &y, p))
                .map(|(px, py)| format!("{px:.2},{py:.2}"))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                pts.join(" "),
                escape(&s.label)
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
                MARGIN + 8.0,
                MARGIN + 16.0 * (i as f64 + 1.0),
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Blue to yellow.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(48.0, 253.0), mix(18.0, 231.0), mix(120.0, 37.0))
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

impl HeatPlot {
    pub fn render(&self) -> String {
        let xs = distinct(self.cells.iter().map(|c| c.0));
        let ys = distinct(self.cells.iter().map(|c| c.1));
        let vals = Axis::fit(self.cells.iter().map(|c| c.2), false);
        let mut out = String::new();
        header(&mut out, &self.title);
        let x_axis = Axis::fit(xs.iter().copied(), false);
        let y_axis = Axis::fit(ys.iter().copied(), false);
        let (nx, ny) = (xs.len().max(1) as f64, ys.len().max(1) as f64);
        let cw = (WIDTH - 2.0 * MARGIN) / nx;
        let ch = (HEIGHT - 2.0 * MARGIN) / ny;
        for &(x, y, v) in &self.cells {
            let (Some(i), Some(j)) = (
                xs.iter().position(|&a| a == x),
                ys.iter().position(|&b| b == y),
            ) else {
                continue;
            };
            let fill = vals.frac(v).map_or_else(|| "#bbbbbb".to_string(), ramp);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{x} {y} {v}</title></rect>"#,
                MARGIN + i as f64 * cw,
                HEIGHT - MARGIN - (j as f64 + 1.0) * ch,
                cw,
                ch
            );
        }
        frame(&mut out, &x_axis, &y_axis, &self.x_label, &self.y_label);
        out.push_str("</svg>\n");
        out
    }
}

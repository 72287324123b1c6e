//! Static SVG renderings of persistence sets: scatter plots of sampled
//! points and heatmaps of histograms, on a fixed 720×720 canvas.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::sampling::Histogram2D;

pub const SIZE: f64 = 720.0;
const MARGIN: f64 = 64.0;

/// Axis setup shared by scatter and heatmap.
#[derive(Debug, Clone, PartialEq)]
pub struct Axes {
    pub range_b: (f64, f64),
    pub range_d: (f64, f64),
    /// Ticks at multiples of π/4 instead of decimal steps.
    pub angular: bool,
    pub title: String,
}

impl Axes {
    /// Square axes covering `[0, max]` on both coordinates.
    pub fn square(max: f64, angular: bool, title: impl Into<String>) -> Self {
        let max = if max > 0.0 && max.is_finite() { max } else { 1.0 };
        Axes { range_b: (0.0, max), range_d: (0.0, max), angular, title: title.into() }
    }

    /// Square axes fitted to the points, padded by 5%. Angular axes are
    /// rounded up to a multiple of π/4.
    pub fn fit(points: &[(f64, f64)], angular: bool, title: impl Into<String>) -> Self {
        let m = points.iter().fold(0.0f64, |m, &(b, d)| m.max(b).max(d)) * 1.05;
        let m = if angular { (m / (PI / 4.0)).ceil().max(1.0) * PI / 4.0 } else { m };
        Axes::square(m, angular, title)
    }

    fn x(&self, b: f64) -> f64 {
        let (lo, hi) = self.range_b;
        MARGIN + (b - lo) / (hi - lo) * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, d: f64) -> f64 {
        let (lo, hi) = self.range_d;
        SIZE - MARGIN - (d - lo) / (hi - lo) * (SIZE - 2.0 * MARGIN)
    }
}

/// Tick positions and labels on `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, angular: bool) -> Vec<(f64, String)> {
    if !(hi > lo) {
        return vec![];
    }
    if angular {
        let step = PI / 4.0;
        let mut q = (lo / step).ceil() as i64;
        // keep at most ~9 labels
        let stride = (((hi - lo) / step / 8.0).ceil() as u64).max(1).next_power_of_two() as i64;
        q = (q + stride - 1) / stride * stride;
        let mut out = vec![];
        while q as f64 * step <= hi + 1e-12 {
            out.push((q as f64 * step, pi_label(q)));
            q += stride;
        }
        return out;
    }
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let mut v = (lo / step).ceil() * step;
    let mut out = vec![];
    while v <= hi + step * 1e-9 {
        let digits = (-step.log10().floor()).max(0.0) as usize;
        out.push((v, format!("{:.*}", digits, v + 0.0)));
        v += step;
    }
    out
}

/// Label for `q·π/4` in lowest terms.
fn pi_label(q: i64) -> String {
    if q == 0 {
        return "0".into();
    }
    let g = gcd(q.unsigned_abs(), 4) as i64;
    let (num, den) = (q / g, 4 / g);
    let num = match num {
        1 => String::new(),
        -1 => "-".into(),
        n => n.to_string(),
    };
    if den == 1 {
        format!("{num}π")
    } else {
        format!("{num}π/{den}")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn header(out: &mut String, axes: &Axes) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        SIZE / 2.0,
        MARGIN / 2.0,
        escape(&axes.title)
    );
}

fn frame(out: &mut String, axes: &Axes) {
    let (x0, x1) = (axes.x(axes.range_b.0), axes.x(axes.range_b.1));
    let (y0, y1) = (axes.y(axes.range_d.0), axes.y(axes.range_d.1));
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (v, label) in ticks(axes.range_b.0, axes.range_b.1, axes.angular) {
        let x = axes.x(v);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y0 + 18.0);
    }
    for (v, label) in ticks(axes.range_d.0, axes.range_d.1, axes.angular) {
        let y = axes.y(v);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t_b</text>"#,
        (x0 + x1) / 2.0,
        SIZE - MARGIN / 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">t_d</text>"#,
        MARGIN / 4.0,
        (y0 + y1) / 2.0,
        MARGIN / 4.0,
        (y0 + y1) / 2.0
    );
    // diagonal t_b = t_d where it crosses the plot
    let lo = axes.range_b.0.max(axes.range_d.0);
    let hi = axes.range_b.1.min(axes.range_d.1);
    if hi > lo {
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 4"/>"##,
            axes.x(lo),
            axes.y(lo),
            axes.x(hi),
            axes.y(hi)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter plot of `(t_b, t_d)` points. Points outside the axes are skipped.
pub fn scatter_svg(points: &[(f64, f64)], axes: &Axes) -> String {
    let mut out = String::new();
    header(&mut out, axes);
    let _ = writeln!(out, r##"<g fill="#1f5fa8" fill-opacity="0.35">"##);
    for &(b, d) in points {
        if b < axes.range_b.0 || b > axes.range_b.1 || d < axes.range_d.0 || d > axes.range_d.1 {
            continue;
        }
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#, axes.x(b), axes.y(d));
    }
    let _ = writeln!(out, "</g>");
    frame(&mut out, axes);
    out.push_str("</svg>\n");
    out
}

/// Heatmap of a histogram on its own ranges, grey levels proportional to
/// the square root of the count.
pub fn heatmap_svg(hist: &Histogram2D, angular: bool, title: impl Into<String>) -> String {
    let axes = Axes { range_b: hist.range_b, range_d: hist.range_d, angular, title: title.into() };
    let mut out = String::new();
    header(&mut out, &axes);
    let max = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    for i in 0..hist.bins_b {
        for j in 0..hist.bins_d {
            let c = hist.count(i, j);
            if c == 0 {
                continue;
            }
            let (b0, b1) = hist.bin_b(i);
            let (d0, d1) = hist.bin_d(j);
            let level = 255 - ((c as f64 / max).sqrt() * 255.0).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},255)"/>"#,
                axes.x(b0),
                axes.y(d1),
                axes.x(b1) - axes.x(b0),
                axes.y(d0) - axes.y(d1)
            );
        }
    }
    frame(&mut out, &axes);
    out.push_str("</svg>\n");
    out
}

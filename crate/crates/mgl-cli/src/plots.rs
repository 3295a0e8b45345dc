//! Hand-rolled SVG line plots.
//!
//! The renderer is a few polylines inside a fixed 720x480 frame: no text
//! shaping, no layout engine, nothing adaptive. Coordinates are printed
//! with fixed precision so a given input renders to identical bytes on
//! every run and platform.

use std::fmt::Write as _;

pub const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn from_values(values: impl Iterator<Item = f64>) -> Result<Axis, String> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if !v.is_finite() {
                return Err("plot data contains non-finite values".into());
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return Err("plot has no data points".into());
        }
        let pad = if hi > lo {
            0.05 * (hi - lo)
        } else {
            0.5 * hi.abs().max(1.0)
        };
        Ok(Axis {
            lo: lo - pad,
            hi: hi + pad,
        })
    }

    fn place(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4)
            .map(|k| self.lo + k as f64 / 4.0 * (self.hi - self.lo))
            .collect()
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.4}")
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one plot frame with every series as a polyline. Fails on empty
/// or non-finite data rather than emitting a misleading picture.
pub fn line_plot(title: &str, x_label: &str, series: &[Series]) -> Result<String, String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err("plot has no data points".into());
    }
    let x_axis = Axis::from_values(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)))?;
    let y_axis = Axis::from_values(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)))?;
    let x_of = |v: f64| x_axis.place(v, LEFT, WIDTH - RIGHT);
    let y_of = |v: f64| y_axis.place(v, HEIGHT - BOTTOM, TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        (LEFT + WIDTH - RIGHT) / 2.0,
        xml_escape(title)
    );

    for t in x_axis.ticks() {
        let x = x_of(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>",
            HEIGHT - BOTTOM
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            HEIGHT - BOTTOM + 18.0,
            tick_label(t)
        );
    }
    for t in y_axis.ticks() {
        let y = y_of(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.1}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            WIDTH - RIGHT
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.1}\" height=\"{:.1}\" \
         fill=\"none\" stroke=\"#000000\"/>",
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 12.0,
        xml_escape(x_label)
    );

    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let mut path = String::new();
        for &(x, y) in &s.points {
            let _ = write!(path, "{:.2},{:.2} ", x_of(x), y_of(y));
        }
        let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            path.trim_end(),
            s.color
        );
    }

    for (k, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * k as f64;
        let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
             stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            LEFT + 8.0,
            LEFT + 36.0,
            s.color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{y:.1}\" dy=\"4\">{}</text>",
            LEFT + 42.0,
            xml_escape(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

//! Self-contained SVG line plots of trace quantities.
//!
//! Output depends only on the inputs (fixed number formatting, no
//! timestamps), so identical traces give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::run::TraceRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    PsiErr,
    XErr,
    GammaSq,
    GramMinEig,
    Input(usize),
    Output(usize),
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::PsiErr => "‖ψ̃_t‖".into(),
            Quantity::XErr => "‖x̃_t‖".into(),
            Quantity::GammaSq => "‖γ_t‖²".into(),
            Quantity::GramMinEig => "λmin(Σ WᵢᵀWᵢ)".into(),
            Quantity::Input(i) => format!("u_{i}"),
            Quantity::Output(i) => format!("y_{i}"),
        }
    }

    pub fn value(&self, r: &TraceRecord) -> f64 {
        match *self {
            Quantity::PsiErr => r.psi_err,
            Quantity::XErr => r.x_err,
            Quantity::GammaSq => r.gamma_sq,
            Quantity::GramMinEig => r.gram_min_eig,
            Quantity::Input(i) => r.u.get(i).copied().unwrap_or(f64::NAN),
            Quantity::Output(i) => r.y.get(i).copied().unwrap_or(f64::NAN),
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let indexed = |prefix: &str| s.strip_prefix(prefix).and_then(|i| i.parse().ok());
        match s {
            "psi_err" => Ok(Quantity::PsiErr),
            "x_err" => Ok(Quantity::XErr),
            "gamma_sq" => Ok(Quantity::GammaSq),
            "gram_min_eig" => Ok(Quantity::GramMinEig),
            _ => {
                if let Some(i) = indexed("u_") {
                    Ok(Quantity::Input(i))
                } else if let Some(i) = indexed("y_") {
                    Ok(Quantity::Output(i))
                } else {
                    Err(Error::config("quantity", format!("unknown quantity `{s}`")))
                }
            }
        }
    }
}

/// One curve of an overlay plot.
#[derive(Debug, Clone, Copy)]
pub struct Series<'a> {
    pub label: &'a str,
    pub trace: &'a [TraceRecord],
    pub sie_step: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct PlotOptions<'a> {
    pub quantity: Quantity,
    pub log_scale: bool,
    pub title: &'a str,
}

fn nice_linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut v = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while v <= hi + step * 1e-9 {
        out.push(if v.abs() < step * 1e-9 { 0.0 } else { v });
        v += step;
    }
    out
}

fn fmt_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders an SVG document with one polyline per series and a dashed
/// vertical marker at each series' switching step.
pub fn render_svg(series: &[Series<'_>], opts: PlotOptions<'_>) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.trace.is_empty()) {
        return Err(Error::InsufficientSamples {
            needed: 1,
            available: 0,
        });
    }
    let transform = |v: f64| -> Option<f64> {
        if !v.is_finite() {
            None
        } else if opts.log_scale {
            (v > 0.0).then(|| v.log10())
        } else {
            Some(v)
        }
    };
    let points: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.trace
                .iter()
                .filter_map(|r| transform(opts.quantity.value(r)).map(|v| (r.t as f64, v)))
                .collect()
        })
        .collect();

    let all = points.iter().flatten();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        // nothing plottable, e.g. all-zero data on a log axis
        x0 = series[0].trace[0].t as f64;
        x1 = x0;
        y0 = 0.0;
        y1 = 0.0;
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        let pad = if y0 == 0.0 { 1.0 } else { y0.abs() * 0.1 };
        y0 -= pad;
        y1 += pad;
    }
    if opts.log_scale {
        y0 = y0.floor();
        y1 = y1.ceil();
    }

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(opts.title)
    );

    let yticks = if opts.log_scale {
        let step = ((y1 - y0) / 8.0).ceil().max(1.0);
        let mut v = y0;
        let mut out = Vec::new();
        while v <= y1 + 1e-9 {
            out.push(v);
            v += step;
        }
        out
    } else {
        nice_linear_ticks(y0, y1)
    };
    for v in &yticks {
        let y = sy(*v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(*v, opts.log_scale)
        );
    }
    for v in nice_linear_ticks(x0, x1) {
        let x = sx(v);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            fmt_tick(v, false)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t (samples)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&opts.quantity.label()),
        if opts.log_scale { " (log scale)" } else { "" }
    );

    for (k, (s, pts)) in series.iter().zip(&points).enumerate() {
        let color = COLORS[k % COLORS.len()];
        if pts.len() == 1 {
            let (x, y) = pts[0];
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        } else if !pts.is_empty() {
            let mut path = String::new();
            for (x, y) in pts {
                let _ = write!(path, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.trim_end()
            );
        }
        if let Some(ts) = s.sie_step {
            let x = sx(ts as f64);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="4 3"/>"#,
                TOP + ph
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" fill="{color}">t_SIE={ts}</text>"#,
                x + 4.0,
                TOP + 14.0 + 14.0 * k as f64
            );
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let lx = LEFT + pw - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 26.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(
    series: &[Series<'_>],
    opts: PlotOptions<'_>,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, render_svg(series, opts)?)?;
    Ok(())
}

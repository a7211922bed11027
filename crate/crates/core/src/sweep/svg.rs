//! Minimal line plots as SVG 1.1. Coordinates are printed with a fixed
//! number of decimals so identical data always gives identical bytes.

use std::fmt::Write as _;

use super::config::{BranchSelection, Metric};
use super::run::RunRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// Non-finite y values break the line.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).clamp(0.0, 12.0) as usize;
    let s = format!("{v:.decimals$}");
    // Avoid "-0.00".
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_owned()
    } else {
        s
    }
}

/// Finite data range padded so that flat data still gets an axis.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

pub fn render_svg(plot: &PlotSpec) -> String {
    let (x0, x1) = range(
        plot.series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0)),
    );
    let (y0, y1) = range(
        plot.series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1)),
    );
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&plot.title)
    );

    // Grid and ticks.
    let _ = writeln!(out, r##"<g stroke="#dddddd" stroke-width="1">"##);
    let mut labels = String::new();
    let xs = tick_step(x1 - x0);
    let mut k = (x0 / xs).ceil() as i64;
    while (k as f64) * xs <= x1 + 1e-9 * xs {
        let v = k as f64 * xs;
        let x = sx(v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
            TOP + ph
        );
        let _ = writeln!(
            labels,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            tick_label(v, xs)
        );
        k += 1;
    }
    let ys = tick_step(y1 - y0);
    let mut k = (y0 / ys).ceil() as i64;
    while (k as f64) * ys <= y1 + 1e-9 * ys {
        let v = k as f64 * ys;
        let y = sy(v);
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
            LEFT + pw
        );
        let _ = writeln!(
            labels,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick_label(v, ys)
        );
        k += 1;
    }
    let _ = writeln!(out, "</g>");
    out.push_str(&labels);

    // Axes box and labels.
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );

    // Data.
    for (i, s) in plot.series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, out: &mut String| {
            if segment.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
                    segment.join(" ")
                );
            } else if let Some(p) = segment.first() {
                let (cx, cy) = p.split_once(',').expect("x,y");
                let _ = writeln!(
                    out,
                    r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{colour}"/>"#
                );
            }
            segment.clear();
        };
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else {
                flush(&mut segment, &mut out);
            }
        }
        flush(&mut segment, &mut out);
    }

    // Legend.
    let lx = LEFT + pw + 16.0;
    for (i, s) in plot.series.iter().enumerate() {
        let y = TOP + 12.0 + 20.0 * i as f64;
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Builds plot series from sweep records, one series per curve (and per
/// branch or population where the metric has several).
pub fn plot_from_records(
    title: &str,
    x_label: &str,
    records: &[RunRecord],
    metric: Metric,
    branch: BranchSelection,
) -> PlotSpec {
    let mut curves: Vec<&str> = Vec::new();
    for r in records {
        if !curves.contains(&r.curve.as_str()) {
            curves.push(&r.curve);
        }
    }
    let join = |curve: &str, part: &str| match (curve.is_empty(), part.is_empty()) {
        (true, _) => part.to_owned(),
        (false, true) => curve.to_owned(),
        (false, false) => format!("{curve} ({part})"),
    };
    let mut series = Vec::new();
    for curve in curves {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.curve == curve).collect();
        let collect = |f: &dyn Fn(&super::run::PointResult) -> f64| {
            rows.iter()
                .map(|r| (r.x, r.outcome.as_ref().map_or(f64::NAN, f)))
                .collect::<Vec<_>>()
        };
        match metric {
            Metric::Gain => {
                for &b in branch.branches() {
                    let part = if branch == BranchSelection::Both {
                        b.name()
                    } else {
                        ""
                    };
                    series.push(Series {
                        label: join(curve, part),
                        points: collect(&|p| p.gain.rate(b)),
                    });
                }
            }
            Metric::Efficiency => series.push(Series {
                label: join(curve, ""),
                points: collect(&|p| p.fluxes.and_then(|f| f.efficiency).unwrap_or(f64::NAN)),
            }),
            Metric::Populations => {
                for (part, pick) in [
                    (
                        "gg",
                        (|p: &super::run::PointResult| p.populations.gg) as fn(&_) -> f64,
                    ),
                    ("g'g'", |p| p.populations.gpgp),
                    ("ee", |p| p.populations.ee),
                ] {
                    series.push(Series {
                        label: join(curve, part),
                        points: collect(&pick),
                    });
                }
            }
        }
    }
    let y_label = match metric {
        Metric::Gain => "Re G (MHz)",
        Metric::Efficiency => "efficiency",
        Metric::Populations => "population",
    };
    PlotSpec {
        title: title.to_owned(),
        x_label: x_label.to_owned(),
        y_label: y_label.to_owned(),
        series,
    }
}

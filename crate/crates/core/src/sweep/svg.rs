//! Two-panel SVG summary: coupling rate and slot energy fraction against
//! slot width.

use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::materials::rad_to_hz;
use crate::mesh::BoundaryTag;

use super::SweepRow;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const GAP: f64 = 90.0;

fn colour(bc: BoundaryTag) -> &'static str {
    match bc {
        BoundaryTag::Sealed => "#1f77b4",
        BoundaryTag::Open => "#ff7f0e",
    }
}

fn label(bc: BoundaryTag) -> &'static str {
    match bc {
        BoundaryTag::Sealed => "sealed (fixed)",
        BoundaryTag::Open => "open (free)",
    }
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct Panel {
    x0: f64,
    title: &'static str,
    y_label: &'static str,
    series: Vec<(BoundaryTag, Vec<(f64, f64)>)>,
}

fn draw(svg: &mut String, p: &Panel, x_max: f64) {
    let y_max = p
        .series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|q| q.1))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.1;
    let (left, top) = (p.x0 + MARGIN_L, MARGIN_T);
    let sx = |x: f64| left + x / x_max * PANEL_W;
    let sy = |y: f64| top + PANEL_H - y / y_max * PANEL_H;

    let _ = writeln!(svg, "<g class=\"panel\">");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        left + PANEL_W / 2.0,
        top - 15.0,
        p.title
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{left:.1}\" y=\"{top:.1}\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" fill=\"none\" stroke=\"black\"/>"
    );
    for t in ticks(0.0, x_max) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            top + PANEL_H,
            top + PANEL_H + 5.0,
            top + PANEL_H + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(0.0, y_max) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{left:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            left - 5.0,
            left - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">slot width (nm)</text>",
        left + PANEL_W / 2.0,
        top + PANEL_H + 40.0
    );
    let (lx, ly) = (p.x0 + 20.0, top + PANEL_H / 2.0);
    let _ = writeln!(
        svg,
        "<text x=\"{lx:.1}\" y=\"{ly:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {lx:.1} {ly:.1})\">{}</text>",
        p.y_label
    );
    for (k, (bc, pts)) in p.series.iter().enumerate() {
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            "<polyline class=\"series\" data-bc=\"{bc}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            colour(*bc),
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>",
                sx(x),
                sy(y),
                colour(*bc)
            );
        }
        let ey = top + 18.0 + 18.0 * k as f64;
        let ex = left + PANEL_W - 130.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{ex:.1}\" y1=\"{ey:.1}\" x2=\"{:.1}\" y2=\"{ey:.1}\" stroke=\"{}\" stroke-width=\"2\"/>\n<text class=\"legend\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>",
            ex + 20.0,
            colour(*bc),
            ex + 25.0,
            ey + 4.0,
            label(*bc)
        );
    }
    let _ = writeln!(svg, "</g>");
}

/// Renders the plot, or `None` when fewer than two widths succeeded.
pub fn render_svg(rows: &[SweepRow]) -> Option<String> {
    // g0 and eta do not depend on Q; keep the first row of each (width, bc)
    let mut seen: Vec<(u64, BoundaryTag)> = Vec::new();
    let mut tags: Vec<BoundaryTag> = Vec::new();
    let mut points: Vec<(BoundaryTag, f64, f64, f64)> = Vec::new();
    for row in rows {
        let Some(r) = row.report() else { continue };
        let key = (row.width.to_bits(), row.boundary);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        if !tags.contains(&row.boundary) {
            tags.push(row.boundary);
        }
        points.push((row.boundary, row.width * 1e9, rad_to_hz(r.g0) * 1e-3, r.eta_slot));
    }
    let mut widths: Vec<u64> = points.iter().map(|p| p.1.to_bits()).collect();
    widths.sort_unstable();
    widths.dedup();
    if widths.len() < 2 {
        return None;
    }
    tags.sort();
    let x_max = points.iter().map(|p| p.1).fold(0.0, f64::max) * 1.05;
    let series = |f: fn(&(BoundaryTag, f64, f64, f64)) -> f64, only: Option<BoundaryTag>| {
        tags.iter()
            .filter(|t| only.is_none_or(|o| o == **t))
            .map(|&t| {
                let mut pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 == t).map(|p| (p.1, f(p))).collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                (t, pts)
            })
            .collect::<Vec<_>>()
    };

    let total_w = 2.0 * (MARGIN_L + PANEL_W) + GAP;
    let total_h = MARGIN_T + PANEL_H + MARGIN_B;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{total_h}\" viewBox=\"0 0 {total_w} {total_h}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    draw(
        &mut svg,
        &Panel {
            x0: 0.0,
            title: "(a) coupling rate",
            y_label: "g0/2\u{3c0} (kHz)",
            series: series(|p| p.2, None),
        },
        x_max,
    );
    draw(
        &mut svg,
        &Panel {
            x0: MARGIN_L + PANEL_W + GAP,
            title: "(b) slot energy fraction",
            y_label: "\u{3b7} slot",
            series: series(|p| p.3, tags.first().copied()),
        },
        x_max,
    );
    let _ = writeln!(svg, "</svg>");
    Some(svg)
}

/// Writes the plot to `path`; returns `false` (with a warning) when there
/// are too few points to draw.
pub fn emit_svg(rows: &[SweepRow], path: &Path) -> Result<bool> {
    match render_svg(rows) {
        Some(svg) => {
            std::fs::write(path, svg).map_err(|e| Error::io(path, e))?;
            Ok(true)
        }
        None => {
            warn!("fewer than two successful widths; skipping {}", path.display());
            Ok(false)
        }
    }
}

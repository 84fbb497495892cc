use std::fmt::Write;

use super::color::{ColorScale, NEUTRAL};
use crate::attribution::{Explanation, Method};
use crate::position::PieceInstance;

/// One bar of the waterfall: the running total moves from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfallRow {
    pub piece: PieceInstance,
    pub phi: f64,
    pub start: f64,
    pub end: f64,
}

/// Contributions ordered by `|φ|`, largest first (ties in square order),
/// accumulated from the base value.
pub fn waterfall_rows(e: &Explanation) -> Vec<WaterfallRow> {
    let mut order: Vec<_> = e.contributions.iter().collect();
    order.sort_by(|a, b| b.phi.abs().total_cmp(&a.phi.abs()));
    let mut running = e.base_value.value();
    order
        .into_iter()
        .map(|c| {
            let start = running;
            running += c.phi;
            WaterfallRow { piece: c.piece, phi: c.phi, start, end: running }
        })
        .collect()
}

/// Plain-text waterfall for terminals.
pub fn to_waterfall_text(e: &Explanation) -> String {
    let mut out = String::new();
    let method = match e.method {
        Method::Exact => "exact",
        Method::Sampling => "sampling",
    };
    let _ = writeln!(out, "{}", crate::position::to_fen(&e.position));
    let _ = writeln!(
        out,
        "evaluator {}, {method}, {} evaluations, {} fallbacks",
        e.evaluator_id, e.evaluations_used, e.fallback_count
    );
    let _ = writeln!(out, "{:<22}{:>10}{:>10}", "base value", "", format!("{:.4}", e.base_value.value()));
    for row in waterfall_rows(e) {
        let label = format!("{} {} {}", row.piece.square, row.piece.color, row.piece.kind);
        let _ = writeln!(out, "{label:<22}{:>+10.4}{:>10.4}", row.phi, row.end);
    }
    let _ = writeln!(out, "{:<22}{:>10}{:>10}", "f(x)", "", format!("{:.4}", e.full_value.value()));
    out
}

/// Horizontal waterfall chart as SVG.
pub fn to_waterfall_svg(e: &Explanation) -> String {
    const ROW: f64 = 28.0;
    const LABEL: f64 = 150.0;
    const PLOT: f64 = 420.0;
    const VALUE: f64 = 80.0;

    let rows = waterfall_rows(e);
    let mut lo = e.base_value.value().min(e.full_value.value());
    let mut hi = e.base_value.value().max(e.full_value.value());
    for r in &rows {
        lo = lo.min(r.start).min(r.end);
        hi = hi.max(r.start).max(r.end);
    }
    let pad = ((hi - lo) * 0.05).max(0.01);
    let (lo, hi) = (lo - pad, hi + pad);
    let x = |v: f64| LABEL + (v - lo) / (hi - lo) * PLOT;

    let width = LABEL + PLOT + VALUE;
    let height = ROW * (rows.len() as f64 + 3.0);
    let scale = ColorScale::new(1.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="13">"#
    );
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##);

    let line = |svg: &mut String, row: usize, label: &str, from: f64, to: f64, fill: String, value: &str| {
        let y = ROW * (row as f64 + 0.5);
        let (a, b) = (x(from.min(to)), x(from.max(to)));
        let _ = writeln!(svg, r#"<text x="4" y="{ty:.1}">{label}</text>"#, ty = y + ROW * 0.5);
        let _ = writeln!(
            svg,
            r#"<rect x="{a:.2}" y="{y:.1}" width="{w:.2}" height="{h:.1}" fill="{fill}"/>"#,
            w = (b - a).max(1.0),
            h = ROW * 0.7,
        );
        let _ = writeln!(
            svg,
            r#"<text x="{vx:.1}" y="{ty:.1}">{value}</text>"#,
            vx = LABEL + PLOT + 6.0,
            ty = y + ROW * 0.5
        );
    };

    let base = e.base_value.value();
    line(&mut svg, 0, "base value", base, base, "#555555".into(), &format!("{base:.4}"));
    for (i, r) in rows.iter().enumerate() {
        // full intensity in the sign's family
        let fill = if r.phi.abs() > super::color::NEUTRAL_BAND {
            scale.color_for_phi(r.phi.signum() * 0.8).to_string()
        } else {
            NEUTRAL.to_string()
        };
        let label = format!("{} {}", r.piece.square, r.piece.kind);
        line(&mut svg, i + 1, &label, r.start, r.end, fill, &format!("{:+.4}", r.phi));
    }
    let full = e.full_value.value();
    line(&mut svg, rows.len() + 1, "f(x)", full, full, "#555555".into(), &format!("{full:.4}"));
    svg.push_str("</svg>\n");
    svg
}

//! Output formats for explanations: a versioned JSON document, an SVG board
//! heatmap and a waterfall (plain text or SVG).
//!
//! Every renderer is a pure function of the [`Explanation`]; the same input
//! always produces the same bytes.
//!
//! [`Explanation`]: crate::attribution::Explanation

mod board;
mod color;
mod json;
mod waterfall;

pub use board::to_svg_board;
pub use color::{ColorScale, Rgb, NEUTRAL, NEUTRAL_BAND, TINT_OPACITY};
pub use json::{
    from_json, to_json, ComparisonDocument, ContributionEntry, DocumentError, ExplanationDocument, SCHEMA_VERSION,
};
pub use waterfall::{to_waterfall_svg, to_waterfall_text, waterfall_rows, WaterfallRow};

use std::fmt::Write;

use crate::attribution::ContributionDelta;

/// Plain-text table of a comparison, one row per piece.
pub fn delta_table(deltas: &[ContributionDelta], label_a: &str, label_b: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20}{:>12}{:>12}{:>12}", "piece", label_a, label_b, "delta");
    for d in deltas {
        let label = format!("{} {} {}", d.piece.square, d.piece.color, d.piece.kind);
        let _ = writeln!(out, "{label:<20}{:>+12.4}{:>+12.4}{:>+12.4}", d.phi_a, d.phi_b, d.delta);
    }
    out
}

use serde::{Deserialize, Serialize};

use super::{AttributionError, Explanation};
use crate::position::PieceInstance;

/// One piece's attribution under two explanations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributionDelta {
    #[serde(flatten)]
    pub piece: PieceInstance,
    pub phi_a: f64,
    pub phi_b: f64,
    /// `phi_a - phi_b`
    pub delta: f64,
}

/// Pairs up the contributions of two explanations of the same pieces and
/// ranks them by disagreement, largest `|delta|` first. Ties keep square
/// order.
pub fn compare_explanations(a: &Explanation, b: &Explanation) -> Result<Vec<ContributionDelta>, AttributionError> {
    let same_pieces = a.contributions.len() == b.contributions.len()
        && a.contributions.iter().zip(&b.contributions).all(|(x, y)| x.piece == y.piece);
    if !same_pieces {
        return Err(AttributionError::PositionMismatch);
    }
    let mut rows: Vec<ContributionDelta> = a
        .contributions
        .iter()
        .zip(&b.contributions)
        .map(|(x, y)| ContributionDelta { piece: x.piece, phi_a: x.phi, phi_b: y.phi, delta: x.phi - y.phi })
        .collect();
    rows.sort_by(|x, y| y.delta.abs().total_cmp(&x.delta.abs()));
    Ok(rows)
}

use serde::{Deserialize, Serialize};

use crate::attribution::{
    compare_explanations, AttributionError, Contribution, ContributionDelta, Explanation, Method, WinProbability,
};
use crate::engine::Limits;
use crate::position::{non_king_indexing, parse_fen, to_fen, FenError, PieceInstance};

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized form of an [`Explanation`]. Floats are written in shortest
/// round-trip form, so every value reads back bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationDocument {
    pub schema_version: u32,
    pub fen: String,
    pub evaluator: String,
    pub method: Method,
    pub seed: Option<u64>,
    pub base_value: f64,
    pub full_value: f64,
    /// Sorted by square index.
    pub contributions: Vec<ContributionEntry>,
    pub evaluations_used: usize,
    pub fallback_count: usize,
    pub limits: Limits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributionEntry {
    #[serde(flatten)]
    pub piece: PieceInstance,
    pub phi: f64,
}

/// Two explanations of one position and their per-piece differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDocument {
    pub a: ExplanationDocument,
    pub b: ExplanationDocument,
    /// Largest `|delta|` first.
    pub deltas: Vec<ContributionDelta>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("invalid explanation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("document FEN: {0}")]
    Fen(#[from] FenError),
    #[error("contributions do not match the non-king pieces of the position")]
    ContributionMismatch,
    #[error("value {0} is not a probability")]
    NotAProbability(f64),
}

impl ExplanationDocument {
    pub fn from_explanation(e: &Explanation) -> Self {
        ExplanationDocument {
            schema_version: SCHEMA_VERSION,
            fen: to_fen(&e.position),
            evaluator: e.evaluator_id.clone(),
            method: e.method,
            seed: e.seed,
            base_value: e.base_value.value(),
            full_value: e.full_value.value(),
            contributions: e.contributions.iter().map(|c| ContributionEntry { piece: c.piece, phi: c.phi }).collect(),
            evaluations_used: e.evaluations_used,
            fallback_count: e.fallback_count,
            limits: e.limits,
        }
    }

    pub fn to_explanation(&self) -> Result<Explanation, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::SchemaVersion(self.schema_version));
        }
        let position = parse_fen(&self.fen)?;
        let indexing = non_king_indexing(&position);
        if indexing.pieces().len() != self.contributions.len()
            || indexing.pieces().iter().zip(&self.contributions).any(|(p, c)| *p != c.piece)
        {
            return Err(DocumentError::ContributionMismatch);
        }
        let prob = |v: f64| WinProbability::new(v).ok_or(DocumentError::NotAProbability(v));
        Ok(Explanation {
            position,
            evaluator_id: self.evaluator.clone(),
            method: self.method,
            base_value: prob(self.base_value)?,
            full_value: prob(self.full_value)?,
            contributions: self.contributions.iter().map(|c| Contribution { piece: c.piece, phi: c.phi }).collect(),
            evaluations_used: self.evaluations_used,
            fallback_count: self.fallback_count,
            seed: self.seed,
            limits: self.limits,
        })
    }
}

impl ComparisonDocument {
    pub fn new(a: &Explanation, b: &Explanation) -> Result<Self, AttributionError> {
        Ok(ComparisonDocument {
            a: ExplanationDocument::from_explanation(a),
            b: ExplanationDocument::from_explanation(b),
            deltas: compare_explanations(a, b)?,
        })
    }
}

/// Pretty-printed document, newline terminated.
pub fn to_json(e: &Explanation) -> String {
    let mut out = serde_json::to_string_pretty(&ExplanationDocument::from_explanation(e))
        .expect("explanation documents always serialize");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Explanation, DocumentError> {
    let doc: ExplanationDocument = serde_json::from_str(text)?;
    doc.to_explanation()
}

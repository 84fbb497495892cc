use serde::{Deserialize, Serialize};

use super::{EngineError, EngineScore, EvalLimit, EvaluationOutcome, Evaluator};
use crate::position::{Color, PieceKind, PositionState};

/// Centipawn value per piece kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialValues {
    pub pawn: i32,
    pub knight: i32,
    pub bishop: i32,
    pub rook: i32,
    pub queen: i32,
    pub king: i32,
}

impl Default for MaterialValues {
    fn default() -> Self {
        MaterialValues { pawn: 100, knight: 300, bishop: 300, rook: 500, queen: 900, king: 0 }
    }
}

impl MaterialValues {
    pub fn value(&self, kind: PieceKind) -> i32 {
        match kind {
            PieceKind::Pawn => self.pawn,
            PieceKind::Knight => self.knight,
            PieceKind::Bishop => self.bishop,
            PieceKind::Rook => self.rook,
            PieceKind::Queen => self.queen,
            PieceKind::King => self.king,
        }
    }
}

/// Scores a position as White's material minus Black's. Ignores squares,
/// side to move and the limit; never rejects.
#[derive(Debug, Clone)]
pub struct MaterialEvaluator {
    id: String,
    values: MaterialValues,
}

impl MaterialEvaluator {
    pub fn new(id: impl Into<String>, values: MaterialValues) -> Self {
        MaterialEvaluator { id: id.into(), values }
    }

    pub fn values(&self) -> &MaterialValues {
        &self.values
    }

    pub fn balance(&self, position: &PositionState) -> i32 {
        position
            .pieces()
            .map(|p| {
                let v = self.values.value(p.kind);
                match p.color {
                    Color::White => v,
                    Color::Black => -v,
                }
            })
            .sum()
    }
}

impl Default for MaterialEvaluator {
    fn default() -> Self {
        MaterialEvaluator::new(super::MATERIAL_ID, MaterialValues::default())
    }
}

impl Evaluator for MaterialEvaluator {
    fn id(&self) -> &str {
        &self.id
    }

    fn evaluate(&self, position: &PositionState, _limit: EvalLimit) -> Result<EvaluationOutcome, EngineError> {
        Ok(EvaluationOutcome::Scored(EngineScore::Centipawns(self.balance(position))))
    }
}

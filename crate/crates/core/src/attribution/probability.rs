use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::EngineScore;

/// Logistic calibration from centipawns to White's win probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMapping {
    /// Slope of the logistic, per centipawn. Must be positive.
    pub beta: f64,
    /// Mate in `m` is scored as `mate_cp_base - |m|` centipawns for the
    /// mating side, keeping shorter mates ahead of longer ones.
    pub mate_cp_base: i32,
}

impl Default for ProbabilityMapping {
    fn default() -> Self {
        ProbabilityMapping { beta: 3.68e-3, mate_cp_base: 10_000 }
    }
}

impl ProbabilityMapping {
    /// The centipawn value a score is mapped through.
    pub fn equivalent_centipawns(&self, score: EngineScore) -> f64 {
        match score {
            EngineScore::Centipawns(cp) => cp as f64,
            EngineScore::MateIn(m) => {
                let magnitude = (self.mate_cp_base as f64 - (m.unsigned_abs() as f64)).max(0.0);
                magnitude.copysign(m as f64)
            }
        }
    }

    pub fn centipawns_to_probability(&self, cp: f64) -> WinProbability {
        WinProbability(1.0 / (1.0 + (-self.beta * cp).exp()))
    }
}

/// White's win probability, always within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WinProbability(f64);

impl WinProbability {
    /// A drawn evaluation, and the value of the kings-only position.
    pub const EVEN: WinProbability = WinProbability(0.5);

    pub fn new(value: f64) -> Option<WinProbability> {
        (0.0..=1.0).contains(&value).then_some(WinProbability(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for WinProbability {
    type Error = String;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        WinProbability::new(value).ok_or_else(|| format!("probability {value} is outside [0, 1]"))
    }
}

impl From<WinProbability> for f64 {
    fn from(p: WinProbability) -> f64 {
        p.0
    }
}

impl fmt::Display for WinProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

pub fn score_to_probability(score: EngineScore, mapping: &ProbabilityMapping) -> WinProbability {
    mapping.centipawns_to_probability(mapping.equivalent_centipawns(score))
}

//! Evaluators: anything that turns a position into a score from White's
//! point of view.
//!
//! Two families are provided. [`MaterialEvaluator`] sums a piece value table
//! and is pure, fast and deterministic, which makes it the reference oracle
//! for the attribution tests. [`UciPool`] drives one or more external engine
//! processes over the UCI protocol.

mod material;
mod registry;
mod uci;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use material::{MaterialEvaluator, MaterialValues};
pub use registry::{EngineRegistry, EvaluatorDescriptor, EvaluatorKind, RegistryError, MATERIAL_ID};
pub use uci::{parse_search_output, SearchReport, UciConfig, UciPool, UciSession};

use crate::position::{Color, PositionState};

/// An engine verdict, always from White's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineScore {
    /// Positive favours White.
    Centipawns(i32),
    /// Moves to mate: positive when White mates, negative when Black mates.
    /// Never zero.
    MateIn(i32),
}

impl EngineScore {
    pub fn negate(self) -> EngineScore {
        match self {
            EngineScore::Centipawns(cp) => EngineScore::Centipawns(-cp),
            EngineScore::MateIn(m) => EngineScore::MateIn(-m),
        }
    }

    /// Converts a score reported relative to the side on move.
    pub fn from_side_to_move(relative: EngineScore, side_to_move: Color) -> EngineScore {
        match side_to_move {
            Color::White => relative,
            Color::Black => relative.negate(),
        }
    }
}

impl fmt::Display for EngineScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineScore::Centipawns(cp) => write!(f, "cp {cp}"),
            EngineScore::MateIn(m) => write!(f, "mate {m}"),
        }
    }
}

/// How much search an evaluation may spend. Counts must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalLimit {
    #[serde(rename = "movetime")]
    MoveTimeMillis(u64),
    #[serde(rename = "depth")]
    Depth(u32),
    #[serde(rename = "nodes")]
    Nodes(u64),
}

impl EvalLimit {
    /// Default limit for the unperturbed position.
    pub const ROOT_DEFAULT: EvalLimit = EvalLimit::MoveTimeMillis(5000);
    /// Default limit for each perturbed position.
    pub const PERTURBATION_DEFAULT: EvalLimit = EvalLimit::MoveTimeMillis(100);

    pub fn is_valid(&self) -> bool {
        match *self {
            EvalLimit::MoveTimeMillis(n) | EvalLimit::Nodes(n) => n > 0,
            EvalLimit::Depth(d) => d > 0,
        }
    }

    /// The arguments of a UCI `go` command.
    pub fn uci_go(&self) -> String {
        match self {
            EvalLimit::MoveTimeMillis(ms) => format!("go movetime {ms}"),
            EvalLimit::Depth(d) => format!("go depth {d}"),
            EvalLimit::Nodes(n) => format!("go nodes {n}"),
        }
    }
}

impl fmt::Display for EvalLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalLimit::MoveTimeMillis(ms) => write!(f, "movetime {ms}ms"),
            EvalLimit::Depth(d) => write!(f, "depth {d}"),
            EvalLimit::Nodes(n) => write!(f, "nodes {n}"),
        }
    }
}

/// Root and perturbation limits used for one explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub root: EvalLimit,
    pub perturbation: EvalLimit,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { root: EvalLimit::ROOT_DEFAULT, perturbation: EvalLimit::PERTURBATION_DEFAULT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvaluationOutcome {
    Scored(EngineScore),
    /// The evaluator could not accept the position.
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("failed to start engine {path}: {reason}")]
    SpawnFailed { path: String, reason: String },
    #[error("engine did not complete the UCI handshake in time")]
    HandshakeTimeout,
    #[error("engine process died: {0}")]
    EngineCrashed(String),
    #[error("unparseable engine reply: {0}")]
    ProtocolError(String),
    #[error("engine gave no answer within the time limit")]
    Timeout,
}

/// A position scorer. Implementations must be usable from many threads.
pub trait Evaluator: Send + Sync {
    fn id(&self) -> &str;

    /// Scores `position`; a `Scored` result is from White's point of view.
    fn evaluate(&self, position: &PositionState, limit: EvalLimit) -> Result<EvaluationOutcome, EngineError>;
}

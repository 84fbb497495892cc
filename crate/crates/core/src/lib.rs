//! Per-piece explanations of chess engine evaluations.
//!
//! An engine's verdict on a position is turned into White's win probability
//! and split additively among the non-king pieces with Shapley values. Each
//! piece's share is its average effect on the win probability when it is
//! added to the board, taken over all ways of building the position up from
//! the two bare kings.
//!
//! - [`position`]: FEN, piece features, ablation and legality repair
//! - [`engine`]: the material evaluator and UCI engine pools
//! - [`attribution`]: win probabilities and exact or sampled Shapley values
//! - [`render`]: JSON documents, SVG boards and waterfalls
//!
//! ```
//! use pieceshap::prelude::*;
//!
//! let position = parse_fen("8/2k5/2q5/8/4R3/4RK2/8/8 w - - 0 1")?;
//! let engine = MaterialEvaluator::default();
//! let explanation = Explainer::new(&engine).explain(&position)?;
//! for c in &explanation.contributions {
//!     println!("{} {:+.3}", c.piece, c.phi);
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod attribution;
pub mod engine;
pub mod position;
pub mod render;

pub mod prelude {
    pub use crate::attribution::{
        compare_explanations, score_to_probability, Explainer, Explanation, Method, ProbabilityMapping, SamplingConfig,
        SubsetCache, WinProbability,
    };
    pub use crate::engine::{
        EngineRegistry, EngineScore, EvalLimit, EvaluationOutcome, Evaluator, Limits, MaterialEvaluator, MaterialValues,
    };
    pub use crate::position::{
        build_subset_position, legality_status, non_king_indexing, parse_fen, repair, to_fen, PositionState, SubsetId,
    };
    pub use crate::render::{to_json, to_svg_board, to_waterfall_text, ColorScale};
}

// The guide in book/ is compiled and run as doctests so its snippets stay
// in sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/positions.md")]
    mod positions {}
    #[doc = include_str!("../../../book/src/win-probability.md")]
    mod win_probability {}
    #[doc = include_str!("../../../book/src/shapley.md")]
    mod shapley {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/engines.md")]
    mod engines {}
    #[doc = include_str!("../../../book/src/rendering.md")]
    mod rendering {}
    #[doc = include_str!("../../../book/src/cli-and-service.md")]
    mod cli_and_service {}
}

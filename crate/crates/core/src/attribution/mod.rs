//! Per-piece Shapley attribution of an evaluator's win probability.
//!
//! Every non-king piece is a player; the value of a coalition `S` is the
//! win probability of the position holding only `S` and the two kings. The
//! kings-only position is pinned at 0.5, so the contributions of all pieces
//! add up to `f(x) - 0.5`.
//!
//! Small positions are solved exactly from the full table of `2^n` coalition
//! values. Larger ones use seeded permutation sampling under an evaluation
//! budget (see [`Explainer::explain_sampling`]).

mod compare;
mod probability;
mod sampling;
mod subset;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{compare_explanations, ContributionDelta};
pub use probability::{score_to_probability, ProbabilityMapping, WinProbability};
pub use subset::{evaluate_subset, SubsetCache, SubsetValue};

use crate::engine::{EngineError, EvalLimit, Evaluator, Limits};
use crate::position::{non_king_indexing, PieceIndexing, PieceInstance, PositionState, SubsetId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    pub piece: PieceInstance,
    pub phi: f64,
}

/// The additive explanation of one position.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub position: PositionState,
    pub evaluator_id: String,
    pub method: Method,
    /// Value of the kings-only position; always 0.5.
    pub base_value: WinProbability,
    pub full_value: WinProbability,
    /// One entry per non-king piece, in ascending square order.
    pub contributions: Vec<Contribution>,
    /// Distinct perturbed positions evaluated, fallbacks included.
    pub evaluations_used: usize,
    /// Perturbed positions scored 0.5 because they could not be evaluated.
    pub fallback_count: usize,
    pub seed: Option<u64>,
    pub limits: Limits,
}

impl Explanation {
    pub fn phi_sum(&self) -> f64 {
        self.contributions.iter().map(|c| c.phi).sum()
    }

    /// `base + Σφ - f(x)`; zero up to rounding.
    pub fn efficiency_gap(&self) -> f64 {
        self.base_value.value() + self.phi_sum() - self.full_value.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Budget of distinct perturbed positions per explanation.
    pub max_evaluations: usize,
    pub seed: u64,
    /// Largest piece count solved exactly.
    pub exact_threshold: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { max_evaluations: 10_000, seed: 0, exact_threshold: 14 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttributionError {
    #[error("{pieces} non-king pieces exceed the exact-mode limit of {threshold}")]
    TooManyPieces { pieces: usize, threshold: usize },
    #[error("budget of {budget} evaluations is below the minimum {required} for {pieces} pieces")]
    BudgetTooSmall { budget: usize, required: usize, pieces: usize },
    #[error("explanations describe different positions")]
    PositionMismatch,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Progress of a running explanation, in distinct evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
}

/// Computes explanations against one evaluator.
///
/// ```
/// use pieceshap::attribution::Explainer;
/// use pieceshap::engine::MaterialEvaluator;
/// use pieceshap::position::parse_fen;
///
/// let position = parse_fen("8/2k5/2q5/8/4R3/4RK2/8/8 w - - 0 1").unwrap();
/// let engine = MaterialEvaluator::default();
/// let explanation = Explainer::new(&engine).explain(&position).unwrap();
/// assert_eq!(explanation.contributions.len(), 3);
/// assert!(explanation.efficiency_gap().abs() < 1e-9);
/// ```
pub struct Explainer<'a> {
    evaluator: &'a dyn Evaluator,
    limits: Limits,
    mapping: ProbabilityMapping,
    config: SamplingConfig,
    cache: Option<&'a SubsetCache>,
    progress: Option<&'a (dyn Fn(Progress) + Sync)>,
}

impl<'a> Explainer<'a> {
    pub fn new(evaluator: &'a dyn Evaluator) -> Self {
        Explainer {
            evaluator,
            limits: Limits::default(),
            mapping: ProbabilityMapping::default(),
            config: SamplingConfig::default(),
            cache: None,
            progress: None,
        }
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn mapping(mut self, mapping: ProbabilityMapping) -> Self {
        self.mapping = mapping;
        self
    }

    pub fn config(mut self, config: SamplingConfig) -> Self {
        self.config = config;
        self
    }

    /// Shares subset values with other runs. Without one, each run uses a
    /// private cache.
    pub fn cache(mut self, cache: &'a SubsetCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn on_progress(mut self, callback: &'a (dyn Fn(Progress) + Sync)) -> Self {
        self.progress = Some(callback);
        self
    }

    /// Exact when `n <= exact_threshold`, sampling otherwise.
    pub fn explain(&self, position: &PositionState) -> Result<Explanation, AttributionError> {
        if non_king_indexing(position).len() <= self.config.exact_threshold {
            self.explain_exact(position)
        } else {
            self.explain_sampling(position)
        }
    }

    /// Evaluates all `2^n` coalitions once and assembles every piece's
    /// Shapley value from that table.
    pub fn explain_exact(&self, position: &PositionState) -> Result<Explanation, AttributionError> {
        let run = Run::new(self, position);
        let n = run.indexing.len();
        if n > self.config.exact_threshold {
            return Err(AttributionError::TooManyPieces { pieces: n, threshold: self.config.exact_threshold });
        }
        let full = run.indexing.full_subset();
        let total = (1usize << n) - 1;
        let full_value = run.value(full, self.limits.root, total)?;

        let mut values = vec![0.0f64; 1 << n];
        values[0] = WinProbability::EVEN.value();
        values[full.mask() as usize] = full_value;
        if n > 1 {
            let inner: Vec<f64> = (1..full.mask())
                .into_par_iter()
                .map(|mask| run.value(SubsetId::new(mask, n), self.limits.perturbation, total))
                .collect::<Result<_, _>>()?;
            values[1..full.mask() as usize].copy_from_slice(&inner);
        }

        let phis = shapley_from_table(&values, n);
        Ok(run.finish(Method::Exact, full_value, phis, None))
    }

    /// Monte Carlo over orderings of the pieces.
    ///
    /// Each walk adds the pieces one at a time in a random order and credits
    /// every piece with the change it causes. Walks are drawn from a
    /// ChaCha8 generator seeded with `config.seed`; for up to eight pieces
    /// they are drawn without replacement from all `n!` orderings, so a
    /// large enough budget reproduces the exact values.
    ///
    /// The budget counts distinct coalitions evaluated, the root included;
    /// revisiting a coalition is free. Sampling stops at the first walk that
    /// would exceed the budget, after `max_evaluations` walks, or when every
    /// ordering has been used. The residual `f(x) - 0.5 - Σφ̂` is finally
    /// spread evenly over the pieces so the result is exactly additive.
    pub fn explain_sampling(&self, position: &PositionState) -> Result<Explanation, AttributionError> {
        let run = Run::new(self, position);
        let n = run.indexing.len();
        let budget = self.config.max_evaluations;
        let required = 2 * n + 2;
        if budget < required {
            return Err(AttributionError::BudgetTooSmall { budget, required, pieces: n });
        }
        let full_value = run.value(run.indexing.full_subset(), self.limits.root, budget)?;
        if n == 0 {
            return Ok(run.finish(Method::Sampling, full_value, Vec::new(), Some(self.config.seed)));
        }
        let mut phis = sampling::permutation_estimates(&run, n, full_value, self.config.seed, budget)?;
        let residual = full_value - WinProbability::EVEN.value() - phis.iter().sum::<f64>();
        let share = residual / n as f64;
        for phi in &mut phis {
            *phi += share;
        }
        Ok(run.finish(Method::Sampling, full_value, phis, Some(self.config.seed)))
    }
}

/// Shared state of one explanation run.
struct Run<'e, 'a> {
    explainer: &'e Explainer<'a>,
    position: &'e PositionState,
    indexing: PieceIndexing,
    private_cache: SubsetCache,
    evaluations: AtomicUsize,
    fallbacks: AtomicUsize,
}

impl<'e, 'a> Run<'e, 'a> {
    fn new(explainer: &'e Explainer<'a>, position: &'e PositionState) -> Self {
        Run {
            explainer,
            position,
            indexing: non_king_indexing(position),
            private_cache: SubsetCache::new(),
            evaluations: AtomicUsize::new(0),
            fallbacks: AtomicUsize::new(0),
        }
    }

    /// Value of a coalition never requested before in this run. The empty
    /// coalition is free and not counted.
    fn value(&self, subset: SubsetId, limit: EvalLimit, total: usize) -> Result<f64, EngineError> {
        let cache = self.explainer.cache.unwrap_or(&self.private_cache);
        let v = subset::evaluate_subset_with(
            self.position,
            &self.indexing,
            subset,
            self.explainer.evaluator,
            limit,
            &self.explainer.mapping,
            cache,
        )?;
        if subset.count() > 0 {
            if v.fallback {
                self.fallbacks.fetch_add(1, Ordering::Relaxed);
            }
            let done = self.evaluations.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(report) = self.explainer.progress {
                report(Progress { done, total });
            }
        }
        Ok(v.probability.value())
    }

    fn finish(self, method: Method, full_value: f64, phis: Vec<f64>, seed: Option<u64>) -> Explanation {
        let contributions =
            self.indexing.pieces().iter().zip(phis).map(|(&piece, phi)| Contribution { piece, phi }).collect();
        Explanation {
            position: self.position.clone(),
            evaluator_id: self.explainer.evaluator.id().to_string(),
            method,
            base_value: WinProbability::EVEN,
            full_value: WinProbability::new(full_value).expect("subset values are probabilities"),
            contributions,
            evaluations_used: self.evaluations.into_inner(),
            fallback_count: self.fallbacks.into_inner(),
            seed,
            limits: self.explainer.limits,
        }
    }
}

/// `φ_i = Σ_{S ∌ i} |S|!(n-|S|-1)!/n! · (v[S ∪ {i}] - v[S])` over a table
/// indexed by coalition mask.
fn shapley_from_table(values: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), 1 << n);
    // weight[k] = 1 / (n · C(n-1, k))
    let mut weights = Vec::with_capacity(n);
    let mut binom = 1.0f64;
    for k in 0..n {
        weights.push(1.0 / (n as f64 * binom));
        binom = binom * (n - 1 - k) as f64 / (k + 1) as f64;
    }
    let mut phis = vec![0.0; n];
    for (mask, &without) in values.iter().enumerate() {
        let w = weights.get(mask.count_ones() as usize).copied().unwrap_or(0.0);
        for (i, phi) in phis.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *phi += w * (values[mask | 1 << i] - without);
            }
        }
    }
    phis
}

use dashmap::DashMap;

use super::probability::{score_to_probability, ProbabilityMapping, WinProbability};
use crate::engine::{EngineError, EvalLimit, EvaluationOutcome, Evaluator};
use crate::position::{
    build_subset_with, legality_status, non_king_indexing, repair, to_fen, LegalityStatus, PieceIndexing,
    PositionState, RepairStatus, SubsetId,
};

/// Memoized subset values keyed by the FEN of the perturbed position with
/// its move counters zeroed.
///
/// Values depend on the evaluator, its limit and the probability mapping,
/// so a cache must only be shared between runs that agree on all three.
#[derive(Debug, Default)]
pub struct SubsetCache {
    map: DashMap<String, SubsetValue>,
}

impl SubsetCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<SubsetValue> {
        self.map.get(key).map(|v| *v)
    }

    /// Concurrent inserts of the same key keep the last write.
    pub fn insert(&self, key: String, value: SubsetValue) {
        self.map.insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn key_for(position: &PositionState) -> String {
        to_fen(&position.with_zeroed_counters())
    }
}

/// `f(x_S)` plus how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetValue {
    pub probability: WinProbability,
    /// The position could not be evaluated and was scored as a draw.
    pub fallback: bool,
}

impl SubsetValue {
    const FALLBACK: SubsetValue = SubsetValue { probability: WinProbability::EVEN, fallback: true };
}

/// Evaluates `f(x_S)`:
///
/// 1. the empty coalition is the kings-only baseline, 0.5, with no engine call;
/// 2. otherwise build `x_S` and repair it, scoring 0.5 when unresolvable;
/// 3. ask the evaluator; if it rejects the position, try once more with the
///    other side to move (when that is legal), then fall back to 0.5;
/// 4. map the score to a probability and store it in `cache`.
pub fn evaluate_subset(
    position: &PositionState,
    subset: SubsetId,
    evaluator: &dyn Evaluator,
    limit: EvalLimit,
    mapping: &ProbabilityMapping,
    cache: &SubsetCache,
) -> Result<SubsetValue, EngineError> {
    let indexing = non_king_indexing(position);
    evaluate_subset_with(position, &indexing, subset, evaluator, limit, mapping, cache)
}

pub(crate) fn evaluate_subset_with(
    position: &PositionState,
    indexing: &PieceIndexing,
    subset: SubsetId,
    evaluator: &dyn Evaluator,
    limit: EvalLimit,
    mapping: &ProbabilityMapping,
    cache: &SubsetCache,
) -> Result<SubsetValue, EngineError> {
    if subset.count() == 0 {
        return Ok(SubsetValue { probability: WinProbability::EVEN, fallback: false });
    }
    let perturbed = build_subset_with(position, indexing, subset);
    let key = SubsetCache::key_for(&perturbed);
    if let Some(hit) = cache.get(&key) {
        return Ok(hit);
    }

    let value = score_repaired(&perturbed, evaluator, limit, mapping)?;
    cache.insert(key, value);
    Ok(value)
}

fn score_repaired(
    perturbed: &PositionState,
    evaluator: &dyn Evaluator,
    limit: EvalLimit,
    mapping: &ProbabilityMapping,
) -> Result<SubsetValue, EngineError> {
    let repaired = repair(perturbed);
    if repaired.status == RepairStatus::Unresolvable {
        return Ok(SubsetValue::FALLBACK);
    }
    let scored = |outcome: EvaluationOutcome| match outcome {
        EvaluationOutcome::Scored(score) => {
            Some(SubsetValue { probability: score_to_probability(score, mapping), fallback: false })
        }
        EvaluationOutcome::Rejected(_) => None,
    };
    if let Some(v) = scored(evaluator.evaluate(&repaired.position, limit)?) {
        return Ok(v);
    }
    let flipped = repaired.position.with_side_flipped();
    if legality_status(&flipped) == LegalityStatus::Legal {
        if let Some(v) = scored(evaluator.evaluate(&flipped, limit)?) {
            return Ok(v);
        }
    }
    Ok(SubsetValue::FALLBACK)
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;
    use crate::engine::{EngineScore, MaterialEvaluator};
    use crate::position::{parse_fen, Color};

    const ROOKS_VS_QUEEN: &str = "8/2k5/2q5/8/4R3/4RK2/8/8 w - - 0 1";
    const LIMIT: EvalLimit = EvalLimit::Depth(1);

    fn eval(fen: &str, subset: SubsetId, e: &dyn Evaluator, cache: &SubsetCache) -> SubsetValue {
        evaluate_subset(&parse_fen(fen).unwrap(), subset, e, LIMIT, &ProbabilityMapping::default(), cache).unwrap()
    }

    #[test]
    fn full_and_empty_subsets() {
        let e = MaterialEvaluator::default();
        let cache = SubsetCache::new();
        let full = eval(ROOKS_VS_QUEEN, SubsetId::full(3), &e, &cache);
        assert!((full.probability.value() - 0.590_975_619_668_374).abs() < 1e-12);
        let empty = eval(ROOKS_VS_QUEEN, SubsetId::empty(3), &e, &cache);
        assert_eq!(empty.probability, WinProbability::EVEN);
        assert!(!empty.fallback);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn unresolvable_scores_a_draw() {
        let e = MaterialEvaluator::default();
        // Rh1 and ra8 without the two blocking pawns: both kings in check.
        let out = eval("r6k/8/8/7p/P7/8/8/K6R w - - 0 1", SubsetId::new(0b1001, 4), &e, &SubsetCache::new());
        assert!(out.fallback);
        assert_eq!(out.probability, WinProbability::EVEN);
    }

    /// Rejects White-to-move positions and counts calls.
    struct PickyEvaluator {
        calls: AtomicUsize,
        reject_all: bool,
    }

    impl Evaluator for PickyEvaluator {
        fn id(&self) -> &str {
            "picky"
        }

        fn evaluate(&self, position: &PositionState, _: EvalLimit) -> Result<EvaluationOutcome, EngineError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if self.reject_all || position.side_to_move() == Color::White {
                Ok(EvaluationOutcome::Rejected("no".into()))
            } else {
                Ok(EvaluationOutcome::Scored(EngineScore::Centipawns(200)))
            }
        }
    }

    #[test]
    fn rejection_retries_flipped_then_falls_back() {
        let picky = PickyEvaluator { calls: AtomicUsize::new(0), reject_all: false };
        let v = eval(ROOKS_VS_QUEEN, SubsetId::full(3), &picky, &SubsetCache::new());
        assert!(!v.fallback);
        assert!(v.probability.value() > 0.5);
        assert_eq!(picky.calls.load(Ordering::SeqCst), 2);

        let stubborn = PickyEvaluator { calls: AtomicUsize::new(0), reject_all: true };
        let v = eval(ROOKS_VS_QUEEN, SubsetId::full(3), &stubborn, &SubsetCache::new());
        assert!(v.fallback);
        assert_eq!(v.probability, WinProbability::EVEN);
        assert_eq!(stubborn.calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn cache_hits_skip_the_evaluator() {
        let picky = PickyEvaluator { calls: AtomicUsize::new(0), reject_all: false };
        let cache = SubsetCache::new();
        let a = eval(ROOKS_VS_QUEEN, SubsetId::new(0b011, 3), &picky, &cache);
        let b = eval(ROOKS_VS_QUEEN, SubsetId::new(0b011, 3), &picky, &cache);
        assert_eq!(a.probability.value().to_bits(), b.probability.value().to_bits());
        assert_eq!(picky.calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn cache_key_ignores_move_counters() {
        let a = parse_fen("8/2k5/8/8/8/5K2/8/8 w - - 12 40").unwrap();
        let b = parse_fen("8/2k5/8/8/8/5K2/8/8 w - - 0 1").unwrap();
        assert_eq!(SubsetCache::key_for(&a), SubsetCache::key_for(&b));
    }
}

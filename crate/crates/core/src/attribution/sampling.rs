use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Run, WinProbability};
use crate::engine::EngineError;
use crate::position::SubsetId;

/// Up to this many pieces the orderings are enumerated and drawn without
/// replacement (8! = 40320).
const ENUMERATE_UP_TO: usize = 8;

/// Walks resolved per parallel batch.
const BATCH: usize = 64;

/// Source of walk orderings.
enum Orderings {
    Shuffled(std::vec::IntoIter<Vec<usize>>),
    Random { n: usize, rng: Box<ChaCha8Rng> },
}

impl Orderings {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if n <= ENUMERATE_UP_TO {
            let mut all = all_orderings(n);
            all.shuffle(&mut rng);
            Orderings::Shuffled(all.into_iter())
        } else {
            Orderings::Random { n, rng: Box::new(rng) }
        }
    }
}

impl Iterator for Orderings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self {
            Orderings::Shuffled(it) => it.next(),
            Orderings::Random { n, rng } => {
                let mut order: Vec<usize> = (0..*n).collect();
                order.shuffle(rng);
                Some(order)
            }
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
fn all_orderings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Coalition masks visited by a walk, from the empty set to the full set.
fn prefixes(order: &[usize]) -> Vec<u64> {
    let mut masks = Vec::with_capacity(order.len() + 1);
    let mut mask = 0u64;
    masks.push(mask);
    for &i in order {
        mask |= 1 << i;
        masks.push(mask);
    }
    masks
}

/// Mean marginal contribution per piece, before residual correction.
///
/// Walks are admitted in generation order, so which walks are used depends
/// only on the seed and the budget, never on evaluation timing.
pub(super) fn permutation_estimates(
    run: &Run<'_, '_>,
    n: usize,
    full_value: f64,
    seed: u64,
    budget: usize,
) -> Result<Vec<f64>, EngineError> {
    let full_mask = (1u64 << n) - 1;
    let limit = run.explainer.limits.perturbation;
    let mut known: HashMap<u64, f64> = HashMap::new();
    known.insert(0, WinProbability::EVEN.value());
    known.insert(full_mask, full_value);
    // the root evaluation is already spent
    let mut spent = 1usize;

    let mut sums = vec![0.0f64; n];
    let mut walks = 0usize;
    let mut orderings = Orderings::new(n, seed);
    let mut exhausted = false;

    while !exhausted && walks < budget {
        let mut batch = Vec::with_capacity(BATCH);
        let mut pending: Vec<u64> = Vec::new();
        let mut pending_set: HashSet<u64> = HashSet::new();
        while batch.len() < BATCH && walks + batch.len() < budget {
            let Some(order) = orderings.next() else {
                exhausted = true;
                break;
            };
            let masks = prefixes(&order);
            let fresh: Vec<u64> =
                masks.iter().copied().filter(|m| !known.contains_key(m) && !pending_set.contains(m)).collect();
            if spent + pending.len() + fresh.len() > budget {
                exhausted = true;
                break;
            }
            for m in fresh {
                pending_set.insert(m);
                pending.push(m);
            }
            batch.push((order, masks));
        }

        let values: Vec<f64> =
            pending.par_iter().map(|&m| run.value(SubsetId::new(m, n), limit, budget)).collect::<Result<_, _>>()?;
        spent += pending.len();
        known.extend(pending.into_iter().zip(values));

        for (order, masks) in &batch {
            for (step, &piece) in order.iter().enumerate() {
                sums[piece] += known[&masks[step + 1]] - known[&masks[step]];
            }
        }
        walks += batch.len();
    }

    let walks = walks.max(1) as f64;
    Ok(sums.into_iter().map(|s| s / walks).collect())
}

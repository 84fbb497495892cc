use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use pieceshap::attribution::{Explainer, Explanation, Progress, SamplingConfig};
use pieceshap::engine::{EngineRegistry, Evaluator, Limits};
use pieceshap::position::{non_king_indexing, PositionState};
use pieceshap::render::{ComparisonDocument, ExplanationDocument};

use crate::jobs::{JobResult, JobState, JobStore, RunOptions};

/// Registry entries, built into evaluators on first use and kept for the
/// life of the service so engine processes are reused across jobs.
pub struct Engines {
    registry: EngineRegistry,
    built: Mutex<HashMap<String, Arc<dyn Evaluator>>>,
}

impl Engines {
    pub fn new(registry: EngineRegistry) -> Self {
        Engines { registry, built: Mutex::new(HashMap::new()) }
    }

    pub fn registry(&self) -> &EngineRegistry {
        &self.registry
    }

    fn get(&self, id: &str, options: &RunOptions) -> Result<(Arc<dyn Evaluator>, Limits), String> {
        let descriptor = self.registry.get(id).ok_or_else(|| format!("unknown evaluator {id:?}"))?;
        let mut built = self.built.lock().unwrap_or_else(|e| e.into_inner());
        let evaluator = match built.get(id) {
            Some(e) => e.clone(),
            None => {
                let e = descriptor.build().map_err(|e| format!("cannot start {id}: {e}"))?;
                built.insert(id.to_string(), e.clone());
                e
            }
        };
        let mut limits = descriptor.limits();
        if let Some(l) = options.root_limit {
            limits.root = l;
        }
        if let Some(l) = options.perturb_limit {
            limits.perturbation = l;
        }
        Ok((evaluator, limits))
    }
}

pub fn sampling_config(options: &RunOptions) -> SamplingConfig {
    let d = SamplingConfig::default();
    SamplingConfig {
        max_evaluations: options.max_evaluations.unwrap_or(d.max_evaluations),
        seed: options.seed.unwrap_or(d.seed),
        exact_threshold: options.exact_threshold.unwrap_or(d.exact_threshold),
    }
}

/// Evaluations an explanation will report progress against.
fn planned_total(position: &PositionState, config: &SamplingConfig) -> usize {
    let n = non_king_indexing(position).len();
    if n <= config.exact_threshold {
        (1usize << n) - 1
    } else {
        config.max_evaluations
    }
}

/// A validated job waiting in the queue.
pub struct QueuedJob {
    pub id: u64,
    pub position: PositionState,
    pub evaluators: Vec<String>,
    pub options: RunOptions,
}

/// Runs one job to completion on the current (blocking) thread.
pub fn run(job: QueuedJob, store: &JobStore, engines: &Engines) {
    let state = match explain_all(&job, store, engines) {
        Ok(result) => JobState::Done { result },
        Err(error) => JobState::Failed { error },
    };
    store.advance(job.id, state);
}

fn explain_all(job: &QueuedJob, store: &JobStore, engines: &Engines) -> Result<JobResult, String> {
    let config = sampling_config(&job.options);
    let per_run = planned_total(&job.position, &config);
    let total = per_run * job.evaluators.len();
    store.advance(job.id, JobState::Running { done: 0, total });

    let mut explanations: Vec<Explanation> = Vec::new();
    for (k, id) in job.evaluators.iter().enumerate() {
        let (evaluator, limits) = engines.get(id, &job.options)?;
        let offset = k * per_run;
        let report = |p: Progress| {
            store.advance(job.id, JobState::Running { done: offset + p.done, total });
        };
        let e = Explainer::new(evaluator.as_ref())
            .limits(limits)
            .config(config)
            .on_progress(&report)
            .explain(&job.position)
            .map_err(|e| e.to_string())?;
        explanations.push(e);
    }
    match explanations.as_slice() {
        [e] => Ok(JobResult::Explanation(Box::new(ExplanationDocument::from_explanation(e)))),
        [a, b] => ComparisonDocument::new(a, b).map(|d| JobResult::Comparison(Box::new(d))).map_err(|e| e.to_string()),
        _ => unreachable!("jobs name one or two evaluators"),
    }
}

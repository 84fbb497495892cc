use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use pieceshap::engine::{EvalLimit, MATERIAL_ID};
use pieceshap::render::{ComparisonDocument, ExplanationDocument};
use serde::{Deserialize, Serialize};

fn material() -> String {
    MATERIAL_ID.to_string()
}

/// Search and sampling settings shared by both request kinds. Anything left
/// out falls back to the evaluator's registry entry or the crate defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_limit: Option<EvalLimit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb_limit: Option<EvalLimit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_threshold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplainRequest {
    pub fen: String,
    #[serde(default = "material")]
    pub evaluator_id: String,
    #[serde(flatten)]
    pub options: RunOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRequest {
    pub fen: String,
    pub evaluator_a: String,
    pub evaluator_b: String,
    #[serde(flatten)]
    pub options: RunOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JobRequest {
    Explain(ExplainRequest),
    Compare(CompareRequest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JobResult {
    Explanation(Box<ExplanationDocument>),
    Comparison(Box<ComparisonDocument>),
}

/// Life cycle of a job: `queued`, then `running`, then `done` or `failed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum JobState {
    Queued,
    /// `done` of `total` perturbed positions evaluated.
    Running {
        done: usize,
        total: usize,
    },
    Done {
        result: JobResult,
    },
    Failed {
        error: String,
    },
}

impl JobState {
    fn rank(&self) -> u8 {
        match self {
            JobState::Queued => 0,
            JobState::Running { .. } => 1,
            JobState::Done { .. } | JobState::Failed { .. } => 2,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.rank() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: u64,
    pub request: JobRequest,
    #[serde(flatten)]
    pub state: JobState,
}

/// All jobs of the process lifetime. Transitions only move forward.
#[derive(Debug)]
pub struct JobStore {
    next: AtomicU64,
    jobs: Mutex<HashMap<u64, JobRecord>>,
}

impl Default for JobStore {
    fn default() -> Self {
        JobStore::new()
    }
}

impl JobStore {
    pub fn new() -> Self {
        JobStore { next: AtomicU64::new(1), jobs: Mutex::new(HashMap::new()) }
    }

    pub fn create(&self, request: JobRequest) -> u64 {
        let id = self.next.fetch_add(1, Ordering::Relaxed);
        self.lock().insert(id, JobRecord { id, request, state: JobState::Queued });
        id
    }

    pub fn get(&self, id: u64) -> Option<JobRecord> {
        self.lock().get(&id).cloned()
    }

    /// Drops a job that never made it into the queue.
    pub fn remove(&self, id: u64) {
        self.lock().remove(&id);
    }

    /// Moves a job to `state` unless that would go backwards or leave a
    /// finished state. Progress updates only ever increase `done`.
    pub fn advance(&self, id: u64, state: JobState) -> bool {
        let mut jobs = self.lock();
        let Some(job) = jobs.get_mut(&id) else { return false };
        let allowed = match (&job.state, &state) {
            (JobState::Running { done: old, .. }, JobState::Running { done: new, .. }) => new > old,
            (old, new) => !old.is_finished() && new.rank() > old.rank(),
        };
        if allowed {
            job.state = state;
        }
        allowed
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<u64, JobRecord>> {
        self.jobs.lock().unwrap_or_else(|e| e.into_inner())
    }
}

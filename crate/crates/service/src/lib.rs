//! HTTP job service for pieceshap explanations.
//!
//! | method | path          | body                | reply                                |
//! |--------|---------------|---------------------|--------------------------------------|
//! | POST   | `/explain`    | [`ExplainRequest`]  | 202 `{"job_id": N}`                  |
//! | POST   | `/compare`    | [`CompareRequest`]  | 202 `{"job_id": N}`                  |
//! | GET    | `/jobs/{id}`  |                     | [`JobRecord`]                        |
//! | GET    | `/engines`    |                     | `{"engines": [descriptor, ...]}`     |
//!
//! Submissions are rejected with 400 for a bad FEN or option, 404 for an
//! unknown evaluator and 429 when `queue_depth` jobs are already waiting.
//! Jobs run one at a time in submission order; a running job reports how
//! many perturbed positions it has evaluated so far.

mod api;
mod config;
mod jobs;
mod worker;

use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tower_http::services::ServeDir;

pub use api::MAX_EXACT_THRESHOLD;
pub use config::{ConfigError, ServiceConfig};
pub use jobs::{CompareRequest, ExplainRequest, JobRecord, JobRequest, JobResult, JobState, JobStore, RunOptions};
pub use worker::Engines;

#[doc(hidden)]
pub struct Inner {
    store: Arc<JobStore>,
    engines: Arc<Engines>,
    queue: mpsc::Sender<worker::QueuedJob>,
}

type AppState = Arc<Inner>;

/// Builds the router and starts the job worker. Must be called inside a
/// Tokio runtime.
pub fn app(config: &ServiceConfig) -> Result<Router, ConfigError> {
    let engines = Arc::new(Engines::new(config.registry()?));
    let store = Arc::new(JobStore::new());
    let (queue, mut jobs) = mpsc::channel::<worker::QueuedJob>(config.queue_depth);

    let (w_store, w_engines) = (store.clone(), engines.clone());
    tokio::spawn(async move {
        while let Some(job) = jobs.recv().await {
            let (store, engines) = (w_store.clone(), w_engines.clone());
            let id = job.id;
            let outcome = tokio::task::spawn_blocking(move || worker::run(job, &store, &engines)).await;
            if let Err(e) = outcome {
                w_store.advance(id, JobState::Failed { error: format!("job panicked: {e}") });
            }
        }
    });

    let state: AppState = Arc::new(Inner { store, engines, queue });
    let router = Router::new()
        .route("/explain", post(api::explain))
        .route("/compare", post(api::compare))
        .route("/jobs/{id}", get(api::job))
        .route("/engines", get(api::engines))
        .with_state(state);
    Ok(match &config.static_dir {
        Some(dir) => router.fallback_service(ServeDir::new(dir)),
        None => router,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: std::net::SocketAddr, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Binds `config.listen`, prints `listening on ADDR` to stderr and serves
/// until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    let router = app(&config)?;
    let listener =
        TcpListener::bind(config.listen).await.map_err(|source| ServeError::Bind { addr: config.listen, source })?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router).await?;
    Ok(())
}

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use pieceshap::engine::{EngineRegistry, RegistryError};
use serde::Deserialize;

/// The service's configuration document (TOML).
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// engines = "engines.toml"
/// pool_size = 4
/// queue_depth = 64
/// static_dir = "webui/dist"
/// ```
///
/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    /// Engine registry; only the built-in material evaluator when absent.
    pub engines: Option<PathBuf>,
    /// Processes per UCI engine that does not set its own `pool_size`.
    pub pool_size: Option<usize>,
    /// Jobs that may wait behind the running one before submissions get 429.
    #[serde(default = "default_queue_depth")]
    pub queue_depth: usize,
    /// Directory served at `/` for everything that is not an API route.
    pub static_dir: Option<PathBuf>,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_queue_depth() -> usize {
    64
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: default_listen(),
            engines: None,
            pool_size: None,
            queue_depth: default_queue_depth(),
            static_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("queue_depth must be at least 1")]
    QueueDepth,
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ServiceConfig = toml::from_str(text)?;
        if config.queue_depth == 0 {
            return Err(ConfigError::QueueDepth);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut config.engines, &mut config.static_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    /// The engine registry this config points at, with the default pool
    /// size applied.
    pub fn registry(&self) -> Result<EngineRegistry, ConfigError> {
        let mut registry = match &self.engines {
            Some(path) => EngineRegistry::load(path)?,
            None => EngineRegistry::default(),
        };
        if let Some(size) = self.pool_size {
            registry.set_default_pool_size(size);
        }
        Ok(registry)
    }
}

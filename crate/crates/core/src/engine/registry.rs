use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EngineError, EvalLimit, Evaluator, Limits, MaterialEvaluator, MaterialValues, UciConfig, UciPool};

/// Id of the built-in material evaluator, present in every registry.
pub const MATERIAL_ID: &str = "material";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EvaluatorKind {
    /// An external engine spoken to over UCI.
    Uci {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        args: Vec<String>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        options: BTreeMap<String, String>,
        /// Number of engine processes; defaults to the available parallelism.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pool_size: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        search_timeout_ms: Option<u64>,
    },
    /// The built-in material counter.
    Material {
        #[serde(default)]
        values: MaterialValues,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorDescriptor {
    pub id: String,
    #[serde(flatten)]
    pub kind: EvaluatorKind,
    #[serde(default = "root_default")]
    pub root_limit: EvalLimit,
    #[serde(default = "perturbation_default")]
    pub perturb_limit: EvalLimit,
}

fn root_default() -> EvalLimit {
    EvalLimit::ROOT_DEFAULT
}

fn perturbation_default() -> EvalLimit {
    EvalLimit::PERTURBATION_DEFAULT
}

impl EvaluatorDescriptor {
    pub fn material() -> Self {
        EvaluatorDescriptor {
            id: MATERIAL_ID.into(),
            kind: EvaluatorKind::Material { values: MaterialValues::default() },
            root_limit: EvalLimit::ROOT_DEFAULT,
            perturb_limit: EvalLimit::PERTURBATION_DEFAULT,
        }
    }

    /// A UCI engine given only by its executable path; the path doubles as id.
    pub fn uci_path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        EvaluatorDescriptor {
            id: path.display().to_string(),
            kind: EvaluatorKind::Uci {
                path,
                args: Vec::new(),
                options: BTreeMap::new(),
                pool_size: None,
                search_timeout_ms: None,
            },
            root_limit: EvalLimit::ROOT_DEFAULT,
            perturb_limit: EvalLimit::PERTURBATION_DEFAULT,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits { root: self.root_limit, perturbation: self.perturb_limit }
    }

    /// Instantiates the evaluator. For UCI engines this starts the processes.
    pub fn build(&self) -> Result<Arc<dyn Evaluator>, EngineError> {
        match &self.kind {
            EvaluatorKind::Material { values } => Ok(Arc::new(MaterialEvaluator::new(self.id.clone(), *values))),
            EvaluatorKind::Uci { path, args, options, pool_size, search_timeout_ms } => {
                let mut config = UciConfig::new(path);
                config.args = args.clone();
                config.options = options.clone();
                if let Some(ms) = search_timeout_ms {
                    config.search_timeout = Duration::from_millis(*ms);
                }
                let size =
                    pool_size.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
                Ok(Arc::new(UciPool::new(self.id.clone(), config, size)?))
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot read engine registry {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid engine registry: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("engine id {0:?} is defined more than once")]
    DuplicateId(String),
    #[error("engine {id:?} has a zero limit")]
    InvalidLimit { id: String },
}

#[derive(Deserialize)]
struct RegistryFile {
    #[serde(default)]
    engines: Vec<EvaluatorDescriptor>,
}

/// Evaluator descriptors by id. Always contains [`MATERIAL_ID`].
#[derive(Debug, Clone)]
pub struct EngineRegistry {
    entries: BTreeMap<String, EvaluatorDescriptor>,
}

impl Default for EngineRegistry {
    fn default() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(MATERIAL_ID.to_string(), EvaluatorDescriptor::material());
        EngineRegistry { entries }
    }
}

impl EngineRegistry {
    /// Parses a TOML document with an `[[engines]]` array.
    pub fn from_toml_str(text: &str) -> Result<Self, RegistryError> {
        let file: RegistryFile = toml::from_str(text)?;
        let mut registry = EngineRegistry::default();
        for d in file.engines {
            registry.insert(d)?;
        }
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| RegistryError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn insert(&mut self, descriptor: EvaluatorDescriptor) -> Result<(), RegistryError> {
        if !descriptor.root_limit.is_valid() || !descriptor.perturb_limit.is_valid() {
            return Err(RegistryError::InvalidLimit { id: descriptor.id });
        }
        if self.entries.contains_key(&descriptor.id) {
            return Err(RegistryError::DuplicateId(descriptor.id));
        }
        self.entries.insert(descriptor.id.clone(), descriptor);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&EvaluatorDescriptor> {
        self.entries.get(id)
    }

    /// Descriptors sorted by id.
    pub fn descriptors(&self) -> impl Iterator<Item = &EvaluatorDescriptor> {
        self.entries.values()
    }

    /// Looks `engine` up as an id, then as the path of a UCI executable.
    pub fn resolve(&self, engine: &str) -> Option<EvaluatorDescriptor> {
        if let Some(d) = self.get(engine) {
            return Some(d.clone());
        }
        Path::new(engine).is_file().then(|| EvaluatorDescriptor::uci_path(engine))
    }

    /// Gives every UCI engine without an explicit pool size `size` processes.
    pub fn set_default_pool_size(&mut self, size: usize) {
        for d in self.entries.values_mut() {
            if let EvaluatorKind::Uci { pool_size: p @ None, .. } = &mut d.kind {
                *p = Some(size);
            }
        }
    }
}

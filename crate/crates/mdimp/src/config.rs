//! Experiment configuration documents.
//!
//! ```toml
//! example = 4                 # built-in example, or the three paths below
//! # graph = "four_chain.graph"
//! # sem = "example4.model.toml"
//! # response = "example4.model.toml"
//! n = 200000
//! seed = 2024
//! methods = ["decomp", "mi", "miri", "cca", "aca"]
//! m = 5
//! iters = 5
//! # draws = 200000            # plug-in sample size, default n
//! # ordering = ["Z", "W", "X", "Y"]
//! prune = false
//! out = "results/example4"
//! jobs = 1
//! ```
//!
//! Relative paths are resolved against the directory holding the document.

use std::path::{Path, PathBuf};

use mdimp_core::experiment::{OrderingChoice, Settings};
use mdimp_core::identify::SearchLimits;
use mdimp_core::presets::{example_spec, ExampleSpec, PresetError};
use mdimp_core::Method;
use serde::Deserialize;
use thiserror::Error;

use crate::graph_doc::{read_graph, GraphDocError};
use crate::model_doc::{read_responses, read_sem, ModelDocError};

pub const DEFAULT_N: usize = 200_000;
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        source: toml::de::Error,
    },
    #[error("give either `example` or all of `graph`, `sem` and `response`")]
    ModelSource,
    #[error("unknown method `{0}` (known: mi, miri, cca, aca, plugin, decomp)")]
    UnknownMethod(String),
    #[error("`{0}` must be at least 1")]
    NonPositive(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphDocError),
    #[error(transparent)]
    Model(#[from] ModelDocError),
    #[error(transparent)]
    Preset(#[from] PresetError),
}

/// Where the model comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    Example(u32),
    Files {
        graph: PathBuf,
        sem: PathBuf,
        response: PathBuf,
    },
}

impl ModelSource {
    /// Loads the graph and both specifications; file models get id 0.
    pub fn load(&self) -> Result<ExampleSpec, ConfigError> {
        match self {
            ModelSource::Example(id) => Ok(example_spec(*id)?),
            ModelSource::Files {
                graph,
                sem,
                response,
            } => {
                let graph = read_graph(graph)?;
                let sem = read_sem(sem)?;
                let response = read_responses(response)?;
                sem.validate(&graph).map_err(ModelDocError::from)?;
                response.validate(&graph).map_err(ModelDocError::from)?;
                Ok(ExampleSpec {
                    id: 0,
                    graph,
                    sem,
                    response,
                })
            }
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    example: Option<u32>,
    graph: Option<PathBuf>,
    sem: Option<PathBuf>,
    response: Option<PathBuf>,
    n: Option<usize>,
    seed: Option<u64>,
    methods: Option<Vec<String>>,
    m: Option<usize>,
    iters: Option<usize>,
    draws: Option<usize>,
    ordering: Option<Vec<String>>,
    #[serde(default)]
    prune: bool,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    pub n: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub m: usize,
    pub iters: usize,
    pub draws: Option<usize>,
    pub ordering: Option<Vec<String>>,
    pub prune: bool,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn for_example(id: u32) -> Self {
        ExperimentConfig {
            model: ModelSource::Example(id),
            n: DEFAULT_N,
            seed: DEFAULT_SEED,
            methods: Method::ALL.to_vec(),
            m: 5,
            iters: 5,
            draws: None,
            ordering: None,
            prune: false,
            out: None,
            jobs: 1,
        }
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ConfigError::Toml { source, .. } => ConfigError::Toml {
                path: shown,
                source,
            },
            other => other,
        })
    }

    /// Parses a document whose relative paths are relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let doc: ConfigDoc = toml::from_str(text).map_err(|source| ConfigError::Toml {
            path: "<text>".into(),
            source,
        })?;
        let model = match (doc.example, doc.graph, doc.sem, doc.response) {
            (Some(id), None, None, None) => ModelSource::Example(id),
            (None, Some(g), Some(s), Some(r)) => ModelSource::Files {
                graph: base.join(g),
                sem: base.join(s),
                response: base.join(r),
            },
            _ => return Err(ConfigError::ModelSource),
        };
        let mut cfg = Self::for_example(0);
        cfg.model = model;
        if let Some(methods) = doc.methods {
            cfg.methods = parse_methods(&methods)?;
        }
        cfg.n = doc.n.unwrap_or(cfg.n);
        cfg.seed = doc.seed.unwrap_or(cfg.seed);
        cfg.m = doc.m.unwrap_or(cfg.m);
        cfg.iters = doc.iters.unwrap_or(cfg.iters);
        cfg.draws = doc.draws;
        cfg.ordering = doc.ordering;
        cfg.prune = doc.prune;
        cfg.out = doc.out.map(|o| base.join(o));
        cfg.jobs = doc.jobs.unwrap_or(cfg.jobs);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("n", self.n),
            ("m", self.m),
            ("iters", self.iters),
            ("jobs", self.jobs),
        ] {
            if v == 0 {
                return Err(ConfigError::NonPositive(name));
            }
        }
        Ok(())
    }

    pub fn settings(&self, limits: SearchLimits) -> Settings {
        Settings {
            m: self.m,
            iters: self.iters,
            draws: self.draws,
            prune: self.prune,
            limits,
        }
    }

    pub fn ordering_choice(&self) -> OrderingChoice {
        match &self.ordering {
            Some(names) => OrderingChoice::Explicit(names.clone()),
            None => OrderingChoice::Search,
        }
    }
}

/// Method ids in any order, deduplicated and sorted into table order.
pub fn parse_methods<S: AsRef<str>>(ids: &[S]) -> Result<Vec<Method>, ConfigError> {
    let mut out = ids
        .iter()
        .map(|s| {
            let s = s.as_ref().trim();
            Method::from_id(s).ok_or_else(|| ConfigError::UnknownMethod(s.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

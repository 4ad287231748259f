//! TOML documents for structural equations and response models.
//!
//! ```toml
//! [equations.X]
//! noise_sd = 1.0
//!
//! [equations.Y]
//! intercept = 0.0                  # optional, default 0
//! coefficients = { X = 1.0 }       # optional, default none
//! noise_sd = 1.0
//!
//! [responses.R_X]
//! probability = 0.7
//!
//! [responses.R_Y]                  # logit P(R_Y = 1) = X
//! logit = [{ coefficient = 1.0, factors = ["X"] }]
//! ```
//!
//! Equations and responses may live in one file or two; each loader reads only its table.

use std::collections::BTreeMap;
use std::path::Path;

use mdimp_core::graph::NodeId;
use mdimp_core::sem::{
    LogitTerm, ResponseModel, ResponseSpec, SemSpec, SpecError, StructuralEquation,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelDocError {
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
    #[error("response model for {0} needs exactly one of `probability` or `logit`")]
    AmbiguousResponse(String),
    #[error("{0}: empty name")]
    EmptyName(&'static str),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EquationDoc {
    #[serde(default)]
    intercept: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    coefficients: BTreeMap<String, f64>,
    noise_sd: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coefficient: f64,
    #[serde(default)]
    factors: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ResponseDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    logit: Option<Vec<TermDoc>>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    equations: BTreeMap<String, EquationDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    responses: BTreeMap<String, ResponseDoc>,
}

fn node(name: &str, what: &'static str) -> Result<NodeId, ModelDocError> {
    NodeId::new(name).map_err(|_| ModelDocError::EmptyName(what))
}

fn parse_doc(text: &str, path: &str) -> Result<ModelDoc, ModelDocError> {
    toml::from_str(text).map_err(|source| ModelDocError::Toml {
        path: path.to_string(),
        source,
    })
}

fn read(path: &Path) -> Result<ModelDoc, ModelDocError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ModelDocError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_doc(&text, &shown)
}

fn sem_from(doc: &ModelDoc) -> Result<SemSpec, ModelDocError> {
    let mut sem = SemSpec::new();
    for (var, eq) in &doc.equations {
        let coefficients = eq
            .coefficients
            .iter()
            .map(|(p, c)| Ok((node(p, "equation coefficient")?, *c)))
            .collect::<Result<_, ModelDocError>>()?;
        sem.insert(
            var,
            StructuralEquation {
                intercept: eq.intercept,
                coefficients,
                noise_sd: eq.noise_sd,
            },
        )?;
    }
    Ok(sem)
}

fn responses_from(doc: &ModelDoc) -> Result<ResponseSpec, ModelDocError> {
    let mut spec = ResponseSpec::new();
    for (ind, r) in &doc.responses {
        let model = match (r.probability, &r.logit) {
            (Some(p), None) => ResponseModel::Constant(p),
            (None, Some(terms)) => ResponseModel::Logistic(
                terms
                    .iter()
                    .map(|t| {
                        Ok(LogitTerm {
                            coefficient: t.coefficient,
                            factors: t
                                .factors
                                .iter()
                                .map(|f| node(f, "logit factor"))
                                .collect::<Result<_, _>>()?,
                        })
                    })
                    .collect::<Result<_, ModelDocError>>()?,
            ),
            _ => return Err(ModelDocError::AmbiguousResponse(ind.clone())),
        };
        spec.insert(ind, model)?;
    }
    Ok(spec)
}

pub fn parse_sem(text: &str) -> Result<SemSpec, ModelDocError> {
    sem_from(&parse_doc(text, "<text>")?)
}

pub fn parse_responses(text: &str) -> Result<ResponseSpec, ModelDocError> {
    responses_from(&parse_doc(text, "<text>")?)
}

pub fn read_sem(path: &Path) -> Result<SemSpec, ModelDocError> {
    sem_from(&read(path)?)
}

pub fn read_responses(path: &Path) -> Result<ResponseSpec, ModelDocError> {
    responses_from(&read(path)?)
}

/// One document holding both tables, readable by [`parse_sem`] and [`parse_responses`].
pub fn render_model(sem: &SemSpec, responses: &ResponseSpec) -> String {
    let doc = ModelDoc {
        equations: sem
            .equations()
            .map(|(v, eq)| {
                (
                    v.to_string(),
                    EquationDoc {
                        intercept: eq.intercept,
                        coefficients: eq
                            .coefficients
                            .iter()
                            .map(|(p, c)| (p.to_string(), *c))
                            .collect(),
                        noise_sd: eq.noise_sd,
                    },
                )
            })
            .collect(),
        responses: responses
            .models()
            .map(|(r, m)| {
                let doc = match m {
                    ResponseModel::Constant(p) => ResponseDoc {
                        probability: Some(*p),
                        logit: None,
                    },
                    ResponseModel::Logistic(terms) => ResponseDoc {
                        probability: None,
                        logit: Some(
                            terms
                                .iter()
                                .map(|t| TermDoc {
                                    coefficient: t.coefficient,
                                    factors: t.factors.iter().map(|f| f.to_string()).collect(),
                                })
                                .collect(),
                        ),
                    },
                };
                (r.to_string(), doc)
            })
            .collect(),
    };
    toml::to_string(&doc).expect("model documents always serialize")
}

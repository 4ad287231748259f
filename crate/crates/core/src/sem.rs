//! Linear-Gaussian structural equations for the substantive variables and logistic or
//! constant-probability models for the response indicators.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{MissingDataGraph, NodeId};
use crate::stats::{StatKind, StatisticId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("noise sd of `{var}` must be positive and finite, got {sd}")]
    NonPositiveNoise { var: String, sd: f64 },
    #[error("response probability of `{indicator}` must lie strictly between 0 and 1, got {p}")]
    ProbabilityOutOfRange { indicator: String, p: f64 },
    #[error("no structural equation for `{0}`")]
    MissingEquation(String),
    #[error("no response model for `{0}`")]
    MissingResponseModel(String),
    #[error("`{0}` is not a node of the graph")]
    UnknownNode(String),
    #[error("`{0}` is not a substantive variable")]
    NotSubstantive(String),
    #[error("`{0}` is not a response indicator")]
    NotAnIndicator(String),
    #[error("`{factor}` is not a parent of `{child}` in the graph")]
    NotAParent { factor: String, child: String },
    #[error("`{var}` has non-finite parameter")]
    NonFinite { var: String },
}

/// `var = intercept + Σ coefficient·parent + N(0, noise_sd²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralEquation {
    pub intercept: f64,
    pub coefficients: Vec<(NodeId, f64)>,
    pub noise_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SemSpec {
    equations: BTreeMap<NodeId, StructuralEquation>,
}

impl SemSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_equation(mut self, var: &str, eq: StructuralEquation) -> Result<Self, SpecError> {
        self.insert(var, eq)?;
        Ok(self)
    }

    pub fn insert(&mut self, var: &str, eq: StructuralEquation) -> Result<(), SpecError> {
        if !(eq.noise_sd > 0.0 && eq.noise_sd.is_finite()) {
            return Err(SpecError::NonPositiveNoise {
                var: var.to_string(),
                sd: eq.noise_sd,
            });
        }
        if !eq.intercept.is_finite() || eq.coefficients.iter().any(|(_, c)| !c.is_finite()) {
            return Err(SpecError::NonFinite {
                var: var.to_string(),
            });
        }
        let id = NodeId::new(var).map_err(|_| SpecError::UnknownNode(var.to_string()))?;
        self.equations.insert(id, eq);
        Ok(())
    }

    pub fn equation(&self, var: &str) -> Option<&StructuralEquation> {
        self.equations.get(var)
    }

    pub fn equations(&self) -> impl Iterator<Item = (&NodeId, &StructuralEquation)> {
        self.equations.iter()
    }

    /// Every substantive node has an equation whose regressors are its substantive parents.
    pub fn validate(&self, g: &MissingDataGraph) -> Result<(), SpecError> {
        for var in self.equations.keys() {
            let i = g
                .index_of(var.as_str())
                .ok_or_else(|| SpecError::UnknownNode(var.to_string()))?;
            if !g.role(i).is_substantive() {
                return Err(SpecError::NotSubstantive(var.to_string()));
            }
        }
        for v in g.substantive() {
            let name = g.id(v);
            let eq = self
                .equations
                .get(name)
                .ok_or_else(|| SpecError::MissingEquation(name.to_string()))?;
            for (p, _) in &eq.coefficients {
                let pi = g
                    .index_of(p.as_str())
                    .ok_or_else(|| SpecError::UnknownNode(p.to_string()))?;
                if !g.parents(v).contains(&pi) {
                    return Err(SpecError::NotAParent {
                        factor: p.to_string(),
                        child: name.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Exact means and covariances implied by the equations, in topological order.
    pub fn implied_moments(&self, g: &MissingDataGraph) -> Result<Moments, SpecError> {
        self.validate(g)?;
        let order: Vec<usize> = g
            .topological_indices()
            .into_iter()
            .filter(|&i| g.role(i).is_substantive())
            .collect();
        let k = order.len();
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut mean = vec![0.0; k];
        let mut cov = vec![vec![0.0; k]; k];
        for (a, &v) in order.iter().enumerate() {
            let eq = &self.equations[g.id(v)];
            let coefs: Vec<(usize, f64)> = eq
                .coefficients
                .iter()
                .map(|(p, c)| (pos[&g.index_of(p.as_str()).expect("validated")], *c))
                .collect();
            mean[a] = eq.intercept + coefs.iter().map(|&(p, c)| c * mean[p]).sum::<f64>();
            // cov(v, u) for earlier u: only parents carry covariance into v.
            #[allow(clippy::needless_range_loop)]
            for b in 0..a {
                let c: f64 = coefs.iter().map(|&(p, w)| w * cov[p][b]).sum();
                cov[a][b] = c;
                cov[b][a] = c;
            }
            let var: f64 = coefs
                .iter()
                .map(|&(p, w)| w * coefs.iter().map(|&(q, u)| u * cov[p][q]).sum::<f64>())
                .sum::<f64>()
                + eq.noise_sd * eq.noise_sd;
            cov[a][a] = var;
        }
        let names = order.iter().map(|&i| g.id(i).clone()).collect();
        Ok(Moments { names, mean, cov })
    }

    /// Stable text form used for provenance hashing.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (var, eq) in &self.equations {
            s.push_str(&format!("{var}={:e}", eq.intercept));
            let mut coefs = eq.coefficients.clone();
            coefs.sort_by(|a, b| a.0.cmp(&b.0));
            for (p, c) in coefs {
                s.push_str(&format!("+{c:e}*{p}"));
            }
            s.push_str(&format!("~{:e};", eq.noise_sd));
        }
        s
    }
}

/// Population means and covariance of the substantive variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    names: Vec<NodeId>,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl Moments {
    fn pos(&self, var: &str) -> Option<usize> {
        self.names.iter().position(|n| n.as_str() == var)
    }

    pub fn mean(&self, var: &str) -> Option<f64> {
        self.pos(var).map(|i| self.mean[i])
    }

    pub fn covariance(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.cov[self.pos(a)?][self.pos(b)?])
    }

    pub fn sd(&self, var: &str) -> Option<f64> {
        self.covariance(var, var).map(libm::sqrt)
    }

    pub fn correlation(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.covariance(a, b)? / (self.sd(a)? * self.sd(b)?))
    }

    pub fn statistic(&self, stat: &StatisticId) -> Option<f64> {
        match stat.kind() {
            StatKind::Mean => self.mean(stat.first().as_str()),
            StatKind::Sd => self.sd(stat.first().as_str()),
            StatKind::Corr => self.correlation(
                stat.first().as_str(),
                stat.second()
                    .expect("correlation has two variables")
                    .as_str(),
            ),
        }
    }
}

/// `coefficient · Π factors`; an empty factor list is a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitTerm {
    pub coefficient: f64,
    pub factors: Vec<NodeId>,
}

impl LogitTerm {
    pub fn new(coefficient: f64, factors: &[&str]) -> Self {
        LogitTerm {
            coefficient,
            factors: factors
                .iter()
                .map(|f| NodeId::new(*f).expect("nonempty factor name"))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResponseModel {
    /// `P(R = 1) = p`.
    Constant(f64),
    /// `logit P(R = 1) = Σ terms`.
    Logistic(Vec<LogitTerm>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResponseSpec {
    models: BTreeMap<NodeId, ResponseModel>,
}

impl ResponseSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_model(mut self, indicator: &str, model: ResponseModel) -> Result<Self, SpecError> {
        self.insert(indicator, model)?;
        Ok(self)
    }

    pub fn insert(&mut self, indicator: &str, model: ResponseModel) -> Result<(), SpecError> {
        match &model {
            ResponseModel::Constant(p) if !(*p > 0.0 && *p < 1.0) => {
                return Err(SpecError::ProbabilityOutOfRange {
                    indicator: indicator.to_string(),
                    p: *p,
                })
            }
            ResponseModel::Logistic(terms) if terms.iter().any(|t| !t.coefficient.is_finite()) => {
                return Err(SpecError::NonFinite {
                    var: indicator.to_string(),
                })
            }
            _ => {}
        }
        let id =
            NodeId::new(indicator).map_err(|_| SpecError::UnknownNode(indicator.to_string()))?;
        self.models.insert(id, model);
        Ok(())
    }

    pub fn model(&self, indicator: &str) -> Option<&ResponseModel> {
        self.models.get(indicator)
    }

    pub fn models(&self) -> impl Iterator<Item = (&NodeId, &ResponseModel)> {
        self.models.iter()
    }

    /// Every indicator has a model and every logistic factor is a graph parent of it.
    pub fn validate(&self, g: &MissingDataGraph) -> Result<(), SpecError> {
        for (name, model) in &self.models {
            let r = g
                .index_of(name.as_str())
                .ok_or_else(|| SpecError::UnknownNode(name.to_string()))?;
            if !g.is_indicator(r) {
                return Err(SpecError::NotAnIndicator(name.to_string()));
            }
            if let ResponseModel::Logistic(terms) = model {
                for f in terms.iter().flat_map(|t| &t.factors) {
                    let fi = g
                        .index_of(f.as_str())
                        .ok_or_else(|| SpecError::UnknownNode(f.to_string()))?;
                    if !g.parents(r).contains(&fi) {
                        return Err(SpecError::NotAParent {
                            factor: f.to_string(),
                            child: name.to_string(),
                        });
                    }
                }
            }
        }
        for r in g.indicators() {
            if !self.models.contains_key(g.id(r)) {
                return Err(SpecError::MissingResponseModel(g.id(r).to_string()));
            }
        }
        Ok(())
    }

    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (name, model) in &self.models {
            match model {
                ResponseModel::Constant(p) => s.push_str(&format!("{name}:p={p:e};")),
                ResponseModel::Logistic(terms) => {
                    s.push_str(&format!("{name}:logit="));
                    for t in terms {
                        s.push_str(&format!("+{:e}", t.coefficient));
                        for f in &t.factors {
                            s.push_str(&format!("*{f}"));
                        }
                    }
                    s.push(';');
                }
            }
        }
        s
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn zero_noise_is_rejected() {
        let eq = StructuralEquation {
            intercept: 0.0,
            coefficients: Vec::new(),
            noise_sd: 0.0,
        };
        assert!(matches!(
            SemSpec::new().with_equation("X", eq),
            Err(SpecError::NonPositiveNoise { .. })
        ));
    }

    #[test]
    fn constant_probability_must_be_interior() {
        for p in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(ResponseSpec::new()
                .with_model("R_X", ResponseModel::Constant(p))
                .is_err());
        }
    }

    #[test]
    fn response_factors_must_be_parents() {
        let g = presets::bivariate();
        let spec = ResponseSpec::new()
            .with_model("R_X", ResponseModel::Constant(0.7))
            .unwrap()
            .with_model(
                "R_Y",
                ResponseModel::Logistic(vec![LogitTerm::new(1.0, &["Y"])]),
            )
            .unwrap();
        assert!(matches!(
            spec.validate(&g),
            Err(SpecError::NotAParent { .. })
        ));
    }

    #[test]
    fn example1_moments() {
        let spec = presets::example_spec(1).unwrap();
        let m = spec.sem.implied_moments(&spec.graph).unwrap();
        assert!((m.sd("Y").unwrap() - libm::sqrt(2.0)).abs() < 1e-12);
        assert!((m.correlation("X", "Y").unwrap() - libm::sqrt(0.5)).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_is_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(3.0) + sigmoid(-3.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(-800.0).is_finite() && sigmoid(800.0) == 1.0);
    }
}

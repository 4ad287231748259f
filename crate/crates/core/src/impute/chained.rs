//! Multiple imputation by chained equations with Bayesian linear regression.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use super::regression::{ols, Design};
use super::{completed, observed_values, CompletedDataset, ImputeError};
use crate::graph::NodeId;
use crate::rng::Seed;
use crate::simulate::Dataset;

/// A regressor in an imputation model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predictor {
    /// Current (observed or imputed) value of a variable.
    Proxy(NodeId),
    /// Response indicator of a variable, as 0/1.
    Indicator(NodeId),
}

/// Which predictors enter the imputation model of each incomplete variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictorMatrix {
    rows: BTreeMap<NodeId, Vec<Predictor>>,
}

impl PredictorMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, target: NodeId, predictors: Vec<Predictor>) {
        self.rows.insert(target, predictors);
    }

    pub fn predictors(&self, target: &str) -> Option<&[Predictor]> {
        self.rows.get(target).map(Vec::as_slice)
    }

    /// Every incomplete variable is predicted by all other variables.
    pub fn standard(d: &Dataset) -> Self {
        let mut pm = PredictorMatrix::new();
        for target in d.variables().iter().filter(|v| v.n_missing() > 0) {
            let preds = d
                .variables()
                .iter()
                .filter(|v| v.name != target.name)
                .map(|v| Predictor::Proxy(v.name.clone()))
                .collect();
            pm.set(target.name.clone(), preds);
        }
        pm
    }

    /// [`Self::standard`] plus the response indicators of all other partially observed
    /// variables.
    pub fn with_indicators(d: &Dataset) -> Self {
        let mut pm = Self::standard(d);
        for (target, preds) in pm.rows.iter_mut() {
            preds.extend(
                d.variables()
                    .iter()
                    .filter(|v| v.is_partially_observed() && v.name != *target)
                    .map(|v| Predictor::Indicator(v.name.clone())),
            );
        }
        pm
    }

    fn validate(&self, d: &Dataset) -> Result<(), ImputeError> {
        for target in d.variables().iter().filter(|v| v.n_missing() > 0) {
            if !self.rows.contains_key(&target.name) {
                return Err(ImputeError::MissingPredictors(target.name.to_string()));
            }
        }
        for (target, preds) in &self.rows {
            if d.variable(target.as_str()).is_none() {
                return Err(ImputeError::UnknownVariable(target.to_string()));
            }
            for p in preds {
                match p {
                    Predictor::Proxy(v) if v == target => {
                        return Err(ImputeError::SelfPredictor(target.to_string()))
                    }
                    Predictor::Indicator(v) if v == target => {
                        return Err(ImputeError::OwnIndicator(target.to_string()))
                    }
                    Predictor::Proxy(v) => {
                        d.variable(v.as_str())
                            .ok_or_else(|| ImputeError::UnknownVariable(v.to_string()))?;
                    }
                    Predictor::Indicator(v) => {
                        let var = d
                            .variable(v.as_str())
                            .ok_or_else(|| ImputeError::UnknownVariable(v.to_string()))?;
                        if !var.is_partially_observed() {
                            return Err(ImputeError::NoIndicator(v.to_string()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

enum Source {
    Value(usize),
    Indicator(usize),
}

struct Model {
    target: usize,
    sources: Vec<Source>,
    observed_rows: Vec<usize>,
    missing_rows: Vec<usize>,
}

/// `m` independent chains. Missing cells start as random draws from the observed values of
/// the same column; each of `iters` sweeps refits every incomplete variable on its observed
/// rows, draws parameters from the posterior and re-imputes its missing cells.
/// Observed cells are never modified.
pub fn impute_chained(
    d: &Dataset,
    pm: &PredictorMatrix,
    m: usize,
    iters: usize,
    seed: Seed,
) -> Result<Vec<CompletedDataset>, ImputeError> {
    if m == 0 {
        return Err(ImputeError::InvalidCount { what: "m" });
    }
    if iters == 0 {
        return Err(ImputeError::InvalidCount { what: "iters" });
    }
    pm.validate(d)?;

    let vars = d.variables();
    let mut models = Vec::new();
    for (j, v) in vars.iter().enumerate() {
        if v.n_missing() == 0 {
            continue;
        }
        if v.n_missing() == d.n_rows() {
            return Err(ImputeError::ColumnAllMissing(v.name.to_string()));
        }
        let sources = pm
            .predictors(v.name.as_str())
            .expect("validated")
            .iter()
            .map(|p| match p {
                Predictor::Proxy(n) => Source::Value(d.position(n.as_str()).expect("validated")),
                Predictor::Indicator(n) => {
                    Source::Indicator(d.position(n.as_str()).expect("validated"))
                }
            })
            .collect();
        let (observed_rows, missing_rows) =
            (0..d.n_rows()).partition(|&row| v.proxy[row].is_some());
        models.push(Model {
            target: j,
            sources,
            observed_rows,
            missing_rows,
        });
    }

    let indicator_value = |var: usize, row: usize| -> f64 {
        let r = vars[var].indicator.as_ref().expect("validated");
        if r[row] {
            1.0
        } else {
            0.0
        }
    };

    let mut out = Vec::with_capacity(m);
    for chain in 0..m {
        let mut rng = seed.rng(chain as u64);
        let mut current: Vec<Vec<f64>> = vars
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if v.n_missing() == 0 {
                    return v.proxy.iter().map(|x| x.expect("complete")).collect();
                }
                let pool = observed_values(d, j);
                v.proxy
                    .iter()
                    .map(|x| x.unwrap_or_else(|| pool[rng.random_range(0..pool.len())]))
                    .collect()
            })
            .collect();

        let mut x = Vec::new();
        for _ in 0..iters {
            for model in &models {
                let q = model.sources.len() + 1;
                let fill_row = |current: &[Vec<f64>], row: usize, x: &mut Vec<f64>| {
                    x.clear();
                    x.push(1.0);
                    for s in &model.sources {
                        x.push(match *s {
                            Source::Value(k) => current[k][row],
                            Source::Indicator(k) => indicator_value(k, row),
                        });
                    }
                };
                let mut design = Design::with_capacity(q, model.observed_rows.len());
                let mut y = Vec::with_capacity(model.observed_rows.len());
                for &row in &model.observed_rows {
                    fill_row(&current, row, &mut x);
                    design.push_row(&x);
                    y.push(current[model.target][row]);
                }
                let draw = ols(&design, &y)?.draw(&mut rng);
                for &row in &model.missing_rows {
                    fill_row(&current, row, &mut x);
                    let value = draw.sample(&x, &mut rng);
                    current[model.target][row] = value;
                }
            }
        }
        out.push(completed(d, chain + 1, current));
    }
    Ok(out)
}

/// Chained equations whose models also include every other variable's response indicator.
pub fn impute_miri(
    d: &Dataset,
    m: usize,
    iters: usize,
    seed: Seed,
) -> Result<Vec<CompletedDataset>, ImputeError> {
    impute_chained(d, &PredictorMatrix::with_indicators(d), m, iters, seed)
}

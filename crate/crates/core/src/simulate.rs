//! Complete-data simulation, response indicators and the proxy mask.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{MissingDataGraph, NodeId};
use crate::rng::{streams, Seed};
use crate::sem::{sigmoid, ResponseModel, ResponseSpec, SemSpec, SpecError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("column `{name}` has {len} rows, expected {expected}")]
    LengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("response term of `{indicator}` uses indicator `{factor}` before it is generated")]
    IndicatorNotGenerated { indicator: String, factor: String },
    #[error("indicator `{0}` has no matching variable")]
    OrphanIndicator(String),
    #[error("variable `{0}` is observed but its proxy is missing, or the reverse")]
    MaskViolation(String),
    #[error("fully observed variable `{0}` has a missing value")]
    MissingInFullyObserved(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
}

/// True values of the substantive variables, one column per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteData {
    pub names: Vec<NodeId>,
    pub columns: Vec<Vec<f64>>,
}

impl CompleteData {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n.as_str() == name)
            .map(|i| self.columns[i].as_slice())
    }
}

/// Response indicator columns keyed by the variable they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Indicators {
    pub owners: Vec<NodeId>,
    pub columns: Vec<Vec<bool>>,
}

impl Indicators {
    pub fn column(&self, owner: &str) -> Option<&[bool]> {
        self.owners
            .iter()
            .position(|n| n.as_str() == owner)
            .map(|i| self.columns[i].as_slice())
    }
}

/// Observable form of one variable: the proxy column and, for partially observed
/// variables, the response indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: NodeId,
    pub proxy: Vec<Option<f64>>,
    pub indicator: Option<Vec<bool>>,
}

impl Variable {
    pub fn is_partially_observed(&self) -> bool {
        self.indicator.is_some()
    }

    pub fn observed(&self, row: usize) -> bool {
        self.indicator.as_ref().is_none_or(|r| r[row])
    }

    pub fn n_missing(&self) -> usize {
        self.proxy.iter().filter(|v| v.is_none()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub seed: Option<u64>,
    /// Hex SHA-256 of the canonical specification text.
    pub spec_hash: Option<String>,
}

/// Incomplete data as seen by estimators: proxies with `None` for NA, plus indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_rows: usize,
    variables: Vec<Variable>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Checks equal column lengths, `proxy.is_some() == indicator` for partially observed
    /// variables, and no NA in fully observed ones.
    pub fn new(variables: Vec<Variable>) -> Result<Self, SimulateError> {
        let n_rows = variables.first().map_or(0, |v| v.proxy.len());
        let mut seen = BTreeMap::new();
        for v in &variables {
            if seen.insert(v.name.clone(), ()).is_some() {
                return Err(SimulateError::DuplicateVariable(v.name.to_string()));
            }
            if v.proxy.len() != n_rows {
                return Err(SimulateError::LengthMismatch {
                    name: v.name.to_string(),
                    len: v.proxy.len(),
                    expected: n_rows,
                });
            }
            match &v.indicator {
                Some(r) => {
                    if r.len() != n_rows {
                        return Err(SimulateError::LengthMismatch {
                            name: v.name.to_string(),
                            len: r.len(),
                            expected: n_rows,
                        });
                    }
                    if r.iter().zip(&v.proxy).any(|(&r, p)| r != p.is_some()) {
                        return Err(SimulateError::MaskViolation(v.name.to_string()));
                    }
                }
                None => {
                    if v.proxy.iter().any(Option::is_none) {
                        return Err(SimulateError::MissingInFullyObserved(v.name.to_string()));
                    }
                }
            }
        }
        Ok(Dataset {
            n_rows,
            variables,
            provenance: Provenance::default(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name.as_str() == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name.as_str() == name)
    }

    pub fn names(&self) -> Vec<&NodeId> {
        self.variables.iter().map(|v| &v.name).collect()
    }

    pub fn n_missing(&self) -> usize {
        self.variables.iter().map(Variable::n_missing).sum()
    }

    /// Whether every response indicator in the row equals 1.
    pub fn row_complete(&self, row: usize) -> bool {
        self.variables.iter().all(|v| v.observed(row))
    }
}

/// Draws each substantive variable in topological order as
/// `intercept + Σ coefficient·parent + N(0, sd²)`.
pub fn simulate_complete(
    sem: &SemSpec,
    g: &MissingDataGraph,
    n: usize,
    seed: Seed,
) -> Result<CompleteData, SimulateError> {
    if n == 0 {
        return Err(SimulateError::EmptySample);
    }
    sem.validate(g)?;
    let mut rng = seed.rng(streams::COMPLETE_DATA);
    let mut values: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for v in g.topological_indices() {
        if !g.role(v).is_substantive() {
            continue;
        }
        let eq = sem.equation(g.id(v).as_str()).expect("validated");
        let parents: Vec<(&[f64], f64)> = eq
            .coefficients
            .iter()
            .map(|(p, c)| {
                let pi = g.index_of(p.as_str()).expect("validated");
                (values[&pi].as_slice(), *c)
            })
            .collect();
        let column: Vec<f64> = (0..n)
            .map(|row| {
                let noise: f64 = rng.sample(StandardNormal);
                eq.intercept
                    + parents.iter().map(|(col, c)| c * col[row]).sum::<f64>()
                    + eq.noise_sd * noise
            })
            .collect();
        values.insert(v, column);
    }
    let order = g.substantive();
    Ok(CompleteData {
        names: order.iter().map(|&i| g.id(i).clone()).collect(),
        columns: order
            .iter()
            .map(|i| values.remove(i).expect("generated"))
            .collect(),
    })
}

/// Draws each response indicator, in topological order, from its Bernoulli model.
pub fn simulate_responses(
    resp: &ResponseSpec,
    g: &MissingDataGraph,
    values: &CompleteData,
    seed: Seed,
) -> Result<Indicators, SimulateError> {
    resp.validate(g)?;
    let n = values.n_rows();
    for (name, col) in values.names.iter().zip(&values.columns) {
        if col.len() != n {
            return Err(SimulateError::LengthMismatch {
                name: name.to_string(),
                len: col.len(),
                expected: n,
            });
        }
    }
    let mut rng = seed.rng(streams::RESPONSES);
    let mut generated: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
    for r in g.topological_indices() {
        if !g.is_indicator(r) {
            continue;
        }
        let name = g.id(r);
        let column: Vec<bool> = match resp.model(name.as_str()).expect("validated") {
            ResponseModel::Constant(p) => (0..n).map(|_| rng.random::<f64>() < *p).collect(),
            ResponseModel::Logistic(terms) => {
                let mut compiled: Vec<(f64, Vec<Factor<'_>>)> = Vec::with_capacity(terms.len());
                for t in terms {
                    let mut factors = Vec::with_capacity(t.factors.len());
                    for f in &t.factors {
                        let fi = g.index_of(f.as_str()).expect("validated");
                        if g.is_indicator(fi) {
                            let col = generated.get(&fi).ok_or_else(|| {
                                SimulateError::IndicatorNotGenerated {
                                    indicator: name.to_string(),
                                    factor: f.to_string(),
                                }
                            })?;
                            factors.push(Factor::Indicator(col));
                        } else {
                            let col = values.column(f.as_str()).ok_or_else(|| {
                                SimulateError::Spec(SpecError::UnknownNode(f.to_string()))
                            })?;
                            factors.push(Factor::Value(col));
                        }
                    }
                    compiled.push((t.coefficient, factors));
                }
                (0..n)
                    .map(|row| {
                        let eta: f64 = compiled
                            .iter()
                            .map(|(c, fs)| c * fs.iter().map(|f| f.at(row)).product::<f64>())
                            .sum();
                        rng.random::<f64>() < sigmoid(eta)
                    })
                    .collect()
            }
        };
        generated.insert(r, column);
    }
    let mut owners = Vec::new();
    let mut columns = Vec::new();
    for x in g.partially_observed() {
        let r = g.indicator_of(x).expect("validated graph");
        owners.push(g.id(x).clone());
        columns.push(generated.remove(&r).expect("generated"));
    }
    Ok(Indicators { owners, columns })
}

enum Factor<'a> {
    Value(&'a [f64]),
    Indicator(&'a [bool]),
}

impl Factor<'_> {
    fn at(&self, row: usize) -> f64 {
        match self {
            Factor::Value(c) => c[row],
            Factor::Indicator(c) => f64::from(u8::from(c[row])),
        }
    }
}

/// Builds proxies: the true value where the indicator is 1, NA where it is 0.
/// Variables without an indicator column are fully observed.
pub fn apply_mask(
    values: &CompleteData,
    indicators: &Indicators,
) -> Result<Dataset, SimulateError> {
    let n = values.n_rows();
    for owner in &indicators.owners {
        if values.column(owner.as_str()).is_none() {
            return Err(SimulateError::OrphanIndicator(owner.to_string()));
        }
    }
    let mut vars = Vec::with_capacity(values.names.len());
    for (name, col) in values.names.iter().zip(&values.columns) {
        if col.len() != n {
            return Err(SimulateError::LengthMismatch {
                name: name.to_string(),
                len: col.len(),
                expected: n,
            });
        }
        let var = match indicators.column(name.as_str()) {
            Some(r) => {
                if r.len() != n {
                    return Err(SimulateError::LengthMismatch {
                        name: name.to_string(),
                        len: r.len(),
                        expected: n,
                    });
                }
                Variable {
                    name: name.clone(),
                    proxy: col
                        .iter()
                        .zip(r)
                        .map(|(&x, &obs)| obs.then_some(x))
                        .collect(),
                    indicator: Some(r.to_vec()),
                }
            }
            None => Variable {
                name: name.clone(),
                proxy: col.iter().map(|&x| Some(x)).collect(),
                indicator: None,
            },
        };
        vars.push(var);
    }
    Dataset::new(vars)
}

/// A simulated dataset together with the values it was masked from.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub dataset: Dataset,
    pub truth: CompleteData,
}

/// Complete data, indicators and mask in one step, with provenance filled in.
pub fn simulate_dataset(
    g: &MissingDataGraph,
    sem: &SemSpec,
    resp: &ResponseSpec,
    n: usize,
    seed: Seed,
) -> Result<Simulation, SimulateError> {
    let truth = simulate_complete(sem, g, n, seed)?;
    let indicators = simulate_responses(resp, g, &truth, seed)?;
    let mut dataset = apply_mask(&truth, &indicators)?;
    dataset.provenance = Provenance {
        seed: Some(seed.0),
        spec_hash: Some(spec_hash(g, sem, resp)),
    };
    Ok(Simulation { dataset, truth })
}

/// Hex SHA-256 over a canonical rendering of graph, equations and response models.
pub fn spec_hash(g: &MissingDataGraph, sem: &SemSpec, resp: &ResponseSpec) -> String {
    let mut text = String::new();
    for node in g.nodes() {
        text.push_str(node.id.as_str());
        text.push(match node.role {
            crate::graph::NodeRole::FullyObserved => 'O',
            crate::graph::NodeRole::PartiallyObserved => 'X',
            crate::graph::NodeRole::ResponseIndicator { .. } => 'R',
        });
        text.push(';');
    }
    for (p, c) in g.edges() {
        text.push_str(p.as_str());
        text.push_str("->");
        text.push_str(c.as_str());
        text.push(';');
    }
    text.push_str(&sem.canonical_text());
    text.push_str(&resp.canonical_text());
    let digest = Sha256::digest(text.as_bytes());
    digest
        .iter()
        .map(|b| alloc::format!("{b:02x}"))
        .collect::<Vec<_>>()
        .concat()
}

impl core::fmt::Display for Provenance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match (&self.seed, &self.spec_hash) {
            (Some(s), Some(h)) => write!(f, "seed={s} spec={h}"),
            (Some(s), None) => write!(f, "seed={s}"),
            (None, Some(h)) => write!(f, "spec={h}"),
            (None, None) => f.write_str("unknown"),
        }
    }
}

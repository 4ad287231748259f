//! Runs the estimators on one dataset and collects their estimates into a bias table.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::MissingDataGraph;
use crate::identify::{
    find_decomposable_ordering, full_law_identifiable, target_law_factorization, verify_ordering,
    FactorizationTerm, IdentifyError, Ordering, OrderingCertificate, SearchLimits,
};
use crate::impute::{
    available_case_estimates, complete_case_estimates, impute_chained, impute_decomposable,
    impute_miri, plug_in_target_law, CompletedDataset, ImputeError, PredictorMatrix,
};
use crate::rng::{labels, Seed};
use crate::simulate::Dataset;
use crate::stats::{bias_table, pool, summarize, EstimateTable, Method, StatisticId, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error("no decomposable ordering exists ({diagnosis})")]
    NoOrdering { diagnosis: String },
    #[error("ordering {ordering} is not admissible; failing: {failing}")]
    InvalidOrdering { ordering: String, failing: String },
    #[error(transparent)]
    Impute(#[from] ImputeError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    /// Number of imputations.
    pub m: usize,
    /// Sweeps per chained-equations chain.
    pub iters: usize,
    /// Plug-in sample size; `None` means the number of data rows.
    pub draws: Option<usize>,
    /// Prune conditioning sets of the factorization.
    pub prune: bool,
    pub limits: SearchLimits,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            m: 5,
            iters: 5,
            draws: None,
            prune: false,
            limits: SearchLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OrderingChoice {
    /// Lexicographically first admissible ordering.
    #[default]
    Search,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub certificate: OrderingCertificate,
    pub terms: Vec<FactorizationTerm>,
}

/// Finds or checks the ordering and builds its chain factorization.
pub fn resolve_factorization(
    g: &MissingDataGraph,
    choice: &OrderingChoice,
    settings: &Settings,
) -> Result<Factorization, ExperimentError> {
    let certificate = match choice {
        OrderingChoice::Explicit(names) => {
            let cert = verify_ordering(g, &Ordering::new(g, names)?);
            if !cert.is_valid() {
                let failing: Vec<String> = cert.failing().map(|c| c.to_string()).collect();
                return Err(ExperimentError::InvalidOrdering {
                    ordering: cert.ordering().to_string(),
                    failing: failing.join("; "),
                });
            }
            cert
        }
        OrderingChoice::Search => match find_decomposable_ordering(g, settings.limits)? {
            Some(cert) => cert,
            None => {
                let decision = full_law_identifiable(g);
                let diagnosis = if decision.identifiable() {
                    "full law is identifiable; use mi or miri".to_string()
                } else {
                    let w: Vec<String> =
                        decision.witnesses().iter().map(|w| w.to_string()).collect();
                    alloc::format!("full law not identifiable: {}", w.join(", "))
                };
                return Err(ExperimentError::NoOrdering { diagnosis });
            }
        },
    };
    let terms = target_law_factorization(g, &certificate, settings.prune)?;
    Ok(Factorization { certificate, terms })
}

/// Seed used by `method`; independent of which other methods run.
pub fn method_seed(seed: Seed, method: Method) -> Seed {
    match method {
        Method::Mi => seed.derive(labels::CHAINED),
        Method::Miri => seed.derive(labels::CHAINED_WITH_INDICATORS),
        Method::DecompMi => seed.derive(labels::DECOMPOSABLE),
        Method::PlugIn => seed.derive(labels::PLUG_IN),
        Method::Cca | Method::Aca => seed,
    }
}

fn pooled(sets: &[CompletedDataset], stats: &[StatisticId]) -> Result<Vec<f64>, ExperimentError> {
    let per: Vec<Vec<f64>> = sets
        .iter()
        .map(|c| summarize(c, stats))
        .collect::<Result<_, _>>()?;
    Ok(pool(&per)?)
}

/// Point estimates of `stats` by one method.
pub fn estimate(
    method: Method,
    d: &Dataset,
    stats: &[StatisticId],
    factorization: Option<&Factorization>,
    settings: &Settings,
    seed: Seed,
) -> Result<Vec<f64>, ExperimentError> {
    let seed = method_seed(seed, method);
    let need = || {
        factorization.ok_or_else(|| ExperimentError::NoOrdering {
            diagnosis: "no factorization supplied".into(),
        })
    };
    match method {
        Method::Mi => {
            let pm = PredictorMatrix::standard(d);
            pooled(
                &impute_chained(d, &pm, settings.m, settings.iters, seed)?,
                stats,
            )
        }
        Method::Miri => pooled(&impute_miri(d, settings.m, settings.iters, seed)?, stats),
        Method::Cca => Ok(complete_case_estimates(d, stats)?),
        Method::Aca => Ok(available_case_estimates(d, stats)?),
        Method::DecompMi => {
            let f = need()?;
            let sets = impute_decomposable(d, &f.certificate, &f.terms, settings.m, seed)?;
            pooled(&sets, stats)
        }
        Method::PlugIn => {
            let f = need()?;
            let draws = settings.draws.unwrap_or(d.n_rows());
            let sample = plug_in_target_law(d, &f.terms, draws, seed)?;
            Ok(summarize(&sample, stats)?)
        }
    }
}

/// Runs `methods` one after another and tabulates biases against `truth`.
pub fn run_methods(
    g: &MissingDataGraph,
    d: &Dataset,
    truth: &[(StatisticId, f64)],
    methods: &[Method],
    choice: &OrderingChoice,
    settings: &Settings,
    seed: Seed,
) -> Result<EstimateTable, ExperimentError> {
    let stats: Vec<StatisticId> = truth.iter().map(|(s, _)| s.clone()).collect();
    let factorization = if methods.iter().any(|m| m.needs_ordering()) {
        Some(resolve_factorization(g, choice, settings)?)
    } else {
        None
    };
    let mut estimates = BTreeMap::new();
    for &method in methods {
        let values = estimate(method, d, &stats, factorization.as_ref(), settings, seed)?;
        estimates.insert(method, stats.iter().cloned().zip(values).collect());
    }
    Ok(bias_table(truth, methods, &estimates)?)
}

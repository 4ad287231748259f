//! Experiment runner: simulate, estimate with each method (optionally in parallel), tabulate.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use mdimp_core::experiment::{estimate, resolve_factorization, ExperimentError, Factorization};
use mdimp_core::identify::SearchLimits;
use mdimp_core::presets::ExampleSpec;
use mdimp_core::simulate::{simulate_dataset, Dataset, SimulateError};
use mdimp_core::stats::{bias_table, EstimateTable, StatsError};
use mdimp_core::{Method, Seed, StatisticId};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{method}: {source}")]
    Method {
        method: &'static str,
        source: ExperimentError,
    },
}

type Slot = Mutex<Option<Result<Vec<f64>, ExperimentError>>>;

#[derive(Debug)]
pub struct ExperimentOutput {
    pub spec: ExampleSpec,
    pub dataset: Dataset,
    pub factorization: Option<Factorization>,
    pub table: EstimateTable,
}

/// Runs every method on `d`; `jobs > 1` spreads methods over scoped threads. Each method
/// seeds itself from `seed`, so results do not depend on `jobs`.
pub fn estimate_all(
    d: &Dataset,
    truth: &[(StatisticId, f64)],
    methods: &[Method],
    factorization: Option<&Factorization>,
    settings: &mdimp_core::experiment::Settings,
    seed: Seed,
    jobs: usize,
) -> Result<EstimateTable, RunError> {
    let stats: Vec<StatisticId> = truth.iter().map(|(s, _)| s.clone()).collect();
    let results: Vec<Slot> = methods.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, AtomicOrdering::Relaxed);
        let Some(&method) = methods.get(i) else {
            break;
        };
        log::info!("running {}", method.label());
        let r = estimate(method, d, &stats, factorization, settings, seed);
        *results[i].lock().expect("no panics while held") = Some(r);
    };
    let jobs = jobs.clamp(1, methods.len().max(1));
    if jobs == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(work);
            }
        });
    }
    let mut estimates = std::collections::BTreeMap::new();
    for (method, slot) in methods.iter().zip(results) {
        let values = slot
            .into_inner()
            .expect("no panics while held")
            .expect("every method ran")
            .map_err(|source| RunError::Method {
                method: method.id(),
                source,
            })?;
        estimates.insert(*method, stats.iter().cloned().zip(values).collect());
    }
    Ok(bias_table(truth, methods, &estimates)?)
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    limits: SearchLimits,
) -> Result<ExperimentOutput, RunError> {
    cfg.validate()?;
    let spec = cfg.model.load()?;
    let settings = cfg.settings(limits);
    // Resolve the ordering before spending time on simulation.
    let factorization = if cfg.methods.iter().any(|m| m.needs_ordering()) {
        Some(resolve_factorization(
            &spec.graph,
            &cfg.ordering_choice(),
            &settings,
        )?)
    } else {
        None
    };
    let seed = Seed(cfg.seed);
    let sim = simulate_dataset(&spec.graph, &spec.sem, &spec.response, cfg.n, seed)?;
    let truth = spec.truth().map_err(SimulateError::from)?;
    let table = estimate_all(
        &sim.dataset,
        &truth,
        &cfg.methods,
        factorization.as_ref(),
        &settings,
        seed,
        cfg.jobs,
    )?;
    Ok(ExperimentOutput {
        spec,
        dataset: sim.dataset,
        factorization,
        table,
    })
}

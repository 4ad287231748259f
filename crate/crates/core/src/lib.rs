//! Identification and imputation for graphical missing-data models.
//!
//! The crate decides whether the full law of a missing-data DAG is identifiable, searches
//! for variable orderings that license decomposable imputation, and implements the
//! estimators compared on simulated data: chained-equations multiple imputation with and
//! without response indicators, decomposable imputation, plug-in sampling from the chain
//! factorization of the target law, and complete/available case analysis.
//!
//! `no_std` with `alloc`; file formats and the command-line tool live in the `mdimp` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dag;
pub mod experiment;
pub mod graph;
pub mod identify;
pub mod impute;
pub mod presets;
pub mod rng;
pub mod sem;
pub mod simulate;
pub mod stats;

pub use graph::{GraphBuilder, GraphError, MissingDataGraph, NodeId, NodeRole};
pub use identify::{
    find_decomposable_ordering, full_law_identifiable, target_law_factorization, verify_ordering,
    FactorizationTerm, FullLawDecision, Ordering, OrderingCertificate, Witness,
};
pub use rng::Seed;
pub use simulate::{CompleteData, Dataset};
pub use stats::{EstimateTable, Method, StatisticId};

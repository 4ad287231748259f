//! Estimators: chained-equations multiple imputation (with and without response indicators
//! as predictors), decomposable imputation, plug-in sampling of the identified target law,
//! and complete/available case analysis.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::NodeId;
use crate::simulate::{CompleteData, Dataset};
use crate::stats::{ColumnSource, StatsError};

pub mod chained;
pub mod decomposable;
pub mod deletion;
pub mod plugin;
pub mod regression;

pub use chained::{impute_chained, impute_miri, Predictor, PredictorMatrix};
pub use decomposable::{force_monotone, impute_decomposable, MonotoneData};
pub use deletion::{
    available_case_estimates, available_cases, complete_case_estimates, complete_cases,
};
pub use plugin::plug_in_target_law;
pub use regression::{bayes_linreg_draw, ols, Design, LinearFit, RegressionDraw};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImputeError {
    #[error("{what} must be at least 1")]
    InvalidCount { what: &'static str },
    #[error("column `{0}` has no observed values")]
    ColumnAllMissing(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no predictors given for incomplete variable `{0}`")]
    MissingPredictors(String),
    #[error("`{0}` cannot predict itself")]
    SelfPredictor(String),
    #[error("the response indicator of `{0}` cannot predict `{0}`")]
    OwnIndicator(String),
    #[error("`{0}` has no response indicator")]
    NoIndicator(String),
    #[error("regression needs at least columns + 2 rows, got {rows} rows for {cols} columns")]
    TooFewRows { rows: usize, cols: usize },
    #[error("design matrix is singular even after ridge regularisation")]
    SingularDesign,
    #[error("invalid ordering certificate: {0}")]
    InvalidCertificate(String),
    #[error("factorization does not match the data: {0}")]
    FactorizationMismatch(String),
    #[error("no rows satisfy the indicator requirements of {0}")]
    EmptyFittingSet(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Dataset with every cell filled, plus the original indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedDataset {
    /// 1-based imputation number.
    pub index: usize,
    pub names: Vec<NodeId>,
    pub columns: Vec<Vec<f64>>,
    pub indicators: Vec<Option<Vec<bool>>>,
}

impl CompletedDataset {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n.as_str() == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn into_complete_data(self) -> CompleteData {
        CompleteData {
            names: self.names,
            columns: self.columns,
        }
    }
}

impl ColumnSource for CompletedDataset {
    fn n_rows(&self) -> usize {
        CompletedDataset::n_rows(self)
    }

    fn value(&self, var: &str, row: usize) -> Result<Option<f64>, StatsError> {
        self.column(var)
            .map(|c| Some(c[row]))
            .ok_or_else(|| StatsError::UnknownVariable(var.to_string()))
    }

    fn has(&self, var: &str) -> bool {
        self.column(var).is_some()
    }
}

/// Proxy columns with observed-value lists, shared by the imputation routines.
pub(crate) fn observed_values(d: &Dataset, var: usize) -> Vec<f64> {
    d.variables()[var].proxy.iter().flatten().copied().collect()
}

pub(crate) fn completed(d: &Dataset, index: usize, columns: Vec<Vec<f64>>) -> CompletedDataset {
    CompletedDataset {
        index,
        names: d.variables().iter().map(|v| v.name.clone()).collect(),
        columns,
        indicators: d.variables().iter().map(|v| v.indicator.clone()).collect(),
    }
}

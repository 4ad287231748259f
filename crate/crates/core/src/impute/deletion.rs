//! Complete-case (listwise) and available-case (pairwise) analysis.

use alloc::string::ToString;
use alloc::vec::Vec;

use super::ImputeError;
use crate::simulate::Dataset;
use crate::stats::{statistic_on, StatisticId};

/// Rows in which every response indicator is 1.
pub fn complete_cases(d: &Dataset) -> Vec<usize> {
    (0..d.n_rows()).filter(|&row| d.row_complete(row)).collect()
}

/// Rows in which all of `vars` are observed.
pub fn available_cases<S: AsRef<str>>(d: &Dataset, vars: &[S]) -> Result<Vec<usize>, ImputeError> {
    let cols = vars
        .iter()
        .map(|v| {
            d.variable(v.as_ref())
                .ok_or_else(|| ImputeError::UnknownVariable(v.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..d.n_rows())
        .filter(|&row| cols.iter().all(|c| c.observed(row)))
        .collect())
}

pub fn complete_case_estimates(
    d: &Dataset,
    stats: &[StatisticId],
) -> Result<Vec<f64>, ImputeError> {
    let rows = complete_cases(d);
    stats
        .iter()
        .map(|s| statistic_on(d, s, Some(&rows)).map_err(ImputeError::from))
        .collect()
}

/// Each statistic over the rows where its own variables are observed.
pub fn available_case_estimates(
    d: &Dataset,
    stats: &[StatisticId],
) -> Result<Vec<f64>, ImputeError> {
    stats
        .iter()
        .map(|s| {
            let rows = available_cases(d, &s.variables())?;
            statistic_on(d, s, Some(&rows)).map_err(ImputeError::from)
        })
        .collect()
}

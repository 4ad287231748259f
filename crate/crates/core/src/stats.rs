//! Summary statistics, pooling across imputations and bias tables.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::NodeId;
use crate::simulate::{CompleteData, Dataset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("a correlation needs two distinct variables, got `{0}` twice")]
    SameVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{stat}` needs at least {needed} rows, got {got}")]
    TooFewRows {
        stat: String,
        needed: usize,
        got: usize,
    },
    #[error("`{var}` is missing in row {row}")]
    MissingValue { var: String, row: usize },
    #[error("`{0}` has zero variance, correlation undefined")]
    ZeroVariance(String),
    #[error("nothing to pool")]
    EmptyPool,
    #[error("estimate vectors have different lengths")]
    LengthMismatch,
    #[error("no estimates for requested method {0}")]
    MissingMethod(String),
    #[error("statistics of method {method} do not match the truth table")]
    StatisticMismatch { method: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatKind {
    Mean,
    Sd,
    Corr,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatisticId {
    kind: StatKind,
    first: NodeId,
    second: Option<NodeId>,
}

impl StatisticId {
    pub fn mean(var: NodeId) -> Self {
        StatisticId {
            kind: StatKind::Mean,
            first: var,
            second: None,
        }
    }

    pub fn sd(var: NodeId) -> Self {
        StatisticId {
            kind: StatKind::Sd,
            first: var,
            second: None,
        }
    }

    pub fn corr(a: NodeId, b: NodeId) -> Result<Self, StatsError> {
        if a == b {
            return Err(StatsError::SameVariable(a.to_string()));
        }
        Ok(StatisticId {
            kind: StatKind::Corr,
            first: a,
            second: Some(b),
        })
    }

    pub fn kind(&self) -> StatKind {
        self.kind
    }

    pub fn first(&self) -> &NodeId {
        &self.first
    }

    pub fn second(&self) -> Option<&NodeId> {
        self.second.as_ref()
    }

    pub fn variables(&self) -> Vec<&NodeId> {
        core::iter::once(&self.first)
            .chain(self.second.as_ref())
            .collect()
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.second) {
            (StatKind::Mean, _) => write!(f, "E({})", self.first),
            (StatKind::Sd, _) => write!(f, "sd({})", self.first),
            (StatKind::Corr, Some(b)) => write!(f, "Cor({},{})", self.first, b),
            (StatKind::Corr, None) => unreachable!("correlation built with two variables"),
        }
    }
}

/// Means, then sds, then correlations of all pairs in the given variable order.
pub fn table_statistics(vars: &[NodeId]) -> Vec<StatisticId> {
    let mut out: Vec<StatisticId> = vars.iter().cloned().map(StatisticId::mean).collect();
    out.extend(vars.iter().cloned().map(StatisticId::sd));
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            out.push(StatisticId::corr(a.clone(), b.clone()).expect("distinct names"));
        }
    }
    out
}

/// Read access to named columns, possibly containing NA.
pub trait ColumnSource {
    fn n_rows(&self) -> usize;
    fn value(&self, var: &str, row: usize) -> Result<Option<f64>, StatsError>;
    fn has(&self, var: &str) -> bool;
}

impl ColumnSource for CompleteData {
    fn n_rows(&self) -> usize {
        CompleteData::n_rows(self)
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

impl ColumnSource for Dataset {
    fn n_rows(&self) -> usize {
        Dataset::n_rows(self)
    }

    fn value(&self, var: &str, row: usize) -> Result<Option<f64>, StatsError> {
        self.variable(var)
            .map(|v| v.proxy[row])
            .ok_or_else(|| StatsError::UnknownVariable(var.to_string()))
    }

    fn has(&self, var: &str) -> bool {
        self.variable(var).is_some()
    }
}

fn gather<S: ColumnSource + ?Sized>(
    sample: &S,
    var: &str,
    rows: &mut dyn Iterator<Item = usize>,
) -> Result<Vec<f64>, StatsError> {
    if !sample.has(var) {
        return Err(StatsError::UnknownVariable(var.to_string()));
    }
    rows.map(|row| {
        sample
            .value(var, row)?
            .ok_or_else(|| StatsError::MissingValue {
                var: var.to_string(),
                row,
            })
    })
    .collect()
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with divisor n − 1.
fn variance_of(xs: &[f64]) -> f64 {
    let m = mean_of(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Computes one statistic on the given rows (all rows when `rows` is `None`).
pub fn statistic_on<S: ColumnSource + ?Sized>(
    sample: &S,
    stat: &StatisticId,
    rows: Option<&[usize]>,
) -> Result<f64, StatsError> {
    let n = rows.map_or(sample.n_rows(), <[usize]>::len);
    let needed = if stat.kind == StatKind::Mean { 1 } else { 2 };
    if n < needed {
        return Err(StatsError::TooFewRows {
            stat: stat.to_string(),
            needed,
            got: n,
        });
    }
    let col = |var: &NodeId| -> Result<Vec<f64>, StatsError> {
        match rows {
            Some(r) => gather(sample, var.as_str(), &mut r.iter().copied()),
            None => gather(sample, var.as_str(), &mut (0..n)),
        }
    };
    let x = col(&stat.first)?;
    Ok(match stat.kind {
        StatKind::Mean => mean_of(&x),
        StatKind::Sd => libm::sqrt(variance_of(&x)),
        StatKind::Corr => {
            let b = stat.second.as_ref().expect("correlation has two variables");
            let y = col(b)?;
            let (mx, my) = (mean_of(&x), mean_of(&y));
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for (a, b) in x.iter().zip(&y) {
                sxy += (a - mx) * (b - my);
                sxx += (a - mx) * (a - mx);
                syy += (b - my) * (b - my);
            }
            if sxx == 0.0 {
                return Err(StatsError::ZeroVariance(stat.first.to_string()));
            }
            if syy == 0.0 {
                return Err(StatsError::ZeroVariance(b.to_string()));
            }
            sxy / libm::sqrt(sxx * syy)
        }
    })
}

/// Sample mean, sd (divisor n − 1) and Pearson correlation over all rows.
pub fn summarize<S: ColumnSource + ?Sized>(
    sample: &S,
    stats: &[StatisticId],
) -> Result<Vec<f64>, StatsError> {
    stats
        .iter()
        .map(|s| statistic_on(sample, s, None))
        .collect()
}

/// Averages per-imputation estimates statistic by statistic.
pub fn pool(estimates: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    let first = estimates.first().ok_or(StatsError::EmptyPool)?;
    if estimates.iter().any(|e| e.len() != first.len()) {
        return Err(StatsError::LengthMismatch);
    }
    let m = estimates.len() as f64;
    Ok((0..first.len())
        .map(|j| estimates.iter().map(|e| e[j]).sum::<f64>() / m)
        .collect())
}

/// Estimators compared in the bias tables, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Chained equations with the default predictor matrix.
    Mi,
    /// Chained equations with response indicators as extra predictors.
    Miri,
    Cca,
    Aca,
    /// Monte-Carlo sampling from the identified chain factorization.
    PlugIn,
    /// Decomposable multiple imputation.
    DecompMi,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Mi,
        Method::Miri,
        Method::Cca,
        Method::Aca,
        Method::PlugIn,
        Method::DecompMi,
    ];

    /// Identifier used on the command line and in config files.
    pub fn id(self) -> &'static str {
        match self {
            Method::Mi => "mi",
            Method::Miri => "miri",
            Method::Cca => "cca",
            Method::Aca => "aca",
            Method::PlugIn => "plugin",
            Method::DecompMi => "decomp",
        }
    }

    /// Column heading.
    pub fn label(self) -> &'static str {
        match self {
            Method::Mi => "MI",
            Method::Miri => "MIRI",
            Method::Cca => "CCA",
            Method::Aca => "ACA",
            Method::PlugIn => "Plug-in",
            Method::DecompMi => "decompMI",
        }
    }

    pub fn from_id(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.id() == s)
    }

    /// Whether the method needs a decomposable ordering.
    pub fn needs_ordering(self) -> bool {
        matches!(self, Method::PlugIn | Method::DecompMi)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub truth: f64,
    pub estimate: f64,
    pub bias: f64,
}

/// Statistic × method grid of estimates and biases against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTable {
    statistics: Vec<StatisticId>,
    truth: Vec<f64>,
    methods: Vec<Method>,
    /// `estimates[stat][method]`
    estimates: Vec<Vec<f64>>,
}

impl EstimateTable {
    pub fn statistics(&self) -> &[StatisticId] {
        &self.statistics
    }

    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn truth(&self, stat: usize) -> f64 {
        self.truth[stat]
    }

    pub fn cell(&self, stat: usize, method: usize) -> Cell {
        let estimate = self.estimates[stat][method];
        Cell {
            truth: self.truth[stat],
            estimate,
            bias: estimate - self.truth[stat],
        }
    }

    /// Bias of `method` on the statistic labelled `stat` (e.g. `"E(X)"`).
    pub fn bias(&self, stat: &str, method: Method) -> Option<f64> {
        let s = self.statistics.iter().position(|x| x.to_string() == stat)?;
        let m = self.methods.iter().position(|&x| x == method)?;
        Some(self.cell(s, m).bias)
    }
}

/// Assembles a table; methods are put in [`Method`] order and every requested method must
/// report exactly the truth table's statistics.
pub fn bias_table(
    truth: &[(StatisticId, f64)],
    requested: &[Method],
    estimates: &BTreeMap<Method, Vec<(StatisticId, f64)>>,
) -> Result<EstimateTable, StatsError> {
    let mut methods: Vec<Method> = requested.to_vec();
    methods.sort();
    methods.dedup();
    let statistics: Vec<StatisticId> = truth.iter().map(|(s, _)| s.clone()).collect();
    let mut grid = alloc::vec![Vec::with_capacity(methods.len()); statistics.len()];
    for &m in &methods {
        let est = estimates
            .get(&m)
            .ok_or_else(|| StatsError::MissingMethod(m.label().to_string()))?;
        if est.len() != statistics.len() {
            return Err(StatsError::StatisticMismatch {
                method: m.label().to_string(),
            });
        }
        for (row, stat) in grid.iter_mut().zip(&statistics) {
            let value = est
                .iter()
                .find(|(s, _)| s == stat)
                .map(|(_, v)| *v)
                .ok_or_else(|| StatsError::StatisticMismatch {
                    method: m.label().to_string(),
                })?;
            row.push(value);
        }
    }
    Ok(EstimateTable {
        statistics,
        truth: truth.iter().map(|(_, v)| *v).collect(),
        methods,
        estimates: grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn data(cols: &[(&str, Vec<f64>)]) -> CompleteData {
        CompleteData {
            names: cols.iter().map(|(n, _)| id(n)).collect(),
            columns: cols.iter().map(|(_, c)| c.clone()).collect(),
        }
    }

    #[test]
    fn constant_column() {
        let d = data(&[("X", vec![3.0; 10])]);
        let s = summarize(&d, &[StatisticId::mean(id("X")), StatisticId::sd(id("X"))]).unwrap();
        assert_eq!(s, vec![3.0, 0.0]);
    }

    #[test]
    fn sd_uses_n_minus_one() {
        let d = data(&[("X", vec![1.0, 2.0, 3.0, 4.0])]);
        let sd = summarize(&d, &[StatisticId::sd(id("X"))]).unwrap()[0];
        assert!((sd - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn correlation_of_a_variable_with_itself_is_rejected() {
        assert_eq!(
            StatisticId::corr(id("X"), id("X")).unwrap_err(),
            StatsError::SameVariable("X".into())
        );
    }

    #[test]
    fn too_few_rows_and_na() {
        let d = data(&[("X", vec![1.0])]);
        assert!(matches!(
            summarize(&d, &[StatisticId::sd(id("X"))]),
            Err(StatsError::TooFewRows { .. })
        ));
        let ds = Dataset::new(vec![crate::simulate::Variable {
            name: id("X"),
            proxy: vec![Some(1.0), None],
            indicator: Some(vec![true, false]),
        }])
        .unwrap();
        assert_eq!(
            summarize(&ds, &[StatisticId::mean(id("X"))]).unwrap_err(),
            StatsError::MissingValue {
                var: "X".into(),
                row: 1
            }
        );
    }

    #[test]
    fn pooling() {
        assert_eq!(pool(&[vec![1.0]]).unwrap(), vec![1.0]);
        assert_eq!(pool(&[vec![0.9], vec![1.1]]).unwrap(), vec![1.0]);
        assert_eq!(pool(&[]).unwrap_err(), StatsError::EmptyPool);
        assert_eq!(
            pool(&[vec![1.0], vec![1.0, 2.0]]).unwrap_err(),
            StatsError::LengthMismatch
        );
    }

    #[test]
    fn bias_cells() {
        let ex = StatisticId::mean(id("X"));
        let truth = vec![(ex.clone(), 0.0)];
        let mut est = BTreeMap::new();
        est.insert(Method::Cca, vec![(ex.clone(), 0.41)]);
        est.insert(Method::Aca, vec![(ex.clone(), 0.0)]);
        let t = bias_table(&truth, &[Method::Aca, Method::Cca], &est).unwrap();
        assert_eq!(t.methods(), &[Method::Cca, Method::Aca]);
        assert_eq!(t.bias("E(X)", Method::Cca), Some(0.41));
        assert_eq!(t.bias("E(X)", Method::Aca), Some(0.0));

        assert_eq!(
            bias_table(&truth, &[Method::Mi], &est).unwrap_err(),
            StatsError::MissingMethod("MI".into())
        );
        let mut wrong = BTreeMap::new();
        wrong.insert(Method::Cca, vec![(StatisticId::sd(id("X")), 1.0)]);
        assert!(matches!(
            bias_table(&truth, &[Method::Cca], &wrong),
            Err(StatsError::StatisticMismatch { .. })
        ));
    }

    #[test]
    fn method_ids_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_id(m.id()), Some(m));
        }
        assert_eq!(Method::from_id("pmm"), None);
    }
}

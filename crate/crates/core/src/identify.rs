//! Full-law identifiability, decomposable-imputation orderings and chain factorizations
//! of the target law.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::{MissingDataGraph, NodeId};

/// Above this many substantive variables the ordering search logs a warning.
pub const DEFAULT_WARN_VARIABLES: usize = 9;
/// Above this many substantive variables the ordering search refuses to run.
pub const DEFAULT_MAX_VARIABLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifyError {
    #[error("ordering search over {variables} variables exceeds the cap of {cap}")]
    SearchTooLarge { variables: usize, cap: usize },
    #[error("ordering names unknown node `{0}`")]
    UnknownNode(String),
    #[error("ordering contains `{0}`, which is not a substantive variable")]
    NotSubstantive(String),
    #[error("ordering lists `{0}` more than once")]
    Repeated(String),
    #[error("ordering omits `{0}`")]
    Missing(String),
    #[error("certificate is not valid for this graph: {0}")]
    InvalidCertificate(String),
}

/// Structure that rules out identification of the full law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `variable -> indicator`, the variable's own response indicator.
    SelfCensoring { variable: NodeId, indicator: NodeId },
    /// `variable -> collider <- own_indicator`, where `collider` is another response indicator.
    Colluder {
        variable: NodeId,
        own_indicator: NodeId,
        collider: NodeId,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::SelfCensoring {
                variable,
                indicator,
            } => {
                write!(f, "self-censoring {variable} → {indicator}")
            }
            Witness::Colluder {
                variable,
                own_indicator,
                collider,
            } => write!(f, "colluder {variable} → {collider} ← {own_indicator}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullLawDecision {
    witnesses: Vec<Witness>,
}

impl FullLawDecision {
    pub fn identifiable(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }
}

/// Scans for self-censoring edges and colluders. In a DAG model without hidden variables the
/// full law is identifiable exactly when neither occurs.
pub fn full_law_identifiable(g: &MissingDataGraph) -> FullLawDecision {
    let mut witnesses = Vec::new();
    for x in g.partially_observed() {
        let r = g.indicator_of(x).expect("validated graph");
        if g.dag().has_edge(x, r) {
            witnesses.push(Witness::SelfCensoring {
                variable: g.id(x).clone(),
                indicator: g.id(r).clone(),
            });
        }
    }
    for collider in g.indicators() {
        let owner = g.owner_of(collider);
        for &x in g.parents(collider) {
            if Some(x) == owner || !g.is_partially_observed(x) {
                continue;
            }
            let rx = g.indicator_of(x).expect("validated graph");
            if g.dag().has_edge(rx, collider) {
                witnesses.push(Witness::Colluder {
                    variable: g.id(x).clone(),
                    own_indicator: g.id(rx).clone(),
                    collider: g.id(collider).clone(),
                });
            }
        }
    }
    FullLawDecision { witnesses }
}

/// A permutation of all substantive variables of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering(Vec<NodeId>);

impl Ordering {
    pub fn new<S: AsRef<str>>(g: &MissingDataGraph, names: &[S]) -> Result<Self, IdentifyError> {
        let mut seen = alloc::vec![false; g.len()];
        let mut seq = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let i = g
                .index_of(name)
                .ok_or_else(|| IdentifyError::UnknownNode(name.to_string()))?;
            if !g.role(i).is_substantive() {
                return Err(IdentifyError::NotSubstantive(name.to_string()));
            }
            if seen[i] {
                return Err(IdentifyError::Repeated(name.to_string()));
            }
            seen[i] = true;
            seq.push(g.id(i).clone());
        }
        if let Some(m) = g.substantive().into_iter().find(|&i| !seen[i]) {
            return Err(IdentifyError::Missing(g.id(m).to_string()));
        }
        Ok(Ordering(seq))
    }

    pub fn variables(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn indices(&self, g: &MissingDataGraph) -> Vec<usize> {
        self.0
            .iter()
            .map(|n| {
                g.index_of(n.as_str())
                    .expect("ordering validated against graph")
            })
            .collect()
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" < ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// One conditional independence statement `target ⊥ independent_of | given`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCheck {
    pub target: NodeId,
    pub independent_of: Vec<NodeId>,
    pub given: Vec<NodeId>,
    pub holds: bool,
}

impl fmt::Display for IndependenceCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊥ ", self.target)?;
        if self.independent_of.is_empty() {
            f.write_str("∅")?;
        }
        write_list(f, &self.independent_of)?;
        if !self.given.is_empty() {
            f.write_str(" | ")?;
            write_list(f, &self.given)?;
        }
        f.write_str(if self.holds { "  [holds]" } else { "  [FAILS]" })
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[NodeId]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// An ordering together with one independence check per position.
/// Only [`verify_ordering`] creates certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingCertificate {
    ordering: Ordering,
    checks: Vec<IndependenceCheck>,
}

impl OrderingCertificate {
    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn checks(&self) -> &[IndependenceCheck] {
        &self.checks
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &IndependenceCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Indicators of the partially observed variables in `vars`, in the order given.
fn indicators_for(g: &MissingDataGraph, vars: &[usize]) -> Vec<usize> {
    vars.iter().filter_map(|&v| g.indicator_of(v)).collect()
}

/// Condition for position `k`: the variable is independent of its own indicator and the
/// indicators of all predecessors, given the predecessors.
fn position_check(g: &MissingDataGraph, prefix: &[usize], target: usize) -> (Vec<usize>, bool) {
    let mut upto: Vec<usize> = prefix.to_vec();
    upto.push(target);
    let inds = indicators_for(g, &upto);
    let holds = g.d_separated_idx(&[target], &inds, prefix);
    (inds, holds)
}

pub fn verify_ordering(g: &MissingDataGraph, ordering: &Ordering) -> OrderingCertificate {
    let seq = ordering.indices(g);
    let names = |set: &[usize]| -> Vec<NodeId> { set.iter().map(|&i| g.id(i).clone()).collect() };
    let checks = (0..seq.len())
        .map(|k| {
            let (inds, holds) = position_check(g, &seq[..k], seq[k]);
            IndependenceCheck {
                target: g.id(seq[k]).clone(),
                independent_of: names(&inds),
                given: names(&seq[..k]),
                holds,
            }
        })
        .collect();
    OrderingCertificate {
        ordering: ordering.clone(),
        checks,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub warn_above: usize,
    pub max_variables: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            warn_above: DEFAULT_WARN_VARIABLES,
            max_variables: DEFAULT_MAX_VARIABLES,
        }
    }
}

/// Returns the lexicographically first ordering (by variable name) that satisfies every
/// position check, or `None`.
///
/// Permutations are visited in lexicographic order. A prefix whose last position fails is
/// skipped wholesale, since every check depends only on the prefix it closes.
pub fn find_decomposable_ordering(
    g: &MissingDataGraph,
    limits: SearchLimits,
) -> Result<Option<OrderingCertificate>, IdentifyError> {
    let mut vars = g.substantive();
    if vars.len() > limits.max_variables {
        return Err(IdentifyError::SearchTooLarge {
            variables: vars.len(),
            cap: limits.max_variables,
        });
    }
    if vars.len() > limits.warn_above {
        log::warn!(
            "searching orderings of {} variables ({}! permutations in the worst case)",
            vars.len(),
            vars.len()
        );
    }
    vars.sort_by_key(|&i| g.name_rank(i));

    let mut prefix = Vec::with_capacity(vars.len());
    let mut used = alloc::vec![false; vars.len()];
    if !extend(g, &vars, &mut used, &mut prefix) {
        return Ok(None);
    }
    let names: Vec<&str> = prefix.iter().map(|&i| g.id(i).as_str()).collect();
    let ordering = Ordering::new(g, &names)?;
    Ok(Some(verify_ordering(g, &ordering)))
}

fn extend(
    g: &MissingDataGraph,
    vars: &[usize],
    used: &mut [bool],
    prefix: &mut Vec<usize>,
) -> bool {
    if prefix.len() == vars.len() {
        return true;
    }
    for (slot, &v) in vars.iter().enumerate() {
        if used[slot] || !position_check(g, prefix, v).1 {
            continue;
        }
        used[slot] = true;
        prefix.push(v);
        if extend(g, vars, used, prefix) {
            return true;
        }
        prefix.pop();
        used[slot] = false;
    }
    false
}

/// One factor `p(target | conditioning, required_indicators = 1)` of the target law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationTerm {
    pub target: NodeId,
    pub conditioning: Vec<NodeId>,
    pub required_indicators: Vec<NodeId>,
    /// Variable owning each entry of `required_indicators`, in the same order.
    pub indicator_owners: Vec<NodeId>,
}

impl fmt::Display for FactorizationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}", self.target)?;
        if !self.conditioning.is_empty() || !self.required_indicators.is_empty() {
            f.write_str(" | ")?;
        }
        write_list(f, &self.conditioning)?;
        if !self.required_indicators.is_empty() {
            if !self.conditioning.is_empty() {
                f.write_str(", ")?;
            }
            let joined: Vec<String> = self
                .required_indicators
                .iter()
                .map(|r| r.to_string())
                .collect();
            write!(f, "{}=1", joined.join(" "))?;
        }
        f.write_str(")")
    }
}

/// Chain factorization of the target law induced by a valid certificate.
///
/// With `prune`, a predecessor is dropped from a term's conditioning set when the target is
/// d-separated from it given the remaining conditioning variables and the required indicators.
/// Required indicators always cover the target and every predecessor.
pub fn target_law_factorization(
    g: &MissingDataGraph,
    cert: &OrderingCertificate,
    prune: bool,
) -> Result<Vec<FactorizationTerm>, IdentifyError> {
    for name in cert.ordering().variables() {
        if g.index_of(name.as_str()).is_none() {
            return Err(IdentifyError::InvalidCertificate(alloc::format!(
                "unknown variable `{name}`"
            )));
        }
    }
    let fresh = verify_ordering(g, cert.ordering());
    if fresh != *cert {
        return Err(IdentifyError::InvalidCertificate(
            "certificate was issued for a different graph".into(),
        ));
    }
    if let Some(bad) = fresh.failing().next() {
        return Err(IdentifyError::InvalidCertificate(bad.to_string()));
    }

    let seq = cert.ordering().indices(g);
    let mut terms = Vec::with_capacity(seq.len());
    for k in 0..seq.len() {
        let target = seq[k];
        let required = indicators_for(g, &seq[..=k]);
        let mut conditioning: Vec<usize> = seq[..k].to_vec();
        if prune {
            let mut i = 0;
            while i < conditioning.len() {
                let candidate = conditioning[i];
                let mut rest: Vec<usize> = conditioning
                    .iter()
                    .copied()
                    .filter(|&c| c != candidate)
                    .collect();
                rest.extend_from_slice(&required);
                if g.d_separated_idx(&[target], &[candidate], &rest) {
                    conditioning.remove(i);
                } else {
                    i += 1;
                }
            }
        }
        terms.push(FactorizationTerm {
            target: g.id(target).clone(),
            conditioning: conditioning.iter().map(|&i| g.id(i).clone()).collect(),
            required_indicators: required.iter().map(|&i| g.id(i).clone()).collect(),
            indicator_owners: seq[..=k]
                .iter()
                .filter(|&&v| g.indicator_of(v).is_some())
                .map(|&v| g.id(v).clone())
                .collect(),
        });
    }
    Ok(terms)
}

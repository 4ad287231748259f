//! Missing-data DAGs: substantive variables plus one response indicator per partially
//! observed variable. Proxy variables are implied by the indicators and never stored as nodes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::dag::{Dag, DagError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node names must be nonempty")]
    EmptyName,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("edge references unknown node `{0}`")]
    UnknownNode(String),
    #[error("response indicator `{indicator}` names unknown owner `{owner}`")]
    UnknownOwner { indicator: String, owner: String },
    #[error("response indicator `{indicator}` must be owned by a partially observed node, `{owner}` is not")]
    OwnerNotPartial { indicator: String, owner: String },
    #[error("partially observed node `{owner}` has more than one response indicator")]
    DuplicateIndicator { owner: String },
    #[error("response indicator `{indicator}` has substantive child `{child}`")]
    IndicatorWithSubstantiveChild { indicator: String, child: String },
    #[error("self loop on `{0}`")]
    SelfLoop(String),
    #[error("graph has a directed cycle through `{0}`")]
    Cycle(String),
    #[error("node sets passed to a d-separation query overlap at `{0}`")]
    OverlappingSets(String),
    #[error("indicator `{indicator}` has value {value}, expected 0 or 1")]
    InvalidIndicatorValue { indicator: String, value: i64 },
    #[error("no value given for response indicator `{0}`")]
    MissingIndicatorValue(String),
    #[error("`{0}` is not a response indicator")]
    NotAnIndicator(String),
}

/// Name of a graph node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(GraphError::EmptyName);
        }
        Ok(NodeId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl core::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeRole {
    FullyObserved,
    PartiallyObserved,
    ResponseIndicator { owner: NodeId },
}

impl NodeRole {
    pub fn is_substantive(&self) -> bool {
        !matches!(self, NodeRole::ResponseIndicator { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub role: NodeRole,
}

/// Default name of the response indicator for `var`.
pub fn indicator_name(var: &str) -> String {
    format!("R_{var}")
}

/// Collects nodes and edges, then validates them into a [`MissingDataGraph`].
///
/// Partially observed nodes declared without an indicator get one named `R_<name>`.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<(String, RoleDecl)>,
    edges: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
enum RoleDecl {
    Full,
    Partial,
    Indicator(String),
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fully_observed(mut self, name: &str) -> Self {
        self.nodes.push((name.to_string(), RoleDecl::Full));
        self
    }

    pub fn partially_observed(mut self, name: &str) -> Self {
        self.nodes.push((name.to_string(), RoleDecl::Partial));
        self
    }

    pub fn indicator(mut self, name: &str, owner: &str) -> Self {
        self.nodes
            .push((name.to_string(), RoleDecl::Indicator(owner.to_string())));
        self
    }

    pub fn edge(mut self, parent: &str, child: &str) -> Self {
        self.edges.push((parent.to_string(), child.to_string()));
        self
    }

    pub fn add_fully_observed(&mut self, name: &str) {
        self.nodes.push((name.to_string(), RoleDecl::Full));
    }

    pub fn add_partially_observed(&mut self, name: &str) {
        self.nodes.push((name.to_string(), RoleDecl::Partial));
    }

    pub fn add_indicator(&mut self, name: &str, owner: &str) {
        self.nodes
            .push((name.to_string(), RoleDecl::Indicator(owner.to_string())));
    }

    pub fn add_edge(&mut self, parent: &str, child: &str) {
        self.edges.push((parent.to_string(), child.to_string()));
    }

    pub fn build(self) -> Result<MissingDataGraph, GraphError> {
        let mut nodes: Vec<Node> = Vec::with_capacity(self.nodes.len());
        let mut index: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut pending_owner: Vec<(usize, String)> = Vec::new();

        for (name, decl) in &self.nodes {
            let id = NodeId::new(name.as_str())?;
            if index.contains_key(&id) {
                return Err(GraphError::DuplicateNode(name.clone()));
            }
            let role = match decl {
                RoleDecl::Full => NodeRole::FullyObserved,
                RoleDecl::Partial => NodeRole::PartiallyObserved,
                RoleDecl::Indicator(owner) => {
                    pending_owner.push((nodes.len(), owner.clone()));
                    NodeRole::ResponseIndicator {
                        owner: NodeId::new(owner.as_str()).map_err(|_| {
                            GraphError::UnknownOwner {
                                indicator: name.clone(),
                                owner: owner.clone(),
                            }
                        })?,
                    }
                }
            };
            index.insert(id.clone(), nodes.len());
            nodes.push(Node { id, role });
        }

        let mut indicator_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (ind, owner) in pending_owner {
            let Some(&o) = index.get(owner.as_str()) else {
                return Err(GraphError::UnknownOwner {
                    indicator: nodes[ind].id.to_string(),
                    owner,
                });
            };
            if nodes[o].role != NodeRole::PartiallyObserved {
                return Err(GraphError::OwnerNotPartial {
                    indicator: nodes[ind].id.to_string(),
                    owner,
                });
            }
            if indicator_of.insert(o, ind).is_some() {
                return Err(GraphError::DuplicateIndicator { owner });
            }
        }

        // Partially observed nodes without an explicit indicator get the default one.
        for o in 0..nodes.len() {
            if nodes[o].role == NodeRole::PartiallyObserved && !indicator_of.contains_key(&o) {
                let id = NodeId::new(indicator_name(nodes[o].id.as_str()))?;
                if index.contains_key(&id) {
                    return Err(GraphError::DuplicateNode(id.to_string()));
                }
                let ind = nodes.len();
                index.insert(id.clone(), ind);
                nodes.push(Node {
                    id,
                    role: NodeRole::ResponseIndicator {
                        owner: nodes[o].id.clone(),
                    },
                });
                indicator_of.insert(o, ind);
            }
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        for (p, c) in &self.edges {
            let pi = *index
                .get(p.as_str())
                .ok_or_else(|| GraphError::UnknownNode(p.clone()))?;
            let ci = *index
                .get(c.as_str())
                .ok_or_else(|| GraphError::UnknownNode(c.clone()))?;
            if !nodes[pi].role.is_substantive() && nodes[ci].role.is_substantive() {
                return Err(GraphError::IndicatorWithSubstantiveChild {
                    indicator: p.clone(),
                    child: c.clone(),
                });
            }
            edges.push((pi, ci));
        }

        let dag = Dag::from_edges(nodes.len(), &edges).map_err(|e| match e {
            DagError::SelfLoop(v) => GraphError::SelfLoop(nodes[v].id.to_string()),
            DagError::Cycle(v) | DagError::OutOfRange(v) => {
                GraphError::Cycle(nodes[v].id.to_string())
            }
        })?;

        let mut name_rank = alloc::vec![0; nodes.len()];
        for (rank, &i) in index.values().enumerate() {
            name_rank[i] = rank;
        }
        let mut indicator = alloc::vec![None; nodes.len()];
        for (&o, &i) in &indicator_of {
            indicator[o] = Some(i);
        }

        Ok(MissingDataGraph {
            nodes,
            index,
            dag,
            indicator,
            name_rank,
        })
    }
}

/// Partition of the partially observed variables of one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowPattern {
    pub observed: Vec<NodeId>,
    pub missing: Vec<NodeId>,
}

/// A validated missing-data DAG. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingDataGraph {
    nodes: Vec<Node>,
    index: BTreeMap<NodeId, usize>,
    dag: Dag,
    indicator: Vec<Option<usize>>,
    name_rank: Vec<usize>,
}

impl MissingDataGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Nodes in declaration order (auto-created indicators last).
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn id(&self, i: usize) -> &NodeId {
        &self.nodes[i].id
    }

    pub fn role(&self, i: usize) -> &NodeRole {
        &self.nodes[i].role
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name)
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn edge_count(&self) -> usize {
        self.dag.edge_count()
    }

    /// Edges as (parent, child) names, sorted by parent then child name.
    pub fn edges(&self) -> Vec<(&NodeId, &NodeId)> {
        let mut e: Vec<_> = self
            .dag
            .edges()
            .map(|(u, v)| (self.id(u), self.id(v)))
            .collect();
        e.sort();
        e
    }

    pub fn has_edge(&self, parent: &str, child: &str) -> bool {
        match (self.index_of(parent), self.index_of(child)) {
            (Some(p), Some(c)) => self.dag.has_edge(p, c),
            _ => false,
        }
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        self.dag.parents(i)
    }

    pub fn children(&self, i: usize) -> &[usize] {
        self.dag.children(i)
    }

    /// Substantive (fully or partially observed) node indices in declaration order.
    pub fn substantive(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i].role.is_substantive())
            .collect()
    }

    pub fn partially_observed(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i].role == NodeRole::PartiallyObserved)
            .collect()
    }

    pub fn indicators(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.nodes[i].role.is_substantive())
            .collect()
    }

    pub fn is_partially_observed(&self, i: usize) -> bool {
        self.nodes[i].role == NodeRole::PartiallyObserved
    }

    pub fn is_indicator(&self, i: usize) -> bool {
        !self.nodes[i].role.is_substantive()
    }

    /// Response indicator of a partially observed node.
    pub fn indicator_of(&self, i: usize) -> Option<usize> {
        self.indicator[i]
    }

    /// Variable that indicator `i` belongs to.
    pub fn owner_of(&self, i: usize) -> Option<usize> {
        match &self.nodes[i].role {
            NodeRole::ResponseIndicator { owner } => self.index_of(owner.as_str()),
            _ => None,
        }
    }

    /// Topological order, ties broken by node name.
    pub fn topological_order(&self) -> Vec<&NodeId> {
        self.topological_indices()
            .into_iter()
            .map(|i| self.id(i))
            .collect()
    }

    pub fn topological_indices(&self) -> Vec<usize> {
        self.dag.topological_order_by(&self.name_rank)
    }

    /// Rank of node `i` among all node names in lexicographic order.
    pub fn name_rank(&self, i: usize) -> usize {
        self.name_rank[i]
    }

    pub fn d_separated_idx(&self, a: &[usize], b: &[usize], given: &[usize]) -> bool {
        self.dag.d_separated(a, b, given)
    }

    /// d-separation by node name. The three sets must be disjoint.
    pub fn d_separated<S: AsRef<str>>(
        &self,
        a: &[S],
        b: &[S],
        given: &[S],
    ) -> Result<bool, GraphError> {
        let resolve = |set: &[S]| -> Result<Vec<usize>, GraphError> {
            set.iter().map(|s| self.require(s.as_ref())).collect()
        };
        let (a, b, z) = (resolve(a)?, resolve(b)?, resolve(given)?);
        let mut owner = alloc::vec![0u8; self.len()];
        for (tag, set) in [(1u8, &a), (2, &b), (3, &z)] {
            for &v in set.iter() {
                if owner[v] != 0 && owner[v] != tag {
                    return Err(GraphError::OverlappingSets(self.id(v).to_string()));
                }
                owner[v] = tag;
            }
        }
        Ok(self.dag.d_separated(&a, &b, &z))
    }

    /// Splits the partially observed variables of a record by indicator value.
    /// `indicator_values` maps indicator names (e.g. `R_X`) to 0 or 1.
    pub fn row_pattern(&self, indicator_values: &[(&str, i64)]) -> Result<RowPattern, GraphError> {
        let mut value_of: BTreeMap<usize, i64> = BTreeMap::new();
        for &(name, value) in indicator_values {
            let i = self.require(name)?;
            if !self.is_indicator(i) {
                return Err(GraphError::NotAnIndicator(name.to_string()));
            }
            if value != 0 && value != 1 {
                return Err(GraphError::InvalidIndicatorValue {
                    indicator: name.to_string(),
                    value,
                });
            }
            value_of.insert(i, value);
        }
        let mut pattern = RowPattern {
            observed: Vec::new(),
            missing: Vec::new(),
        };
        for x in self.partially_observed() {
            let r = self.indicator[x].expect("validated graph");
            match value_of.get(&r) {
                Some(1) => pattern.observed.push(self.id(x).clone()),
                Some(_) => pattern.missing.push(self.id(x).clone()),
                None => return Err(GraphError::MissingIndicatorValue(self.id(r).to_string())),
            }
        }
        Ok(pattern)
    }
}

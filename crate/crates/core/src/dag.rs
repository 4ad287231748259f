//! Index-based directed acyclic graphs with d-separation queries.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("edge endpoint {0} is out of range")]
    OutOfRange(usize),
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("graph contains a directed cycle through node {0}")]
    Cycle(usize),
}

/// A DAG over nodes `0..n`. Parent and child lists are sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DagError> {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(DagError::OutOfRange(u));
            }
            if v >= n {
                return Err(DagError::OutOfRange(v));
            }
            if u == v {
                return Err(DagError::SelfLoop(u));
            }
            children[u].push(v);
            parents[v].push(u);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let dag = Dag { parents, children };
        let identity: Vec<usize> = (0..n).collect();
        let order = dag.kahn(&identity);
        if order.len() != n {
            let stuck = (0..n).find(|v| !order.contains(v)).unwrap_or(0);
            return Err(DagError::Cycle(stuck));
        }
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.children[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Topological order where, among ready nodes, the one with the smallest `rank` comes first.
    pub fn topological_order_by(&self, rank: &[usize]) -> Vec<usize> {
        self.kahn(rank)
    }

    fn kahn(&self, rank: &[usize]) -> Vec<usize> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(usize, usize)> = (0..n)
            .filter(|&v| indegree[v] == 0)
            .map(|v| (rank[v], v))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some((_, v)) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert((rank[c], c));
                }
            }
        }
        order
    }

    /// `set` together with all of its ancestors.
    pub fn ancestral_closure(&self, set: &[usize]) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(v) = stack.pop() {
            if mark[v] {
                continue;
            }
            mark[v] = true;
            stack.extend(self.parents[v].iter().copied().filter(|&p| !mark[p]));
        }
        mark
    }

    /// Nodes d-connected to some node of `sources` given `given` (reachability over
    /// node/direction pairs). Nodes in `given` are never reported.
    pub fn d_connected_from(&self, sources: &[usize], given: &[usize]) -> Vec<bool> {
        const UP: usize = 0; // arrived from a child
        const DOWN: usize = 1; // arrived from a parent

        let n = self.len();
        let mut observed = vec![false; n];
        for &z in given {
            observed[z] = true;
        }
        let opens_collider = self.ancestral_closure(given);

        let mut visited = vec![[false; 2]; n];
        let mut reachable = vec![false; n];
        let mut stack: Vec<(usize, usize)> = sources.iter().map(|&s| (s, UP)).collect();
        while let Some((v, dir)) = stack.pop() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !observed[v] {
                reachable[v] = true;
            }
            if dir == UP && !observed[v] {
                stack.extend(self.parents[v].iter().map(|&p| (p, UP)));
                stack.extend(self.children[v].iter().map(|&c| (c, DOWN)));
            } else if dir == DOWN {
                if !observed[v] {
                    stack.extend(self.children[v].iter().map(|&c| (c, DOWN)));
                }
                if opens_collider[v] {
                    stack.extend(self.parents[v].iter().map(|&p| (p, UP)));
                }
            }
        }
        reachable
    }

    /// True iff every path between `a` and `b` is blocked by `given`.
    ///
    /// The sets are expected to be pairwise disjoint; an empty `a` or `b` is trivially separated.
    pub fn d_separated(&self, a: &[usize], b: &[usize], given: &[usize]) -> bool {
        if a.is_empty() || b.is_empty() {
            return true;
        }
        let reach = self.d_connected_from(a, given);
        !b.iter().any(|&v| reach[v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_self_loops() {
        assert_eq!(
            Dag::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap_err(),
            DagError::Cycle(0)
        );
        assert_eq!(
            Dag::from_edges(2, &[(1, 1)]).unwrap_err(),
            DagError::SelfLoop(1)
        );
        assert_eq!(
            Dag::from_edges(2, &[(0, 2)]).unwrap_err(),
            DagError::OutOfRange(2)
        );
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Dag::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn collider_blocks_until_descendant_is_observed() {
        // 0 -> 2 <- 1, 2 -> 3
        let g = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(g.d_separated(&[0], &[1], &[]));
        assert!(!g.d_separated(&[0], &[1], &[2]));
        assert!(!g.d_separated(&[0], &[1], &[3]));
    }

    #[test]
    fn chain_and_fork_block_when_observed() {
        // chain 0 -> 1 -> 2 and fork 1 <- 3 -> 4
        let g = Dag::from_edges(5, &[(0, 1), (1, 2), (3, 1), (3, 4)]).unwrap();
        assert!(!g.d_separated(&[0], &[2], &[]));
        assert!(g.d_separated(&[0], &[2], &[1]));
        assert!(!g.d_separated(&[2], &[4], &[]));
        assert!(g.d_separated(&[2], &[4], &[3]));
    }

    #[test]
    fn topological_order_respects_rank_ties() {
        let g = Dag::from_edges(3, &[(2, 0)]).unwrap();
        assert_eq!(g.topological_order_by(&[0, 1, 2]), vec![1, 2, 0]);
        assert_eq!(g.topological_order_by(&[2, 0, 1]), vec![1, 2, 0]);
    }
}

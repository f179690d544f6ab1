use std::collections::BTreeMap;

use crate::stream::NodeId;

/// Undirected weighted static graph on `0..num_nodes` without self-loops.
/// Edges are stored once, as `(u, v, w)` with `u < v` and `w > 0`, sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    num_nodes: usize,
    edges: Vec<(NodeId, NodeId, f64)>,
}

impl WeightedGraph {
    /// Sums parallel edges; drops self-loops and non-positive weights.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>) -> Self {
        let mut acc: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b || !(w > 0.0) {
                continue;
            }
            debug_assert!((a.max(b) as usize) < num_nodes);
            *acc.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        WeightedGraph {
            num_nodes,
            edges: acc.into_iter().map(|((u, v), w)| (u, v, w)).collect(),
        }
    }

    pub fn empty(num_nodes: usize) -> Self {
        WeightedGraph {
            num_nodes,
            edges: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Weighted degree of every node.
    pub fn strengths(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.num_nodes];
        for &(u, v, w) in &self.edges {
            k[u as usize] += w;
            k[v as usize] += w;
        }
        k
    }

    /// Newman modularity of `labels` at resolution 1; zero for an edgeless graph.
    pub fn modularity<L: PartialEq + Copy + Ord>(&self, labels: &[L]) -> f64 {
        let m = self.total_weight();
        if m == 0.0 {
            return 0.0;
        }
        let k = self.strengths();
        let mut internal: BTreeMap<L, f64> = BTreeMap::new();
        let mut degree: BTreeMap<L, f64> = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            if labels[u as usize] == labels[v as usize] {
                *internal.entry(labels[u as usize]).or_insert(0.0) += w;
            }
        }
        for (i, &ki) in k.iter().enumerate() {
            *degree.entry(labels[i]).or_insert(0.0) += ki;
        }
        degree
            .iter()
            .map(|(c, &d)| internal.get(c).copied().unwrap_or(0.0) / m - (d / (2.0 * m)).powi(2))
            .sum()
    }
}

//! Two-phase Louvain modularity optimisation (resolution 1).
//!
//! Phase one moves single nodes to the neighbouring community with the best
//! modularity gain, visiting nodes in a seeded random order each pass; a node
//! only leaves its community for a strictly better one. Phase two collapses
//! communities into super-nodes and the process repeats until nothing moves.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::graph::WeightedGraph;
use crate::rng::Rng;

const MIN_GAIN: f64 = 1e-12;
const MAX_PASSES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    /// Community index per node, numbered by first appearance in node order.
    pub communities: Vec<usize>,
    /// Modularity of the initial assignment, then after every level.
    pub modularity_trace: Vec<f64>,
}

impl LouvainResult {
    pub fn modularity(&self) -> f64 {
        *self.modularity_trace.last().unwrap_or(&0.0)
    }

    pub fn community_count(&self) -> usize {
        self.communities.iter().max().map_or(0, |&c| c + 1)
    }
}

struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(g: &WeightedGraph) -> Self {
        let n = g.num_nodes();
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in g.edges() {
            adj[u as usize].push((v as usize, w));
            adj[v as usize].push((u as usize, w));
        }
        for a in adj.iter_mut() {
            a.sort_by_key(|&(j, _)| j);
        }
        let strength = g.strengths();
        let two_m = strength.iter().sum();
        Level {
            adj,
            self_loops: vec![0.0; n],
            strength,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, comm: &[usize]) -> f64 {
        if self.two_m == 0.0 {
            return 0.0;
        }
        let k = comm.iter().max().map_or(0, |&c| c + 1);
        let mut internal = vec![0.0; k];
        let mut total = vec![0.0; k];
        for i in 0..self.len() {
            total[comm[i]] += self.strength[i];
            internal[comm[i]] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                if j > i && comm[j] == comm[i] {
                    internal[comm[i]] += w;
                }
            }
        }
        let m = self.two_m / 2.0;
        internal
            .iter()
            .zip(&total)
            .map(|(&inside, &tot)| inside / m - (tot / self.two_m).powi(2))
            .sum()
    }

    /// Local moving. Returns whether any node changed community.
    fn move_nodes(&self, comm: &mut [usize], rng: &mut Rng) -> bool {
        let n = self.len();
        let mut total = vec![0.0; n];
        for i in 0..n {
            total[comm[i]] += self.strength[i];
        }
        let mut weight_to = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut moved_any = false;

        for _ in 0..MAX_PASSES {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let ki = self.strength[i];
                if ki == 0.0 {
                    continue;
                }
                let own = comm[i];
                touched.clear();
                touched.push(own);
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if weight_to[c] == 0.0 && !touched.contains(&c) {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[own] -= ki;
                let gain = |c: usize| weight_to[c] - total[c] * ki / self.two_m;
                let mut best = own;
                let mut best_gain = gain(own);
                for &c in &touched[1..] {
                    let g = gain(c);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                if best != own {
                    comm[i] = best;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        moved_any
    }

    /// Collapses communities (already renumbered `0..k`) into super-nodes.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut self_loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        for i in 0..self.len() {
            let ci = comm[i];
            strength[ci] += self.strength[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                if j <= i {
                    continue;
                }
                let cj = comm[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *links[ci].entry(cj).or_insert(0.0) += w;
                    *links[cj].entry(ci).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: links.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
            strength,
            two_m: self.two_m,
        }
    }
}

/// Renumbers labels `0..k` by first appearance; returns `k`.
pub(crate) fn renumber(labels: &mut [usize]) -> usize {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for l in labels.iter_mut() {
        let next = map.len();
        *l = *map.entry(*l).or_insert(next);
    }
    map.len()
}

/// Louvain from singletons.
pub fn louvain(g: &WeightedGraph, rng: &mut Rng) -> LouvainResult {
    louvain_from(g, None, rng)
}

/// Louvain starting from `initial` (any labels, one per node). Nodes with no
/// incident weight are always returned as singletons.
pub fn louvain_from(g: &WeightedGraph, initial: Option<&[usize]>, rng: &mut Rng) -> LouvainResult {
    let n = g.num_nodes();
    let level0 = Level::from_graph(g);
    let mut comm: Vec<usize> = match initial {
        Some(init) => {
            assert_eq!(init.len(), n, "initial partition must label every node");
            let mut c = init.to_vec();
            let base = renumber(&mut c);
            // isolated nodes get labels beyond any seed label
            for (i, ci) in c.iter_mut().enumerate() {
                if level0.strength[i] == 0.0 {
                    *ci = base + i;
                }
            }
            c
        }
        None => (0..n).collect(),
    };
    renumber(&mut comm);

    let mut trace = vec![level0.modularity(&comm)];
    if level0.two_m == 0.0 {
        let mut singles: Vec<usize> = (0..n).collect();
        renumber(&mut singles);
        return LouvainResult {
            communities: singles,
            modularity_trace: trace,
        };
    }

    // membership of original nodes in current-level nodes
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut level = level0;
    let mut level_comm = comm;
    loop {
        let moved = level.move_nodes(&mut level_comm, rng);
        let k = renumber(&mut level_comm);
        for x in node_of.iter_mut() {
            *x = level_comm[*x];
        }
        trace.push(level.modularity(&level_comm));
        if !moved && k == level.len() {
            break;
        }
        level = level.aggregate(&level_comm, k);
        level_comm = (0..k).collect();
        if k == 1 {
            break;
        }
    }
    renumber(&mut node_of);
    LouvainResult {
        communities: node_of,
        modularity_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn cliques(sizes: &[usize], bridges: &[(u32, u32)]) -> WeightedGraph {
        let mut edges = Vec::new();
        let mut base = 0u32;
        for &s in sizes {
            for a in 0..s as u32 {
                for b in a + 1..s as u32 {
                    edges.push((base + a, base + b, 1.0));
                }
            }
            base += s as u32;
        }
        edges.extend(bridges.iter().map(|&(a, b)| (a, b, 1.0)));
        WeightedGraph::from_edges(base as usize, edges)
    }

    #[test]
    fn empty_graph_is_all_singletons() {
        let r = louvain(&WeightedGraph::empty(5), &mut rng::seeded(0));
        assert_eq!(r.communities, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn isolated_nodes_stay_alone_even_when_seeded() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0)]);
        let r = louvain_from(&g, Some(&[0, 0, 0, 0]), &mut rng::seeded(1));
        assert_eq!(r.communities, vec![0, 0, 1, 2]);
    }

    #[test]
    fn two_triangles() {
        for seed in 0..20 {
            let r = louvain(&cliques(&[3, 3], &[]), &mut rng::seeded(seed));
            assert_eq!(r.communities, vec![0, 0, 0, 1, 1, 1]);
        }
    }

    #[test]
    fn barbell() {
        for seed in 0..20 {
            let r = louvain(&cliques(&[4, 4], &[(3, 4)]), &mut rng::seeded(seed));
            assert_eq!(r.communities, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        }
    }

    #[test]
    fn seeded_optimum_is_kept() {
        let g = cliques(&[5, 4, 3], &[(0, 5), (6, 9)]);
        let plain = louvain(&g, &mut rng::seeded(3));
        let again = louvain_from(&g, Some(&plain.communities), &mut rng::seeded(99));
        assert_eq!(again.communities, plain.communities);
    }

    #[test]
    fn modularity_trace_is_monotone() {
        use rand::Rng as _;
        for seed in 0..30 {
            let mut r = rng::seeded(seed);
            let n = 40;
            let edges: Vec<_> = (0..120)
                .map(|_| (r.random_range(0..n), r.random_range(0..n), r.random_range(0.5..3.0)))
                .collect();
            let g = WeightedGraph::from_edges(n as usize, edges);
            let res = louvain(&g, &mut r);
            assert!(res.modularity_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{:?}", res.modularity_trace);
            assert!((res.modularity() - g.modularity(&res.communities)).abs() < 1e-9);
        }
    }
}

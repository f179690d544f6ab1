//! Snapshot-based dynamic community detection baselines.
//!
//! All four strategies run Louvain on the window graphs of a
//! [`SnapshotSequence`] and differ in how they carry information from one
//! window to the next:
//!
//! * `no_smoothing`: independent Louvain per window, then Jaccard matching of
//!   consecutive communities (threshold `theta`).
//! * `implicit_global`: Louvain seeded with the previous window's partition.
//! * `label_smoothing`: independent Louvain per window, then Louvain on the
//!   survival graph linking similar communities of consecutive windows.
//! * `smoothed_graph`: Louvain on the current window blended with the
//!   previous window's co-membership cliques.

mod louvain;
mod matching;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::{self, Stage};
use crate::snapshot::{DynamicPartition, Label, SnapshotSequence};
use crate::stream::NodeId;

pub use louvain::{louvain, louvain_from, LouvainResult};
pub use matching::{communities, jaccard, match_communities};

pub const DEFAULT_THETA: f64 = 0.3;
pub const DEFAULT_RHO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NoSmoothing,
    ImplicitGlobal,
    LabelSmoothing,
    SmoothedGraph,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::NoSmoothing,
        Method::ImplicitGlobal,
        Method::LabelSmoothing,
        Method::SmoothedGraph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::NoSmoothing => "no_smoothing",
            Method::ImplicitGlobal => "implicit_global",
            Method::LabelSmoothing => "label_smoothing",
            Method::SmoothedGraph => "smoothed_graph",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown detection method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub method: Method,
    /// Jaccard threshold for matching communities across windows.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Weight of the current window in the smoothed-graph blend.
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

fn default_rho() -> f64 {
    DEFAULT_RHO
}

impl DetectorConfig {
    pub fn new(method: Method) -> Self {
        DetectorConfig {
            method,
            theta: DEFAULT_THETA,
            rho: DEFAULT_RHO,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::param(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::param(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        Ok(())
    }
}

/// Runs the configured strategy.
pub fn detect(s: &SnapshotSequence, cfg: &DetectorConfig) -> Result<DynamicPartition> {
    cfg.validate()?;
    match cfg.method {
        Method::NoSmoothing => detect_no_smoothing(s, cfg),
        Method::ImplicitGlobal => detect_implicit_global(s, cfg),
        Method::LabelSmoothing => detect_label_smoothing(s, cfg),
        Method::SmoothedGraph => detect_smoothed_graph(s, cfg),
    }
}

fn window_louvain(g: &WeightedGraph, seed: u64, window: usize, initial: Option<&[usize]>) -> Vec<usize> {
    let mut rng = rng::substream(seed, Stage::Louvain, window as u32, 0);
    louvain_from(g, initial, &mut rng).communities
}

fn independent_partitions(s: &SnapshotSequence, seed: u64) -> Vec<Vec<usize>> {
    (0..s.len())
        .into_par_iter()
        .map(|i| window_louvain(&s.graph(i), seed, i, None))
        .collect()
}

/// Gives stable labels to a sequence of per-window partitions by Jaccard
/// matching consecutive windows.
fn label_by_jaccard(partitions: &[Vec<usize>], theta: f64) -> Vec<Vec<Label>> {
    let mut next: Label = 0;
    let mut out: Vec<Vec<Label>> = Vec::with_capacity(partitions.len());
    for part in partitions {
        let labels = match out.last() {
            None => fresh_labels(part, &mut next),
            Some(prev) => relabel(prev, part, theta, &mut next),
        };
        out.push(labels);
    }
    out
}

fn fresh_labels(part: &[usize], next: &mut Label) -> Vec<Label> {
    let k = part.iter().max().map_or(0, |&c| c + 1);
    let base = *next;
    *next += k as Label;
    part.iter().map(|&c| base + c as Label).collect()
}

/// Labels `part` by one-to-one Jaccard matching against the labelled `prev`.
fn relabel(prev: &[Label], part: &[usize], theta: f64, next: &mut Label) -> Vec<Label> {
    let prev_groups = matching::groups_by_label(prev);
    let cur_groups = communities(part);
    let matched = match_communities(&prev_groups, &cur_groups, theta);
    let mut label_of = vec![None; cur_groups.len()];
    for (prev_label, cur) in matched {
        label_of[cur] = Some(prev_label);
    }
    let label_of: Vec<Label> = label_of
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                *next += 1;
                *next - 1
            })
        })
        .collect();
    part.iter().map(|&c| label_of[c]).collect()
}

pub fn detect_no_smoothing(s: &SnapshotSequence, cfg: &DetectorConfig) -> Result<DynamicPartition> {
    let parts = independent_partitions(s, cfg.seed);
    DynamicPartition::new(s.num_nodes() as usize, label_by_jaccard(&parts, cfg.theta))
}

pub fn detect_implicit_global(s: &SnapshotSequence, cfg: &DetectorConfig) -> Result<DynamicPartition> {
    let n = s.num_nodes() as usize;
    let mut next: Label = 0;
    let mut windows: Vec<Vec<Label>> = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let g = s.graph(i);
        let labels = match windows.last() {
            None => fresh_labels(&window_louvain(&g, cfg.seed, i, None), &mut next),
            Some(prev) => {
                let seed_labels = seed_labels(prev, &g);
                let init: Vec<usize> = seed_labels
                    .iter()
                    .enumerate()
                    .map(|(v, l)| l.map_or(usize::MAX - v, |l| l as usize))
                    .collect();
                let part = window_louvain(&g, cfg.seed, i, Some(&init));
                inherit_seed_labels(&seed_labels, &part, &mut next)
            }
        };
        windows.push(labels);
    }
    DynamicPartition::new(n, windows)
}

/// Seed label of every node for the next window: its previous label when it
/// has edges in the new window, or when it was already alone previously.
fn seed_labels(prev: &[Label], g: &WeightedGraph) -> Vec<Option<Label>> {
    let strength = g.strengths();
    let mut size: BTreeMap<Label, usize> = BTreeMap::new();
    for &l in prev {
        *size.entry(l).or_insert(0) += 1;
    }
    prev.iter()
        .enumerate()
        .map(|(v, &l)| (strength[v] > 0.0 || size[&l] == 1).then_some(l))
        .collect()
}

/// Each final community takes the seed label carried by most of its members
/// (greedy, one-to-one); the rest get fresh labels.
fn inherit_seed_labels(seeds: &[Option<Label>], part: &[usize], next: &mut Label) -> Vec<Label> {
    let groups = communities(part);
    let mut candidates: Vec<(usize, Label, usize)> = Vec::new();
    for (ci, members) in groups.iter().enumerate() {
        let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
        for &v in members {
            if let Some(l) = seeds[v as usize] {
                *counts.entry(l).or_insert(0) += 1;
            }
        }
        candidates.extend(counts.into_iter().map(|(l, c)| (c, l, ci)));
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut label_of: Vec<Option<Label>> = vec![None; groups.len()];
    let mut used = std::collections::BTreeSet::new();
    for (_, l, ci) in candidates {
        if label_of[ci].is_none() && used.insert(l) {
            label_of[ci] = Some(l);
        }
    }
    let label_of: Vec<Label> = label_of
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                *next += 1;
                *next - 1
            })
        })
        .collect();
    part.iter().map(|&c| label_of[c]).collect()
}

pub fn detect_label_smoothing(s: &SnapshotSequence, cfg: &DetectorConfig) -> Result<DynamicPartition> {
    let n = s.num_nodes() as usize;
    let parts = independent_partitions(s, cfg.seed);
    let groups: Vec<Vec<Vec<NodeId>>> = parts.iter().map(|p| communities(p)).collect();

    // survival graph vertices: (window, community) flattened
    let offsets: Vec<usize> = groups
        .iter()
        .scan(0, |acc, g| {
            let start = *acc;
            *acc += g.len();
            Some(start)
        })
        .collect();
    let total = groups.iter().map(Vec::len).sum();
    let mut edges = Vec::new();
    for t in 1..groups.len() {
        for (a, ga) in groups[t - 1].iter().enumerate() {
            for (b, gb) in groups[t].iter().enumerate() {
                let sim = jaccard(ga, gb)?;
                if sim > 0.0 && sim >= cfg.theta {
                    edges.push(((offsets[t - 1] + a) as NodeId, (offsets[t] + b) as NodeId, sim));
                }
            }
        }
    }
    let survival = WeightedGraph::from_edges(total, edges);
    let mut rng = rng::substream(cfg.seed, Stage::Survival, 0, 0);
    let dyn_comm = louvain(&survival, &mut rng).communities;

    let windows = parts
        .iter()
        .enumerate()
        .map(|(t, p)| p.iter().map(|&c| dyn_comm[offsets[t] + c] as Label).collect())
        .collect();
    DynamicPartition::new(n, windows)
}

/// Window graph blended with the previous co-membership cliques:
/// `rho * A + (1 - rho) * s * C`, with `s` the largest weight of `A` (1 for an
/// empty window). This is the max-normalised blend scaled by `s`, which
/// leaves the modularity landscape unchanged.
pub fn smoothed_graph(g: &WeightedGraph, prev: &[Label], rho: f64) -> WeightedGraph {
    let scale = g.edges().iter().map(|e| e.2).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut edges: Vec<(NodeId, NodeId, f64)> = g.edges().iter().map(|&(u, v, w)| (u, v, rho * w)).collect();
    let co = (1.0 - rho) * scale;
    if co > 0.0 {
        for members in matching::groups_by_label(prev).values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    edges.push((a, b, co));
                }
            }
        }
    }
    WeightedGraph::from_edges(g.num_nodes(), edges)
}

pub fn detect_smoothed_graph(s: &SnapshotSequence, cfg: &DetectorConfig) -> Result<DynamicPartition> {
    let n = s.num_nodes() as usize;
    let mut next: Label = 0;
    let mut windows: Vec<Vec<Label>> = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let g = s.graph(i);
        let labels = match windows.last() {
            None => fresh_labels(&window_louvain(&g, cfg.seed, i, None), &mut next),
            Some(prev) => {
                let blended = smoothed_graph(&g, prev, cfg.rho);
                let part = window_louvain(&blended, cfg.seed, i, None);
                relabel(prev, &part, cfg.theta, &mut next)
            }
        };
        windows.push(labels);
    }
    DynamicPartition::new(n, windows)
}

//! Fixed-window aggregation of a link stream into static snapshots, and the
//! matching projection of Mosaic ground truth onto the same windows.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::partition::{MosaicId, MosaicPartition};
use crate::stream::{LinkStream, NodeId, TimeInterval};

/// Community label in a [`DynamicPartition`]. Ground-truth projections use
/// the mosaic id, and [`EMPTY_LABEL`] for `c_*`.
pub type Label = u64;

pub const EMPTY_LABEL: Label = u64::MAX;

pub fn mosaic_label(id: MosaicId) -> Label {
    id as Label
}

/// Windowed edge counts. `counts[i]` holds `((u, v), n)` sorted by pair, for
/// window `[boundaries[i], boundaries[i + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSequence {
    num_nodes: u32,
    boundaries: Vec<f64>,
    counts: Vec<Vec<((NodeId, NodeId), u32)>>,
}

impl SnapshotSequence {
    pub fn new(num_nodes: u32, boundaries: Vec<f64>, counts: Vec<Vec<((NodeId, NodeId), u32)>>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("snapshot boundaries must be strictly increasing"));
        }
        if counts.len() != boundaries.len() - 1 {
            return Err(Error::param(format!(
                "{} windows but {} edge lists",
                boundaries.len() - 1,
                counts.len()
            )));
        }
        Ok(SnapshotSequence {
            num_nodes,
            boundaries,
            counts,
        })
    }

    pub fn num_nodes(&self) -> u32 {
        self.num_nodes
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn window(&self, i: usize) -> TimeInterval {
        TimeInterval::new(self.boundaries[i], self.boundaries[i + 1]).expect("boundaries are increasing")
    }

    pub fn counts(&self, i: usize) -> &[((NodeId, NodeId), u32)] {
        &self.counts[i]
    }

    pub fn graph(&self, i: usize) -> WeightedGraph {
        WeightedGraph::from_edges(
            self.num_nodes as usize,
            self.counts[i].iter().map(|&((u, v), c)| (u, v, c as f64)),
        )
    }

    pub fn total_weight(&self) -> u64 {
        self.counts.iter().flatten().map(|&(_, c)| c as u64).sum()
    }
}

/// Per-window labelling of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicPartition {
    num_nodes: usize,
    windows: Vec<Vec<Label>>,
}

impl DynamicPartition {
    pub fn new(num_nodes: usize, windows: Vec<Vec<Label>>) -> Result<Self> {
        if let Some((i, w)) = windows.iter().enumerate().find(|(_, w)| w.len() != num_nodes) {
            return Err(Error::param(format!(
                "window {i} labels {} nodes, expected {num_nodes}",
                w.len()
            )));
        }
        Ok(DynamicPartition { num_nodes, windows })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_windows(&self) -> usize {
        self.windows.len()
    }

    pub fn window(&self, i: usize) -> &[Label] {
        &self.windows[i]
    }

    pub fn windows(&self) -> &[Vec<Label>] {
        &self.windows
    }

    /// Label sequence of one node across windows.
    pub fn trajectory(&self, node: usize) -> impl Iterator<Item = Label> + '_ {
        self.windows.iter().map(move |w| w[node])
    }
}

/// Window boundaries `start, start + w, ...` up to the domain end; the last
/// window may be shorter.
pub fn window_boundaries(domain: TimeInterval, window: f64) -> Result<Vec<f64>> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::param(format!("window must be positive, got {window}")));
    }
    let count = window_count(domain, window);
    let mut b: Vec<f64> = (0..count).map(|i| domain.start() + i as f64 * window).collect();
    b.push(domain.end());
    Ok(b)
}

fn window_count(domain: TimeInterval, window: f64) -> usize {
    let mut count = (domain.duration() / window).ceil().max(1.0) as usize;
    while count > 1 && domain.start() + (count - 1) as f64 * window >= domain.end() {
        count -= 1;
    }
    count
}

/// Index of the window holding time `t`: `floor((t - start) / window)`, clamped.
pub fn window_index(domain: TimeInterval, window: f64, t: f64) -> usize {
    let last = window_count(domain, window) - 1;
    (((t - domain.start()) / window).floor().max(0.0) as usize).min(last)
}

/// Counts temporal edges per node pair in consecutive windows of length `window`.
pub fn aggregate(ls: &LinkStream, window: f64) -> Result<SnapshotSequence> {
    let domain = ls.domain();
    let boundaries = window_boundaries(domain, window)?;
    let mut acc: Vec<BTreeMap<(NodeId, NodeId), u32>> = vec![BTreeMap::new(); boundaries.len() - 1];
    for e in ls.edges() {
        let i = window_index(domain, window, e.t);
        *acc[i].entry((e.u, e.v)).or_insert(0) += 1;
    }
    SnapshotSequence::new(
        ls.num_nodes(),
        boundaries,
        acc.into_iter().map(|m| m.into_iter().collect()).collect(),
    )
}

/// Labels every node in every window with the community covering the largest
/// share of that window (`c_*` competes like a mosaic). Ties go to the
/// community that starts earlier inside the window, then to the smaller label.
pub fn project_ground_truth(p: &MosaicPartition, boundaries: &[f64]) -> Result<DynamicPartition> {
    if boundaries.len() < 2 || boundaries.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("boundaries must be strictly increasing"));
    }
    let domain = p.domain();
    if boundaries[0] < domain.start() || *boundaries.last().unwrap() > domain.end() {
        return Err(Error::Domain("boundaries leave the partition domain".into()));
    }
    let n = p.num_nodes() as usize;
    let mut windows = Vec::with_capacity(boundaries.len() - 1);
    for w in boundaries.windows(2) {
        let win = TimeInterval::new(w[0], w[1])?;
        let mut labels = Vec::with_capacity(n);
        for node in 0..n as NodeId {
            labels.push(majority_label(p, node, win));
        }
        windows.push(labels);
    }
    DynamicPartition::new(n, windows)
}

fn majority_label(p: &MosaicPartition, node: NodeId, win: TimeInterval) -> Label {
    // (share, start, label)
    let mut best: Option<(f64, f64, Label)> = None;
    let mut covered = 0.0;
    let mut empty_start: Option<f64> = None;
    let mut cursor = win.start();
    let consider = |cand: (f64, f64, Label), best: &mut Option<(f64, f64, Label)>| {
        let better = match *best {
            None => true,
            Some((s, t, l)) => {
                cand.0 > s || (cand.0 == s && (cand.1 < t || (cand.1 == t && cand.2 < l)))
            }
        };
        if better {
            *best = Some(cand);
        }
    };
    for (interval, id) in p.node_cells(node) {
        let Some(part) = interval.intersect(&win) else {
            continue;
        };
        if empty_start.is_none() && part.start() > cursor {
            empty_start = Some(cursor);
        }
        cursor = cursor.max(part.end());
        covered += part.duration();
        consider((part.duration(), part.start(), mosaic_label(id)), &mut best);
    }
    if empty_start.is_none() && cursor < win.end() {
        empty_start = Some(cursor);
    }
    if let Some(start) = empty_start {
        let share = (win.duration() - covered).max(0.0);
        if share > 0.0 {
            consider((share, start, EMPTY_LABEL), &mut best);
        }
    }
    best.map_or(EMPTY_LABEL, |b| b.2)
}

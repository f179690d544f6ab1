//! Scenario generators: they decide where the communities are, before any
//! edge exists.
//!
//! Three generators produce a [`MosaicPartition`]: hand-written
//! (`experimental`), snapshot-like time slabs (`snapshots`) and a recursive
//! quad-split of the whole node/time rectangle (`random`). Afterwards each
//! mosaic may be emptied into `c_*` with probability `gamma`.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Mosaic, MosaicId, MosaicPartition};
use crate::rng::{self, Rng};
use crate::stream::{NodeId, TimeInterval};

/// Default minimum mosaic duration as a fraction of the domain length.
pub const DEFAULT_MIN_DURATION_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Experimental,
    Snapshots,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    #[default]
    Fixed,
    Varying,
}

/// One hand-specified community for the experimental generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosaicSpec {
    pub nodes: Vec<NodeId>,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    pub nodes: u32,
    pub t_start: f64,
    pub t_end: f64,
    /// Segment count (snapshots) or split count (random).
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub window_mode: WindowMode,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_min_nodes")]
    pub min_nodes: usize,
    /// Defaults to 5% of the domain length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mosaics: Vec<MosaicSpec>,
    #[serde(default)]
    pub seed: u64,
}

fn default_min_nodes() -> usize {
    2
}

impl ScenarioParams {
    /// The random-scenario setting used for the reference experiment:
    /// 100 nodes over `[0, 100)`, 30 splits, 20% emptying.
    pub fn reference() -> Self {
        ScenarioParams {
            kind: ScenarioKind::Random,
            nodes: 100,
            t_start: 0.0,
            t_end: 100.0,
            k: 30,
            window_mode: WindowMode::Fixed,
            gamma: 0.2,
            min_nodes: 2,
            min_duration: None,
            mosaics: Vec::new(),
            seed: 0,
        }
    }

    pub fn domain(&self) -> Result<TimeInterval> {
        TimeInterval::new(self.t_start, self.t_end)
    }

    pub fn min_duration(&self) -> f64 {
        self.min_duration
            .unwrap_or(DEFAULT_MIN_DURATION_FRACTION * (self.t_end - self.t_start))
    }

    pub fn validate(&self) -> Result<()> {
        let domain = self.domain()?;
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::param(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if self.min_nodes < 2 {
            return Err(Error::param(format!("min_nodes must be at least 2, got {}", self.min_nodes)));
        }
        let md = self.min_duration();
        if !(md > 0.0 && md <= domain.duration()) {
            return Err(Error::param(format!(
                "min_duration must lie in (0, |T|], got {md}"
            )));
        }
        if self.kind == ScenarioKind::Snapshots && self.k < 1 {
            return Err(Error::param("snapshot scenarios need k >= 1"));
        }
        if self.kind != ScenarioKind::Experimental && (self.nodes as usize) < self.min_nodes {
            return Err(Error::param(format!(
                "{} nodes cannot hold a community of {} nodes",
                self.nodes, self.min_nodes
            )));
        }
        Ok(())
    }
}

/// A generated partition plus the non-fatal notes collected on the way.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub partition: MosaicPartition,
    pub warnings: Vec<String>,
}

/// Runs the configured generator followed by emptying.
pub fn generate_scenario(params: &ScenarioParams) -> Result<ScenarioOutcome> {
    params.validate()?;
    let domain = params.domain()?;
    let mut rng = rng::seeded(params.seed);
    let (partition, mut warnings) = match params.kind {
        ScenarioKind::Experimental => {
            let specs = params
                .mosaics
                .iter()
                .map(|s| Ok((s.nodes.clone(), TimeInterval::new(s.t_start, s.t_end)?)))
                .collect::<Result<Vec<_>>>()?;
            (experimental_scenario(&specs, params.nodes, domain)?, Vec::new())
        }
        ScenarioKind::Snapshots => (
            snapshot_scenario(params.nodes, domain, params.k, params.window_mode, params.min_nodes, &mut rng)?,
            Vec::new(),
        ),
        ScenarioKind::Random => {
            let r = random_scenario(
                params.nodes,
                domain,
                params.k,
                params.min_nodes,
                params.min_duration(),
                &mut rng,
            )?;
            (r.partition, r.warnings)
        }
    };
    let report = partition.validate();
    warnings.extend(report.warnings.iter().map(|w| w.to_string()));
    let partition = empty_mosaics(partition, params.gamma, &mut rng)?;
    Ok(ScenarioOutcome {
        partition,
        warnings,
    })
}

/// Builds a partition from explicit `(members, interval)` pairs, ids in input order.
pub fn experimental_scenario(
    specs: &[(Vec<NodeId>, TimeInterval)],
    num_nodes: u32,
    domain: TimeInterval,
) -> Result<MosaicPartition> {
    for (i, (nodes, interval)) in specs.iter().enumerate() {
        if let Some(n) = nodes.iter().find(|&&n| n >= num_nodes) {
            return Err(Error::Domain(format!("mosaic {i} contains unknown node {n}")));
        }
        if !domain.covers(interval) {
            return Err(Error::Domain(format!(
                "mosaic {i} interval {interval} leaves domain {domain}"
            )));
        }
    }
    let mosaics = specs
        .iter()
        .enumerate()
        .map(|(i, (nodes, interval))| Mosaic::new(i as MosaicId, nodes.iter().copied(), *interval))
        .collect();
    MosaicPartition::new(num_nodes, domain, mosaics)
}

/// Splits the domain into `k` segments and partitions all nodes within each.
pub fn snapshot_scenario(
    num_nodes: u32,
    domain: TimeInterval,
    k: usize,
    mode: WindowMode,
    min_size: usize,
    rng: &mut Rng,
) -> Result<MosaicPartition> {
    if k < 1 {
        return Err(Error::param("snapshot scenario needs k >= 1"));
    }
    if num_nodes < 2 {
        return Err(Error::param("snapshot scenario needs at least 2 nodes"));
    }
    let bounds = segment_bounds(domain, k, mode, rng);
    let nodes: Vec<NodeId> = (0..num_nodes).collect();
    let mut mosaics = Vec::new();
    for w in bounds.windows(2) {
        let segment = TimeInterval::new(w[0], w[1])?;
        for group in random_node_partition(&nodes, min_size, rng)? {
            mosaics.push(Mosaic::new(mosaics.len() as MosaicId, group, segment));
        }
    }
    MosaicPartition::new(num_nodes, domain, mosaics)
}

fn segment_bounds(domain: TimeInterval, k: usize, mode: WindowMode, rng: &mut Rng) -> Vec<f64> {
    let (s, e) = (domain.start(), domain.end());
    match mode {
        WindowMode::Fixed => {
            let step = domain.duration() / k as f64;
            let mut b: Vec<f64> = (0..k).map(|i| s + i as f64 * step).collect();
            b.push(e);
            b
        }
        WindowMode::Varying => loop {
            let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.random_range(s..e)).collect();
            cuts.sort_by(f64::total_cmp);
            let mut b = Vec::with_capacity(k + 1);
            b.push(s);
            b.extend(cuts);
            b.push(e);
            // a repeated cut would create an empty segment; redraw
            if b.windows(2).all(|w| w[0] < w[1]) {
                break b;
            }
        },
    }
}

/// Randomly partitions `nodes` into groups of at least `min_size`.
///
/// Shuffles, then repeatedly cuts a chunk whose size is uniform on
/// `min_size..=remaining`; a final remainder smaller than `min_size` is merged
/// into the last chunk.
pub fn random_node_partition(nodes: &[NodeId], min_size: usize, rng: &mut Rng) -> Result<Vec<Vec<NodeId>>> {
    if min_size == 0 {
        return Err(Error::param("min_size must be positive"));
    }
    if nodes.len() < min_size {
        return Err(Error::param(format!(
            "cannot split {} nodes into groups of at least {min_size}",
            nodes.len()
        )));
    }
    let mut shuffled = nodes.to_vec();
    shuffled.shuffle(rng);
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    let mut rest = &shuffled[..];
    while !rest.is_empty() {
        if rest.len() < min_size {
            groups.last_mut().expect("first chunk always fits").extend_from_slice(rest);
            break;
        }
        let size = rng.random_range(min_size..=rest.len());
        let (chunk, tail) = rest.split_at(size);
        groups.push(chunk.to_vec());
        rest = tail;
    }
    Ok(groups)
}

/// A node-set × interval rectangle that has not been given an id yet.
#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub members: Vec<NodeId>,
    pub interval: TimeInterval,
}

impl Tile {
    pub fn is_splittable(&self, min_nodes: usize, min_duration: f64) -> bool {
        self.members.len() >= 2 * min_nodes && self.interval.duration() >= 2.0 * min_duration
    }
}

/// Cuts a tile into the four products of a random node bipartition and a
/// random time cut, each side respecting the minimum sizes.
pub fn split_mosaic(tile: &Tile, min_nodes: usize, min_duration: f64, rng: &mut Rng) -> Result<[Tile; 4]> {
    if min_nodes == 0 || !(min_duration > 0.0) {
        return Err(Error::param("min_nodes and min_duration must be positive"));
    }
    if !tile.is_splittable(min_nodes, min_duration) {
        return Err(Error::Precondition(format!(
            "tile of {} nodes over {} cannot be split with min_nodes={min_nodes}, min_duration={min_duration}",
            tile.members.len(),
            tile.interval
        )));
    }
    let mut members = tile.members.clone();
    members.shuffle(rng);
    let cut = rng.random_range(min_nodes..=members.len() - min_nodes);
    let (left, right) = members.split_at(cut);

    let (s, e) = (tile.interval.start(), tile.interval.end());
    let lo = s + min_duration;
    let hi = e - min_duration;
    let t = if lo < hi { rng.random_range(lo..=hi) } else { lo };
    let first = TimeInterval::new(s, t)?;
    let second = TimeInterval::new(t, e)?;

    let tile = |m: &[NodeId], i: TimeInterval| Tile {
        members: m.to_vec(),
        interval: i,
    };
    Ok([
        tile(left, first),
        tile(right, first),
        tile(left, second),
        tile(right, second),
    ])
}

#[derive(Debug, Clone)]
pub struct RandomScenario {
    pub partition: MosaicPartition,
    /// Splits actually performed (at most `k`).
    pub splits: usize,
    /// Leaves before pruning, always `3 * splits + 1`.
    pub leaves: usize,
    pub warnings: Vec<String>,
}

/// Recursive quad-splitting of `V × T`.
///
/// Performs `k` splits, each on a uniformly chosen splittable leaf, then
/// drops leaves below the minimum node count or duration into `c_*`.
pub fn random_scenario(
    num_nodes: u32,
    domain: TimeInterval,
    k: usize,
    min_nodes: usize,
    min_duration: f64,
    rng: &mut Rng,
) -> Result<RandomScenario> {
    if num_nodes < 2 {
        return Err(Error::param("random scenario needs at least 2 nodes"));
    }
    if min_nodes == 0 || !(min_duration > 0.0) {
        return Err(Error::param("min_nodes and min_duration must be positive"));
    }
    let mut leaves = vec![Tile {
        members: (0..num_nodes).collect(),
        interval: domain,
    }];
    let mut warnings = Vec::new();
    let mut splits = 0;
    for round in 0..k {
        let candidates: Vec<usize> = (0..leaves.len())
            .filter(|&i| leaves[i].is_splittable(min_nodes, min_duration))
            .collect();
        let Some(&pick) = candidates.choose(rng) else {
            warnings.push(format!(
                "no splittable leaf left; skipped splits {round}..{k}"
            ));
            break;
        };
        let parts = split_mosaic(&leaves[pick], min_nodes, min_duration, rng)?;
        leaves.splice(pick..=pick, parts);
        splits += 1;
    }
    let leaf_count = leaves.len();
    let mosaics: Vec<Mosaic> = leaves
        .into_iter()
        .filter(|t| t.members.len() >= min_nodes && t.interval.duration() >= min_duration)
        .enumerate()
        .map(|(i, t)| Mosaic::new(i as MosaicId, t.members, t.interval))
        .collect();
    if mosaics.len() < leaf_count {
        warnings.push(format!("pruned {} undersized leaves", leaf_count - mosaics.len()));
    }
    Ok(RandomScenario {
        partition: MosaicPartition::new(num_nodes, domain, mosaics)?,
        splits,
        leaves: leaf_count,
        warnings,
    })
}

/// Drops each mosaic into `c_*` independently with probability `gamma`.
pub fn empty_mosaics(p: MosaicPartition, gamma: f64, rng: &mut Rng) -> Result<MosaicPartition> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    Ok(p.retain(|_| !rng.random_bool(gamma)))
}

//! Mosaic communities and Mosaic partitions.
//!
//! A mosaic is a rectangle `members × interval` in the node/time plane. A
//! partition holds the explicit mosaics only; the empty community `c_*` is the
//! complement of their union and is never materialised. Coverage therefore
//! holds by construction and validation only has to check disjointness and
//! containment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{NodeId, TimeInterval};

pub type MosaicId = u32;

/// Result of a point lookup in a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Community {
    Mosaic(MosaicId),
    /// The implicit empty community `c_*`.
    Empty,
}

impl Community {
    pub fn mosaic(self) -> Option<MosaicId> {
        match self {
            Community::Mosaic(id) => Some(id),
            Community::Empty => None,
        }
    }
}

impl fmt::Display for Community {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Community::Mosaic(id) => write!(f, "c{id}"),
            Community::Empty => f.write_str("c_*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mosaic {
    pub id: MosaicId,
    members: Vec<NodeId>,
    pub interval: TimeInterval,
}

impl Mosaic {
    /// Members are sorted and deduplicated.
    pub fn new(id: MosaicId, members: impl IntoIterator<Item = NodeId>, interval: TimeInterval) -> Self {
        let mut members: Vec<NodeId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Mosaic {
            id,
            members,
            interval,
        }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    pub fn contains(&self, node: NodeId, t: f64) -> bool {
        self.interval.contains(t) && self.contains_node(node)
    }

    /// Area of the cell in node·time units.
    pub fn measure(&self) -> f64 {
        self.members.len() as f64 * self.interval.duration()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// Two mosaics share `node` over a common time span.
    Overlap {
        first: MosaicId,
        second: MosaicId,
        node: NodeId,
    },
    NodeOutOfRange { mosaic: MosaicId, node: NodeId },
    IntervalOutOfDomain { mosaic: MosaicId },
    NoMembers { mosaic: MosaicId },
    DuplicateId { mosaic: MosaicId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap {
                first,
                second,
                node,
            } => write!(f, "mosaics {first} and {second} overlap on node {node}"),
            Violation::NodeOutOfRange { mosaic, node } => {
                write!(f, "mosaic {mosaic} contains unknown node {node}")
            }
            Violation::IntervalOutOfDomain { mosaic } => {
                write!(f, "mosaic {mosaic} interval leaves the time domain")
            }
            Violation::NoMembers { mosaic } => write!(f, "mosaic {mosaic} has no members"),
            Violation::DuplicateId { mosaic } => write!(f, "mosaic id {mosaic} used more than once"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Warning {
    /// Accepted, but generators never produce one-node communities.
    SingletonMosaic { mosaic: MosaicId },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SingletonMosaic { mosaic } => write!(f, "mosaic {mosaic} has a single member"),
        }
    }
}

/// Outcome of [`MosaicPartition::validate`]. Entries are sorted, so reports
/// compare equal regardless of the mosaic order they were computed from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Summary statistics over the explicit mosaics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub communities: usize,
    pub mean_size: f64,
    pub mean_duration: f64,
}

/// Explicit mosaics over `V = 0..num_nodes` and a time domain.
#[derive(Debug, Clone)]
pub struct MosaicPartition {
    num_nodes: u32,
    domain: TimeInterval,
    mosaics: Vec<Mosaic>,
    // per member node: (start, end, index into `mosaics`), sorted by start;
    // sparse so that a huge declared node set costs nothing
    by_node: BTreeMap<NodeId, Vec<(f64, f64, usize)>>,
}

impl PartialEq for MosaicPartition {
    fn eq(&self, other: &Self) -> bool {
        self.num_nodes == other.num_nodes
            && self.domain == other.domain
            && self.mosaics == other.mosaics
    }
}

impl MosaicPartition {
    /// Builds and validates a partition.
    pub fn new(num_nodes: u32, domain: TimeInterval, mosaics: Vec<Mosaic>) -> Result<Self> {
        let p = Self::from_parts(num_nodes, domain, mosaics);
        let report = p.validate();
        if report.is_ok() {
            Ok(p)
        } else {
            Err(Error::InvalidPartition(report))
        }
    }

    /// Builds a partition without checking it; see [`MosaicPartition::validate`].
    pub fn from_parts(num_nodes: u32, domain: TimeInterval, mosaics: Vec<Mosaic>) -> Self {
        let mut by_node: BTreeMap<NodeId, Vec<(f64, f64, usize)>> = BTreeMap::new();
        for (idx, m) in mosaics.iter().enumerate() {
            for &n in m.members() {
                if n < num_nodes {
                    by_node.entry(n).or_default().push((m.interval.start(), m.interval.end(), idx));
                }
            }
        }
        for slot in by_node.values_mut() {
            slot.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        }
        MosaicPartition {
            num_nodes,
            domain,
            mosaics,
            by_node,
        }
    }

    /// Everything belongs to `c_*`.
    pub fn empty(num_nodes: u32, domain: TimeInterval) -> Self {
        Self::from_parts(num_nodes, domain, Vec::new())
    }

    pub fn num_nodes(&self) -> u32 {
        self.num_nodes
    }

    pub fn domain(&self) -> TimeInterval {
        self.domain
    }

    pub fn mosaics(&self) -> &[Mosaic] {
        &self.mosaics
    }

    pub fn into_mosaics(self) -> Vec<Mosaic> {
        self.mosaics
    }

    pub fn get(&self, id: MosaicId) -> Option<&Mosaic> {
        self.mosaics.iter().find(|m| m.id == id)
    }

    /// Keeps the mosaics for which `keep` returns true; the rest join `c_*`.
    pub fn retain(self, mut keep: impl FnMut(&Mosaic) -> bool) -> Self {
        let mosaics = self.mosaics.into_iter().filter(|m| keep(m)).collect();
        Self::from_parts(self.num_nodes, self.domain, mosaics)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = BTreeSet::new();
        let mut warnings = BTreeSet::new();

        let mut seen = BTreeSet::new();
        for m in &self.mosaics {
            if !seen.insert(m.id) {
                violations.insert(Violation::DuplicateId { mosaic: m.id });
            }
            match m.size() {
                0 => {
                    violations.insert(Violation::NoMembers { mosaic: m.id });
                }
                1 => {
                    warnings.insert(Warning::SingletonMosaic { mosaic: m.id });
                }
                _ => {}
            }
            if let Some(&n) = m.members().iter().find(|&&n| n >= self.num_nodes) {
                violations.insert(Violation::NodeOutOfRange {
                    mosaic: m.id,
                    node: n,
                });
            }
            if !self.domain.covers(&m.interval) {
                violations.insert(Violation::IntervalOutOfDomain { mosaic: m.id });
            }
        }

        // One overlap entry per offending pair, naming the smallest shared node.
        let mut overlaps: BTreeMap<(MosaicId, MosaicId), NodeId> = BTreeMap::new();
        for (&node, cells) in &self.by_node {
            for (i, a) in cells.iter().enumerate() {
                for b in &cells[i + 1..] {
                    if b.0 >= a.1 {
                        break;
                    }
                    let (x, y) = (self.mosaics[a.2].id, self.mosaics[b.2].id);
                    let key = (x.min(y), x.max(y));
                    overlaps.entry(key).or_insert(node);
                }
            }
        }
        violations.extend(
            overlaps
                .into_iter()
                .map(|((first, second), node)| Violation::Overlap {
                    first,
                    second,
                    node,
                }),
        );

        ValidationReport {
            violations: violations.into_iter().collect(),
            warnings: warnings.into_iter().collect(),
        }
    }

    /// The community containing `(node, t)`.
    pub fn membership(&self, node: NodeId, t: f64) -> Result<Community> {
        if node >= self.num_nodes {
            return Err(Error::Domain(format!(
                "node {node} outside node set of size {}",
                self.num_nodes
            )));
        }
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!("time {t} outside domain {}", self.domain)));
        }
        Ok(self.lookup(node, t))
    }

    /// Unchecked lookup; callers guarantee `node < num_nodes`.
    pub(crate) fn lookup(&self, node: NodeId, t: f64) -> Community {
        let Some(cells) = self.by_node.get(&node) else {
            return Community::Empty;
        };
        let after = cells.partition_point(|c| c.0 <= t);
        match after.checked_sub(1).map(|i| cells[i]) {
            Some((_, end, idx)) if t < end => Community::Mosaic(self.mosaics[idx].id),
            _ => Community::Empty,
        }
    }

    /// Mosaic cells of `node`, ordered by start time, as `(interval, id)`.
    pub fn node_cells(&self, node: NodeId) -> impl Iterator<Item = (TimeInterval, MosaicId)> + '_ {
        self.by_node
            .get(&node)
            .into_iter()
            .flatten()
            .map(move |&(_, _, idx)| (self.mosaics[idx].interval, self.mosaics[idx].id))
    }

    /// Sorted, deduplicated mosaic endpoints together with the domain endpoints.
    /// Every node's membership is constant between consecutive breakpoints.
    pub fn time_breakpoints(&self) -> Vec<f64> {
        let mut points = vec![self.domain.start(), self.domain.end()];
        for m in &self.mosaics {
            points.push(m.interval.start());
            points.push(m.interval.end());
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    pub fn stats(&self) -> PartitionStats {
        let n = self.mosaics.len();
        if n == 0 {
            return PartitionStats {
                communities: 0,
                mean_size: 0.0,
                mean_duration: 0.0,
            };
        }
        let size: usize = self.mosaics.iter().map(Mosaic::size).sum();
        let dur: f64 = self.mosaics.iter().map(|m| m.interval.duration()).sum();
        PartitionStats {
            communities: n,
            mean_size: size as f64 / n as f64,
            mean_duration: dur / n as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: f64, b: f64) -> TimeInterval {
        TimeInterval::new(a, b).unwrap()
    }

    #[test]
    fn single_full_mosaic_is_valid() {
        let p = MosaicPartition::from_parts(3, iv(0.0, 10.0), vec![Mosaic::new(0, 0..3, iv(0.0, 10.0))]);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn overlapping_intervals_on_shared_node_are_reported() {
        let p = MosaicPartition::from_parts(
            3,
            iv(0.0, 10.0),
            vec![Mosaic::new(4, [0, 1], iv(0.0, 5.0)), Mosaic::new(9, [1, 2], iv(4.0, 8.0))],
        );
        let r = p.validate();
        assert_eq!(
            r.violations,
            vec![Violation::Overlap {
                first: 4,
                second: 9,
                node: 1
            }]
        );
        assert!(matches!(
            MosaicPartition::new(3, iv(0.0, 10.0), p.into_mosaics()),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn abutting_intervals_are_disjoint() {
        let p = MosaicPartition::new(
            2,
            iv(0.0, 10.0),
            vec![Mosaic::new(0, [0, 1], iv(0.0, 5.0)), Mosaic::new(1, [0, 1], iv(5.0, 10.0))],
        );
        assert!(p.is_ok());
    }

    #[test]
    fn containment_violations() {
        let p = MosaicPartition::from_parts(
            2,
            iv(0.0, 10.0),
            vec![
                Mosaic::new(0, [0, 5], iv(0.0, 5.0)),
                Mosaic::new(1, [1], iv(5.0, 12.0)),
                Mosaic::new(1, Vec::<NodeId>::new(), iv(0.0, 1.0)),
            ],
        );
        let r = p.validate();
        assert!(r.violations.contains(&Violation::NodeOutOfRange { mosaic: 0, node: 5 }));
        assert!(r.violations.contains(&Violation::IntervalOutOfDomain { mosaic: 1 }));
        assert!(r.violations.contains(&Violation::NoMembers { mosaic: 1 }));
        assert!(r.violations.contains(&Violation::DuplicateId { mosaic: 1 }));
        assert_eq!(r.warnings, vec![Warning::SingletonMosaic { mosaic: 1 }]);
    }

    #[test]
    fn membership_lookup() {
        let p = MosaicPartition::new(3, iv(0.0, 10.0), vec![Mosaic::new(1, [0, 1], iv(0.0, 5.0))]).unwrap();
        assert_eq!(p.membership(0, 2.0).unwrap(), Community::Mosaic(1));
        assert_eq!(p.membership(0, 7.0).unwrap(), Community::Empty);
        assert_eq!(p.membership(0, 5.0).unwrap(), Community::Empty);
        assert_eq!(p.membership(2, 1.0).unwrap(), Community::Empty);
        assert!(matches!(p.membership(3, 1.0), Err(Error::Domain(_))));
        assert!(matches!(p.membership(0, 10.0), Err(Error::Domain(_))));
        assert!(matches!(p.membership(0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn breakpoints() {
        let d = iv(0.0, 10.0);
        let one = MosaicPartition::new(2, d, vec![Mosaic::new(0, [0, 1], d)]).unwrap();
        assert_eq!(one.time_breakpoints(), vec![0.0, 10.0]);
        let two = MosaicPartition::new(
            2,
            d,
            vec![Mosaic::new(0, [0, 1], iv(0.0, 5.0)), Mosaic::new(1, [0, 1], iv(5.0, 10.0))],
        )
        .unwrap();
        assert_eq!(two.time_breakpoints(), vec![0.0, 5.0, 10.0]);
        assert_eq!(MosaicPartition::empty(2, d).time_breakpoints(), vec![0.0, 10.0]);
    }

    // Random valid partitions: a grid of time slabs, each slab splitting a
    // shuffled node list into chunks, some of which are dropped into c_*.
    fn arb_partition() -> impl Strategy<Value = MosaicPartition> {
        (2u32..12, 1usize..5, any::<u64>()).prop_map(|(n, slabs, seed)| {
            use rand::seq::SliceRandom;
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cuts: Vec<f64> = (0..slabs - 1).map(|_| rng.random_range(0.5..9.5)).collect();
            cuts.push(0.0);
            cuts.push(10.0);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut mosaics = Vec::new();
            let mut id = 0;
            for w in cuts.windows(2) {
                let mut nodes: Vec<NodeId> = (0..n).collect();
                nodes.shuffle(&mut rng);
                let mut rest = &nodes[..];
                while !rest.is_empty() {
                    let k = rng.random_range(1..=rest.len());
                    let (chunk, tail) = rest.split_at(k);
                    rest = tail;
                    if rng.random_bool(0.75) {
                        mosaics.push(Mosaic::new(id, chunk.iter().copied(), iv(w[0], w[1])));
                        id += 1;
                    }
                }
            }
            MosaicPartition::new(n, iv(0.0, 10.0), mosaics).unwrap()
        })
    }

    proptest! {
        #[test]
        fn membership_matches_brute_force(p in arb_partition(), queries in prop::collection::vec((0u32..12, 0.0f64..10.0), 40)) {
            for (node, t) in queries {
                let node = node % p.num_nodes();
                let hits: Vec<_> = p.mosaics().iter().filter(|m| m.contains(node, t)).map(|m| m.id).collect();
                prop_assert!(hits.len() <= 1);
                let expected = hits.first().map_or(Community::Empty, |&id| Community::Mosaic(id));
                prop_assert_eq!(p.membership(node, t).unwrap(), expected);
            }
        }

        #[test]
        fn membership_constant_between_breakpoints(p in arb_partition(), picks in prop::collection::vec((0u32..12, 0.0f64..1.0, 0.0f64..1.0, any::<prop::sample::Index>()), 30)) {
            let bp = p.time_breakpoints();
            for (node, a, b, seg) in picks {
                let node = node % p.num_nodes();
                let i = seg.index(bp.len() - 1);
                let (lo, hi) = (bp[i], bp[i + 1]);
                let t1 = lo + a * (hi - lo);
                let t2 = lo + b * (hi - lo);
                prop_assert_eq!(p.lookup(node, t1), p.lookup(node, t2));
            }
        }

        #[test]
        fn validation_ignores_mosaic_order(p in arb_partition(), extra in (0u32..12, 0.0f64..9.0), rot in 0usize..64) {
            let mut mosaics = p.mosaics().to_vec();
            // inject a likely-overlapping mosaic so reports are non-trivial
            let (node, s) = extra;
            mosaics.push(Mosaic::new(999, [node % p.num_nodes()], iv(s, s + 1.0)));
            let a = MosaicPartition::from_parts(p.num_nodes(), p.domain(), mosaics.clone()).validate();
            let len = mosaics.len();
            mosaics.rotate_left(rot % len);
            mosaics.reverse();
            let b = MosaicPartition::from_parts(p.num_nodes(), p.domain(), mosaics).validate();
            prop_assert_eq!(a, b);
        }
    }
}

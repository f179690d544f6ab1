//! Link streams: a fixed node set, a half-open time domain and a time-ordered
//! multiset of instantaneous undirected interactions.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `0..num_nodes`.
pub type NodeId = u32;

/// Half-open interval `[start, end)` on the real time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    start: f64,
    end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::param(format!(
                "interval bounds must be finite, got [{start}, {end})"
            )));
        }
        if start >= end {
            return Err(Error::param(format!(
                "interval start must precede end, got [{start}, {end})"
            )));
        }
        Ok(TimeInterval { start, end })
    }

    #[inline]
    pub fn start(&self) -> f64 {
        self.start
    }

    #[inline]
    pub fn end(&self) -> f64 {
        self.end
    }

    #[inline]
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }

    /// Non-empty intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start < end).then_some(TimeInterval { start, end })
    }

    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        self.intersect(other).is_some()
    }

    /// `other ⊆ self`.
    pub fn covers(&self, other: &TimeInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Length of `self ∩ other`, zero when disjoint.
    pub fn overlap_len(&self, other: &TimeInterval) -> f64 {
        self.intersect(other).map_or(0.0, |i| i.duration())
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// An instantaneous undirected interaction, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub t: f64,
}

impl TemporalEdge {
    pub fn new(a: NodeId, b: NodeId, t: f64) -> Result<Self> {
        if a == b {
            return Err(Error::param(format!("self-loop on node {a}")));
        }
        if !t.is_finite() {
            return Err(Error::param(format!("edge time must be finite, got {t}")));
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Ok(TemporalEdge { u, v, t })
    }

    /// Canonical order: time, then endpoints.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

/// A link stream `(V, E, T)` with `V = 0..num_nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStream {
    num_nodes: u32,
    domain: TimeInterval,
    edges: Vec<TemporalEdge>,
}

impl LinkStream {
    /// Validates endpoints and timestamps, then sorts edges canonically.
    pub fn new(num_nodes: u32, domain: TimeInterval, mut edges: Vec<TemporalEdge>) -> Result<Self> {
        for e in &edges {
            if e.u == e.v {
                return Err(Error::param(format!("self-loop on node {}", e.u)));
            }
            let hi = e.u.max(e.v);
            if hi >= num_nodes {
                return Err(Error::Domain(format!(
                    "edge endpoint {hi} outside node set of size {num_nodes}"
                )));
            }
            if !domain.contains(e.t) {
                return Err(Error::Domain(format!(
                    "edge time {} outside domain {domain}",
                    e.t
                )));
            }
        }
        for e in edges.iter_mut() {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort_by(TemporalEdge::canonical_cmp);
        Ok(LinkStream {
            num_nodes,
            domain,
            edges,
        })
    }

    pub fn empty(num_nodes: u32, domain: TimeInterval) -> Self {
        LinkStream {
            num_nodes,
            domain,
            edges: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> u32 {
        self.num_nodes
    }

    pub fn domain(&self) -> TimeInterval {
        self.domain
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn into_edges(self) -> Vec<TemporalEdge> {
        self.edges
    }
}

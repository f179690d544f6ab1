//! Edge generation on top of a Mosaic partition.
//!
//! Every explicit mosaic gets an internal backbone (an Erdős–Rényi graph with
//! probability `(n - 1)^(alpha - 1)`), and every pair of time-overlapping
//! mosaics gets a bipartite cross backbone with probability
//! `beta * (n1 + n2 - 1)^(alpha - 1)`. Each backbone edge then fires as a
//! homogeneous Poisson process over the mosaic interval (or the overlap of
//! the two intervals). Finally edges may be rewired with probability `eta`.
//!
//! Each mosaic and each mosaic pair draws from its own random substream, so
//! the contexts are generated in parallel and the output is independent of
//! the thread count.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Mosaic, MosaicId, MosaicPartition};
use crate::rng::{self, Rng, Stage};
use crate::stream::{LinkStream, NodeId, TemporalEdge, TimeInterval};

/// Activation rate for internal edges: one value for all mosaics, or one per mosaic id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InternalRate {
    Uniform(f64),
    PerMosaic(BTreeMap<MosaicId, f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRate {
    pub a: MosaicId,
    pub b: MosaicId,
    pub rate: f64,
}

/// Activation rate for external edges: one value, or the off-diagonal entries
/// of a symmetric mosaic × mosaic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExternalRate {
    Uniform(f64),
    PerPair(Vec<PairRate>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeGenParams {
    /// Community density coefficient, in `(0, 1]`.
    pub alpha: f64,
    /// Community identifiability coefficient, in `[0, 1]`.
    pub beta: f64,
    pub lambda_in: InternalRate,
    pub lambda_ext: ExternalRate,
    /// Rewiring probability, in `[0, 1]`.
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl EdgeGenParams {
    /// alpha = 0.9, beta = 0.1, lambda_in = 0.4, lambda_ext = 0.1, no rewiring.
    pub fn reference() -> Self {
        EdgeGenParams {
            alpha: 0.9,
            beta: 0.1,
            lambda_in: InternalRate::Uniform(0.4),
            lambda_ext: ExternalRate::Uniform(0.1),
            eta: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::param(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::param(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        let check = |r: f64| {
            if r >= 0.0 && r.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("rates must be finite and non-negative, got {r}")))
            }
        };
        match &self.lambda_in {
            InternalRate::Uniform(r) => check(*r)?,
            InternalRate::PerMosaic(m) => m.values().try_for_each(|&r| check(r))?,
        }
        match &self.lambda_ext {
            ExternalRate::Uniform(r) => check(*r)?,
            ExternalRate::PerPair(pairs) => {
                pairs.iter().try_for_each(|p| check(p.rate))?;
                self.pair_rates()?;
            }
        }
        Ok(())
    }

    fn pair_rates(&self) -> Result<BTreeMap<(MosaicId, MosaicId), f64>> {
        let mut out = BTreeMap::new();
        if let ExternalRate::PerPair(pairs) = &self.lambda_ext {
            for p in pairs {
                if p.a == p.b {
                    return Err(Error::param(format!(
                        "external rate for ({}, {}) lies on the diagonal; use lambda_in",
                        p.a, p.b
                    )));
                }
                let key = (p.a.min(p.b), p.a.max(p.b));
                if let Some(prev) = out.insert(key, p.rate) {
                    if prev != p.rate {
                        return Err(Error::param(format!(
                            "external rate matrix is not symmetric at ({}, {})",
                            key.0, key.1
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    fn internal_rate(&self, id: MosaicId) -> Result<f64> {
        match &self.lambda_in {
            InternalRate::Uniform(r) => Ok(*r),
            InternalRate::PerMosaic(m) => m
                .get(&id)
                .copied()
                .ok_or_else(|| Error::param(format!("no internal rate for mosaic {id}"))),
        }
    }
}

/// `(n - 1)^(alpha - 1)`.
pub fn internal_probability(n: usize, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("community size must be at least 2, got {n}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(((n - 1) as f64).powf(alpha - 1.0))
}

/// `beta * (n1 + n2 - 1)^(alpha - 1)`: the two communities are treated as one.
pub fn external_probability(n1: usize, n2: usize, alpha: f64, beta: f64) -> Result<f64> {
    if n1 < 1 || n2 < 1 {
        return Err(Error::param("community sizes must be positive"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::param(format!(
            "need alpha in (0, 1] and beta in [0, 1], got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(beta * ((n1 + n2 - 1) as f64).powf(alpha - 1.0))
}

/// What a backbone edge was generated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeContext {
    Internal(MosaicId),
    External(MosaicId, MosaicId),
}

/// A static potential edge together with the window over which it may fire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackboneEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub context: EdgeContext,
    pub window: TimeInterval,
}

/// Samples a backbone between two node sets.
///
/// When both sides are the same set every unordered pair is kept with
/// probability `p`; otherwise every cross pair is. Pairs come back as `(min, max)`.
pub fn backbone(side_a: &[NodeId], side_b: &[NodeId], p: f64, rng: &mut Rng) -> Result<Vec<(NodeId, NodeId)>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut out = Vec::new();
    if side_a == side_b {
        for (i, &a) in side_a.iter().enumerate() {
            for &b in &side_a[i + 1..] {
                if rng.random_bool(p) {
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
    } else {
        for &a in side_a {
            for &b in side_b {
                if a != b && rng.random_bool(p) {
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    Ok(out)
}

/// Uniform time in `[start, end)`.
pub(crate) fn uniform_time(window: TimeInterval, rng: &mut Rng) -> f64 {
    let t = window.start() + rng.random::<f64>() * window.duration();
    if t < window.end() {
        t
    } else {
        window.end().next_down()
    }
}

/// Event times of a homogeneous Poisson process: the count is
/// `Poisson(|window| * rate)` and the times are i.i.d. uniform, sorted.
pub fn poisson_timestamps(window: TimeInterval, rate: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::param(format!("rate must be finite and non-negative, got {rate}")));
    }
    let mean = window.duration() * rate;
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let dist = Poisson::new(mean).map_err(|e| Error::param(e.to_string()))?;
    let count = dist.sample(rng) as usize;
    let mut times: Vec<f64> = (0..count).map(|_| uniform_time(window, rng)).collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

struct ContextPlan<'a> {
    context: EdgeContext,
    a: &'a Mosaic,
    b: &'a Mosaic,
    window: TimeInterval,
    probability: f64,
    rate: f64,
}

fn plan<'a>(p: &'a MosaicPartition, params: &EdgeGenParams) -> Result<Vec<ContextPlan<'a>>> {
    params.validate()?;
    let pair_rates = params.pair_rates()?;
    let ms = p.mosaics();
    let mut plans = Vec::new();
    for m in ms {
        let probability = if m.size() < 2 {
            0.0
        } else {
            internal_probability(m.size(), params.alpha)?
        };
        plans.push(ContextPlan {
            context: EdgeContext::Internal(m.id),
            a: m,
            b: m,
            window: m.interval,
            probability,
            rate: params.internal_rate(m.id)?,
        });
    }
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            let Some(window) = a.interval.intersect(&b.interval) else {
                continue;
            };
            let rate = match &params.lambda_ext {
                ExternalRate::Uniform(r) => *r,
                ExternalRate::PerPair(_) => {
                    let key = (a.id.min(b.id), a.id.max(b.id));
                    *pair_rates.get(&key).ok_or_else(|| {
                        Error::param(format!("no external rate for mosaics ({}, {})", key.0, key.1))
                    })?
                }
            };
            plans.push(ContextPlan {
                context: EdgeContext::External(a.id, b.id),
                a,
                b,
                window,
                probability: external_probability(a.size(), b.size(), params.alpha, params.beta)?,
                rate,
            });
        }
    }
    Ok(plans)
}

fn run_context(plan: &ContextPlan<'_>, seed: u64) -> Result<(Vec<BackboneEdge>, Vec<TemporalEdge>)> {
    let mut rng = match plan.context {
        EdgeContext::Internal(id) => rng::substream(seed, Stage::Internal, id, id),
        EdgeContext::External(a, b) => rng::substream(seed, Stage::External, a, b),
    };
    let pairs = backbone(plan.a.members(), plan.b.members(), plan.probability, &mut rng)?;
    let mut events = Vec::new();
    let mut bb = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        for t in poisson_timestamps(plan.window, plan.rate, &mut rng)? {
            events.push(TemporalEdge { u, v, t });
        }
        bb.push(BackboneEdge {
            u,
            v,
            context: plan.context,
            window: plan.window,
        });
    }
    Ok((bb, events))
}

/// Output of [`generate_with_backbone`].
#[derive(Debug, Clone)]
pub struct GeneratedEdges {
    pub stream: LinkStream,
    pub backbone: Vec<BackboneEdge>,
}

/// Internal and external edge generation, also returning the sampled backbone.
/// Runs on the current rayon pool.
pub fn generate_with_backbone(p: &MosaicPartition, params: &EdgeGenParams) -> Result<GeneratedEdges> {
    let plans = plan(p, params)?;
    let results: Vec<_> = plans
        .par_iter()
        .map(|plan| run_context(plan, params.seed))
        .collect::<Result<_>>()?;
    let mut backbone = Vec::new();
    let mut edges = Vec::new();
    for (bb, ev) in results {
        backbone.extend(bb);
        edges.extend(ev);
    }
    Ok(GeneratedEdges {
        stream: LinkStream::new(p.num_nodes(), p.domain(), edges)?,
        backbone,
    })
}

/// Internal and external edges for every explicit mosaic; `c_*` gets none.
pub fn generate_edges(p: &MosaicPartition, params: &EdgeGenParams) -> Result<LinkStream> {
    generate_with_backbone(p, params).map(|g| g.stream)
}

/// Full edge stage: generation followed by rewiring with `params.eta`.
pub fn generate(p: &MosaicPartition, params: &EdgeGenParams) -> Result<LinkStream> {
    let ls = generate_edges(p, params)?;
    if params.eta == 0.0 {
        return Ok(ls);
    }
    let mut rng = rng::substream(params.seed, Stage::Rewire, 0, 0);
    rewire(ls, p, params.eta, &mut rng)
}

/// Expected number of temporal edges produced by [`generate_edges`].
pub fn expected_edge_count(p: &MosaicPartition, params: &EdgeGenParams) -> Result<f64> {
    let mut total = 0.0;
    for plan in plan(p, params)? {
        let pairs = if plan.a.id == plan.b.id && matches!(plan.context, EdgeContext::Internal(_)) {
            let n = plan.a.size() as f64;
            n * (n - 1.0) / 2.0
        } else {
            (plan.a.size() * plan.b.size()) as f64
        };
        total += pairs * plan.probability * plan.window.duration() * plan.rate;
    }
    Ok(total)
}

/// Redraws each edge with probability `eta`.
///
/// A redrawn edge picks an ordered pair of explicit mosaics `(c, c')`
/// uniformly among those whose intervals intersect (`c = c'` included), then
/// `u ∈ c`, `v ∈ c'` with `u ≠ v`, and a time uniform on the intersection.
pub fn rewire(ls: LinkStream, p: &MosaicPartition, eta: f64, rng: &mut Rng) -> Result<LinkStream> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param(format!("eta must lie in [0, 1], got {eta}")));
    }
    if eta == 0.0 || ls.is_empty() {
        return Ok(ls);
    }
    let ms = p.mosaics();
    let mut eligible: Vec<(usize, usize, TimeInterval)> = Vec::new();
    for (i, a) in ms.iter().enumerate() {
        for (j, b) in ms.iter().enumerate() {
            if i == j && a.size() < 2 {
                continue;
            }
            if let Some(w) = a.interval.intersect(&b.interval) {
                eligible.push((i, j, w));
            }
        }
    }
    if eligible.is_empty() {
        return Err(Error::Generation(
            "rewiring needs at least one eligible mosaic pair".into(),
        ));
    }
    let (num_nodes, domain) = (ls.num_nodes(), ls.domain());
    let mut edges = ls.into_edges();
    for e in edges.iter_mut() {
        if !rng.random_bool(eta) {
            continue;
        }
        let (i, j, window) = eligible[rng.random_range(0..eligible.len())];
        let (a, b) = (ms[i].members(), ms[j].members());
        let (u, v) = loop {
            let u = a[rng.random_range(0..a.len())];
            let v = b[rng.random_range(0..b.len())];
            if u != v {
                break (u, v);
            }
        };
        *e = TemporalEdge::new(u, v, uniform_time(window, rng))?;
    }
    LinkStream::new(num_nodes, domain, edges)
}

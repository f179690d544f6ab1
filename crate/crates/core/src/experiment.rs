//! End-to-end pipelines: generate, evaluate, sweep.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::detect::{detect, DetectorConfig, Method};
use crate::edgegen;
use crate::error::{Error, Result};
use crate::io;
use crate::metrics::{score, ScoreReport};
use crate::partition::{Community, MosaicPartition};
use crate::rng::mix_seed;
use crate::scenario::generate_scenario;
use crate::snapshot::{aggregate, project_ground_truth};
use crate::stream::LinkStream;

pub const EDGES_FILE: &str = "edges.csv";
pub const TRUTH_FILE: &str = "truth.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.csv";
pub const WINDOW_NMI_FILE: &str = "window_nmi.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SUMMARY_FILE: &str = "sweep_summary.csv";

/// Method name of the pseudo-detector that returns the projected ground truth.
pub const TRUTH_METHOD: &str = "truth";

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub partition: MosaicPartition,
    pub stream: LinkStream,
    pub warnings: Vec<String>,
}

/// Scenario, emptying, internal and external edges, then rewiring.
pub fn generate(cfg: &RunConfig) -> Result<Benchmark> {
    cfg.validate()?;
    let outcome = generate_scenario(&cfg.scenario_params())?;
    let stream = edgegen::generate(&outcome.partition, &cfg.edge_params())?;
    Ok(Benchmark {
        partition: outcome.partition,
        stream,
        warnings: outcome.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamStats {
    pub nodes: u32,
    pub t_start: f64,
    pub t_end: f64,
    pub communities: usize,
    pub mean_size: f64,
    pub mean_duration: f64,
    pub edges: usize,
    pub internal_edges: usize,
    pub external_edges: usize,
    /// Edges with an endpoint in the empty community; zero for generated data.
    pub empty_edges: usize,
}

pub fn stream_stats(p: &MosaicPartition, ls: &LinkStream) -> StreamStats {
    let ps = p.stats();
    let (mut internal, mut external, mut empty) = (0, 0, 0);
    for e in ls.edges() {
        match (p.lookup(e.u, e.t), p.lookup(e.v, e.t)) {
            (Community::Mosaic(a), Community::Mosaic(b)) if a == b => internal += 1,
            (Community::Mosaic(_), Community::Mosaic(_)) => external += 1,
            _ => empty += 1,
        }
    }
    StreamStats {
        nodes: p.num_nodes(),
        t_start: p.domain().start(),
        t_end: p.domain().end(),
        communities: ps.communities,
        mean_size: ps.mean_size,
        mean_duration: ps.mean_duration,
        edges: ls.len(),
        internal_edges: internal,
        external_edges: external,
        empty_edges: empty,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestStats {
    pub communities: usize,
    pub mean_size: f64,
    pub mean_duration: f64,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub stats: ManifestStats,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(cfg: &RunConfig, b: &Benchmark) -> Self {
        let ps = b.partition.stats();
        // echo the seeds actually used by each stage
        let config = RunConfig {
            scenario: cfg.scenario_params(),
            edges: cfg.edge_params(),
            detectors: cfg.detector_configs(),
            out: None,
            ..cfg.clone()
        };
        Manifest {
            version: crate::VERSION.to_string(),
            seed: cfg.seed,
            config,
            stats: ManifestStats {
                communities: ps.communities,
                mean_size: ps.mean_size,
                mean_duration: ps.mean_duration,
                edges: b.stream.len(),
            },
            warnings: b.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

/// Writes the edges, ground-truth and manifest files into `dir`.
pub fn write_benchmark(dir: &Path, cfg: &RunConfig, b: &Benchmark) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(EDGES_FILE), io::edges_to_string(b.stream.edges()))?;
    fs::write(dir.join(TRUTH_FILE), io::truth_to_string(&b.partition))?;
    fs::write(dir.join(MANIFEST_FILE), Manifest::new(cfg, b).to_json())?;
    Ok(())
}

/// Reads a ground-truth file and the edges file that goes with it.
pub fn read_benchmark(edges: &Path, truth: &Path) -> Result<(MosaicPartition, LinkStream)> {
    let p = io::parse_truth_bytes(&fs::read(truth)?)?;
    let edges = io::parse_edges_bytes(&fs::read(edges)?)?;
    let ls = LinkStream::new(p.num_nodes(), p.domain(), edges)?;
    Ok((p, ls))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub method: String,
    pub report: ScoreReport,
}

/// Aggregates, projects the ground truth and scores each detector in turn.
/// With `with_truth` the projected truth itself is scored first.
pub fn evaluate(
    p: &MosaicPartition,
    ls: &LinkStream,
    window: f64,
    detectors: &[DetectorConfig],
    with_truth: bool,
) -> Result<Vec<Evaluation>> {
    let snaps = aggregate(ls, window)?;
    let truth = project_ground_truth(p, snaps.boundaries())?;
    let mut out = Vec::new();
    if with_truth {
        out.push(Evaluation {
            method: TRUTH_METHOD.to_string(),
            report: score(p, snaps.boundaries(), &truth, &truth)?,
        });
    }
    let scored = detectors
        .par_iter()
        .map(|d| {
            let found = detect(&snaps, d)?;
            Ok(Evaluation {
                method: d.method.name().to_string(),
                report: score(p, snaps.boundaries(), &truth, &found)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.extend(scored);
    Ok(out)
}

pub const REPORT_HEADER: &str = "method,mean_nmi,mosaic_nmi,sm_p,sm_n,sm_l";

pub fn report_to_string(rows: &[Evaluation]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for e in rows {
        let r = &e.report;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.method, r.mean_nmi, r.mosaic_nmi, r.sm_p, r.sm_n, r.sm_l
        ));
    }
    out
}

pub fn window_nmi_to_string(rows: &[Evaluation]) -> String {
    let mut out = String::from("method,window,nmi\n");
    for e in rows {
        for (w, v) in e.report.per_window_nmi.iter().enumerate() {
            out.push_str(&format!("{},{w},{v}\n", e.method));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    /// Master seed of the run; `generate --seed` with the same phi reproduces it.
    pub seed: u64,
    pub method: Method,
    pub mean_nmi: f64,
    pub sm_p: f64,
    pub sm_n: f64,
    pub sm_l: f64,
}

/// Master seed of sweep repetition `index`; shared by every phi value.
pub fn sweep_seed(master: u64, index: usize) -> u64 {
    mix_seed(master, index as u64)
}

/// Runs one (phi, seed) point through generation, detection and scoring.
pub fn sweep_point(cfg: &RunConfig, phi: f64, seed: u64) -> Result<Vec<SweepRow>> {
    let point = cfg.at_point(phi, seed);
    let b = generate(&point)?;
    let evals = evaluate(&b.partition, &b.stream, point.window, &point.detector_configs(), false)?;
    Ok(point
        .detectors
        .iter()
        .zip(evals)
        .map(|(d, e)| SweepRow {
            phi,
            seed,
            method: d.method,
            mean_nmi: e.report.mean_nmi,
            sm_p: e.report.sm_p,
            sm_n: e.report.sm_n,
            sm_l: e.report.sm_l,
        })
        .collect())
}

/// Every (phi, seed) point of the configured sweep, in (phi, seed, method) order.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Precondition("configuration has no sweep section".into()))?;
    let points: Vec<(f64, u64)> = sw
        .phi
        .iter()
        .flat_map(|&phi| (0..sw.seeds).map(move |i| (phi, sweep_seed(cfg.seed, i))))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(phi, seed)| sweep_point(cfg, phi, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub const SWEEP_HEADER: &str = "phi,seed,method,mean_nmi,sm_p,sm_n,sm_l";

pub fn sweep_to_string(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.phi, r.seed, r.method, r.mean_nmi, r.sm_p, r.sm_n, r.sm_l
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub phi: f64,
    pub method: Method,
    pub runs: usize,
    pub mean_nmi: f64,
    pub sm_p: f64,
    pub sm_n: f64,
    pub sm_l: f64,
}

/// Per-(phi, method) means, in order of first appearance.
pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut out: Vec<SweepSummary> = Vec::new();
    for r in rows {
        let slot = match out.iter().position(|s| s.phi == r.phi && s.method == r.method) {
            Some(i) => &mut out[i],
            None => {
                out.push(SweepSummary {
                    phi: r.phi,
                    method: r.method,
                    runs: 0,
                    mean_nmi: 0.0,
                    sm_p: 0.0,
                    sm_n: 0.0,
                    sm_l: 0.0,
                });
                out.last_mut().unwrap()
            }
        };
        slot.runs += 1;
        slot.mean_nmi += r.mean_nmi;
        slot.sm_p += r.sm_p;
        slot.sm_n += r.sm_n;
        slot.sm_l += r.sm_l;
    }
    for s in &mut out {
        let n = s.runs as f64;
        s.mean_nmi /= n;
        s.sm_p /= n;
        s.sm_n /= n;
        s.sm_l /= n;
    }
    out.sort_by(|a, b| a.phi.total_cmp(&b.phi).then(a.method.cmp(&b.method)));
    out
}

pub fn summary_to_string(summary: &[SweepSummary]) -> String {
    let mut out = String::from("phi,method,runs,mean_nmi,sm_p,sm_n,sm_l\n");
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.phi, s.method, s.runs, s.mean_nmi, s.sm_p, s.sm_n, s.sm_l
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepConfig;
    use crate::scenario::ScenarioParams;

    fn small() -> RunConfig {
        RunConfig {
            scenario: ScenarioParams {
                nodes: 20,
                t_end: 20.0,
                k: 4,
                ..ScenarioParams::reference()
            },
            seed: 11,
            ..RunConfig::default()
        }
    }

    #[test]
    fn manifest_stats_match_recomputation() {
        let cfg = small();
        let b = generate(&cfg).unwrap();
        let m = Manifest::new(&cfg, &b);
        let s = stream_stats(&b.partition, &b.stream);
        assert_eq!(m.stats.communities, s.communities);
        assert_eq!(m.stats.edges, s.edges);
        assert_eq!(s.empty_edges, 0);
        assert_eq!(s.internal_edges + s.external_edges, s.edges);
        assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn files_round_trip() {
        let cfg = small();
        let b = generate(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_benchmark(dir.path(), &cfg, &b).unwrap();
        let (p, ls) = read_benchmark(&dir.path().join(EDGES_FILE), &dir.path().join(TRUTH_FILE)).unwrap();
        assert_eq!(p, b.partition);
        assert_eq!(ls, b.stream);
    }

    #[test]
    fn truth_passthrough_scores_one() {
        let cfg = small();
        let b = generate(&cfg).unwrap();
        let rows = evaluate(&b.partition, &b.stream, 2.0, &cfg.detector_configs(), true).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].method, TRUTH_METHOD);
        assert_eq!(rows[0].report.mean_nmi, 1.0);
        let text = report_to_string(&rows);
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn empty_stream_report_is_well_formed() {
        let mut cfg = small();
        cfg.scenario.gamma = 1.0;
        let b = generate(&cfg).unwrap();
        assert!(b.stream.is_empty());
        let rows = evaluate(&b.partition, &b.stream, 2.0, &cfg.detector_configs(), false).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.report.mean_nmi.is_finite()));
    }

    #[test]
    fn sweep_shape_and_order() {
        let mut cfg = small();
        cfg.sweep = Some(SweepConfig {
            phi: vec![0.0, 0.5],
            seeds: 2,
        });
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 4);
        assert!(rows[..8].iter().all(|r| r.phi == 0.0));
        assert_eq!(rows[0].method, Method::ALL[0]);
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 8);
        assert!(summary.iter().all(|s| s.runs == 2));
        assert_eq!(sweep_to_string(&rows).lines().count(), 17);
        cfg.sweep = None;
        assert!(matches!(sweep(&cfg), Err(Error::Precondition(_))));
    }
}

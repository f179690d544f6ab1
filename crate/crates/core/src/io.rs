//! On-disk formats.
//!
//! All text output is UTF-8 with LF line endings and no trailing whitespace.
//!
//! * edges: CSV `u,v,t`, one temporal edge per line, `u < v`, times in
//!   shortest round-trip decimal, sorted by `(t, u, v)`.
//! * ground truth: JSON `{nodes, t_start, t_end, mosaics: [{id, nodes, t_start, t_end}]}`;
//!   `c_*` is implicit.
//! * labels: CSV `window,node,label`, one row per node per window.
//! * snapshots: CSV `window,u,v,weight` plus `window,t_start,t_end` for the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Mosaic, MosaicId, MosaicPartition};
use crate::snapshot::{DynamicPartition, Label, SnapshotSequence, EMPTY_LABEL};
use crate::stream::{LinkStream, NodeId, TemporalEdge, TimeInterval};

pub const EDGES_HEADER: &str = "u,v,t";
pub const LABELS_HEADER: &str = "window,node,label";
pub const SNAPSHOTS_HEADER: &str = "window,u,v,weight";
pub const WINDOWS_HEADER: &str = "window,t_start,t_end";

/// Label text used for `c_*` in label files.
pub const EMPTY_LABEL_TEXT: &str = "*";

pub fn edges_to_string(edges: &[TemporalEdge]) -> String {
    let mut out = String::with_capacity(16 * edges.len() + 8);
    out.push_str(EDGES_HEADER);
    out.push('\n');
    for e in edges {
        out.push_str(&format!("{},{},{}\n", e.u, e.v, e.t));
    }
    out
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::parse(line, "invalid UTF-8")
    })
}

/// Data lines after a required header, numbered from 2.
fn data_lines<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.split('\n');
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => {
            return Err(Error::parse(1, format!("expected header `{header}`, found `{h}`")));
        }
        None => return Err(Error::parse(1, "missing header")),
    }
    let body: Vec<&str> = lines.collect();
    // a single trailing newline ends the file
    let n = match body.last() {
        Some(&"") => body.len() - 1,
        _ => body.len(),
    };
    Ok(body.into_iter().take(n).enumerate().map(|(i, l)| (i + 2, l)))
}

fn fields<const N: usize>(line: usize, text: &str) -> Result<[&str; N]> {
    let parts: Vec<&str> = text.split(',').collect();
    parts
        .try_into()
        .map_err(|p: Vec<&str>| Error::parse(line, format!("expected {N} fields, found {}", p.len())))
}

fn num<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{s}`")))
}

fn time(line: usize, s: &str) -> Result<f64> {
    let t: f64 = num(line, "time", s)?;
    if !t.is_finite() {
        return Err(Error::parse(line, format!("time `{s}` is not finite")));
    }
    Ok(t)
}

/// Parses an edges file. Endpoints are canonicalised; order is preserved.
pub fn parse_edges(text: &str) -> Result<Vec<TemporalEdge>> {
    let mut edges = Vec::new();
    for (line, row) in data_lines(text, EDGES_HEADER)? {
        let [u, v, t] = fields::<3>(line, row)?;
        let u: NodeId = num(line, "node", u)?;
        let v: NodeId = num(line, "node", v)?;
        let t = time(line, t)?;
        let e = TemporalEdge::new(u, v, t).map_err(|e| Error::parse(line, e.to_string()))?;
        edges.push(e);
    }
    Ok(edges)
}

pub fn parse_edges_bytes(bytes: &[u8]) -> Result<Vec<TemporalEdge>> {
    parse_edges(utf8(bytes)?)
}

/// Builds a link stream from an edges file and the node set / domain of a truth file.
pub fn parse_link_stream(text: &str, num_nodes: u32, domain: TimeInterval) -> Result<LinkStream> {
    let edges = parse_edges(text)?;
    LinkStream::new(num_nodes, domain, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthMosaic {
    pub id: MosaicId,
    pub nodes: Vec<NodeId>,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub nodes: u32,
    pub t_start: f64,
    pub t_end: f64,
    pub mosaics: Vec<TruthMosaic>,
}

impl TruthFile {
    pub fn from_partition(p: &MosaicPartition) -> Self {
        TruthFile {
            nodes: p.num_nodes(),
            t_start: p.domain().start(),
            t_end: p.domain().end(),
            mosaics: p
                .mosaics()
                .iter()
                .map(|m| TruthMosaic {
                    id: m.id,
                    nodes: m.members().to_vec(),
                    t_start: m.interval.start(),
                    t_end: m.interval.end(),
                })
                .collect(),
        }
    }

    /// Builds the partition without validating it.
    pub fn to_partition_unchecked(&self) -> Result<MosaicPartition> {
        let domain = TimeInterval::new(self.t_start, self.t_end)?;
        let mosaics = self
            .mosaics
            .iter()
            .map(|m| {
                let interval = TimeInterval::new(m.t_start, m.t_end)
                    .map_err(|e| Error::param(format!("mosaic {}: {e}", m.id)))?;
                Ok(Mosaic::new(m.id, m.nodes.iter().copied(), interval))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MosaicPartition::from_parts(self.nodes, domain, mosaics))
    }
}

pub fn truth_to_string(p: &MosaicPartition) -> String {
    let mut s = serde_json::to_string_pretty(&TruthFile::from_partition(p)).expect("truth serialises");
    s.push('\n');
    s
}

pub fn parse_truth_file(text: &str) -> Result<TruthFile> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
}

/// Parses and validates a ground-truth file.
pub fn parse_truth(text: &str) -> Result<MosaicPartition> {
    let p = parse_truth_file(text)?.to_partition_unchecked()?;
    let report = p.validate();
    if !report.is_ok() {
        return Err(Error::InvalidPartition(report));
    }
    Ok(p)
}

pub fn parse_truth_bytes(bytes: &[u8]) -> Result<MosaicPartition> {
    parse_truth(utf8(bytes)?)
}

fn label_text(l: Label) -> String {
    if l == EMPTY_LABEL {
        EMPTY_LABEL_TEXT.to_string()
    } else {
        l.to_string()
    }
}

pub fn labels_to_string(d: &DynamicPartition) -> String {
    let mut out = String::new();
    out.push_str(LABELS_HEADER);
    out.push('\n');
    for (w, labels) in d.windows().iter().enumerate() {
        for (node, &l) in labels.iter().enumerate() {
            out.push_str(&format!("{w},{node},{}\n", label_text(l)));
        }
    }
    out
}

/// Parses a labels file; every node of every window must appear exactly once.
pub fn parse_labels(text: &str, num_nodes: usize) -> Result<DynamicPartition> {
    let mut windows: Vec<Vec<Option<Label>>> = Vec::new();
    for (line, row) in data_lines(text, LABELS_HEADER)? {
        let [w, node, label] = fields::<3>(line, row)?;
        let w: usize = num(line, "window", w)?;
        let node: usize = num(line, "node", node)?;
        let label: Label = if label == EMPTY_LABEL_TEXT {
            EMPTY_LABEL
        } else {
            num(line, "label", label)?
        };
        if node >= num_nodes {
            return Err(Error::parse(line, format!("node {node} outside 0..{num_nodes}")));
        }
        // windows are dense; refuse absurd indices instead of allocating them
        if w > windows.len() {
            return Err(Error::parse(line, format!("window {w} skips window {}", windows.len())));
        }
        if w == windows.len() {
            windows.push(vec![None; num_nodes]);
        }
        let slot = &mut windows[w][node];
        if slot.is_some() {
            return Err(Error::parse(line, format!("node {node} labelled twice in window {w}")));
        }
        *slot = Some(label);
    }
    let windows = windows
        .into_iter()
        .enumerate()
        .map(|(w, labels)| {
            labels
                .into_iter()
                .enumerate()
                .map(|(n, l)| l.ok_or_else(|| Error::parse(0, format!("node {n} unlabelled in window {w}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DynamicPartition::new(num_nodes, windows)
}

pub fn parse_labels_bytes(bytes: &[u8], num_nodes: usize) -> Result<DynamicPartition> {
    parse_labels(utf8(bytes)?, num_nodes)
}

pub fn snapshots_to_string(s: &SnapshotSequence) -> String {
    let mut out = String::new();
    out.push_str(SNAPSHOTS_HEADER);
    out.push('\n');
    for w in 0..s.len() {
        for &((u, v), c) in s.counts(w) {
            out.push_str(&format!("{w},{u},{v},{c}\n"));
        }
    }
    out
}

pub fn windows_to_string(s: &SnapshotSequence) -> String {
    let mut out = String::new();
    out.push_str(WINDOWS_HEADER);
    out.push('\n');
    for w in 0..s.len() {
        let i = s.window(w);
        out.push_str(&format!("{w},{},{}\n", i.start(), i.end()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: f64, b: f64) -> TimeInterval {
        TimeInterval::new(a, b).unwrap()
    }

    #[test]
    fn edges_format() {
        let edges = vec![
            TemporalEdge::new(0, 1, 0.5).unwrap(),
            TemporalEdge::new(3, 2, 7.0).unwrap(),
            TemporalEdge::new(0, 2, 0.1 + 0.2).unwrap(),
        ];
        let ls = LinkStream::new(4, iv(0.0, 10.0), edges).unwrap();
        let text = edges_to_string(ls.edges());
        assert_eq!(text, "u,v,t\n0,2,0.30000000000000004\n0,1,0.5\n2,3,7\n");
        let back = parse_edges(&text).unwrap();
        assert_eq!(back, ls.edges());
        assert_eq!(edges_to_string(&back), text);
        assert_eq!(parse_edges("u,v,t\n").unwrap(), vec![]);
        assert_eq!(parse_edges("u,v,t").unwrap(), vec![]);
    }

    #[test]
    fn edge_parse_errors_name_lines() {
        let cases = [
            ("x,y,z\n", 1),
            ("u,v,t\n0,1,2\n1,1,3\n", 3),
            ("u,v,t\n0,1\n", 2),
            ("u,v,t\n0,1,nan\n", 2),
            ("u,v,t\n0,-1,2\n", 2),
            ("u,v,t\n0,1,2\n\n", 3),
            ("u,v,t\r\n0,1,2\n", 1),
        ];
        for (text, line) in cases {
            match parse_edges(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_edges_bytes(b"u,v,t\n\xff"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn truth_round_trip() {
        let p = MosaicPartition::new(
            5,
            iv(0.0, 10.0),
            vec![Mosaic::new(0, [0, 1], iv(0.0, 2.5)), Mosaic::new(3, [2, 3, 4], iv(1.0, 10.0))],
        )
        .unwrap();
        let text = truth_to_string(&p);
        let back = parse_truth(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(truth_to_string(&back), text);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn truth_errors() {
        assert!(matches!(parse_truth("{"), Err(Error::Parse { .. })));
        let overlapping = r#"{"nodes":2,"t_start":0,"t_end":10,"mosaics":[
            {"id":0,"nodes":[0],"t_start":0,"t_end":5},
            {"id":1,"nodes":[0],"t_start":3,"t_end":8}]}"#;
        assert!(matches!(parse_truth(overlapping), Err(Error::InvalidPartition(_))));
        let reversed = r#"{"nodes":2,"t_start":0,"t_end":10,"mosaics":[{"id":0,"nodes":[0],"t_start":5,"t_end":5}]}"#;
        assert!(parse_truth(reversed).is_err());
        let extra = r#"{"nodes":2,"t_start":0,"t_end":10,"mosaics":[],"bogus":1}"#;
        assert!(matches!(parse_truth(extra), Err(Error::Parse { .. })));
    }

    #[test]
    fn labels_round_trip_and_errors() {
        let d = DynamicPartition::new(3, vec![vec![0, 0, EMPTY_LABEL], vec![4, 0, 0]]).unwrap();
        let text = labels_to_string(&d);
        assert!(text.contains("0,2,*\n"));
        assert_eq!(parse_labels(&text, 3).unwrap(), d);
        assert!(parse_labels("window,node,label\n0,0,1\n", 2).is_err());
        assert!(parse_labels("window,node,label\n5,0,1\n", 1).is_err());
        assert!(parse_labels("window,node,label\n0,0,1\n0,0,2\n", 1).is_err());
        assert!(parse_labels("window,node,label\n0,3,1\n", 1).is_err());
    }

    proptest! {
        #[test]
        fn canonical_edges_round_trip_bytewise(
            raw in prop::collection::vec((0u32..50, 1u32..50, -1e6f64..1e6), 0..100)
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(a, d, t)| TemporalEdge::new(a, a + d, t).unwrap()).collect();
            let ls = LinkStream::new(100, iv(-1e6, 1e6), edges).unwrap();
            let text = edges_to_string(ls.edges());
            let parsed = parse_edges(&text).unwrap();
            prop_assert_eq!(edges_to_string(&parsed), text);
            prop_assert!(parsed.iter().zip(ls.edges()).all(|(a, b)| a.t.to_bits() == b.t.to_bits()));
        }
    }
}

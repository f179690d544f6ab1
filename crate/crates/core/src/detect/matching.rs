use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::snapshot::Label;
use crate::stream::NodeId;

/// `|a ∩ b| / |a ∪ b|` for sorted, deduplicated node lists.
pub fn jaccard(a: &[NodeId], b: &[NodeId]) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::param("jaccard similarity of two empty sets is undefined"));
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(inter as f64 / (a.len() + b.len() - inter) as f64)
}

/// Member lists of a `0..k` community assignment, indexed by community.
pub fn communities(part: &[usize]) -> Vec<Vec<NodeId>> {
    let k = part.iter().max().map_or(0, |&c| c + 1);
    let mut out = vec![Vec::new(); k];
    for (v, &c) in part.iter().enumerate() {
        out[c].push(v as NodeId);
    }
    out
}

pub(crate) fn groups_by_label(labels: &[Label]) -> BTreeMap<Label, Vec<NodeId>> {
    let mut out: BTreeMap<Label, Vec<NodeId>> = BTreeMap::new();
    for (v, &l) in labels.iter().enumerate() {
        out.entry(l).or_default().push(v as NodeId);
    }
    out
}

/// Greedy one-to-one matching by descending Jaccard similarity.
///
/// Pairs `(previous label, current community index)` are accepted while their
/// similarity is positive and at least `theta`; ties are broken by label, then
/// by community index.
pub fn match_communities(
    prev: &BTreeMap<Label, Vec<NodeId>>,
    cur: &[Vec<NodeId>],
    theta: f64,
) -> Vec<(Label, usize)> {
    let mut label_of_node: BTreeMap<NodeId, Label> = BTreeMap::new();
    for (&l, members) in prev {
        for &v in members {
            label_of_node.insert(v, l);
        }
    }
    let mut candidates: Vec<(f64, Label, usize)> = Vec::new();
    for (ci, members) in cur.iter().enumerate() {
        let mut inter: BTreeMap<Label, usize> = BTreeMap::new();
        for v in members {
            if let Some(&l) = label_of_node.get(v) {
                *inter.entry(l).or_insert(0) += 1;
            }
        }
        for (l, common) in inter {
            let union = prev[&l].len() + members.len() - common;
            let sim = common as f64 / union as f64;
            if sim >= theta {
                candidates.push((sim, l, ci));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_prev = std::collections::BTreeSet::new();
    let mut used_cur = vec![false; cur.len()];
    let mut out = Vec::new();
    for (_, l, ci) in candidates {
        if !used_cur[ci] && used_prev.insert(l) {
            used_cur[ci] = true;
            out.push((l, ci));
        }
    }
    out
}

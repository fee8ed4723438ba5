//! Node similarities over symmetric paths, their lift to motif similarity,
//! motif outlier scores and ranking.
//!
//! For a score path with end type `T`, let `G(m)` be the nodes of motif `m`
//! with type `T`. The cross count of two motifs is
//! `X = sum over u in G(m1), v in G(m2) of count(u, v)` and the self count
//! `S(m)` is the cross count of `m` with itself (all ordered pairs, including
//! `u == v`). Per path, the metrics are
//!
//! | metric    | term                                   |
//! |-----------|----------------------------------------|
//! | `mos`     | `X`                                    |
//! | `pathsim` | `2X / (S(m1) + S(m2))`, 0 if both zero |
//! | `normcon` | `X / S(m1)`, 0 if `S(m1) = X = 0`      |
//! | `cossim`  | cosine of the summed half-path vectors |
//!
//! and motif similarity is the weighted sum of the terms over score paths.
//! The outlier score of a candidate is its summed similarity to every
//! reference motif; low scores are outliers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIdx, NodeType};
use crate::motif::{CanonicalKey, MotifInstance, MotifSet};
use crate::pathcount::{
    motif_self_paths, nodes_of_type, pair_counts, reachable_nodes, Count, PairCounts, ReachabilityMap,
};
use crate::query::{MotifPattern, TypedPath};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Unnormalized path counts.
    #[default]
    #[serde(rename = "mos", alias = "raw_count")]
    Mos,
    #[serde(rename = "pathsim")]
    PathSim,
    #[serde(rename = "cossim")]
    CosSim,
    #[serde(rename = "normcon")]
    NormCon,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Mos, Metric::PathSim, Metric::CosSim, Metric::NormCon];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Mos => "mos",
            Metric::PathSim => "pathsim",
            Metric::CosSim => "cossim",
            Metric::NormCon => "normcon",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mos" | "raw_count" | "raw" => Ok(Metric::Mos),
            "pathsim" => Ok(Metric::PathSim),
            "cossim" => Ok(Metric::CosSim),
            "normcon" => Ok(Metric::NormCon),
            other => Err(format!(
                "unknown metric `{other}` (expected mos, pathsim, cossim or normcon)"
            )),
        }
    }
}

// ---- node level -----------------------------------------------------------

fn same_type(graph: &HeteroGraph, x: NodeIdx, y: NodeIdx) -> Result<()> {
    for n in [x, y] {
        if !graph.contains(n) {
            return Err(Error::MissingNode(n.to_string()));
        }
    }
    let (tx, ty) = (graph.type_of(x), graph.type_of(y));
    if tx != ty {
        return Err(Error::TypeMismatch {
            left: graph.name(x).to_owned(),
            left_type: graph.node_type_name(tx).to_owned(),
            right: graph.name(y).to_owned(),
            right_type: graph.node_type_name(ty).to_owned(),
        });
    }
    Ok(())
}

fn covered(graph: &HeteroGraph, counts: &PairCounts, x: NodeIdx, y: NodeIdx) -> Result<(Count, Count, Count)> {
    let get = |a, b| {
        counts
            .count(a, b)
            .ok_or_else(|| Error::NotCovered(graph.name(if counts.covers(a) { b } else { a }).to_owned()))
    };
    Ok((get(x, y)?, get(x, x)?, get(y, y)?))
}

fn path_sim_term(x: Count, s1: Count, s2: Count) -> f64 {
    let den = s1 + s2;
    if den == 0 {
        0.0
    } else {
        2.0 * x as f64 / den as f64
    }
}

fn norm_con_term(x: Count, s1: Count, what: impl FnOnce() -> String) -> Result<f64> {
    match (s1, x) {
        (0, 0) => Ok(0.0),
        (0, _) => Err(Error::DegenerateBase(what())),
        _ => Ok(x as f64 / s1 as f64),
    }
}

fn cos_term(dot: Count, n1: Count, n2: Count) -> f64 {
    if n1 == 0 || n2 == 0 {
        0.0
    } else {
        dot as f64 / ((n1 as f64).sqrt() * (n2 as f64).sqrt())
    }
}

/// PathSim of two same-typed nodes over the counted path.
pub fn path_sim(graph: &HeteroGraph, x: NodeIdx, y: NodeIdx, counts: &PairCounts) -> Result<f64> {
    same_type(graph, x, y)?;
    let (xy, xx, yy) = covered(graph, counts, x, y)?;
    Ok(path_sim_term(xy, xx, yy))
}

/// Walk count from `x` to `y` relative to the self count of `x`.
pub fn norm_con(graph: &HeteroGraph, x: NodeIdx, y: NodeIdx, counts: &PairCounts) -> Result<f64> {
    same_type(graph, x, y)?;
    let (xy, xx, _) = covered(graph, counts, x, y)?;
    norm_con_term(xy, xx, || {
        format!("{} has no self paths but reaches {}", graph.name(x), graph.name(y))
    })
}

/// Sparse dot product and squared norms of two sorted count vectors.
fn dot_norms(a: &[(NodeIdx, Count)], b: &[(NodeIdx, Count)]) -> Result<(Count, Count, Count)> {
    let sq = |v: &[(NodeIdx, Count)]| {
        v.iter()
            .try_fold(0 as Count, |acc, &(_, c)| {
                c.checked_mul(c).and_then(|p| acc.checked_add(p))
            })
            .ok_or(Error::CountOverflow)
    };
    let (mut i, mut j, mut dot) = (0, 0, 0 as Count);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot = a[i]
                    .1
                    .checked_mul(b[j].1)
                    .and_then(|p| dot.checked_add(p))
                    .ok_or(Error::CountOverflow)?;
                i += 1;
                j += 1;
            }
        }
    }
    Ok((dot, sq(a)?, sq(b)?))
}

/// Cosine of the half-path reachability vectors of `x` and `y`.
pub fn cos_sim(graph: &HeteroGraph, x: NodeIdx, y: NodeIdx, reach: &ReachabilityMap) -> Result<f64> {
    same_type(graph, x, y)?;
    let row = |n: NodeIdx| reach.get(n).ok_or_else(|| Error::NotCovered(graph.name(n).to_owned()));
    let (dot, n1, n2) = dot_norms(row(x)?, row(y)?)?;
    Ok(cos_term(dot, n1, n2))
}

// ---- motif level ----------------------------------------------------------

struct PathData {
    weight: f64,
    end_type: NodeType,
    reach: ReachabilityMap,
    counts: PairCounts,
}

/// What one motif contributes to one score path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathProfile {
    /// Motif nodes with the path's end type, in slot order.
    pub group: Vec<NodeIdx>,
    pub self_count: Count,
    /// Summed half-path reachability of the group, sorted by node.
    pub half: Vec<(NodeIdx, Count)>,
    pub half_norm: Count,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotifProfile {
    pub paths: Vec<PathProfile>,
}

/// Read-only state for scoring a fixed candidate and reference set: per
/// score path, reachability and pair counts over every node either set can
/// ask about.
pub struct ScoringContext<'g> {
    graph: &'g HeteroGraph,
    pattern: &'g MotifPattern,
    metric: Metric,
    paths: Vec<PathData>,
}

fn group_nodes(graph: &HeteroGraph, motifs: &[MotifInstance], ty: NodeType) -> Vec<NodeIdx> {
    let mut out: Vec<NodeIdx> = motifs
        .iter()
        .flat_map(|m| m.nodes().iter().copied())
        .filter(|&n| graph.type_of(n) == ty)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl<'g> ScoringContext<'g> {
    pub fn new(
        graph: &'g HeteroGraph,
        pattern: &'g MotifPattern,
        score_paths: &[TypedPath],
        candidates: &[MotifInstance],
        reference: &[MotifInstance],
        metric: Metric,
    ) -> Result<Self> {
        let mut paths = Vec::with_capacity(score_paths.len());
        for path in score_paths {
            let half = path
                .half()
                .ok_or_else(|| Error::Config("score path is not symmetric".into()))?;
            let end_type = *half.start_type();
            let c = reachable_nodes(graph, &group_nodes(graph, candidates, end_type), &half)?;
            let r = reachable_nodes(graph, &group_nodes(graph, reference, end_type), &half)?;
            let counts = pair_counts(graph, &c, &r)?;
            paths.push(PathData {
                weight: path.weight,
                end_type,
                reach: c.union(&r),
                counts,
            });
        }
        for m in candidates.iter().chain(reference) {
            check_shape(graph, pattern, m)?;
        }
        Ok(Self {
            graph,
            pattern,
            metric,
            paths,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn graph(&self) -> &'g HeteroGraph {
        self.graph
    }

    /// Pair counts of the `i`-th score path.
    pub fn counts(&self, i: usize) -> &PairCounts {
        &self.paths[i].counts
    }

    /// Half-path reachability of the `i`-th score path.
    pub fn reach(&self, i: usize) -> &ReachabilityMap {
        &self.paths[i].reach
    }

    pub fn profile(&self, m: &MotifInstance) -> Result<MotifProfile> {
        check_shape(self.graph, self.pattern, m)?;
        let paths = self
            .paths
            .iter()
            .map(|p| {
                let group = nodes_of_type(self.graph, m, p.end_type);
                let self_count = motif_self_paths(self.graph, m, &p.counts)?;
                let mut acc: BTreeMap<NodeIdx, Count> = BTreeMap::new();
                for &u in &group {
                    let row = p
                        .reach
                        .get(u)
                        .ok_or_else(|| Error::NotCovered(self.graph.name(u).to_owned()))?;
                    for &(d, c) in row {
                        let slot = acc.entry(d).or_insert(0);
                        *slot = slot.checked_add(c).ok_or(Error::CountOverflow)?;
                    }
                }
                let half: Vec<_> = acc.into_iter().collect();
                let (_, half_norm, _) = dot_norms(&half, &[])?;
                Ok(PathProfile {
                    group,
                    self_count,
                    half,
                    half_norm,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MotifProfile { paths })
    }

    fn cross(&self, i: usize, a: &PathProfile, b: &PathProfile) -> Result<Count> {
        let counts = &self.paths[i].counts;
        let mut x: Count = 0;
        for &u in &a.group {
            for &v in &b.group {
                let c = counts.count(u, v).ok_or_else(|| {
                    Error::NotCovered(self.graph.name(if counts.covers(u) { v } else { u }).to_owned())
                })?;
                x = x.checked_add(c).ok_or(Error::CountOverflow)?;
            }
        }
        Ok(x)
    }

    /// Weighted similarity of two profiled motifs.
    pub fn profile_similarity(&self, a: &MotifProfile, b: &MotifProfile) -> Result<f64> {
        let mut total = 0.0;
        for (i, p) in self.paths.iter().enumerate() {
            let (pa, pb) = (&a.paths[i], &b.paths[i]);
            let term = match self.metric {
                Metric::Mos => self.cross(i, pa, pb)? as f64,
                Metric::PathSim => path_sim_term(self.cross(i, pa, pb)?, pa.self_count, pb.self_count),
                Metric::NormCon => {
                    let x = self.cross(i, pa, pb)?;
                    norm_con_term(x, pa.self_count, || {
                        let ids: Vec<&str> = pa.group.iter().map(|&n| self.graph.name(n)).collect();
                        format!(
                            "motif nodes {{{}}} have no self paths but reach the other motif",
                            ids.join(", ")
                        )
                    })?
                }
                Metric::CosSim => {
                    let (dot, _, _) = dot_norms(&pa.half, &pb.half)?;
                    cos_term(dot, pa.half_norm, pb.half_norm)
                }
            };
            total += p.weight * term;
        }
        Ok(total)
    }

    /// Similarity of `m1` towards `m2` under the context's metric.
    pub fn motif_similarity(&self, m1: &MotifInstance, m2: &MotifInstance) -> Result<f64> {
        self.profile_similarity(&self.profile(m1)?, &self.profile(m2)?)
    }

    /// Outlier score of `m` against `reference`.
    pub fn mos(&self, m: &MotifInstance, reference: &[MotifInstance]) -> Result<f64> {
        let pm = self.profile(m)?;
        if self.metric == Metric::Mos {
            // exact integer totals per path, weighted once
            let mut totals = vec![0 as Count; self.paths.len()];
            for r in reference {
                let pr = self.profile(r)?;
                for (i, t) in totals.iter_mut().enumerate() {
                    *t = t
                        .checked_add(self.cross(i, &pm.paths[i], &pr.paths[i])?)
                        .ok_or(Error::CountOverflow)?;
                }
            }
            return Ok(self.weighted(&totals));
        }
        let mut total = 0.0;
        for r in reference {
            total += self.profile_similarity(&pm, &self.profile(r)?)?;
        }
        Ok(total)
    }

    fn weighted(&self, totals: &[Count]) -> f64 {
        self.paths
            .iter()
            .zip(totals)
            .fold(0.0, |acc, (p, &t)| acc + p.weight * t as f64)
    }

    /// Outlier scores of every candidate, in candidate order. Equal to
    /// calling [`ScoringContext::mos`] per candidate.
    pub fn score_all(&self, candidates: &[MotifInstance], reference: &[MotifInstance]) -> Result<Vec<f64>> {
        if self.metric == Metric::Mos {
            return self.score_all_raw(candidates, reference);
        }
        let ref_profiles = reference
            .par_iter()
            .map(|r| self.profile(r))
            .collect::<Result<Vec<_>>>()?;
        // node -> references whose group (or half vector, for cosine) holds it
        let indexes: Vec<HashMap<NodeIdx, Vec<usize>>> = (0..self.paths.len())
            .map(|i| {
                let mut idx: HashMap<NodeIdx, Vec<usize>> = HashMap::new();
                for (ri, pr) in ref_profiles.iter().enumerate() {
                    let keys: Vec<NodeIdx> = if self.metric == Metric::CosSim {
                        pr.paths[i].half.iter().map(|&(d, _)| d).collect()
                    } else {
                        pr.paths[i].group.clone()
                    };
                    for k in keys {
                        let list = idx.entry(k).or_default();
                        if list.last() != Some(&ri) {
                            list.push(ri);
                        }
                    }
                }
                idx
            })
            .collect();
        candidates
            .par_iter()
            .map(|m| {
                let pm = self.profile(m)?;
                let mut touched: Vec<usize> = Vec::new();
                for (i, p) in self.paths.iter().enumerate() {
                    let pp = &pm.paths[i];
                    if self.metric == Metric::CosSim {
                        for &(d, _) in &pp.half {
                            touched.extend(indexes[i].get(&d).into_iter().flatten());
                        }
                    } else {
                        for &u in &pp.group {
                            let Some(row) = p.counts.a2b.get(&u) else { continue };
                            for v in row.keys() {
                                touched.extend(indexes[i].get(v).into_iter().flatten());
                            }
                        }
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                // untouched references contribute exactly zero
                let mut total = 0.0;
                for ri in touched {
                    total += self.profile_similarity(&pm, &ref_profiles[ri])?;
                }
                Ok(total)
            })
            .collect()
    }

    fn score_all_raw(&self, candidates: &[MotifInstance], reference: &[MotifInstance]) -> Result<Vec<f64>> {
        // per path: how many reference motifs contain each node
        let rows: Vec<HashMap<NodeIdx, Count>> = self
            .paths
            .iter()
            .map(|p| {
                let mut mult: HashMap<NodeIdx, Count> = HashMap::new();
                for r in reference {
                    for n in nodes_of_type(self.graph, r, p.end_type) {
                        *mult.entry(n).or_insert(0) += 1;
                    }
                }
                let mut agg: HashMap<NodeIdx, Count> = HashMap::new();
                for u in group_nodes(self.graph, candidates, p.end_type) {
                    let mut s: Count = 0;
                    for (&v, &k) in &mult {
                        let c = p.counts.count(u, v).unwrap_or(0);
                        s = c
                            .checked_mul(k)
                            .and_then(|x| s.checked_add(x))
                            .ok_or(Error::CountOverflow)?;
                    }
                    agg.insert(u, s);
                }
                Ok(agg)
            })
            .collect::<Result<Vec<_>>>()?;
        candidates
            .par_iter()
            .map(|m| {
                let mut totals = vec![0 as Count; self.paths.len()];
                for (i, p) in self.paths.iter().enumerate() {
                    for u in nodes_of_type(self.graph, m, p.end_type) {
                        totals[i] = totals[i].checked_add(rows[i][&u]).ok_or(Error::CountOverflow)?;
                    }
                }
                Ok(self.weighted(&totals))
            })
            .collect()
    }
}

fn check_shape(graph: &HeteroGraph, pattern: &MotifPattern, m: &MotifInstance) -> Result<()> {
    let fits = m.len() == pattern.size()
        && m.nodes()
            .iter()
            .enumerate()
            .all(|(s, &n)| graph.contains(n) && graph.type_of(n) == pattern.slot_type(s));
    if fits {
        Ok(())
    } else {
        let show = |m: &MotifInstance| {
            m.nodes()
                .iter()
                .map(|&n| {
                    if graph.contains(n) {
                        graph.name(n).to_owned()
                    } else {
                        n.to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join("-")
        };
        let want: Vec<&str> = pattern
            .slots()
            .iter()
            .map(|s| graph.node_type_name(s.node_type))
            .collect();
        Err(Error::PatternMismatch {
            left: show(m),
            right: want.join("-"),
        })
    }
}

// ---- ranking --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct RankedEntry {
    pub instance: MotifInstance,
    pub key: CanonicalKey,
    pub score: f64,
}

/// Candidates in ascending score order; equal scores are ordered by
/// canonical key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `k` lowest-scoring motifs, strongest outlier first.
    pub fn outliers(&self, k: usize) -> &[RankedEntry] {
        &self.entries[..k.min(self.entries.len())]
    }

    /// The `k` highest-scoring motifs, most similar first.
    pub fn most_similar(&self, k: usize) -> Vec<&RankedEntry> {
        self.entries.iter().rev().take(k).collect()
    }
}

pub fn rank(candidates: &MotifSet, scores: &[f64]) -> Result<RankedList> {
    if candidates.len() != scores.len() {
        return Err(Error::Config(format!(
            "{} scores for {} candidates",
            scores.len(),
            candidates.len()
        )));
    }
    let mut entries: Vec<RankedEntry> = candidates
        .members()
        .iter()
        .zip(candidates.keys())
        .zip(scores)
        .map(|((m, k), &score)| RankedEntry {
            instance: m.clone(),
            key: k.clone(),
            score,
        })
        .collect();
    entries.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.key.cmp(&b.key)));
    Ok(RankedList { entries })
}

/// One contiguous slice of the ranked list with node frequencies per type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupBucket {
    /// 1-based bucket number; bucket 1 holds the lowest scores.
    pub group: usize,
    /// Half-open range of ranks.
    pub start: usize,
    pub end: usize,
    /// node type -> node id -> occurrences
    pub frequencies: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Splits the ranked list into `groups` contiguous buckets of `n / groups`
/// motifs, the last bucket taking the remainder. With fewer motifs than
/// groups, every motif gets its own bucket.
pub fn group_distribution(
    ranked: &RankedList,
    groups: usize,
    pattern: &MotifPattern,
    graph: &HeteroGraph,
) -> Result<Vec<GroupBucket>> {
    if ranked.is_empty() {
        return Err(Error::EmptyInput("ranked list"));
    }
    if groups == 0 {
        return Err(Error::Config("number of groups must be positive".into()));
    }
    let n = ranked.len();
    let g = groups.min(n);
    let size = n / g;
    Ok((0..g)
        .map(|b| {
            let start = b * size;
            let end = if b + 1 == g { n } else { start + size };
            let mut frequencies: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
            for e in &ranked.entries[start..end] {
                for (slot, &node) in e.instance.nodes().iter().enumerate() {
                    let ty = graph.node_type_name(pattern.slot_type(slot)).to_owned();
                    *frequencies
                        .entry(ty)
                        .or_default()
                        .entry(graph.name(node).to_owned())
                        .or_insert(0) += 1;
                }
            }
            GroupBucket {
                group: b + 1,
                start,
                end,
                frequencies,
            }
        })
        .collect())
}

//! Timing sweeps over synthetic graphs.
//!
//! A workload is a seeded random graph plus a fixed-shape query: a chain
//! pattern whose slots alternate over the first two node types, a start
//! motif found in the graph, one alternating search path and one
//! alternating symmetric score path. Each point times the full pipeline
//! (expansion, reference set, scoring, ranking) after one untimed warm-up.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeType};
use crate::motif::match_pattern;
use crate::pipeline::run_bound;
use crate::query::{BoundQuery, MetaPath, MotifPattern, PatternEdge, ReferenceSource, Slot, TypedPath};
use crate::scoring::Metric;
use crate::synth::{random_graph, SynthConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    /// Node types `c`.
    pub node_types: usize,
    /// Nodes `n`.
    pub nodes: usize,
    /// Expected average degree `k`.
    pub avg_degree: f64,
    /// Search path length in node types.
    pub search_len: usize,
    /// Pattern size `s`.
    pub pattern_size: usize,
    /// Score path length in node types.
    pub score_len: usize,
    /// Timed repetitions `r`.
    pub reps: usize,
    pub seed: u64,
    /// Scoring metric; PathSim by default, whose scoring cost tracks path
    /// length more closely than raw counts do.
    pub metric: Metric,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            node_types: 2,
            nodes: 2000,
            avg_degree: 4.0,
            search_len: 3,
            pattern_size: 3,
            score_len: 3,
            reps: 5,
            seed: 42,
            metric: Metric::PathSim,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.node_types < 2 {
            return bad(format!(
                "benchmarks need at least 2 node types, got {}",
                self.node_types
            ));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree < self.nodes as f64) {
            return bad(format!(
                "need 0 < k < n, got k = {}, n = {}",
                self.avg_degree, self.nodes
            ));
        }
        if self.search_len < 2 || self.score_len < 2 {
            return bad("path lengths must be at least 2".into());
        }
        if self.pattern_size == 0 || self.pattern_size > crate::query::MAX_PATTERN_SLOTS {
            return bad(format!("pattern size must be 1..={}", crate::query::MAX_PATTERN_SLOTS));
        }
        if self.reps == 0 {
            return bad("need at least one repetition".into());
        }
        Ok(())
    }

    fn synth(&self) -> SynthConfig {
        SynthConfig {
            node_types: self.node_types,
            nodes: self.nodes,
            avg_degree: self.avg_degree,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchPoint {
    pub avg_degree: f64,
    pub score_len: usize,
    pub edges: usize,
    pub candidates: usize,
    #[serde(serialize_with = "secs")]
    pub median: Duration,
    #[serde(serialize_with = "secs_all")]
    pub runs: Vec<Duration>,
    pub max_mos: f64,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn secs_all<S: serde::Serializer>(d: &[Duration], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(d.iter().map(Duration::as_secs_f64))
}

fn alternating(a: NodeType, b: NodeType, len: usize) -> Vec<NodeType> {
    (0..len).map(|i| if i % 2 == 0 { a } else { b }).collect()
}

/// Symmetric path of `len` types alternating from `a`.
fn alternating_symmetric(a: NodeType, b: NodeType, len: usize) -> TypedPath {
    let half = alternating(a, b, len.div_ceil(2));
    let mut types = half.clone();
    types.extend(half.iter().rev().skip(len % 2));
    MetaPath::new(types)
}

/// Builds the graph and query for `cfg`.
pub fn workload(cfg: &BenchConfig) -> Result<(HeteroGraph, BoundQuery)> {
    cfg.validate()?;
    let graph = random_graph(&cfg.synth())?;
    let (a, b) = (
        graph.node_type_id("T0").expect("synthetic type"),
        graph.node_type_id("T1").expect("synthetic type"),
    );
    let query = query_for(&graph, a, b, cfg)?;
    Ok((graph, query))
}

fn query_for(graph: &HeteroGraph, a: NodeType, b: NodeType, cfg: &BenchConfig) -> Result<BoundQuery> {
    let slots = alternating(a, b, cfg.pattern_size)
        .into_iter()
        .enumerate()
        .map(|(i, t)| Slot {
            id: format!("S{i}"),
            node_type: t,
        })
        .collect();
    let edges = (1..cfg.pattern_size)
        .map(|i| PatternEdge {
            a: i - 1,
            b: i,
            edge_type: None,
        })
        .collect();
    let pattern = MotifPattern::new(slots, edges)?;
    let start = graph
        .nodes_of_type(a)
        .iter()
        .find_map(|&n| {
            let mut partial = vec![None; pattern.size()];
            partial[0] = Some(n);
            match_pattern(graph, &pattern, &partial).into_iter().next()
        })
        .ok_or_else(|| Error::Config("synthetic graph has no instance of the benchmark pattern".into()))?;
    Ok(BoundQuery {
        pattern,
        start: vec![start],
        search_paths: vec![MetaPath::new(alternating(a, b, cfg.search_len))],
        score_paths: vec![alternating_symmetric(a, b, cfg.score_len)],
        reference: ReferenceSource::SameAsCandidates,
        metric: cfg.metric,
        top_k: 10,
    })
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2
    }
}

/// Times `reps` pipeline runs of every workload after one warm-up run
/// each. Repetitions are interleaved across workloads so slow drift in
/// machine speed affects every point alike.
pub fn measure(workloads: &[(&HeteroGraph, &BoundQuery)], reps: usize) -> Result<Vec<BenchPoint>> {
    let mut points = Vec::with_capacity(workloads.len());
    for &(graph, query) in workloads {
        let (candidates, _, ranked) = run_bound(graph, query)?;
        points.push(BenchPoint {
            avg_degree: 2.0 * graph.edge_count() as f64 / graph.node_count().max(1) as f64,
            score_len: query.score_paths[0].len(),
            edges: graph.edge_count(),
            candidates: candidates.len(),
            median: Duration::ZERO,
            runs: Vec::with_capacity(reps),
            max_mos: ranked.entries().iter().map(|e| e.score).fold(0.0, f64::max),
        });
    }
    for _ in 0..reps {
        for (p, &(graph, query)) in points.iter_mut().zip(workloads) {
            let t0 = Instant::now();
            let out = run_bound(graph, query)?;
            p.runs.push(t0.elapsed());
            drop(out);
        }
    }
    for p in &mut points {
        p.median = median(p.runs.clone());
    }
    Ok(points)
}

/// One point per expected degree; everything else fixed.
pub fn sweep_degree(base: &BenchConfig, degrees: &[f64]) -> Result<Vec<BenchPoint>> {
    let loads = degrees
        .iter()
        .map(|&k| {
            workload(&BenchConfig {
                avg_degree: k,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = loads.iter().map(|(g, q)| (g, q)).collect();
    measure(&refs, base.reps)
}

/// One point per score path length on a single graph and start motif.
pub fn sweep_path_length(base: &BenchConfig, lengths: &[usize]) -> Result<Vec<BenchPoint>> {
    let (g, q) = workload(base)?;
    let (a, b) = (q.pattern.slot_type(0), q.pattern.slot_type(1.min(q.pattern.size() - 1)));
    let queries = lengths
        .iter()
        .map(|&len| {
            if len < 2 {
                return Err(Error::Config("path lengths must be at least 2".into()));
            }
            let mut q = q.clone();
            q.score_paths = vec![alternating_symmetric(a, b, len)];
            Ok(q)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = queries.iter().map(|q| (&g, q)).collect();
    measure(&refs, base.reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_shapes() {
        let (a, b) = (NodeType(0), NodeType(1));
        assert_eq!(alternating_symmetric(a, b, 3).types, [a, b, a]);
        assert_eq!(alternating_symmetric(a, b, 5).types, [a, b, a, b, a]);
        assert_eq!(alternating_symmetric(a, b, 4).types, [a, b, b, a]);
        assert!(alternating_symmetric(a, b, 9).is_symmetric());
    }

    #[test]
    fn smoke() {
        let cfg = BenchConfig {
            nodes: 10,
            avg_degree: 3.0,
            reps: 1,
            seed: 3,
            ..Default::default()
        };
        let t0 = Instant::now();
        let pts = sweep_degree(&cfg, &[3.0]).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].candidates >= 1);
        assert!(t0.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn infeasible() {
        let cfg = BenchConfig {
            nodes: 10,
            avg_degree: 10.0,
            ..Default::default()
        };
        assert!(matches!(workload(&cfg), Err(Error::Config(_))));
    }
}

//! Brute-force reference implementations and the equivalence suite that
//! checks the engine against them.
//!
//! Everything here works from the raw edge list and explicit enumeration:
//! walks are listed one by one, pattern matches come from the full cartesian
//! product of type-correct bindings, and similarities are recomputed from
//! enumerated counts. Only the canonical form is shared with the engine,
//! since it defines what counts as a duplicate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeType, HeteroGraph, NodeIdx, NodeType};
use crate::motif::{canonical_form, expand_from, CanonicalKey, MotifInstance};
use crate::pathcount::{pair_counts, reachable_nodes, Count};
use crate::query::{MotifPattern, TypedPath};
use crate::scoring::{Metric, ScoringContext};
use crate::synth::{self, SynthConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_nodes: usize,
    pub max_path_len: usize,
    /// Largest cartesian product `naive_match` will walk.
    pub max_bindings: u128,
}

impl Default for OracleBounds {
    fn default() -> Self {
        Self {
            max_nodes: 200,
            max_path_len: 9,
            max_bindings: 50_000_000,
        }
    }
}

/// End-node counts of every walk from one source, with the walks listed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathEnumeration {
    pub counts: BTreeMap<NodeIdx, Count>,
    pub sequences: Vec<Vec<NodeIdx>>,
}

type PathKey = (Vec<NodeType>, Option<Vec<EdgeType>>);

fn key(p: &TypedPath) -> PathKey {
    (p.types.clone(), p.edge_types.clone())
}

/// Brute-force evaluator over one graph. Caches per-source walk counts.
pub struct Oracle<'g> {
    graph: &'g HeteroGraph,
    bounds: OracleBounds,
    // both directions of every edge; a self-loop appears twice
    adj: Vec<Vec<(NodeIdx, EdgeType)>>,
    cache: HashMap<(PathKey, NodeIdx), BTreeMap<NodeIdx, Count>>,
}

impl<'g> Oracle<'g> {
    pub fn new(graph: &'g HeteroGraph, bounds: OracleBounds) -> Result<Self> {
        if graph.node_count() > bounds.max_nodes {
            return Err(Error::OracleBoundExceeded(format!(
                "graph has {} nodes, oracle limit is {}",
                graph.node_count(),
                bounds.max_nodes
            )));
        }
        let mut adj = vec![Vec::new(); graph.node_count()];
        for e in graph.edges() {
            adj[e.src.index()].push((e.dst, e.etype));
            adj[e.dst.index()].push((e.src, e.etype));
        }
        Ok(Self {
            graph,
            bounds,
            adj,
            cache: HashMap::new(),
        })
    }

    fn check_path(&self, path: &TypedPath, src: NodeIdx) -> Result<()> {
        if path.len() > self.bounds.max_path_len {
            return Err(Error::OracleBoundExceeded(format!(
                "path has {} types, oracle limit is {}",
                path.len(),
                self.bounds.max_path_len
            )));
        }
        if path.is_empty() {
            return Err(Error::Config("empty meta path".into()));
        }
        if !self.graph.contains(src) {
            return Err(Error::MissingNode(src.to_string()));
        }
        let (have, want) = (self.graph.type_of(src), *path.start_type());
        if have != want {
            return Err(Error::TypeMismatch {
                left: self.graph.name(src).to_owned(),
                left_type: self.graph.node_type_name(have).to_owned(),
                right: "path start".to_owned(),
                right_type: self.graph.node_type_name(want).to_owned(),
            });
        }
        Ok(())
    }

    fn dfs(&self, path: &TypedPath, walk: &mut Vec<NodeIdx>, visit: &mut dyn FnMut(&[NodeIdx])) {
        let depth = walk.len();
        if depth == path.len() {
            visit(walk);
            return;
        }
        let at = walk[depth - 1];
        let want_type = path.types[depth];
        let want_edge = path.edge_type(depth - 1).copied();
        for i in 0..self.adj[at.index()].len() {
            let (next, et) = self.adj[at.index()][i];
            if self.graph.type_of(next) == want_type && want_edge.is_none_or(|w| w == et) {
                walk.push(next);
                self.dfs(path, walk, visit);
                walk.pop();
            }
        }
    }

    /// Lists every walk of `path` starting at `src`.
    pub fn enumerate_paths(&self, path: &TypedPath, src: NodeIdx) -> Result<PathEnumeration> {
        self.check_path(path, src)?;
        let mut out = PathEnumeration::default();
        let mut walk = vec![src];
        self.dfs(path, &mut walk, &mut |w| {
            *out.counts.entry(*w.last().unwrap()).or_insert(0) += 1;
            out.sequences.push(w.to_vec());
        });
        Ok(out)
    }

    /// Walk counts from `src` by end node, without keeping the walks.
    pub fn count_paths(&mut self, path: &TypedPath, src: NodeIdx) -> Result<&BTreeMap<NodeIdx, Count>> {
        let k = (key(path), src);
        if !self.cache.contains_key(&k) {
            self.check_path(path, src)?;
            let mut counts = BTreeMap::new();
            let mut walk = vec![src];
            self.dfs(path, &mut walk, &mut |w| {
                *counts.entry(*w.last().unwrap()).or_insert(0) += 1
            });
            self.cache.insert(k.clone(), counts);
        }
        Ok(&self.cache[&k])
    }

    pub fn count_between(&mut self, path: &TypedPath, x: NodeIdx, y: NodeIdx) -> Result<Count> {
        Ok(self.count_paths(path, x)?.get(&y).copied().unwrap_or(0))
    }

    fn has_edge(&self, a: NodeIdx, b: NodeIdx, et: Option<EdgeType>) -> bool {
        self.adj[a.index()]
            .iter()
            .any(|&(n, t)| n == b && et.is_none_or(|w| w == t))
    }

    /// Every pattern instance, one per canonical key, sorted by key.
    pub fn naive_match(&self, pattern: &MotifPattern) -> Result<Vec<MotifInstance>> {
        let pools: Vec<Vec<NodeIdx>> = (0..pattern.size())
            .map(|s| {
                self.graph
                    .nodes()
                    .filter(|&n| self.graph.type_of(n) == pattern.slot_type(s))
                    .collect()
            })
            .collect();
        let total = pools.iter().fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
        if total > self.bounds.max_bindings {
            return Err(Error::OracleBoundExceeded(format!(
                "{total} bindings to try, oracle limit is {}",
                self.bounds.max_bindings
            )));
        }
        let mut found: BTreeMap<CanonicalKey, MotifInstance> = BTreeMap::new();
        if pools.iter().any(Vec::is_empty) {
            return Ok(Vec::new());
        }
        let mut digits = vec![0usize; pools.len()];
        loop {
            let binding: Vec<NodeIdx> = digits.iter().zip(&pools).map(|(&d, p)| p[d]).collect();
            let injective = (0..binding.len()).all(|i| (0..i).all(|j| binding[i] != binding[j]));
            if injective
                && pattern
                    .edges()
                    .iter()
                    .all(|e| self.has_edge(binding[e.a], binding[e.b], e.edge_type))
            {
                let inst = MotifInstance::new(binding);
                found.entry(canonical_form(pattern, &inst)).or_insert(inst);
            }
            // odometer increment
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return Ok(found.into_values().collect());
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < pools[i].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Candidate keys by construction: valid start motifs, plus every
    /// pattern instance containing a node that some search path reaches
    /// from a start motif node other than the walk's own origin.
    pub fn candidates(
        &mut self,
        pattern: &MotifPattern,
        starts: &[MotifInstance],
        search_paths: &[TypedPath],
    ) -> Result<BTreeSet<CanonicalKey>> {
        let all = self.naive_match(pattern)?;
        let mut out = BTreeSet::new();
        for s in starts {
            let valid = s.len() == pattern.size()
                && s.nodes()
                    .iter()
                    .enumerate()
                    .all(|(i, &n)| self.graph.type_of(n) == pattern.slot_type(i))
                && all
                    .iter()
                    .any(|m| canonical_form(pattern, m) == canonical_form(pattern, s));
            if valid {
                out.insert(canonical_form(pattern, s));
            }
        }
        let mut seeds = BTreeSet::new();
        for s in starts {
            for path in search_paths {
                for &origin in s.nodes() {
                    if self.graph.type_of(origin) != *path.start_type() {
                        continue;
                    }
                    for (&t, &c) in self.count_paths(path, origin)? {
                        if c > 0 && t != origin {
                            seeds.insert(t);
                        }
                    }
                }
            }
        }
        for m in &all {
            if m.nodes().iter().any(|n| seeds.contains(n)) {
                out.insert(canonical_form(pattern, m));
            }
        }
        Ok(out)
    }

    fn group(&self, m: &MotifInstance, ty: NodeType) -> Vec<NodeIdx> {
        m.nodes()
            .iter()
            .copied()
            .filter(|&n| self.graph.type_of(n) == ty)
            .collect()
    }

    fn group_count(&mut self, path: &TypedPath, a: &[NodeIdx], b: &[NodeIdx]) -> Result<Count> {
        let mut total = 0;
        for &u in a {
            for &v in b {
                total += self.count_between(path, u, v)?;
            }
        }
        Ok(total)
    }

    fn half_vector(&mut self, path: &TypedPath, group: &[NodeIdx]) -> Result<BTreeMap<NodeIdx, Count>> {
        let h = path.len().div_ceil(2);
        let half = TypedPath {
            types: path.types[..h].to_vec(),
            edge_types: path.edge_types.as_ref().map(|e| e[..h - 1].to_vec()),
            weight: path.weight,
        };
        let mut v = BTreeMap::new();
        for &u in group {
            for (&d, &c) in self.count_paths(&half, u)? {
                *v.entry(d).or_insert(0) += c;
            }
        }
        Ok(v)
    }

    fn term(&mut self, path: &TypedPath, m1: &MotifInstance, m2: &MotifInstance, metric: Metric) -> Result<f64> {
        let ty = *path.start_type();
        let (g1, g2) = (self.group(m1, ty), self.group(m2, ty));
        Ok(match metric {
            Metric::Mos => self.group_count(path, &g1, &g2)? as f64,
            Metric::PathSim => {
                let x = self.group_count(path, &g1, &g2)?;
                let den = self.group_count(path, &g1, &g1)? + self.group_count(path, &g2, &g2)?;
                if den == 0 {
                    0.0
                } else {
                    2.0 * x as f64 / den as f64
                }
            }
            Metric::NormCon => {
                let x = self.group_count(path, &g1, &g2)?;
                let s = self.group_count(path, &g1, &g1)?;
                if s == 0 {
                    if x > 0 {
                        return Err(Error::DegenerateBase("oracle: zero self count".into()));
                    }
                    0.0
                } else {
                    x as f64 / s as f64
                }
            }
            Metric::CosSim => {
                let (v1, v2) = (self.half_vector(path, &g1)?, self.half_vector(path, &g2)?);
                let dot: Count = v1.iter().map(|(d, c)| c * v2.get(d).copied().unwrap_or(0)).sum();
                let n1: Count = v1.values().map(|c| c * c).sum();
                let n2: Count = v2.values().map(|c| c * c).sum();
                if n1 == 0 || n2 == 0 {
                    0.0
                } else {
                    dot as f64 / ((n1 as f64).sqrt() * (n2 as f64).sqrt())
                }
            }
        })
    }

    pub fn motif_similarity(
        &mut self,
        m1: &MotifInstance,
        m2: &MotifInstance,
        score_paths: &[TypedPath],
        metric: Metric,
    ) -> Result<f64> {
        let mut total = 0.0;
        for p in score_paths {
            total += p.weight * self.term(p, m1, m2, metric)?;
        }
        Ok(total)
    }

    /// Outlier score of `candidate` against `reference`.
    pub fn mos(
        &mut self,
        candidate: &MotifInstance,
        reference: &[MotifInstance],
        score_paths: &[TypedPath],
        metric: Metric,
    ) -> Result<f64> {
        if metric == Metric::Mos {
            let mut total = 0.0;
            for p in score_paths {
                let ty = *p.start_type();
                let g1 = self.group(candidate, ty);
                let mut x: Count = 0;
                for r in reference {
                    let g2 = self.group(r, ty);
                    x += self.group_count(p, &g1, &g2)?;
                }
                total += p.weight * x as f64;
            }
            return Ok(total);
        }
        let mut total = 0.0;
        for r in reference {
            total += self.motif_similarity(candidate, r, score_paths, metric)?;
        }
        Ok(total)
    }
}

pub fn enumerate_paths(graph: &HeteroGraph, path: &TypedPath, src: NodeIdx) -> Result<PathEnumeration> {
    Oracle::new(graph, OracleBounds::default())?.enumerate_paths(path, src)
}

pub fn naive_match(graph: &HeteroGraph, pattern: &MotifPattern) -> Result<Vec<MotifInstance>> {
    Oracle::new(graph, OracleBounds::default())?.naive_match(pattern)
}

pub fn oracle_candidates(
    graph: &HeteroGraph,
    pattern: &MotifPattern,
    starts: &[MotifInstance],
    search_paths: &[TypedPath],
) -> Result<BTreeSet<CanonicalKey>> {
    Oracle::new(graph, OracleBounds::default())?.candidates(pattern, starts, search_paths)
}

pub fn oracle_mos(
    graph: &HeteroGraph,
    candidate: &MotifInstance,
    reference: &[MotifInstance],
    score_paths: &[TypedPath],
    metric: Metric,
) -> Result<f64> {
    Oracle::new(graph, OracleBounds::default())?.mos(candidate, reference, score_paths, metric)
}

// ---- equivalence suite ----------------------------------------------------

/// Deliberate engine corruption used to check that the suite notices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Adds one to a single engine pair count.
    PairCountOffByOne,
    /// Drops the last engine candidate.
    DropCandidate,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub cases: usize,
    pub seed: u64,
    pub max_nodes: usize,
    pub path_lengths: Vec<usize>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cases: 100,
            seed: 0,
            max_nodes: 40,
            path_lengths: vec![3, 5, 7],
            fault: None,
        }
    }
}

/// A random graph with a query drawn from its own structure.
#[derive(Clone, Debug)]
pub struct VerifyCase {
    pub seed: u64,
    pub graph: HeteroGraph,
    pub pattern: MotifPattern,
    pub start: Vec<MotifInstance>,
    pub search_paths: Vec<TypedPath>,
    pub score_paths: Vec<TypedPath>,
}

/// Generates the case for `seed`: 10 to `max_nodes` nodes, 2 to 4 types,
/// realized average degree at most 6, a 2 or 3 slot pattern taken from the
/// graph, one or two search paths and one score path per requested length
/// (lengths the graph cannot realize are skipped).
pub fn generate_case(seed: u64, max_nodes: usize, path_lengths: &[usize]) -> VerifyCase {
    let mut rng = synth::rng(seed);
    loop {
        let cfg = SynthConfig {
            node_types: rng.gen_range(2..=4),
            nodes: rng.gen_range(10..=max_nodes.max(10)),
            avg_degree: rng.gen_range(2.0..5.0),
            seed: rng.gen(),
        };
        let graph = synth::random_graph(&cfg).expect("valid synthetic config");
        if synth::average_degree(&graph) > 6.0 {
            continue;
        }
        let Some((pattern, start)) = synth::random_motif(&graph, rng.gen_range(2..=3), &mut rng) else {
            continue;
        };
        let search_paths: Vec<TypedPath> = (0..rng.gen_range(1..=2))
            .filter_map(|_| {
                let from = start.node(rng.gen_range(0..start.len()));
                let len = rng.gen_range(2..=3);
                synth::random_walk_types(&graph, from, len, &mut rng)
            })
            .collect();
        let score_paths: Vec<TypedPath> = path_lengths
            .iter()
            .filter_map(|&len| {
                let from = start.node(rng.gen_range(0..start.len()));
                let w = synth::random_weight(&mut rng);
                synth::random_symmetric_path(&graph, from, len, &mut rng).map(|p| p.with_weight(w))
            })
            .collect();
        if search_paths.is_empty() || score_paths.is_empty() {
            continue;
        }
        return VerifyCase {
            seed,
            graph,
            pattern,
            start: vec![start],
            search_paths,
            score_paths,
        };
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseFailure {
    pub seed: u64,
    pub check: &'static str,
    pub detail: String,
}

fn fail(case: &VerifyCase, check: &'static str, detail: String) -> CaseFailure {
    CaseFailure {
        seed: case.seed,
        check,
        detail,
    }
}

fn describe_path(g: &HeteroGraph, p: &TypedPath) -> String {
    p.types
        .iter()
        .map(|&t| g.node_type_name(t))
        .collect::<Vec<_>>()
        .join("-")
}

/// Engine pair counts against enumeration, for every score path, over two
/// overlapping node sets and over one shared set. Returns the number of
/// entries compared.
pub fn check_pair_counts(case: &VerifyCase, fault: Option<Fault>) -> std::result::Result<usize, CaseFailure> {
    let g = &case.graph;
    let mut oracle = Oracle::new(g, OracleBounds::default()).map_err(|e| fail(case, "pair-counts", e.to_string()))?;
    let mut compared = 0;
    let mut corrupt = fault == Some(Fault::PairCountOffByOne);
    for path in &case.score_paths {
        let half = path.half().expect("score paths are symmetric");
        let ty = *path.start_type();
        let all: Vec<NodeIdx> = g.nodes_of_type(ty).to_vec();
        let c: Vec<NodeIdx> = all.iter().copied().step_by(2).collect();
        let r: Vec<NodeIdx> = all
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| i % 3 != 0)
            .map(|(_, n)| n)
            .collect();
        for (cs, rs) in [(&c, &r), (&all, &all)] {
            let err = |e: Error| fail(case, "pair-counts", e.to_string());
            let rc = reachable_nodes(g, cs, &half).map_err(err)?;
            let rr = reachable_nodes(g, rs, &half).map_err(err)?;
            let pc = pair_counts(g, &rc, &rr).map_err(err)?;
            let pairs = cs
                .iter()
                .flat_map(|&x| rs.iter().map(move |&y| ("A2B", x, y)))
                .chain(cs.iter().flat_map(|&x| cs.iter().map(move |&y| ("A2A", x, y))))
                .chain(rs.iter().flat_map(|&x| rs.iter().map(move |&y| ("B2B", x, y))));
            for (which, x, y) in pairs {
                let map = match which {
                    "A2B" => &pc.a2b,
                    "A2A" => &pc.a2a,
                    _ => &pc.b2b,
                };
                let mut engine = map.get(&x).and_then(|row| row.get(&y)).copied().unwrap_or(0);
                if corrupt {
                    engine += 1;
                    corrupt = false;
                }
                let truth = oracle.count_between(path, x, y).map_err(err)?;
                compared += 1;
                if engine != truth {
                    return Err(fail(
                        case,
                        "pair-counts",
                        format!(
                            "{which}[{}][{}] over {}: engine {engine}, enumeration {truth}",
                            g.name(x),
                            g.name(y),
                            describe_path(g, path)
                        ),
                    ));
                }
            }
        }
    }
    Ok(compared)
}

/// Engine candidate keys against construction by exhaustive matching.
/// Also checks that keys are unique and the start motif is present.
pub fn check_candidates(case: &VerifyCase, fault: Option<Fault>) -> std::result::Result<usize, CaseFailure> {
    let g = &case.graph;
    let set = expand_from(g, &case.pattern, &case.start, &case.search_paths);
    let mut keys: Vec<CanonicalKey> = set.keys().to_vec();
    if fault == Some(Fault::DropCandidate) {
        keys.pop();
    }
    let unique: BTreeSet<CanonicalKey> = keys.iter().cloned().collect();
    if unique.len() != keys.len() {
        return Err(fail(
            case,
            "candidates",
            "duplicate canonical key in candidate set".into(),
        ));
    }
    for s in &case.start {
        if !unique.contains(&canonical_form(&case.pattern, s)) {
            return Err(fail(
                case,
                "candidates",
                "start motif missing from its candidate set".into(),
            ));
        }
    }
    let mut oracle = Oracle::new(g, OracleBounds::default()).map_err(|e| fail(case, "candidates", e.to_string()))?;
    let truth = oracle
        .candidates(&case.pattern, &case.start, &case.search_paths)
        .map_err(|e| fail(case, "candidates", e.to_string()))?;
    if unique != truth {
        let show = |k: &CanonicalKey| k.0.iter().map(|&n| g.name(n)).collect::<Vec<_>>().join("-");
        let missing: Vec<String> = truth.difference(&unique).map(show).collect();
        let extra: Vec<String> = unique.difference(&truth).map(show).collect();
        return Err(fail(
            case,
            "candidates",
            format!("engine lacks {missing:?}, engine has extra {extra:?}"),
        ));
    }
    Ok(truth.len())
}

pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Engine outlier scores against oracle scores under every metric, with
/// the candidate set as reference. Returns the number of scores compared.
pub fn check_scores(case: &VerifyCase) -> std::result::Result<usize, CaseFailure> {
    let g = &case.graph;
    let set = expand_from(g, &case.pattern, &case.start, &case.search_paths);
    let members = set.members();
    let mut oracle = Oracle::new(g, OracleBounds::default()).map_err(|e| fail(case, "scores", e.to_string()))?;
    let mut compared = 0;
    for metric in Metric::ALL {
        let engine = ScoringContext::new(g, &case.pattern, &case.score_paths, members, members, metric)
            .and_then(|ctx| ctx.score_all(members, members));
        let truth: Result<Vec<f64>> = members
            .iter()
            .map(|m| oracle.mos(m, members, &case.score_paths, metric))
            .collect();
        match (engine, truth) {
            (Ok(e), Ok(t)) => {
                for (i, (a, b)) in e.iter().zip(&t).enumerate() {
                    compared += 1;
                    if !relative_close(*a, *b, 1e-9) {
                        return Err(fail(
                            case,
                            "scores",
                            format!("{metric} score of candidate {i}: engine {a}, oracle {b}"),
                        ));
                    }
                }
            }
            (Err(Error::DegenerateBase(_)), Err(Error::DegenerateBase(_))) => compared += 1,
            (e, t) => {
                return Err(fail(
                    case,
                    "scores",
                    format!("{metric}: engine {:?}, oracle {:?}", e.err(), t.err()),
                ))
            }
        }
    }
    Ok(compared)
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub cases: usize,
    pub pair_checks: usize,
    pub candidate_checks: usize,
    pub score_checks: usize,
    pub failures: Vec<CaseFailure>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check on `cfg.cases` generated cases, seeds `seed..seed+cases`.
pub fn run_verification(cfg: &VerifyConfig) -> VerifyReport {
    let t0 = Instant::now();
    let mut report = VerifyReport::default();
    for i in 0..cfg.cases {
        let case = generate_case(cfg.seed.wrapping_add(i as u64), cfg.max_nodes, &cfg.path_lengths);
        report.cases += 1;
        match check_pair_counts(&case, cfg.fault) {
            Ok(n) => report.pair_checks += n,
            Err(f) => report.failures.push(f),
        }
        match check_candidates(&case, cfg.fault) {
            Ok(n) => report.candidate_checks += n,
            Err(f) => report.failures.push(f),
        }
        match check_scores(&case) {
            Ok(n) => report.score_checks += n,
            Err(f) => report.failures.push(f),
        }
    }
    report.elapsed = t0.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, G1_QUERY};
    use crate::query::{bind, parse_query, MetaPath, Slot};

    fn n(g: &HeteroGraph, id: &str) -> NodeIdx {
        g.lookup(id).unwrap()
    }

    fn path(g: &HeteroGraph, types: &[&str]) -> TypedPath {
        MetaPath::named(types).resolve(g).unwrap()
    }

    fn named(g: &HeteroGraph, m: &BTreeMap<NodeIdx, Count>) -> Vec<(String, Count)> {
        m.iter().map(|(&k, &c)| (g.name(k).to_owned(), c)).collect()
    }

    #[test]
    fn enumerate_g1() {
        let g = g1();
        let e = enumerate_paths(&g, &path(&g, &["author", "term", "author"]), n(&g, "a1")).unwrap();
        assert_eq!(named(&g, &e.counts), [("a1".to_owned(), 2), ("a2".to_owned(), 1)]);
        let walks: BTreeSet<Vec<&str>> = e
            .sequences
            .iter()
            .map(|s| s.iter().map(|&x| g.name(x)).collect())
            .collect();
        assert_eq!(
            walks,
            BTreeSet::from([vec!["a1", "t1", "a1"], vec!["a1", "t1", "a2"], vec!["a1", "t2", "a1"]])
        );
    }

    #[test]
    fn enumerate_edge_cases() {
        let g = g1();
        let single = enumerate_paths(&g, &path(&g, &["author"]), n(&g, "a2")).unwrap();
        assert_eq!(named(&g, &single.counts), [("a2".to_owned(), 1)]);
        assert!(matches!(
            enumerate_paths(&g, &path(&g, &["author", "term", "author"]), n(&g, "t1")),
            Err(Error::TypeMismatch { .. })
        ));
        let long = MetaPath::new(vec![g.node_type_id("author").unwrap(); 10]);
        assert!(matches!(
            enumerate_paths(&g, &long, n(&g, "a1")),
            Err(Error::OracleBoundExceeded(_))
        ));
        let mut big = HeteroGraph::new();
        for i in 0..201 {
            big.add_node(&format!("x{i}"), "x").unwrap();
        }
        assert!(matches!(
            Oracle::new(&big, OracleBounds::default()),
            Err(Error::OracleBoundExceeded(_))
        ));
    }

    #[test]
    fn naive_match_g1() {
        let g = g1();
        let q = bind(&parse_query(G1_QUERY).unwrap(), &g).unwrap();
        assert_eq!(naive_match(&g, &q.pattern).unwrap().len(), 2);
        let author = g.node_type_id("author").unwrap();
        let single = MotifPattern::new(
            vec![Slot {
                id: "A".into(),
                node_type: author,
            }],
            vec![],
        )
        .unwrap();
        assert_eq!(naive_match(&g, &single).unwrap().len(), 3);
        let mut g2 = g1();
        let venue = g2.intern_node_type("venue");
        let absent = MotifPattern::new(
            vec![Slot {
                id: "V".into(),
                node_type: venue,
            }],
            vec![],
        )
        .unwrap();
        assert!(naive_match(&g2, &absent).unwrap().is_empty());
    }

    #[test]
    fn oracle_scores_g1() {
        let g = g1();
        let q = bind(&parse_query(G1_QUERY).unwrap(), &g).unwrap();
        let m1 = MotifInstance::new(vec![n(&g, "a1"), n(&g, "a2"), n(&g, "t1")]);
        let m2 = MotifInstance::new(vec![n(&g, "a2"), n(&g, "a3"), n(&g, "t3")]);
        assert_eq!(
            oracle_mos(&g, &m2, std::slice::from_ref(&m1), &q.score_paths, Metric::Mos).unwrap(),
            5.0
        );
        assert_eq!(oracle_mos(&g, &m2, &[], &q.score_paths, Metric::Mos).unwrap(), 0.0);
        let mut o = Oracle::new(&g, OracleBounds::default()).unwrap();
        assert_eq!(o.motif_similarity(&m1, &m1, &q.score_paths, Metric::Mos).unwrap(), 8.0);
        // identical motifs reach the per-path maximum of 1 under PathSim
        assert_eq!(
            o.motif_similarity(&m1, &m1, &q.score_paths, Metric::PathSim).unwrap(),
            2.0
        );
        assert!(o.motif_similarity(&m2, &m1, &q.score_paths, Metric::PathSim).unwrap() < 2.0);
        let cands = o.candidates(&q.pattern, &q.start, &q.search_paths).unwrap();
        assert_eq!(cands.len(), 2);
    }

    #[test]
    fn small_suite_passes() {
        let report = run_verification(&VerifyConfig {
            cases: 8,
            seed: 11,
            ..Default::default()
        });
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.pair_checks > 0 && report.candidate_checks > 0 && report.score_checks > 0);
    }

    #[test]
    fn injected_faults_are_caught() {
        for fault in [Fault::PairCountOffByOne, Fault::DropCandidate] {
            let report = run_verification(&VerifyConfig {
                cases: 3,
                seed: 5,
                fault: Some(fault),
                ..Default::default()
            });
            assert!(!report.passed());
            assert_eq!(report.failures[0].seed, 5);
        }
    }
}

//! Candidate and reference motif generation.
//!
//! Starting from the query's motifs, every search path is walked from each
//! bound node whose type matches the path's first type. Each node reached at
//! the path's end seeds a depth-first pattern match with that node pinned to
//! every slot of its type. Matches are deduplicated up to pattern
//! automorphism with [`canonical_form`].

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeType, HeteroGraph, NodeIdx};
use crate::query::{resolve_instance, MotifPattern, ReferenceSource, TypedPath};

/// Nodes bound to a pattern's slots, in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotifInstance {
    nodes: Vec<NodeIdx>,
}

impl MotifInstance {
    pub fn new(nodes: Vec<NodeIdx>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[NodeIdx] {
        &self.nodes
    }

    pub fn node(&self, slot: usize) -> NodeIdx {
        self.nodes[slot]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Orbit representative of an instance under slot automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<NodeIdx>);

/// Lexicographically smallest re-binding of `inst` over the pattern's
/// automorphism group, so automorphic bindings share one key.
pub fn canonical_form(pattern: &MotifPattern, inst: &MotifInstance) -> CanonicalKey {
    pattern
        .automorphisms()
        .iter()
        .map(|perm| perm.iter().map(|&s| inst.nodes[s]).collect::<Vec<_>>())
        .min()
        .map(CanonicalKey)
        .expect("identity is always an automorphism")
}

/// True when `inst` is an injective, type-correct binding whose pattern
/// edges all exist in `graph`.
pub fn is_instance(graph: &HeteroGraph, pattern: &MotifPattern, inst: &MotifInstance) -> bool {
    inst.len() == pattern.size()
        && inst.nodes.iter().all(|&n| graph.contains(n))
        && inst
            .nodes
            .iter()
            .enumerate()
            .all(|(s, &n)| graph.type_of(n) == pattern.slot_type(s) && !inst.nodes[..s].contains(&n))
        && pattern
            .edges()
            .iter()
            .all(|e| graph.has_edge(inst.nodes[e.a], inst.nodes[e.b], e.edge_type))
}

/// All injective completions of `partial` (one entry per slot) in which
/// every pattern edge is a graph edge. Automorphic bindings are reported
/// separately.
pub fn match_pattern(graph: &HeteroGraph, pattern: &MotifPattern, partial: &[Option<NodeIdx>]) -> Vec<MotifInstance> {
    let size = pattern.size();
    assert_eq!(partial.len(), size, "partial binding must have one entry per slot");

    // pre-bound slots must already be consistent
    for (s, n) in partial.iter().enumerate() {
        if let Some(n) = *n {
            if !graph.contains(n) || graph.type_of(n) != pattern.slot_type(s) {
                return Vec::new();
            }
            if partial[..s].contains(&Some(n)) {
                return Vec::new();
            }
        }
    }
    for e in pattern.edges() {
        if let (Some(a), Some(b)) = (partial[e.a], partial[e.b]) {
            if !graph.has_edge(a, b, e.edge_type) {
                return Vec::new();
            }
        }
    }

    // visit order: pre-bound slots, then breadth-first outwards
    let mut order: Vec<usize> = (0..size).filter(|&s| partial[s].is_some()).collect();
    let mut anchor: Vec<Option<(usize, Option<EdgeType>)>> = vec![None; size];
    let mut placed: Vec<bool> = partial.iter().map(Option::is_some).collect();
    if order.is_empty() {
        order.push(0);
        placed[0] = true;
    }
    let mut head = 0;
    while order.len() < size {
        let s = order[head];
        head += 1;
        for &(t, et) in pattern.slot_neighbors(s) {
            if !placed[t] {
                placed[t] = true;
                anchor[t] = Some((s, et));
                order.push(t);
            }
        }
    }

    let mut out = Vec::new();
    let mut binding: Vec<Option<NodeIdx>> = partial.to_vec();
    let first_free = order.iter().position(|&s| partial[s].is_none());
    match first_free {
        None => out.push(MotifInstance::new(binding.iter().map(|n| n.unwrap()).collect())),
        Some(i) => extend(graph, pattern, &order, &anchor, i, &mut binding, &mut out),
    }
    out
}

fn extend(
    graph: &HeteroGraph,
    pattern: &MotifPattern,
    order: &[usize],
    anchor: &[Option<(usize, Option<EdgeType>)>],
    depth: usize,
    binding: &mut Vec<Option<NodeIdx>>,
    out: &mut Vec<MotifInstance>,
) {
    if depth == order.len() {
        out.push(MotifInstance::new(binding.iter().map(|n| n.unwrap()).collect()));
        return;
    }
    let slot = order[depth];
    let ty = pattern.slot_type(slot);
    let mut choices: Vec<NodeIdx> = match anchor[slot] {
        Some((a, et)) => graph
            .typed_neighbors(binding[a].unwrap(), ty)
            .iter()
            .filter(|n| et.is_none_or(|t| t == n.etype))
            .map(|n| n.node)
            .collect(),
        None => graph.nodes_of_type(ty).to_vec(),
    };
    choices.sort_unstable();
    choices.dedup();
    'next: for n in choices {
        if binding.contains(&Some(n)) {
            continue;
        }
        for &(other, et) in pattern.slot_neighbors(slot) {
            if let Some(m) = binding[other] {
                if anchor[slot] != Some((other, et)) && !graph.has_edge(n, m, et) {
                    continue 'next;
                }
            }
        }
        binding[slot] = Some(n);
        extend(graph, pattern, order, anchor, depth + 1, binding, out);
        binding[slot] = None;
    }
}

/// Insertion-ordered set of instances, unique up to automorphism.
#[derive(Clone, Debug, Default)]
pub struct MotifSet {
    members: Vec<MotifInstance>,
    keys: Vec<CanonicalKey>,
    index: HashMap<CanonicalKey, usize>,
}

impl MotifSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `inst` unless an automorphic binding is already present.
    pub fn insert(&mut self, pattern: &MotifPattern, inst: MotifInstance) -> bool {
        let key = canonical_form(pattern, &inst);
        if self.index.contains_key(&key) {
            return false;
        }
        self.index.insert(key.clone(), self.members.len());
        self.members.push(inst);
        self.keys.push(key);
        true
    }

    pub fn members(&self) -> &[MotifInstance] {
        &self.members
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    pub fn contains_key(&self, key: &CanonicalKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MotifInstance> {
        self.members.iter()
    }
}

pub type CandidateSet = MotifSet;
pub type ReferenceSet = MotifSet;

/// Nodes at the end of some walk of `path` from `origin`, in id order.
/// Walks may revisit nodes and edges; the origin itself is included when a
/// walk returns to it.
pub fn path_termini(graph: &HeteroGraph, origin: NodeIdx, path: &TypedPath) -> Vec<NodeIdx> {
    if graph.type_of(origin) != *path.start_type() {
        return Vec::new();
    }
    let mut frontier = vec![origin];
    for step in 0..path.len() - 1 {
        let ty = path.types[step + 1];
        let et = path.edge_type(step).copied();
        let mut next: Vec<NodeIdx> = frontier
            .iter()
            .flat_map(|&n| graph.typed_neighbors(n, ty))
            .filter(|n| et.is_none_or(|t| t == n.etype))
            .map(|n| n.node)
            .collect();
        next.sort_unstable();
        next.dedup();
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    frontier
}

/// Generates the candidate set for `starts`. Start motifs that match the
/// pattern come first; expansions follow in start, path and node-id order.
pub fn expand_from(
    graph: &HeteroGraph,
    pattern: &MotifPattern,
    starts: &[MotifInstance],
    search_paths: &[TypedPath],
) -> MotifSet {
    let mut set = MotifSet::new();
    for s in starts {
        if is_instance(graph, pattern, s) {
            set.insert(pattern, s.clone());
        }
    }

    let mut seeds = Vec::new();
    let mut seen = vec![false; graph.node_count()];
    for s in starts {
        for path in search_paths {
            for (slot, &origin) in s.nodes().iter().enumerate() {
                if pattern.slot_type(slot) != *path.start_type() || !graph.contains(origin) {
                    continue;
                }
                for t in path_termini(graph, origin, path) {
                    // returning to the origin adds nothing the start motif lacks
                    if t != origin && !seen[t.index()] {
                        seen[t.index()] = true;
                        seeds.push(t);
                    }
                }
            }
        }
    }

    let found: Vec<Vec<MotifInstance>> = seeds
        .par_iter()
        .map(|&seed| {
            let ty = graph.type_of(seed);
            let mut out = Vec::new();
            for slot in (0..pattern.size()).filter(|&s| pattern.slot_type(s) == ty) {
                let mut partial = vec![None; pattern.size()];
                partial[slot] = Some(seed);
                out.extend(match_pattern(graph, pattern, &partial));
            }
            out
        })
        .collect();
    for inst in found.into_iter().flatten() {
        set.insert(pattern, inst);
    }
    set
}

/// Reference motifs: the candidate set itself, or the user's motifs
/// (expanded over the search paths when requested).
pub fn build_reference_set(
    graph: &HeteroGraph,
    pattern: &MotifPattern,
    reference: &ReferenceSource,
    candidates: &MotifSet,
    search_paths: &[TypedPath],
) -> Result<MotifSet> {
    match reference {
        ReferenceSource::SameAsCandidates => Ok(candidates.clone()),
        ReferenceSource::UserProvided { instances, expand } => {
            let resolved = instances
                .iter()
                .map(|inst| {
                    resolve_instance(graph, pattern, inst).map_err(|problems| {
                        Error::InvalidReference(format!("{}: {}", inst.0.join("-"), problems.join("; ")))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if *expand {
                Ok(expand_from(graph, pattern, &resolved, search_paths))
            } else {
                let mut set = MotifSet::new();
                for inst in resolved {
                    set.insert(pattern, inst);
                }
                Ok(set)
            }
        }
    }
}

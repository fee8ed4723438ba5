//! Motif patterns: typed slots plus the edges that must join them.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeType, HeteroGraph, NodeType};

/// Largest pattern accepted. Slot automorphisms are found by trying every
/// type-preserving permutation, which stays cheap up to this size.
pub const MAX_PATTERN_SLOTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSpec {
    pub id: String,
    pub node_type: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternEdgeSpec {
    pub a: String,
    pub b: String,
    pub edge_type: Option<String>,
}

/// A pattern as written in a query document, keyed by type labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSpec {
    pub slots: Vec<SlotSpec>,
    pub edges: Vec<PatternEdgeSpec>,
}

impl PatternSpec {
    pub fn slot_index(&self, id: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.id == id)
    }

    pub fn resolve(&self, graph: &HeteroGraph) -> Result<MotifPattern> {
        let slots = self
            .slots
            .iter()
            .map(|s| {
                graph
                    .node_type_id(&s.node_type)
                    .map(|ty| Slot {
                        id: s.id.clone(),
                        node_type: ty,
                    })
                    .ok_or_else(|| Error::Pattern(format!("unknown node type `{}`", s.node_type)))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let a = self
                    .slot_index(&e.a)
                    .ok_or_else(|| Error::Pattern(format!("unknown slot `{}`", e.a)))?;
                let b = self
                    .slot_index(&e.b)
                    .ok_or_else(|| Error::Pattern(format!("unknown slot `{}`", e.b)))?;
                let edge_type = match &e.edge_type {
                    None => None,
                    Some(name) => Some(
                        graph
                            .edge_type_id(name)
                            .ok_or_else(|| Error::Pattern(format!("unknown edge type `{name}`")))?,
                    ),
                };
                Ok(PatternEdge { a, b, edge_type })
            })
            .collect::<Result<Vec<_>>>()?;
        MotifPattern::new(slots, edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub id: String,
    pub node_type: NodeType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternEdge {
    pub a: usize,
    pub b: usize,
    pub edge_type: Option<EdgeType>,
}

/// A connected pattern over interned types with its slot automorphism group
/// precomputed.
#[derive(Clone, Debug)]
pub struct MotifPattern {
    slots: Vec<Slot>,
    edges: Vec<PatternEdge>,
    // adjacency[slot] = (other slot, edge type constraint)
    adjacency: Vec<Vec<(usize, Option<EdgeType>)>>,
    automorphisms: Vec<Vec<usize>>,
}

impl MotifPattern {
    pub fn new(slots: Vec<Slot>, edges: Vec<PatternEdge>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::Pattern("pattern has no slots".into()));
        }
        if slots.len() > MAX_PATTERN_SLOTS {
            return Err(Error::Pattern(format!(
                "pattern has {} slots, at most {MAX_PATTERN_SLOTS} are supported",
                slots.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); slots.len()];
        for e in &edges {
            if e.a >= slots.len() || e.b >= slots.len() {
                return Err(Error::Pattern("pattern edge refers to a missing slot".into()));
            }
            if e.a == e.b {
                return Err(Error::Pattern(format!(
                    "pattern edge joins slot `{}` to itself",
                    slots[e.a].id
                )));
            }
            adjacency[e.a].push((e.b, e.edge_type));
            adjacency[e.b].push((e.a, e.edge_type));
        }
        let mut seen = vec![false; slots.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(s) = queue.pop_front() {
            for &(t, _) in &adjacency[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Pattern("pattern is not connected".into()));
        }
        let mut pattern = Self {
            slots,
            edges,
            adjacency,
            automorphisms: Vec::new(),
        };
        pattern.automorphisms = pattern.find_automorphisms();
        Ok(pattern)
    }

    pub fn size(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot_type(&self, slot: usize) -> NodeType {
        self.slots[slot].node_type
    }

    pub fn edges(&self) -> &[PatternEdge] {
        &self.edges
    }

    pub fn slot_neighbors(&self, slot: usize) -> &[(usize, Option<EdgeType>)] {
        &self.adjacency[slot]
    }

    /// Slot permutations that preserve types and the edge multiset. Always
    /// contains the identity first.
    pub fn automorphisms(&self) -> &[Vec<usize>] {
        &self.automorphisms
    }

    fn edge_signature(&self, perm: &[usize]) -> Vec<(usize, usize, Option<EdgeType>)> {
        let mut sig: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.a], perm[e.b]);
                (a.min(b), a.max(b), e.edge_type)
            })
            .collect();
        sig.sort();
        sig
    }

    fn find_automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.slots.len();
        let identity: Vec<usize> = (0..n).collect();
        let target = self.edge_signature(&identity);
        let mut out = Vec::new();
        let mut perm = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.permute(&mut perm, &mut used, &target, &mut out);
        out
    }

    fn permute(
        &self,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        target: &[(usize, usize, Option<EdgeType>)],
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = perm.len();
        if i == self.slots.len() {
            if self.edge_signature(perm) == target {
                out.push(perm.clone());
            }
            return;
        }
        for j in 0..self.slots.len() {
            if !used[j] && self.slots[j].node_type == self.slots[i].node_type {
                used[j] = true;
                perm.push(j);
                self.permute(perm, used, target, out);
                perm.pop();
                used[j] = false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slot(id: &str, t: u16) -> Slot {
        Slot {
            id: id.into(),
            node_type: NodeType(t),
        }
    }

    fn edge(a: usize, b: usize) -> PatternEdge {
        PatternEdge { a, b, edge_type: None }
    }

    #[test]
    fn triangle_with_two_authors_swaps_them() {
        let p = MotifPattern::new(
            vec![slot("A1", 0), slot("A2", 0), slot("T", 1)],
            vec![edge(0, 1), edge(0, 2), edge(1, 2)],
        )
        .unwrap();
        assert_eq!(p.automorphisms(), [vec![0, 1, 2], vec![1, 0, 2]]);
    }

    #[test]
    fn chain_has_only_identity_when_ends_differ() {
        let p = MotifPattern::new(
            vec![slot("A", 0), slot("T", 1), slot("V", 2)],
            vec![edge(0, 1), edge(1, 2)],
        )
        .unwrap();
        assert_eq!(p.automorphisms().len(), 1);
    }

    #[test]
    fn rejects_disconnected_and_oversized() {
        assert!(MotifPattern::new(vec![slot("A", 0), slot("B", 0)], vec![]).is_err());
        let many: Vec<_> = (0..9).map(|i| slot(&format!("s{i}"), 0)).collect();
        let chain: Vec<_> = (0..8).map(|i| edge(i, i + 1)).collect();
        assert!(MotifPattern::new(many, chain).is_err());
        assert!(MotifPattern::new(vec![slot("A", 0)], vec![edge(0, 0)]).is_err());
        assert!(MotifPattern::new(vec![slot("A", 0)], vec![]).is_ok());
    }
}

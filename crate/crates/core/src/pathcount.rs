//! Bidirectional counting of symmetric meta-path instances.
//!
//! A symmetric path is cut at its center. Each start node is expanded layer
//! by layer along the half path, carrying the number of half-walks that reach
//! every frontier node ([`reachable_nodes`]). The number of full walks between
//! two nodes is then the sum, over meeting points, of the product of their
//! half-walk counts ([`pair_counts`]). For an even number of types the two
//! halves meet across a center edge instead of a shared node.
//!
//! Walks may revisit nodes and traverse the same edge back and forth, so a
//! full count equals the matching entry of the product of typed adjacency
//! matrices along the path.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeType, HeteroGraph, NodeIdx, NodeType};
use crate::motif::MotifInstance;
use crate::query::{Center, HalfPath};

/// Exact walk count.
pub type Count = u128;

pub type TypedHalf = HalfPath<NodeType, EdgeType>;

#[inline]
fn mul_add(acc: Count, a: Count, b: Count) -> Result<Count> {
    a.checked_mul(b)
        .and_then(|p| acc.checked_add(p))
        .ok_or(Error::CountOverflow)
}

/// Per start node: every half-path end node with the number of half-walks
/// reaching it.
#[derive(Clone, Debug)]
pub struct ReachabilityMap {
    half: TypedHalf,
    reach: HashMap<NodeIdx, Vec<(NodeIdx, Count)>>,
}

impl ReachabilityMap {
    pub fn half(&self) -> &TypedHalf {
        &self.half
    }

    /// Sorted by node id; `None` if `n` was not a start node.
    pub fn get(&self, n: NodeIdx) -> Option<&[(NodeIdx, Count)]> {
        self.reach.get(&n).map(Vec::as_slice)
    }

    pub fn count(&self, from: NodeIdx, to: NodeIdx) -> Option<Count> {
        self.get(from)
            .map(|row| row.binary_search_by_key(&to, |&(n, _)| n).map_or(0, |i| row[i].1))
    }

    pub fn starts(&self) -> impl Iterator<Item = NodeIdx> + '_ {
        self.reach.keys().copied()
    }

    pub fn contains(&self, n: NodeIdx) -> bool {
        self.reach.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.reach.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reach.is_empty()
    }

    /// Merges two maps built over the same half path.
    pub fn union(&self, other: &ReachabilityMap) -> ReachabilityMap {
        let mut reach = self.reach.clone();
        for (k, v) in &other.reach {
            reach.entry(*k).or_insert_with(|| v.clone());
        }
        ReachabilityMap {
            half: self.half.clone(),
            reach,
        }
    }
}

/// Dense per-thread accumulator with a touched list so clearing costs only
/// what was written.
struct Scratch {
    counts: Vec<Count>,
    touched: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            counts: vec![0; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, at: NodeIdx, a: Count, b: Count) -> Result<()> {
        let slot = &mut self.counts[at.index()];
        if *slot == 0 {
            self.touched.push(at.0);
        }
        *slot = mul_add(*slot, a, b)?;
        Ok(())
    }

    /// Sorted contents; leaves the scratch empty.
    fn drain_sorted(&mut self) -> Vec<(NodeIdx, Count)> {
        self.touched.sort_unstable();
        let out = self
            .touched
            .iter()
            .map(|&i| (NodeIdx(i), std::mem::take(&mut self.counts[i as usize])))
            .collect();
        self.touched.clear();
        out
    }
}

fn walk_half(
    graph: &HeteroGraph,
    origin: NodeIdx,
    half: &TypedHalf,
    scratch: &mut Scratch,
) -> Result<Vec<(NodeIdx, Count)>> {
    let mut layer = vec![(origin, 1 as Count)];
    for step in 0..half.types.len() - 1 {
        let ty = half.types[step + 1];
        let et = half.edge_type(step).copied();
        for &(u, c) in &layer {
            for nb in graph.typed_neighbors(u, ty) {
                if et.is_none_or(|t| t == nb.etype) {
                    scratch.add(nb.node, c, 1)?;
                }
            }
        }
        layer = scratch.drain_sorted();
        if layer.is_empty() {
            break;
        }
    }
    Ok(layer)
}

/// Expands every start node along `half`. Start nodes are deduplicated; a
/// start node without conforming neighbours gets an empty map.
pub fn reachable_nodes(graph: &HeteroGraph, starts: &[NodeIdx], half: &TypedHalf) -> Result<ReachabilityMap> {
    let want = *half.start_type();
    if let Some(&bad) = starts.iter().find(|&&n| !graph.contains(n) || graph.type_of(n) != want) {
        if !graph.contains(bad) {
            return Err(Error::MissingNode(bad.to_string()));
        }
        return Err(Error::TypeMismatch {
            left: graph.name(bad).to_owned(),
            left_type: graph.node_type_name(graph.type_of(bad)).to_owned(),
            right: "half path start".to_owned(),
            right_type: graph.node_type_name(want).to_owned(),
        });
    }
    let mut unique = starts.to_vec();
    unique.sort_unstable();
    unique.dedup();
    let n = graph.node_count();
    let rows = unique
        .par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, &s| walk_half(graph, s, half, scratch).map(|row| (s, row)),
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(ReachabilityMap {
        half: half.clone(),
        reach: rows.into_iter().collect(),
    })
}

/// Sparse count rows: `map[a][b]` = number of full walks from `a` to `b`.
pub type PairMap = HashMap<NodeIdx, HashMap<NodeIdx, Count>>;

/// Full symmetric-walk counts between candidate and reference nodes.
#[derive(Clone, Debug)]
pub struct PairCounts {
    end_type: NodeType,
    candidate_nodes: HashSet<NodeIdx>,
    reference_nodes: HashSet<NodeIdx>,
    /// candidate x reference
    pub a2b: Arc<PairMap>,
    /// candidate x candidate
    pub a2a: Arc<PairMap>,
    /// reference x reference
    pub b2b: Arc<PairMap>,
}

impl PairCounts {
    /// Type of both ends of the symmetric path.
    pub fn end_type(&self) -> NodeType {
        self.end_type
    }

    pub fn covers(&self, n: NodeIdx) -> bool {
        self.candidate_nodes.contains(&n) || self.reference_nodes.contains(&n)
    }

    /// Walk count between `x` and `y`, or `None` when the pair was not part
    /// of the computed node sets.
    pub fn count(&self, x: NodeIdx, y: NodeIdx) -> Option<Count> {
        let lookup = |m: &PairMap, a: NodeIdx, b: NodeIdx| m.get(&a).and_then(|r| r.get(&b)).copied().unwrap_or(0);
        let (xc, xr) = (self.candidate_nodes.contains(&x), self.reference_nodes.contains(&x));
        let (yc, yr) = (self.candidate_nodes.contains(&y), self.reference_nodes.contains(&y));
        if xc && yr {
            Some(lookup(&self.a2b, x, y))
        } else if xr && yc {
            // reversed walks of a symmetric path
            Some(lookup(&self.a2b, y, x))
        } else if xc && yc {
            Some(lookup(&self.a2a, x, y))
        } else if xr && yr {
            Some(lookup(&self.b2b, x, y))
        } else {
            None
        }
    }
}

fn invert(map: &ReachabilityMap) -> HashMap<NodeIdx, Vec<(NodeIdx, Count)>> {
    let mut starts: Vec<NodeIdx> = map.starts().collect();
    starts.sort_unstable();
    let mut inv: HashMap<NodeIdx, Vec<(NodeIdx, Count)>> = HashMap::new();
    for b in starts {
        for &(d, c) in map.get(b).unwrap() {
            inv.entry(d).or_default().push((b, c));
        }
    }
    inv
}

fn join(graph: &HeteroGraph, rows: &ReachabilityMap, cols: &ReachabilityMap) -> Result<PairMap> {
    let inv = invert(cols);
    let end = *rows.half.end_type();
    let center = rows.half.center;
    let mut starts: Vec<NodeIdx> = rows.starts().collect();
    starts.sort_unstable();
    let n = graph.node_count();
    let out = starts
        .par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, &a| -> Result<(NodeIdx, HashMap<NodeIdx, Count>)> {
                for &(d, ca) in rows.get(a).unwrap() {
                    match center {
                        Center::Node => {
                            for &(b, cb) in inv.get(&d).map_or(&[][..], Vec::as_slice) {
                                scratch.add(b, ca, cb)?;
                            }
                        }
                        Center::Edge(et) => {
                            for nb in graph.typed_neighbors(d, end) {
                                if et.is_none_or(|t| t == nb.etype) {
                                    for &(b, cb) in inv.get(&nb.node).map_or(&[][..], Vec::as_slice) {
                                        scratch.add(b, ca, cb)?;
                                    }
                                }
                            }
                        }
                    }
                }
                Ok((a, scratch.drain_sorted().into_iter().collect()))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().collect())
}

fn same_starts(a: &ReachabilityMap, b: &ReachabilityMap) -> bool {
    a.len() == b.len() && a.starts().all(|n| b.contains(n))
}

/// Joins candidate and reference reachability at the path center. Pairs
/// without any walk are omitted from the maps.
pub fn pair_counts(graph: &HeteroGraph, n2n_c: &ReachabilityMap, n2n_r: &ReachabilityMap) -> Result<PairCounts> {
    if n2n_c.half != n2n_r.half {
        return Err(Error::Config(
            "reachability maps were built over different half paths".into(),
        ));
    }
    let (a2b, a2a, b2b) = if same_starts(n2n_c, n2n_r) {
        let m = Arc::new(join(graph, n2n_c, n2n_c)?);
        (m.clone(), m.clone(), m)
    } else {
        (
            Arc::new(join(graph, n2n_c, n2n_r)?),
            Arc::new(join(graph, n2n_c, n2n_c)?),
            Arc::new(join(graph, n2n_r, n2n_r)?),
        )
    };
    Ok(PairCounts {
        end_type: *n2n_c.half.start_type(),
        candidate_nodes: n2n_c.starts().collect(),
        reference_nodes: n2n_r.starts().collect(),
        a2b,
        a2a,
        b2b,
    })
}

/// Nodes of `inst` whose type is `ty`, in slot order.
pub fn nodes_of_type(graph: &HeteroGraph, inst: &MotifInstance, ty: NodeType) -> Vec<NodeIdx> {
    inst.nodes()
        .iter()
        .copied()
        .filter(|&n| graph.type_of(n) == ty)
        .collect()
}

/// Motif-level self-walk count: walks from each same-typed node of the
/// motif back to itself plus walks between distinct same-typed nodes.
pub fn motif_self_paths(graph: &HeteroGraph, inst: &MotifInstance, counts: &PairCounts) -> Result<Count> {
    let group = nodes_of_type(graph, inst, counts.end_type());
    let mut total: Count = 0;
    for &x in &group {
        for &y in &group {
            let c = counts
                .count(x, y)
                .ok_or_else(|| Error::NotCovered(graph.name(if counts.covers(x) { y } else { x }).to_owned()))?;
            total = total.checked_add(c).ok_or(Error::CountOverflow)?;
        }
    }
    Ok(total)
}

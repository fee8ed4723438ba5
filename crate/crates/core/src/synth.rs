//! Seeded random heterogeneous graphs and queries drawn from them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIdx};
use crate::motif::MotifInstance;
use crate::query::{MetaPath, MotifPattern, PatternEdge, Slot, TypedPath, MAX_PATTERN_SLOTS};

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub node_types: usize,
    pub nodes: usize,
    /// Expected average degree.
    pub avg_degree: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_types == 0 || self.node_types > self.nodes {
            return Err(Error::Config(format!(
                "need between 1 and {} node types, got {}",
                self.nodes, self.node_types
            )));
        }
        if self.nodes < 2 {
            return Err(Error::Config("need at least 2 nodes".into()));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree < self.nodes as f64) {
            return Err(Error::Config(format!(
                "average degree must be in (0, n): k = {}, n = {}",
                self.avg_degree, self.nodes
            )));
        }
        Ok(())
    }
}

/// Node `i` is `v{i}` of type `T{i mod c}`. Every unordered node pair is
/// joined by one `link` edge independently with probability `k / (n - 1)`,
/// so the expected degree is `k` regardless of type.
pub fn random_graph(cfg: &SynthConfig) -> Result<HeteroGraph> {
    cfg.validate()?;
    let mut rng = rng(cfg.seed);
    let mut g = HeteroGraph::new();
    let types: Vec<String> = (0..cfg.node_types).map(|t| format!("T{t}")).collect();
    let nodes: Vec<NodeIdx> = (0..cfg.nodes)
        .map(|i| g.add_node(&format!("v{i}"), &types[i % cfg.node_types]))
        .collect::<Result<_>>()?;
    let p = cfg.avg_degree / (cfg.nodes - 1) as f64;
    for i in 0..cfg.nodes {
        for j in i + 1..cfg.nodes {
            if rng.gen_bool(p) {
                g.add_edge(nodes[i], nodes[j], "link", 1.0)?;
            }
        }
    }
    Ok(g)
}

/// Realized average degree.
pub fn average_degree(g: &HeteroGraph) -> f64 {
    if g.node_count() == 0 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / g.node_count() as f64
    }
}

/// Grows a connected node set of `size` nodes from a random non-isolated
/// node and turns it into a pattern (slot types and induced edges) together
/// with the instance it came from.
pub fn random_motif(g: &HeteroGraph, size: usize, rng: &mut SynthRng) -> Option<(MotifPattern, MotifInstance)> {
    if size == 0 || size > MAX_PATTERN_SLOTS {
        return None;
    }
    let roots: Vec<NodeIdx> = g.nodes().filter(|&n| g.degree(n) > 0).collect();
    let &root = roots.choose(rng)?;
    let mut chosen = vec![root];
    while chosen.len() < size {
        let frontier: Vec<NodeIdx> = chosen
            .iter()
            .flat_map(|&u| g.neighbors(u).map(|nb| nb.node))
            .filter(|n| !chosen.contains(n))
            .collect();
        chosen.push(*frontier.choose(rng)?);
    }
    let slots = chosen
        .iter()
        .enumerate()
        .map(|(i, &n)| Slot {
            id: format!("S{i}"),
            node_type: g.type_of(n),
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..size {
        for b in a + 1..size {
            if g.has_edge(chosen[a], chosen[b], None) {
                edges.push(PatternEdge { a, b, edge_type: None });
            }
        }
    }
    let pattern = MotifPattern::new(slots, edges).ok()?;
    Some((pattern, MotifInstance::new(chosen)))
}

/// Types along a random walk of `len` nodes starting at `from`.
pub fn random_walk_types(g: &HeteroGraph, from: NodeIdx, len: usize, rng: &mut SynthRng) -> Option<TypedPath> {
    let mut types = vec![g.type_of(from)];
    let mut at = from;
    for _ in 1..len {
        let nbs: Vec<NodeIdx> = g.neighbors(at).map(|nb| nb.node).collect();
        at = *nbs.choose(rng)?;
        types.push(g.type_of(at));
    }
    Some(MetaPath::new(types))
}

/// A symmetric path with `len` types whose first half follows a random walk
/// from `from`. Even lengths need an edge between two nodes of the center
/// type somewhere in the graph.
pub fn random_symmetric_path(g: &HeteroGraph, from: NodeIdx, len: usize, rng: &mut SynthRng) -> Option<TypedPath> {
    if len < 2 {
        return None;
    }
    if len % 2 == 1 {
        return Some(random_walk_types(g, from, len / 2 + 1, rng)?.symmetrize());
    }
    let half = random_walk_types(g, from, len / 2, rng)?;
    let center = *half.end_type();
    if !g.schema_has(center, center, None) {
        return None;
    }
    let mut types = half.types.clone();
    types.extend(half.types.iter().rev());
    Some(MetaPath::new(types))
}

/// Random weight from a set that scales exactly in binary floating point.
pub fn random_weight(rng: &mut SynthRng) -> f64 {
    *[0.5, 1.0, 2.0, 3.0].choose(rng).unwrap()
}

pub fn shuffled<T: Clone>(items: &[T], rng: &mut SynthRng) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::is_instance;

    fn cfg(seed: u64) -> SynthConfig {
        SynthConfig {
            node_types: 3,
            nodes: 30,
            avg_degree: 4.0,
            seed,
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        let a = random_graph(&cfg(7)).unwrap();
        let b = random_graph(&cfg(7)).unwrap();
        let c = random_graph(&cfg(8)).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), c.edges());
        assert_eq!(a.node_types().len(), 3);
    }

    #[test]
    fn degree_near_target() {
        let g = random_graph(&SynthConfig {
            node_types: 4,
            nodes: 2000,
            avg_degree: 8.0,
            seed: 1,
        })
        .unwrap();
        assert!((average_degree(&g) - 8.0).abs() < 0.5, "{}", average_degree(&g));
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            SynthConfig {
                avg_degree: 30.0,
                ..cfg(0)
            },
            SynthConfig {
                node_types: 0,
                ..cfg(0)
            },
            SynthConfig {
                nodes: 1,
                node_types: 1,
                ..cfg(0)
            },
        ] {
            assert!(random_graph(&bad).is_err());
        }
    }

    #[test]
    fn motifs_and_paths_fit_the_graph() {
        let g = random_graph(&cfg(3)).unwrap();
        let mut r = rng(3);
        for size in 1..=4 {
            let (p, m) = random_motif(&g, size, &mut r).unwrap();
            assert!(is_instance(&g, &p, &m));
        }
        let from = g.nodes().find(|&n| g.degree(n) > 0).unwrap();
        for len in [3, 5, 7] {
            let p = random_symmetric_path(&g, from, len, &mut r).unwrap();
            assert_eq!(p.len(), len);
            assert!(p.is_symmetric());
        }
    }
}

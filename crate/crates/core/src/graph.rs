//! Typed, undirected multigraph with per-type adjacency.
//!
//! Every node carries a [`NodeType`] and every edge an [`EdgeType`]; both are
//! interned from string labels. Adjacency lists are partitioned by the type
//! of the neighbour so that meta-path walks only ever touch conforming edges.
//!
//! The graph is built through `&mut` methods and then shared immutably
//! (`&HeteroGraph` is `Sync`) by every downstream stage.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeType(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeType(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIdx(pub u32);

impl NodeIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIdx(pub u32);

/// Bijective label <-> id table.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u16>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u16 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = u16::try_from(self.names.len()).expect("more than 65535 interned types");
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u16> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u16) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// How raw node ids are scoped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IdScope {
    /// One id names one node; re-adding it under another type is a conflict.
    #[default]
    Global,
    /// Identity is the pair (type, id); the same string may name nodes of
    /// different types.
    PerType,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: NodeIdx,
    pub dst: NodeIdx,
    pub etype: EdgeType,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub node: NodeIdx,
    pub edge: EdgeIdx,
    pub etype: EdgeType,
}

#[derive(Clone, Debug, Default)]
pub struct HeteroGraph {
    scope: IdScope,
    node_types: Interner,
    edge_types: Interner,
    names: Vec<String>,
    types: Vec<NodeType>,
    by_key: HashMap<(NodeType, String), NodeIdx>,
    by_name: HashMap<String, NodeIdx>,
    by_type: Vec<Vec<NodeIdx>>,
    edges: Vec<Edge>,
    // adjacency[node][neighbour type]
    adjacency: Vec<Vec<Vec<Neighbor>>>,
}

impl HeteroGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_scope(scope: IdScope) -> Self {
        Self {
            scope,
            ..Self::default()
        }
    }

    pub fn scope(&self) -> IdScope {
        self.scope
    }

    pub fn intern_node_type(&mut self, name: &str) -> NodeType {
        let ty = NodeType(self.node_types.intern(name));
        if self.by_type.len() <= ty.0 as usize {
            self.by_type.resize_with(ty.0 as usize + 1, Vec::new);
        }
        ty
    }

    pub fn intern_edge_type(&mut self, name: &str) -> EdgeType {
        EdgeType(self.edge_types.intern(name))
    }

    pub fn add_node(&mut self, id: &str, ty: &str) -> Result<NodeIdx> {
        let ty = self.intern_node_type(ty);
        self.add_typed_node(id, ty)
    }

    pub fn add_typed_node(&mut self, id: &str, ty: NodeType) -> Result<NodeIdx> {
        if let Some(&existing) = self.by_key.get(&(ty, id.to_owned())) {
            return Ok(existing);
        }
        if self.scope == IdScope::Global {
            if let Some(&existing) = self.by_name.get(id) {
                return Err(Error::TypeConflict {
                    id: id.to_owned(),
                    existing: self.node_type_name(self.types[existing.index()]).to_owned(),
                    requested: self.node_type_name(ty).to_owned(),
                });
            }
        }
        let idx = NodeIdx(u32::try_from(self.names.len()).expect("node index overflow"));
        self.names.push(id.to_owned());
        self.types.push(ty);
        self.by_key.insert((ty, id.to_owned()), idx);
        self.by_name.entry(id.to_owned()).or_insert(idx);
        self.by_type[ty.0 as usize].push(idx);
        self.adjacency.push(Vec::new());
        Ok(idx)
    }

    pub fn add_edge(&mut self, src: NodeIdx, dst: NodeIdx, etype: &str, weight: f64) -> Result<EdgeIdx> {
        for n in [src, dst] {
            if n.index() >= self.names.len() {
                return Err(Error::MissingNode(n.to_string()));
            }
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Config(format!("edge weight must be nonnegative, got {weight}")));
        }
        let etype = self.intern_edge_type(etype);
        let edge = EdgeIdx(u32::try_from(self.edges.len()).expect("edge index overflow"));
        self.edges.push(Edge {
            src,
            dst,
            etype,
            weight,
        });
        let (src_ty, dst_ty) = (self.types[src.index()], self.types[dst.index()]);
        self.push_neighbor(src, dst_ty, Neighbor { node: dst, edge, etype });
        // self-loops appear twice in their node's list, so degree counts them twice
        self.push_neighbor(dst, src_ty, Neighbor { node: src, edge, etype });
        Ok(edge)
    }

    /// Adds an edge between two nodes looked up by raw id.
    pub fn add_edge_by_id(&mut self, src: &str, dst: &str, etype: &str, weight: f64) -> Result<EdgeIdx> {
        let s = self.lookup(src).ok_or_else(|| Error::MissingNode(src.to_owned()))?;
        let d = self.lookup(dst).ok_or_else(|| Error::MissingNode(dst.to_owned()))?;
        self.add_edge(s, d, etype, weight)
    }

    fn push_neighbor(&mut self, at: NodeIdx, ty: NodeType, n: Neighbor) {
        let lists = &mut self.adjacency[at.index()];
        if lists.len() <= ty.0 as usize {
            lists.resize_with(ty.0 as usize + 1, Vec::new);
        }
        lists[ty.0 as usize].push(n);
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeIdx> + '_ {
        (0..self.names.len() as u32).map(NodeIdx)
    }

    pub fn node_types(&self) -> &Interner {
        &self.node_types
    }

    pub fn edge_types(&self) -> &Interner {
        &self.edge_types
    }

    pub fn node_type_id(&self, name: &str) -> Option<NodeType> {
        self.node_types.get(name).map(NodeType)
    }

    pub fn edge_type_id(&self, name: &str) -> Option<EdgeType> {
        self.edge_types.get(name).map(EdgeType)
    }

    pub fn node_type_name(&self, ty: NodeType) -> &str {
        self.node_types.name(ty.0)
    }

    pub fn edge_type_name(&self, ty: EdgeType) -> &str {
        self.edge_types.name(ty.0)
    }

    pub fn contains(&self, node: NodeIdx) -> bool {
        node.index() < self.names.len()
    }

    pub fn name(&self, node: NodeIdx) -> &str {
        &self.names[node.index()]
    }

    pub fn type_of(&self, node: NodeIdx) -> NodeType {
        self.types[node.index()]
    }

    /// Finds a node by raw id regardless of type. Under [`IdScope::PerType`]
    /// the earliest-added node with that id wins.
    pub fn lookup(&self, id: &str) -> Option<NodeIdx> {
        self.by_name.get(id).copied()
    }

    pub fn find(&self, ty: NodeType, id: &str) -> Option<NodeIdx> {
        self.by_key.get(&(ty, id.to_owned())).copied()
    }

    pub fn nodes_of_type(&self, ty: NodeType) -> &[NodeIdx] {
        self.by_type.get(ty.0 as usize).map_or(&[], Vec::as_slice)
    }

    /// Neighbours of `node` whose type is `ty`, parallel edges repeated.
    pub fn neighbors_by_type(&self, node: NodeIdx, ty: NodeType) -> Result<&[Neighbor]> {
        if !self.contains(node) {
            return Err(Error::MissingNode(node.to_string()));
        }
        Ok(self.typed_neighbors(node, ty))
    }

    /// Unchecked variant of [`Self::neighbors_by_type`] for hot loops.
    #[inline]
    pub fn typed_neighbors(&self, node: NodeIdx, ty: NodeType) -> &[Neighbor] {
        self.adjacency[node.index()]
            .get(ty.0 as usize)
            .map_or(&[], Vec::as_slice)
    }

    pub fn neighbors(&self, node: NodeIdx) -> impl Iterator<Item = &Neighbor> + '_ {
        self.adjacency[node.index()].iter().flatten()
    }

    pub fn weight(&self, edge: EdgeIdx) -> f64 {
        self.edges[edge.0 as usize].weight
    }

    pub fn degree(&self, node: NodeIdx) -> usize {
        self.adjacency[node.index()].iter().map(Vec::len).sum()
    }

    /// Number of `u`–`v` edges, optionally restricted to one edge type.
    pub fn edge_multiplicity(&self, u: NodeIdx, v: NodeIdx, etype: Option<EdgeType>) -> usize {
        let (from, to) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        let hits = self
            .typed_neighbors(from, self.type_of(to))
            .iter()
            .filter(|n| n.node == to && etype.is_none_or(|t| t == n.etype))
            .count();
        if u == v {
            // a self-loop is listed twice at its node
            hits / 2
        } else {
            hits
        }
    }

    pub fn has_edge(&self, u: NodeIdx, v: NodeIdx, etype: Option<EdgeType>) -> bool {
        self.edge_multiplicity(u, v, etype) > 0
    }

    /// True when at least one edge joins a node of type `a` with one of type `b`
    /// (restricted to `etype` if given).
    pub fn schema_has(&self, a: NodeType, b: NodeType, etype: Option<EdgeType>) -> bool {
        self.edges.iter().any(|e| {
            let (s, d) = (self.type_of(e.src), self.type_of(e.dst));
            ((s == a && d == b) || (s == b && d == a)) && etype.is_none_or(|t| t == e.etype)
        })
    }

    /// Drops every node whose degree exceeds its type's threshold, together
    /// with incident edges. Degrees are read from `self` once, before any
    /// removal. Types without a threshold are never filtered.
    pub fn filter_high_degree(&self, thresholds: &HashMap<NodeType, usize>) -> HeteroGraph {
        let keep: Vec<bool> = self
            .nodes()
            .map(|n| {
                thresholds
                    .get(&self.type_of(n))
                    .is_none_or(|&limit| self.degree(n) <= limit)
            })
            .collect();

        let mut out = HeteroGraph {
            scope: self.scope,
            node_types: self.node_types.clone(),
            edge_types: self.edge_types.clone(),
            by_type: vec![Vec::new(); self.by_type.len()],
            ..HeteroGraph::default()
        };
        let mut remap = vec![None; self.node_count()];
        for n in self.nodes().filter(|n| keep[n.index()]) {
            let idx = out
                .add_typed_node(self.name(n), self.type_of(n))
                .expect("source graph ids are consistent");
            remap[n.index()] = Some(idx);
        }
        for e in &self.edges {
            if let (Some(s), Some(d)) = (remap[e.src.index()], remap[e.dst.index()]) {
                let name = self.edge_type_name(e.etype).to_owned();
                out.add_edge(s, d, &name, e.weight).expect("endpoints were kept");
            }
        }
        out
    }

    /// Resolves a name-keyed threshold map; unknown type names are ignored.
    pub fn thresholds_by_name<'a, I>(&self, named: I) -> HashMap<NodeType, usize>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        named
            .into_iter()
            .filter_map(|(name, limit)| self.node_type_id(name).map(|t| (t, limit)))
            .collect()
    }
}

//! Meta paths: typed walk templates over the graph schema.

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeType, HeteroGraph, NodeType};

/// An ordered node-type sequence, optionally pinned to edge types between
/// consecutive positions, carrying a positive weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaPath<N, E> {
    pub types: Vec<N>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_types: Option<Vec<E>>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

/// Meta path over type labels, as written in a query document.
pub type NamedPath = MetaPath<String, String>;
/// Meta path resolved against a graph's interned types.
pub type TypedPath = MetaPath<NodeType, EdgeType>;

/// Where the two halves of a symmetric path meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Center<E> {
    /// Odd number of types: the halves share the center node.
    Node,
    /// Even number of types: the halves are joined by one edge between two
    /// nodes of the last half type.
    Edge(Option<E>),
}

/// Prefix of a symmetric path up to (and including) its center.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPath<N, E> {
    pub types: Vec<N>,
    pub edge_types: Option<Vec<E>>,
    pub center: Center<E>,
}

impl<N, E> HalfPath<N, E> {
    pub fn start_type(&self) -> &N {
        &self.types[0]
    }

    pub fn end_type(&self) -> &N {
        self.types.last().expect("half path is never empty")
    }

    /// Edge type constraint for the step leaving position `i`.
    pub fn edge_type(&self, i: usize) -> Option<&E> {
        self.edge_types.as_ref().map(|e| &e[i])
    }
}

impl<N: Clone + PartialEq, E: Clone + PartialEq> MetaPath<N, E> {
    pub fn new(types: Vec<N>) -> Self {
        Self {
            types,
            edge_types: None,
            weight: 1.0,
        }
    }

    pub fn with_edge_types(mut self, edge_types: Vec<E>) -> Self {
        self.edge_types = Some(edge_types);
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// Number of node types (a walk of this path has `len() - 1` edges).
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn start_type(&self) -> &N {
        &self.types[0]
    }

    pub fn end_type(&self) -> &N {
        self.types.last().expect("meta path is never empty")
    }

    pub fn edge_type(&self, i: usize) -> Option<&E> {
        self.edge_types.as_ref().map(|e| &e[i])
    }

    /// True iff reversing the type sequence (and edge types) gives it back.
    pub fn is_symmetric(&self) -> bool {
        let palindrome = |v: &[N]| v.iter().eq(v.iter().rev());
        palindrome(&self.types) && self.edge_types.as_ref().is_none_or(|e| e.iter().eq(e.iter().rev()))
    }

    pub fn reversed(&self) -> Self {
        Self {
            types: self.types.iter().rev().cloned().collect(),
            edge_types: self.edge_types.as_ref().map(|e| e.iter().rev().cloned().collect()),
            weight: self.weight,
        }
    }

    /// The path followed by its own reverse, sharing the last type once.
    pub fn symmetrize(&self) -> Self {
        let mut types = self.types.clone();
        types.extend(self.types.iter().rev().skip(1).cloned());
        let edge_types = self.edge_types.as_ref().map(|e| {
            let mut out = e.clone();
            out.extend(e.iter().rev().cloned());
            out
        });
        Self {
            types,
            edge_types,
            weight: self.weight,
        }
    }

    /// Splits a symmetric path at its center. Returns `None` for asymmetric
    /// or empty paths.
    pub fn half(&self) -> Option<HalfPath<N, E>> {
        if self.types.is_empty() || !self.is_symmetric() {
            return None;
        }
        let len = self.types.len();
        if len % 2 == 1 {
            let h = len / 2;
            Some(HalfPath {
                types: self.types[..=h].to_vec(),
                edge_types: self.edge_types.as_ref().map(|e| e[..h].to_vec()),
                center: Center::Node,
            })
        } else {
            let h = len / 2;
            Some(HalfPath {
                types: self.types[..h].to_vec(),
                edge_types: self.edge_types.as_ref().map(|e| e[..h - 1].to_vec()),
                center: Center::Edge(self.edge_types.as_ref().map(|e| e[h - 1].clone())),
            })
        }
    }
}

impl NamedPath {
    pub fn named<S: AsRef<str>>(types: &[S]) -> Self {
        Self::new(types.iter().map(|s| s.as_ref().to_owned()).collect())
    }

    /// Dash-joined display form, e.g. `author-term-author`.
    pub fn label(&self) -> String {
        self.types.join("-")
    }

    /// Resolves type labels against the graph; the error names the first
    /// unknown label.
    pub fn resolve(&self, graph: &HeteroGraph) -> Result<TypedPath, String> {
        let types = self
            .types
            .iter()
            .map(|t| graph.node_type_id(t).ok_or_else(|| format!("unknown node type `{t}`")))
            .collect::<Result<Vec<_>, _>>()?;
        let edge_types = match &self.edge_types {
            None => None,
            Some(es) => Some(
                es.iter()
                    .map(|e| graph.edge_type_id(e).ok_or_else(|| format!("unknown edge type `{e}`")))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(TypedPath {
            types,
            edge_types,
            weight: self.weight,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(types: &[&str]) -> NamedPath {
        NamedPath::named(types)
    }

    #[test]
    fn symmetry() {
        assert!(p(&["author", "term", "author"]).is_symmetric());
        assert!(!p(&["author", "term"]).is_symmetric());
        assert!(p(&["term", "author", "term"]).is_symmetric());
        assert!(p(&["author", "term", "term", "author"]).is_symmetric());
        let typed = p(&["a", "b", "a"]).with_edge_types(vec!["x".into(), "y".into()]);
        assert!(!typed.is_symmetric());
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(p(&["author", "term"]).symmetrize(), p(&["author", "term", "author"]));
        assert_eq!(
            p(&["author", "term", "venue"]).symmetrize(),
            p(&["author", "term", "venue", "term", "author"])
        );
        let sym = p(&["author", "term", "venue", "term", "author"]);
        let half = sym.half().unwrap();
        assert_eq!(
            p(&half.types.iter().map(String::as_str).collect::<Vec<_>>()).symmetrize(),
            sym
        );
    }

    #[test]
    fn symmetrize_edge_types() {
        let path = p(&["a", "b", "c"]).with_edge_types(vec!["x".into(), "y".into()]);
        let s = path.symmetrize();
        assert_eq!(s.edge_types.as_deref().unwrap(), ["x", "y", "y", "x"]);
        assert!(s.is_symmetric());
    }

    #[test]
    fn halves() {
        let odd = p(&["a", "b", "c", "b", "a"]).half().unwrap();
        assert_eq!(odd.types, ["a", "b", "c"]);
        assert_eq!(odd.center, Center::Node);

        let even = p(&["a", "b", "b", "a"])
            .with_edge_types(vec!["x".into(), "y".into(), "x".into()])
            .half()
            .unwrap();
        assert_eq!(even.types, ["a", "b"]);
        assert_eq!(even.edge_types.as_deref().unwrap(), ["x"]);
        assert_eq!(even.center, Center::Edge(Some("y".to_owned())));

        assert!(p(&["a", "b"]).half().is_none());
    }
}

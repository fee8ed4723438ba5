//! The user query: a target pattern, start motifs, search paths for
//! candidate generation and symmetric score paths for similarity.
//!
//! Queries are JSON documents:
//!
//! ```json
//! {
//!   "pattern": {"slots": [{"id": "A1", "type": "author"}, ...], "edges": [["A1", "A2"], ...]},
//!   "start": [{"A1": "a1", "A2": "a2", "T": "t1"}],
//!   "search_paths": [["author", "term", "author"]],
//!   "score_paths": [{"types": ["author", "term", "author"], "weight": 1.0}],
//!   "reference": "candidates",
//!   "metric": "mos",
//!   "top_k": 10,
//!   "degree_thresholds": {"term": 5000}
//! }
//! ```

mod metapath;
mod pattern;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use metapath::{Center, HalfPath, MetaPath, NamedPath, TypedPath};
pub use pattern::{MotifPattern, PatternEdge, PatternEdgeSpec, PatternSpec, Slot, SlotSpec, MAX_PATTERN_SLOTS};

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIdx};
use crate::motif::MotifInstance;
use crate::scoring::Metric;

pub const DEFAULT_TOP_K: usize = 10;

/// Node ids bound to a pattern's slots, in slot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec(pub Vec<String>);

#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceSource {
    /// Score candidates against the candidate set itself.
    SameAsCandidates,
    /// Score against user-given motifs, expanded over the search paths when
    /// `expand` is set.
    UserProvided { instances: Vec<InstanceSpec>, expand: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuerySpec {
    pub pattern: PatternSpec,
    pub start: Vec<InstanceSpec>,
    pub search_paths: Vec<NamedPath>,
    pub score_paths: Vec<NamedPath>,
    pub reference: ReferenceSource,
    pub metric: Metric,
    pub top_k: usize,
    pub degree_thresholds: BTreeMap<String, usize>,
}

/// One reason a query cannot run against a given graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

// ---- wire format ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryDoc {
    pattern: PatternDoc,
    start: Vec<BTreeMap<String, String>>,
    #[serde(default)]
    search_paths: Vec<PathDoc>,
    score_paths: Vec<PathDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    degree_thresholds: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    slots: Vec<SlotDoc>,
    #[serde(default)]
    edges: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotDoc {
    id: String,
    #[serde(rename = "type")]
    node_type: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PathDoc {
    Types(Vec<String>),
    Full(NamedPath),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ReferenceDoc {
    Keyword(String),
    List(Vec<BTreeMap<String, String>>),
    Full {
        instances: Vec<BTreeMap<String, String>>,
        #[serde(default = "yes")]
        expand: bool,
    },
}

fn yes() -> bool {
    true
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::QueryParse {
        path: path.into(),
        message: message.into(),
    }
}

// ---- parse / serialize ---------------------------------------------------

/// Parses and structurally checks a query document. Graph-dependent checks
/// live in [`validate`].
pub fn parse_query(document: &str) -> Result<QuerySpec> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: QueryDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_err(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })?;
    from_doc(doc)
}

fn from_doc(doc: QueryDoc) -> Result<QuerySpec> {
    let pattern = parse_pattern(doc.pattern)?;

    if doc.start.is_empty() {
        return Err(parse_err("start", "at least one start instance is required"));
    }
    let start = doc
        .start
        .iter()
        .enumerate()
        .map(|(i, b)| parse_binding(&pattern, b, &format!("start[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    let search_paths = doc
        .search_paths
        .into_iter()
        .enumerate()
        .map(|(i, p)| check_path(p.into_path(), &format!("search_paths[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    if doc.score_paths.is_empty() {
        return Err(parse_err("score_paths", "at least one score path is required"));
    }
    let pattern_types: HashSet<&str> = pattern.slots.iter().map(|s| s.node_type.as_str()).collect();
    let score_paths = doc
        .score_paths
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let at = format!("score_paths[{i}]");
            let p = check_path(p.into_path(), &at)?;
            if !p.is_symmetric() {
                return Err(parse_err(at, format!("score path not symmetric: {}", p.label())));
            }
            if !pattern_types.contains(p.start_type().as_str()) {
                return Err(parse_err(
                    at,
                    format!(
                        "score path must start at a pattern type, `{}` is not in the pattern",
                        p.start_type()
                    ),
                ));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;

    let reference = match doc.reference {
        None => ReferenceSource::SameAsCandidates,
        Some(ReferenceDoc::Keyword(k)) if k == "candidates" => ReferenceSource::SameAsCandidates,
        Some(ReferenceDoc::Keyword(k)) => {
            return Err(parse_err(
                "reference",
                format!("expected \"candidates\" or a list of instances, got \"{k}\""),
            ))
        }
        Some(ReferenceDoc::List(list)) => ReferenceSource::UserProvided {
            instances: parse_bindings(&pattern, &list)?,
            expand: true,
        },
        Some(ReferenceDoc::Full { instances, expand }) => ReferenceSource::UserProvided {
            instances: parse_bindings(&pattern, &instances)?,
            expand,
        },
    };

    let metric = match doc.metric {
        None => Metric::default(),
        Some(m) => m.parse().map_err(|e: String| parse_err("metric", e))?,
    };
    let top_k = doc.top_k.unwrap_or(DEFAULT_TOP_K);
    if top_k == 0 {
        return Err(parse_err("top_k", "must be positive"));
    }

    Ok(QuerySpec {
        pattern,
        start,
        search_paths,
        score_paths,
        reference,
        metric,
        top_k,
        degree_thresholds: doc.degree_thresholds,
    })
}

impl PathDoc {
    fn into_path(self) -> NamedPath {
        match self {
            PathDoc::Types(types) => NamedPath::new(types),
            PathDoc::Full(p) => p,
        }
    }
}

fn parse_pattern(doc: PatternDoc) -> Result<PatternSpec> {
    if doc.slots.is_empty() {
        return Err(parse_err("pattern.slots", "pattern needs at least one slot"));
    }
    if doc.slots.len() > MAX_PATTERN_SLOTS {
        return Err(parse_err(
            "pattern.slots",
            format!("at most {MAX_PATTERN_SLOTS} slots are supported"),
        ));
    }
    let mut ids = HashSet::new();
    for (i, s) in doc.slots.iter().enumerate() {
        if !ids.insert(s.id.clone()) {
            return Err(parse_err(
                format!("pattern.slots[{i}].id"),
                format!("duplicate slot id `{}`", s.id),
            ));
        }
    }
    let slots: Vec<SlotSpec> = doc
        .slots
        .into_iter()
        .map(|s| SlotSpec {
            id: s.id,
            node_type: s.node_type,
        })
        .collect();
    let mut edges = Vec::new();
    for (i, e) in doc.edges.into_iter().enumerate() {
        let at = format!("pattern.edges[{i}]");
        if !(2..=3).contains(&e.len()) {
            return Err(parse_err(at, "an edge is [slot, slot] or [slot, slot, edge_type]"));
        }
        for s in &e[..2] {
            if !ids.contains(s.as_str()) {
                return Err(parse_err(at, format!("unknown slot `{s}`")));
            }
        }
        if e[0] == e[1] {
            return Err(parse_err(at, "an edge must join two different slots"));
        }
        let mut it = e.into_iter();
        edges.push(PatternEdgeSpec {
            a: it.next().unwrap(),
            b: it.next().unwrap(),
            edge_type: it.next(),
        });
    }
    let spec = PatternSpec { slots, edges };
    if !is_connected(&spec) {
        return Err(parse_err("pattern.edges", "pattern is not connected"));
    }
    Ok(spec)
}

fn is_connected(p: &PatternSpec) -> bool {
    let n = p.slots.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(s) = stack.pop() {
        for e in &p.edges {
            let (a, b) = (p.slot_index(&e.a).unwrap(), p.slot_index(&e.b).unwrap());
            for (x, y) in [(a, b), (b, a)] {
                if x == s && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn parse_bindings(pattern: &PatternSpec, list: &[BTreeMap<String, String>]) -> Result<Vec<InstanceSpec>> {
    list.iter()
        .enumerate()
        .map(|(i, b)| parse_binding(pattern, b, &format!("reference[{i}]")))
        .collect()
}

fn parse_binding(pattern: &PatternSpec, binding: &BTreeMap<String, String>, at: &str) -> Result<InstanceSpec> {
    if let Some(extra) = binding.keys().find(|k| pattern.slot_index(k).is_none()) {
        return Err(parse_err(at, format!("unknown slot `{extra}`")));
    }
    pattern
        .slots
        .iter()
        .map(|s| {
            binding
                .get(&s.id)
                .cloned()
                .ok_or_else(|| parse_err(at, format!("slot `{}` is not bound", s.id)))
        })
        .collect::<Result<Vec<_>>>()
        .map(InstanceSpec)
}

fn check_path(p: NamedPath, at: &str) -> Result<NamedPath> {
    if p.len() < 2 {
        return Err(parse_err(at, "a meta path needs at least two node types"));
    }
    if let Some(e) = &p.edge_types {
        if e.len() != p.len() - 1 {
            return Err(parse_err(at, "edge_types must have one entry per step"));
        }
    }
    if !(p.weight > 0.0 && p.weight.is_finite()) {
        return Err(parse_err(at, "weight must be positive"));
    }
    Ok(p)
}

impl QuerySpec {
    fn binding_doc(&self, inst: &InstanceSpec) -> BTreeMap<String, String> {
        self.pattern
            .slots
            .iter()
            .map(|s| s.id.clone())
            .zip(inst.0.iter().cloned())
            .collect()
    }

    /// Canonical JSON form; [`parse_query`] reads it back to an equal spec.
    pub fn to_json(&self) -> String {
        let doc = QueryDoc {
            pattern: PatternDoc {
                slots: self
                    .pattern
                    .slots
                    .iter()
                    .map(|s| SlotDoc {
                        id: s.id.clone(),
                        node_type: s.node_type.clone(),
                    })
                    .collect(),
                edges: self
                    .pattern
                    .edges
                    .iter()
                    .map(|e| {
                        let mut v = vec![e.a.clone(), e.b.clone()];
                        v.extend(e.edge_type.clone());
                        v
                    })
                    .collect(),
            },
            start: self.start.iter().map(|s| self.binding_doc(s)).collect(),
            search_paths: self.search_paths.iter().cloned().map(PathDoc::Full).collect(),
            score_paths: self.score_paths.iter().cloned().map(PathDoc::Full).collect(),
            reference: Some(match &self.reference {
                ReferenceSource::SameAsCandidates => ReferenceDoc::Keyword("candidates".into()),
                ReferenceSource::UserProvided { instances, expand } => ReferenceDoc::Full {
                    instances: instances.iter().map(|s| self.binding_doc(s)).collect(),
                    expand: *expand,
                },
            }),
            metric: Some(self.metric.to_string()),
            top_k: Some(self.top_k),
            degree_thresholds: self.degree_thresholds.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("query document serializes")
    }
}

// ---- validation against a graph ------------------------------------------

/// A query resolved against a concrete graph.
#[derive(Clone, Debug)]
pub struct BoundQuery {
    pub pattern: MotifPattern,
    pub start: Vec<MotifInstance>,
    pub search_paths: Vec<TypedPath>,
    pub score_paths: Vec<TypedPath>,
    pub reference: ReferenceSource,
    pub metric: Metric,
    pub top_k: usize,
}

fn check_schema(graph: &HeteroGraph, path: &NamedPath, at: &str, out: &mut Vec<Violation>) {
    let typed = match path.resolve(graph) {
        Ok(t) => t,
        Err(msg) => {
            out.push(Violation::new(at, msg));
            return;
        }
    };
    for i in 0..typed.len() - 1 {
        let (a, b) = (typed.types[i], typed.types[i + 1]);
        if !graph.schema_has(a, b, typed.edge_type(i).copied()) {
            out.push(Violation::new(
                at,
                format!("no edge joins types `{}` and `{}`", path.types[i], path.types[i + 1]),
            ));
        }
    }
}

/// Resolves an instance's node ids under the pattern's slot types and checks
/// that every pattern edge is present. Error strings are human-readable.
pub fn resolve_instance(
    graph: &HeteroGraph,
    pattern: &MotifPattern,
    inst: &InstanceSpec,
) -> std::result::Result<MotifInstance, Vec<String>> {
    let mut problems = Vec::new();
    let nodes: Vec<Option<NodeIdx>> = pattern
        .slots()
        .iter()
        .zip(&inst.0)
        .map(|(slot, id)| {
            let found = graph.find(slot.node_type, id);
            if found.is_none() {
                problems.push(format!(
                    "slot `{}`: node `{id}` of type `{}` not found",
                    slot.id,
                    graph.node_type_name(slot.node_type)
                ));
            }
            found
        })
        .collect();
    if !problems.is_empty() {
        return Err(problems);
    }
    let nodes: Vec<NodeIdx> = nodes.into_iter().map(Option::unwrap).collect();
    let mut seen = HashSet::new();
    for (slot, &n) in pattern.slots().iter().zip(&nodes) {
        if !seen.insert(n) {
            problems.push(format!("slot `{}`: node `{}` is bound twice", slot.id, graph.name(n)));
        }
    }
    for e in pattern.edges() {
        if !graph.has_edge(nodes[e.a], nodes[e.b], e.edge_type) {
            problems.push(format!(
                "pattern edge {}–{} missing in graph ({}–{})",
                pattern.slots()[e.a].id,
                pattern.slots()[e.b].id,
                inst.0[e.a],
                inst.0[e.b]
            ));
        }
    }
    if problems.is_empty() {
        Ok(MotifInstance::new(nodes))
    } else {
        Err(problems)
    }
}

/// Lists every reason `spec` cannot run on `graph`; empty means valid.
pub fn validate(spec: &QuerySpec, graph: &HeteroGraph) -> Vec<Violation> {
    bind_inner(spec, graph).err().unwrap_or_default()
}

/// Validates and resolves the query in one step.
pub fn bind(spec: &QuerySpec, graph: &HeteroGraph) -> Result<BoundQuery> {
    bind_inner(spec, graph).map_err(Error::InvalidQuery)
}

fn bind_inner(spec: &QuerySpec, graph: &HeteroGraph) -> std::result::Result<BoundQuery, Vec<Violation>> {
    let mut out = Vec::new();
    for (i, s) in spec.pattern.slots.iter().enumerate() {
        if graph.node_type_id(&s.node_type).is_none() {
            out.push(Violation::new(
                format!("pattern.slots[{i}]"),
                format!("unknown node type `{}`", s.node_type),
            ));
        }
    }
    for (i, e) in spec.pattern.edges.iter().enumerate() {
        if let Some(t) = &e.edge_type {
            if graph.edge_type_id(t).is_none() {
                out.push(Violation::new(
                    format!("pattern.edges[{i}]"),
                    format!("unknown edge type `{t}`"),
                ));
            }
        }
    }
    for (i, p) in spec.search_paths.iter().enumerate() {
        check_schema(graph, p, &format!("search_paths[{i}]"), &mut out);
    }
    for (i, p) in spec.score_paths.iter().enumerate() {
        check_schema(graph, p, &format!("score_paths[{i}]"), &mut out);
    }
    if !out.is_empty() {
        return Err(out);
    }

    let pattern = spec
        .pattern
        .resolve(graph)
        .map_err(|e| vec![Violation::new("pattern", e.to_string())])?;
    let mut start = Vec::new();
    for (i, inst) in spec.start.iter().enumerate() {
        match resolve_instance(graph, &pattern, inst) {
            Ok(m) => start.push(m),
            Err(problems) => out.extend(problems.into_iter().map(|p| Violation::new(format!("start[{i}]"), p))),
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let resolve_all = |paths: &[NamedPath]| -> Vec<TypedPath> {
        paths.iter().map(|p| p.resolve(graph).expect("checked above")).collect()
    };
    Ok(BoundQuery {
        pattern,
        start,
        search_paths: resolve_all(&spec.search_paths),
        score_paths: resolve_all(&spec.score_paths),
        reference: spec.reference.clone(),
        metric: spec.metric,
        top_k: spec.top_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, G1_QUERY};

    #[test]
    fn parses_g1_query() {
        let q = parse_query(G1_QUERY).unwrap();
        assert_eq!(q.score_paths.len(), 2);
        assert_eq!(q.search_paths, vec![NamedPath::named(&["author", "term", "author"])]);
        assert_eq!(q.start, vec![InstanceSpec(vec!["a1".into(), "a2".into(), "t1".into()])]);
        assert_eq!(q.reference, ReferenceSource::SameAsCandidates);
        // defaults
        assert_eq!(q.metric, Metric::Mos);
        assert_eq!(q.top_k, 10);
        assert!(q.score_paths.iter().all(|p| p.weight == 1.0));
    }

    fn with(field: &str, value: serde_json::Value) -> String {
        let mut doc: serde_json::Value = serde_json::from_str(G1_QUERY).unwrap();
        doc[field] = value;
        doc.to_string()
    }

    #[test]
    fn asymmetric_score_path_is_rejected() {
        let doc = with(
            "score_paths",
            serde_json::json!([{"types": ["author", "term", "venue"]}]),
        );
        match parse_query(&doc) {
            Err(Error::QueryParse { path, message }) => {
                assert_eq!(path, "score_paths[0]");
                assert!(message.contains("score path not symmetric"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        // symmetric even-length paths are fine
        let doc = with("score_paths", serde_json::json!([["author", "term", "term", "author"]]));
        assert!(parse_query(&doc).is_ok());
    }

    #[test]
    fn schema_errors_carry_field_path() {
        let doc = with("top_k", serde_json::json!("ten"));
        match parse_query(&doc) {
            Err(Error::QueryParse { path, .. }) => assert_eq!(path, "top_k"),
            other => panic!("unexpected {other:?}"),
        }
        let doc = with("metric", serde_json::json!("jaccard"));
        assert!(matches!(parse_query(&doc), Err(Error::QueryParse { path, .. }) if path == "metric"));
        let doc = with("start", serde_json::json!([{"A1": "a1", "A2": "a2"}]));
        assert!(matches!(parse_query(&doc), Err(Error::QueryParse { path, .. }) if path == "start[0]"));
        let doc = with("score_paths", serde_json::json!([["venue", "author", "venue"]]));
        assert!(matches!(parse_query(&doc), Err(Error::QueryParse { .. })));
        let doc = with("bogus", serde_json::json!(1));
        assert!(matches!(parse_query(&doc), Err(Error::QueryParse { .. })));
    }

    #[test]
    fn reference_forms() {
        let doc = with("reference", serde_json::json!([{"A1": "a2", "A2": "a3", "T": "t3"}]));
        let q = parse_query(&doc).unwrap();
        assert!(
            matches!(q.reference, ReferenceSource::UserProvided { expand: true, ref instances } if instances.len() == 1)
        );
        let doc = with(
            "reference",
            serde_json::json!({"instances": [{"A1": "a2", "A2": "a3", "T": "t3"}], "expand": false}),
        );
        let q = parse_query(&doc).unwrap();
        assert!(matches!(
            q.reference,
            ReferenceSource::UserProvided { expand: false, .. }
        ));
        let doc = with("reference", serde_json::json!("everything"));
        assert!(parse_query(&doc).is_err());
    }

    #[test]
    fn serialize_round_trip() {
        let mut q = parse_query(G1_QUERY).unwrap();
        q.metric = Metric::CosSim;
        q.top_k = 3;
        q.degree_thresholds.insert("term".into(), 5000);
        q.score_paths[1].weight = 2.5;
        q.reference = ReferenceSource::UserProvided {
            instances: vec![InstanceSpec(vec!["a2".into(), "a3".into(), "t3".into()])],
            expand: false,
        };
        assert_eq!(parse_query(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn validate_g1() {
        let q = parse_query(G1_QUERY).unwrap();
        assert!(validate(&q, &g1()).is_empty());
        let b = bind(&q, &g1()).unwrap();
        assert_eq!(b.start.len(), 1);
    }

    #[test]
    fn missing_pattern_edge_is_a_violation() {
        let doc = with("start", serde_json::json!([{"A1": "a1", "A2": "a3", "T": "t1"}]));
        let v = validate(&parse_query(&doc).unwrap(), &g1());
        assert!(
            v.iter().any(|v| v.message.contains("A1–A2 missing in graph (a1–a3)")),
            "{v:?}"
        );
    }

    #[test]
    fn unknown_type_is_a_violation() {
        let doc = with("search_paths", serde_json::json!([["author", "venue"]]));
        let v = validate(&parse_query(&doc).unwrap(), &g1());
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("unknown node type `venue`"));
        assert_eq!(v[0].path, "search_paths[0]");
    }

    #[test]
    fn missing_start_node() {
        let doc = with("start", serde_json::json!([{"A1": "a1", "A2": "zz", "T": "t1"}]));
        let v = validate(&parse_query(&doc).unwrap(), &g1());
        assert!(v.iter().any(|v| v.message.contains("`zz`")));
        assert!(matches!(
            bind(&parse_query(&doc).unwrap(), &g1()),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn schema_pairs_are_checked() {
        // term-term never co-occur in G1
        let doc = with("search_paths", serde_json::json!([["author", "term", "term"]]));
        let v = validate(&parse_query(&doc).unwrap(), &g1());
        assert!(v[0].message.contains("no edge joins types `term` and `term`"));
    }
}

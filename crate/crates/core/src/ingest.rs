//! Tab-separated edge-list loading and corpus statistics.
//!
//! One edge per line:
//!
//! ```text
//! src_id <TAB> src_type <TAB> dst_id <TAB> dst_type <TAB> edge_type [<TAB> weight]
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. A missing weight
//! means 1.

use std::io::{BufRead, BufReader, Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, IdScope, NodeIdx};

#[derive(Clone, Copy, Debug)]
pub struct LoadOptions {
    pub scope: IdScope,
}

impl Default for LoadOptions {
    fn default() -> Self {
        // bibliographic corpora reuse tokens across roles
        Self {
            scope: IdScope::PerType,
        }
    }
}

pub fn load_edge_list<R: Read>(reader: R) -> Result<HeteroGraph> {
    load_edge_list_with(reader, LoadOptions::default())
}

pub fn load_edge_list_with<R: Read>(reader: R, opts: LoadOptions) -> Result<HeteroGraph> {
    let mut graph = HeteroGraph::with_scope(opts.scope);
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Parse {
                line: line_no,
                message: "not valid UTF-8".into(),
            },
            _ => Error::Io(e),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(5..=6).contains(&fields.len()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 or 6 tab-separated fields, found {}", fields.len()),
            });
        }
        if let Some(empty) = fields[..5].iter().position(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("field {} is empty", empty + 1),
            });
        }
        let weight = match fields.get(5) {
            None => 1.0,
            Some(w) => match w.trim().parse::<f64>() {
                Ok(w) if w >= 0.0 && w.is_finite() => w,
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid weight `{w}`"),
                    })
                }
            },
        };
        let src = graph.add_node(fields[0], fields[1])?;
        let dst = graph.add_node(fields[2], fields[3])?;
        graph.add_edge(src, dst, fields[4], weight)?;
    }
    Ok(graph)
}

/// Writes every edge back in load order. Isolated nodes have no line and are
/// therefore not preserved.
pub fn write_edge_list<W: Write>(graph: &HeteroGraph, mut out: W) -> Result<()> {
    for e in graph.edges() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            graph.name(e.src),
            graph.node_type_name(graph.type_of(e.src)),
            graph.name(e.dst),
            graph.node_type_name(graph.type_of(e.dst)),
            graph.edge_type_name(e.etype),
            e.weight
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeStats {
    pub node_type: String,
    pub nodes: usize,
    /// Highest-degree node of this type (earliest on ties).
    pub max_degree_node: Option<String>,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub per_type: Vec<TypeStats>,
    pub nodes: usize,
    pub edges: usize,
    pub average_degree: f64,
}

impl GraphStats {
    pub fn nodes_of(&self, node_type: &str) -> usize {
        self.per_type
            .iter()
            .find(|t| t.node_type == node_type)
            .map_or(0, |t| t.nodes)
    }
}

pub fn graph_stats(graph: &HeteroGraph) -> GraphStats {
    let per_type = (0..graph.node_types().len() as u16)
        .map(|t| {
            let ty = crate::graph::NodeType(t);
            let nodes = graph.nodes_of_type(ty);
            let best: Option<(NodeIdx, usize)> = nodes.iter().fold(None, |best, &n| {
                let d = graph.degree(n);
                match best {
                    Some((_, bd)) if bd >= d => best,
                    _ => Some((n, d)),
                }
            });
            TypeStats {
                node_type: graph.node_type_name(ty).to_owned(),
                nodes: nodes.len(),
                max_degree_node: best.map(|(n, _)| graph.name(n).to_owned()),
                max_degree: best.map_or(0, |(_, d)| d),
            }
        })
        .collect();
    let nodes = graph.node_count();
    let edges = graph.edge_count();
    GraphStats {
        per_type,
        nodes,
        edges,
        average_degree: if nodes == 0 {
            0.0
        } else {
            2.0 * edges as f64 / nodes as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, G1_EDGES};

    #[test]
    fn loads_g1() {
        let g = g1();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(G1_EDGES.lines().count(), 7);
    }

    #[test]
    fn empty_and_comments() {
        let g = load_edge_list("".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 0);
        let g = load_edge_list("# header\n\n  \na\tx\tb\ty\te\n".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(crate::graph::EdgeIdx(0)), 1.0);
    }

    #[test]
    fn three_fields_is_a_parse_error() {
        let text = "a1\tauthor\tt1\tterm\twrites\n\na1\tauthor\tt1\n";
        match load_edge_list(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_weight() {
        let text = "a\tx\tb\ty\te\t-1\n";
        assert!(matches!(
            load_edge_list(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "a\tx\tb\ty\te\tabc\n";
        assert!(matches!(
            load_edge_list(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn global_scope_reports_type_conflict() {
        let text = "x\tauthor\tt\tterm\tw\nx\tterm\tt\tterm\tw\n";
        let opts = LoadOptions { scope: IdScope::Global };
        match load_edge_list_with(text.as_bytes(), opts) {
            Err(Error::TypeConflict { id, .. }) => assert_eq!(id, "x"),
            other => panic!("unexpected {other:?}"),
        }
        // per-type scope keeps the two `x` apart
        let g = load_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn duplicate_lines_are_parallel_edges() {
        let text = "a\tx\tb\ty\te\na\tx\tb\ty\te\n";
        let g = load_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn stats_g1() {
        let s = graph_stats(&g1());
        assert_eq!(s.nodes_of("author"), 3);
        assert_eq!(s.nodes_of("term"), 3);
        assert_eq!(s.edges, 7);
        assert!((s.average_degree - 14.0 / 6.0).abs() < 1e-12);
        // a2: t1, t3, a1, a3
        assert_eq!(s.per_type[0].max_degree_node.as_deref(), Some("a2"));
        assert_eq!(s.per_type[0].max_degree, 4);
    }

    #[test]
    fn stats_empty() {
        let s = graph_stats(&HeteroGraph::new());
        assert_eq!(s.nodes, 0);
        assert_eq!(s.edges, 0);
        assert_eq!(s.average_degree, 0.0);
    }

    #[test]
    fn stats_after_filter() {
        let g = g1();
        let f = g.filter_high_degree(&g.thresholds_by_name([("term", 1)]));
        let s = graph_stats(&f);
        assert_eq!(s.nodes_of("author"), 3);
        assert_eq!(s.nodes_of("term"), 1);
        assert_eq!(s.edges, 3);
    }

    #[test]
    fn round_trip() {
        let g = g1();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), G1_EDGES);
        assert_eq!(back.node_count(), g.node_count());
        assert_eq!(back.edge_count(), g.edge_count());
    }
}

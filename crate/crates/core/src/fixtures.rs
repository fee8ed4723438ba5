//! Small hand-checkable graphs and queries shared by tests, docs and the CLI
//! test-suite.

use crate::graph::HeteroGraph;
use crate::ingest::load_edge_list;

/// Three authors, three terms, five author-term and two co-author edges.
pub const G1_EDGES: &str = "\
a1\tauthor\tt1\tterm\twrites\t1
a1\tauthor\tt2\tterm\twrites\t1
a2\tauthor\tt1\tterm\twrites\t1
a2\tauthor\tt3\tterm\twrites\t1
a3\tauthor\tt3\tterm\twrites\t1
a1\tauthor\ta2\tauthor\tcoauthor\t1
a2\tauthor\ta3\tauthor\tcoauthor\t1
";

/// Two co-authors and a term they share, expanded over author-term-author and
/// scored over author-term-author plus term-author-term.
pub const G1_QUERY: &str = r#"{
  "pattern": {
    "slots": [
      {"id": "A1", "type": "author"},
      {"id": "A2", "type": "author"},
      {"id": "T", "type": "term"}
    ],
    "edges": [["A1", "A2"], ["A1", "T"], ["A2", "T"]]
  },
  "start": [{"A1": "a1", "A2": "a2", "T": "t1"}],
  "search_paths": [["author", "term", "author"]],
  "score_paths": [
    {"types": ["author", "term", "author"], "weight": 1.0},
    {"types": ["term", "author", "term"], "weight": 1.0}
  ],
  "reference": "candidates"
}
"#;

pub fn g1() -> HeteroGraph {
    load_edge_list(G1_EDGES.as_bytes()).expect("fixture parses")
}

//! End-to-end query execution: filter, bind, expand, score, rank.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::HeteroGraph;
use crate::motif::{build_reference_set, expand_from, MotifSet};
use crate::query::{bind, BoundQuery, QuerySpec};
use crate::scoring::{rank, Metric, RankedList, ScoringContext};

/// Overrides applied on top of the query document.
#[derive(Clone, Debug, Default)]
pub struct QueryOptions {
    pub metric: Option<Metric>,
    pub top_k: Option<usize>,
    /// Merged over the document's thresholds; later entries win.
    pub degree_thresholds: BTreeMap<String, usize>,
}

#[derive(Debug)]
pub struct QueryOutcome<'g> {
    /// The graph the query ran on, after degree filtering.
    pub graph: Cow<'g, HeteroGraph>,
    pub query: BoundQuery,
    pub candidates: MotifSet,
    pub reference: MotifSet,
    pub ranked: RankedList,
}

impl QueryOutcome<'_> {
    pub fn metric(&self) -> Metric {
        self.query.metric
    }

    pub fn top_k(&self) -> usize {
        self.query.top_k
    }
}

pub fn run_query<'g>(graph: &'g HeteroGraph, spec: &QuerySpec, opts: &QueryOptions) -> Result<QueryOutcome<'g>> {
    let mut thresholds = spec.degree_thresholds.clone();
    thresholds.extend(opts.degree_thresholds.iter().map(|(k, v)| (k.clone(), *v)));
    let graph: Cow<'g, HeteroGraph> = if thresholds.is_empty() {
        Cow::Borrowed(graph)
    } else {
        let by_type = graph.thresholds_by_name(thresholds.iter().map(|(k, v)| (k.as_str(), *v)));
        Cow::Owned(graph.filter_high_degree(&by_type))
    };

    let mut query = bind(spec, &graph)?;
    if let Some(m) = opts.metric {
        query.metric = m;
    }
    if let Some(k) = opts.top_k {
        query.top_k = k;
    }

    let (candidates, reference, ranked) = run_bound(&graph, &query)?;
    Ok(QueryOutcome {
        graph,
        query,
        candidates,
        reference,
        ranked,
    })
}

/// Expands, scores and ranks an already bound query.
pub fn run_bound(graph: &HeteroGraph, query: &BoundQuery) -> Result<(MotifSet, MotifSet, RankedList)> {
    let candidates = expand_from(graph, &query.pattern, &query.start, &query.search_paths);
    let reference = build_reference_set(
        graph,
        &query.pattern,
        &query.reference,
        &candidates,
        &query.search_paths,
    )?;
    let ctx = ScoringContext::new(
        graph,
        &query.pattern,
        &query.score_paths,
        candidates.members(),
        reference.members(),
        query.metric,
    )?;
    let scores = ctx.score_all(candidates.members(), reference.members())?;
    let ranked = rank(&candidates, &scores)?;
    Ok((candidates, reference, ranked))
}

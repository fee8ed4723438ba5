//! Output formats for the subcommands.

use std::io::{self, Write};

use motifrank_core::bench::{BenchConfig, BenchPoint};
use motifrank_core::ingest::GraphStats;
use motifrank_core::pipeline::QueryOutcome;
use motifrank_core::scoring::GroupBucket;
use serde::Serialize;

pub fn json<T: Serialize>(value: &T, out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

pub fn stats_tsv(stats: &GraphStats, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "type\tnodes\tmax_degree\tmax_degree_node")?;
    for t in &stats.per_type {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            t.node_type,
            t.nodes,
            t.max_degree,
            t.max_degree_node.as_deref().unwrap_or("-")
        )?;
    }
    writeln!(out, "# nodes\t{}", stats.nodes)?;
    writeln!(out, "# edges\t{}", stats.edges)?;
    writeln!(out, "# average_degree\t{:.3}", stats.average_degree)
}

#[derive(Debug, Serialize)]
pub struct Row {
    /// 1-based position in the ascending ranking.
    pub rank: usize,
    pub nodes: Vec<String>,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct QueryReport {
    pub metric: String,
    pub slots: Vec<String>,
    pub candidates: usize,
    pub reference: usize,
    pub top_k: usize,
    /// Lowest `top_k` and highest `top_k` motifs, ascending; everything when
    /// the list is short enough.
    pub rows: Vec<Row>,
    /// Motifs between the two ends that are not shown.
    pub omitted: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<GroupBucket>>,
}

impl QueryReport {
    pub fn new(outcome: &QueryOutcome<'_>, distribution: Option<Vec<GroupBucket>>) -> Self {
        let g = &outcome.graph;
        let entries = outcome.ranked.entries();
        let k = outcome.top_k();
        let m = entries.len();
        let shown: Vec<usize> = if m <= 2 * k {
            (0..m).collect()
        } else {
            (0..k).chain(m - k..m).collect()
        };
        let rows = shown
            .into_iter()
            .map(|i| Row {
                rank: i + 1,
                nodes: entries[i]
                    .instance
                    .nodes()
                    .iter()
                    .map(|&n| g.name(n).to_owned())
                    .collect(),
                score: entries[i].score,
            })
            .collect();
        Self {
            metric: outcome.metric().to_string(),
            slots: outcome.query.pattern.slots().iter().map(|s| s.id.clone()).collect(),
            candidates: outcome.candidates.len(),
            reference: outcome.reference.len(),
            top_k: k,
            rows,
            omitted: m.saturating_sub(2 * k),
            distribution,
        }
    }

    pub fn write_tsv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# metric\t{}", self.metric)?;
        writeln!(out, "# candidates\t{}", self.candidates)?;
        writeln!(out, "# reference\t{}", self.reference)?;
        writeln!(out, "{}\tscore", self.slots.join("\t"))?;
        for (i, row) in self.rows.iter().enumerate() {
            if self.omitted > 0 && i == self.top_k {
                writeln!(out, "# ... {} motifs omitted", self.omitted)?;
            }
            writeln!(out, "{}\t{:.3}", row.nodes.join("\t"), row.score)?;
        }
        if let Some(buckets) = &self.distribution {
            writeln!(out, "# distribution\t{} groups", buckets.len())?;
            writeln!(out, "group\tranks\ttype\tnode\tcount")?;
            for b in buckets {
                for (ty, nodes) in &b.frequencies {
                    for (node, count) in nodes {
                        writeln!(out, "{}\t{}-{}\t{ty}\t{node}\t{count}", b.group, b.start + 1, b.end)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub degree_sweep: Vec<BenchPoint>,
    pub length_sweep: Vec<BenchPoint>,
}

impl BenchReport {
    pub fn write_tsv(&self, out: &mut dyn Write) -> io::Result<()> {
        let c = &self.config;
        writeln!(out, "# seed\t{}", c.seed)?;
        writeln!(
            out,
            "# nodes\t{}\ttypes\t{}\tpattern_size\t{}\tsearch_len\t{}\treps\t{}\tmetric\t{}",
            c.nodes, c.node_types, c.pattern_size, c.search_len, c.reps, c.metric
        )?;
        writeln!(out, "sweep\tk\tscore_len\tedges\tcandidates\tmedian_s\tmax_mos")?;
        let rows = self
            .degree_sweep
            .iter()
            .map(|p| ("degree", p))
            .chain(self.length_sweep.iter().map(|p| ("length", p)));
        for (sweep, p) in rows {
            writeln!(
                out,
                "{sweep}\t{:.3}\t{}\t{}\t{}\t{:.6}\t{:.3}",
                p.avg_degree,
                p.score_len,
                p.edges,
                p.candidates,
                p.median.as_secs_f64(),
                p.max_mos
            )?;
        }
        Ok(())
    }
}

//! Acceptance suite. Runs every criterion in sequence, prints one line per
//! criterion and exits nonzero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use motifrank_core::bench::{self, BenchConfig};
use motifrank_core::graph::NodeIdx;
use motifrank_core::ingest::{load_edge_list, write_edge_list};
use motifrank_core::motif::{canonical_form, expand_from, MotifInstance};
use motifrank_core::oracle::{check_candidates, check_pair_counts, generate_case, Oracle, OracleBounds, VerifyCase};
use motifrank_core::pathcount::{motif_self_paths, pair_counts, reachable_nodes, Count};
use motifrank_core::pipeline::{run_query, QueryOptions};
use motifrank_core::query::{bind, parse_query, MetaPath, TypedPath};
use motifrank_core::scoring::{cos_sim, norm_con, path_sim, rank, Metric, ScoringContext};
use motifrank_core::synth;
use motifrank_core::HeteroGraph;
use rand::Rng;

const LENGTHS: [usize; 3] = [3, 5, 7];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn g1() -> HeteroGraph {
    load_edge_list(std::fs::File::open(fixture("g1.tsv")).unwrap()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn family_check(case: &VerifyCase) -> Result<(), String> {
    let g = &case.graph;
    let types = g.node_types().len();
    let avg = synth::average_degree(g);
    if g.node_count() > 40 || !(2..=4).contains(&types) || avg > 6.0 {
        return Err(format!(
            "seed {}: graph outside family ({} nodes, {} types, avg degree {avg:.2})",
            case.seed,
            g.node_count(),
            types
        ));
    }
    let lens: Vec<usize> = case.score_paths.iter().map(TypedPath::len).collect();
    if lens != LENGTHS {
        return Err(format!("seed {}: score path lengths {lens:?}", case.seed));
    }
    Ok(())
}

fn cases(n: u64) -> Vec<VerifyCase> {
    (0..n).map(|s| generate_case(1000 + s, 40, &LENGTHS)).collect()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut compared = 0;
    let all = cases(120);
    for case in &all {
        family_check(case)?;
        compared += check_pair_counts(case, None).map_err(|f| format!("seed {}: {}", f.seed, f.detail))?;
    }
    let elapsed = t0.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "{} graphs, lengths {LENGTHS:?}, {compared} A2B/A2A/B2B entries equal, {:.1}s",
        all.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let all = cases(120);
    let mut keys = 0;
    for case in &all {
        family_check(case)?;
        keys += check_candidates(case, None).map_err(|f| format!("seed {}: {}", f.seed, f.detail))?;
    }
    Ok(format!(
        "{} of {} cases equal, {keys} canonical keys",
        all.len(),
        all.len()
    ))
}

fn criterion_3() -> Outcome {
    let g = g1();
    let n = |id: &str| g.lookup(id).unwrap();
    let ata = MetaPath::named(&["author", "term", "author"]).resolve(&g).unwrap();
    let authors: Vec<NodeIdx> = ["a1", "a2", "a3"].iter().map(|a| n(a)).collect();
    let reach = reachable_nodes(&g, &authors, &ata.half().unwrap()).map_err(|e| e.to_string())?;
    let pc = pair_counts(&g, &reach, &reach).map_err(|e| e.to_string())?;
    let mut oracle = Oracle::new(&g, OracleBounds::default()).map_err(|e| e.to_string())?;
    let mut ocount = |x: &str, y: &str| oracle.count_between(&ata, n(x), n(y)).unwrap() as f64;

    let mut rows: Vec<(&str, f64, f64, f64)> = Vec::new();
    rows.push((
        "PathSim(a1,a2)",
        path_sim(&g, n("a1"), n("a2"), &pc).unwrap(),
        2.0 * ocount("a1", "a2") / (ocount("a1", "a1") + ocount("a2", "a2")),
        0.5,
    ));
    rows.push((
        "PathSim(a2,a3)",
        path_sim(&g, n("a2"), n("a3"), &pc).unwrap(),
        2.0 * ocount("a2", "a3") / (ocount("a2", "a2") + ocount("a3", "a3")),
        2.0 / 3.0,
    ));
    rows.push((
        "NormCon(a3,a2)",
        norm_con(&g, n("a3"), n("a2"), &pc).unwrap(),
        ocount("a3", "a2") / ocount("a3", "a3"),
        1.0,
    ));
    let author_term = MetaPath::named(&["author", "term"]).resolve(&g).unwrap();
    let hv =
        |o: &Oracle, x: &str| -> BTreeMap<NodeIdx, Count> { o.enumerate_paths(&author_term, n(x)).unwrap().counts };
    let (v2, v3) = (hv(&oracle, "a2"), hv(&oracle, "a3"));
    let dot: Count = v2.iter().map(|(k, c)| c * v3.get(k).copied().unwrap_or(0)).sum();
    let norm = |v: &BTreeMap<NodeIdx, Count>| (v.values().map(|c| c * c).sum::<Count>() as f64).sqrt();
    rows.push((
        "CosSim(a2,a3)",
        cos_sim(&g, n("a2"), n("a3"), &reach).unwrap(),
        dot as f64 / (norm(&v2) * norm(&v3)),
        1.0 / 2f64.sqrt(),
    ));

    let spec = parse_query(&std::fs::read_to_string(fixture("g1_query.json")).unwrap()).unwrap();
    let q = bind(&spec, &g).map_err(|e| e.to_string())?;
    let m1 = MotifInstance::new(vec![n("a1"), n("a2"), n("t1")]);
    let m2 = MotifInstance::new(vec![n("a2"), n("a3"), n("t3")]);
    let self_paths = motif_self_paths(&g, &m1, &pc).map_err(|e| e.to_string())?;
    let mut oracle = Oracle::new(&g, OracleBounds::default()).unwrap();
    let oracle_self: Count = ["a1", "a2"]
        .iter()
        .flat_map(|x| ["a1", "a2"].map(|y| (*x, y)))
        .map(|(x, y)| oracle.count_between(&ata, n(x), n(y)).unwrap())
        .sum();
    rows.push(("self paths of m1", self_paths as f64, oracle_self as f64, 6.0));
    let both = [m1.clone(), m2.clone()];
    let ctx =
        ScoringContext::new(&g, &q.pattern, &q.score_paths, &both, &both, Metric::Mos).map_err(|e| e.to_string())?;
    rows.push((
        "MOS(m2,{m1})",
        ctx.mos(&m2, std::slice::from_ref(&m1)).unwrap(),
        oracle
            .mos(&m2, std::slice::from_ref(&m1), &q.score_paths, Metric::Mos)
            .unwrap(),
        5.0,
    ));

    let mut report = Vec::new();
    for (name, engine, truth, expected) in rows {
        if !(close(engine, expected) && close(truth, expected)) {
            return Err(format!("{name}: engine {engine}, oracle {truth}, expected {expected}"));
        }
        report.push(format!("{name}={engine:.6}"));
    }
    Ok(report.join(", "))
}

/// Per path: own self count and half norm, then cross counts and half-path
/// dot products against each reference motif in order.
fn profile(ctx: &ScoringContext<'_>, paths: usize, m: &MotifInstance, reference: &[MotifInstance]) -> Vec<Count> {
    let pm = ctx.profile(m).unwrap();
    let mut out = Vec::new();
    for i in 0..paths {
        let a = &pm.paths[i];
        out.push(a.self_count);
        out.push(a.half_norm);
        for r in reference {
            let pr = ctx.profile(r).unwrap();
            let b = &pr.paths[i];
            let x: Count = a
                .group
                .iter()
                .flat_map(|&u| b.group.iter().map(move |&v| (u, v)))
                .map(|(u, v)| ctx.counts(i).count(u, v).unwrap())
                .sum();
            let dot: Count = a
                .half
                .iter()
                .map(|(d, c)| c * b.half.iter().find(|(e, _)| e == d).map_or(0, |(_, k)| *k))
                .sum();
            out.push(x);
            out.push(dot);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let (mut graphs, mut tie_pairs, mut zero_cases) = (0, 0, 0);
    // Short odd paths and one or two reference motifs, so that some
    // candidates have no path at all to the reference.
    for seed in 0..150u64 {
        let lens: &[usize] = if seed % 2 == 0 { &[3] } else { &[3, 5] };
        let case = generate_case(5000 + seed, 40, lens);
        let g = &case.graph;
        let cands = expand_from(g, &case.pattern, &case.start, &case.search_paths);
        let members = cands.members().to_vec();
        let mut rng = synth::rng(seed);
        let take = rng.gen_range(1..=2.min(members.len()));
        let reference: Vec<MotifInstance> = synth::shuffled(&members, &mut rng).into_iter().take(take).collect();
        graphs += 1;

        let mut scores: Vec<(Metric, Vec<f64>)> = Vec::new();
        let mut profiles = Vec::new();
        for metric in Metric::ALL {
            let ctx = ScoringContext::new(g, &case.pattern, &case.score_paths, &members, &reference, metric)
                .map_err(|e| format!("seed {}: {e}", case.seed))?;
            scores.push((
                metric,
                ctx.score_all(&members, &reference)
                    .map_err(|e| format!("seed {}: {metric}: {e}", case.seed))?,
            ));
            if profiles.is_empty() {
                profiles = members
                    .iter()
                    .map(|m| profile(&ctx, case.score_paths.len(), m, &reference))
                    .collect();
            }
        }
        // equal profiles, equal scores
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if profiles[i] == profiles[j] {
                    tie_pairs += 1;
                    for (metric, s) in &scores {
                        if s[i].to_bits() != s[j].to_bits() {
                            return Err(format!(
                                "seed {}: candidates {i} and {j} share a profile but {metric} gives {} vs {}",
                                case.seed, s[i], s[j]
                            ));
                        }
                    }
                }
            }
        }
        // with a zero-cross profile present, every metric's minimum set is that class
        let zero: BTreeSet<usize> = (0..members.len())
            .filter(|&i| {
                let p = &profiles[i];
                let per = 2 + 2 * reference.len();
                (0..case.score_paths.len()).all(|k| p[k * per + 2..(k + 1) * per].iter().all(|&c| c == 0))
            })
            .collect();
        if !zero.is_empty() {
            zero_cases += 1;
            for (metric, s) in &scores {
                let min = s.iter().copied().fold(f64::INFINITY, f64::min);
                let argmin: BTreeSet<usize> = (0..s.len()).filter(|&i| s[i] == min).collect();
                if argmin != zero {
                    return Err(format!(
                        "seed {}: {metric} minimum set {argmin:?} differs from zero-profile class {zero:?}",
                        case.seed
                    ));
                }
            }
        }
    }
    if zero_cases < 20 {
        return Err(format!("only {zero_cases} graphs exercised the minimum-set check"));
    }
    Ok(format!(
        "{graphs} graphs, {tie_pairs} equal-profile pairs tied under all metrics, minimum set invariant in {zero_cases} graphs"
    ))
}

fn criterion_5() -> Outcome {
    let mut n = 0;
    for seed in 0..220u64 {
        let case = generate_case(9000 + seed, 40, &LENGTHS);
        let g = &case.graph;
        let members = expand_from(g, &case.pattern, &case.start, &case.search_paths)
            .members()
            .to_vec();
        let mut rng = synth::rng(seed);
        let shuffled = synth::shuffled(&members, &mut rng);
        let cut = rng.gen_range(0..=shuffled.len());
        let (s1, s2) = shuffled.split_at(cut);
        let ctx = ScoringContext::new(g, &case.pattern, &case.score_paths, &members, &members, Metric::Mos)
            .map_err(|e| e.to_string())?;
        for x in &members {
            let whole = ctx.mos(x, &shuffled).unwrap();
            let parts = ctx.mos(x, s1).unwrap() + ctx.mos(x, s2).unwrap();
            if whole != parts {
                return Err(format!("seed {}: MOS over union {whole} != {parts}", case.seed));
            }
        }
        let set = expand_from(g, &case.pattern, &case.start, &case.search_paths);
        let order = |paths: &[TypedPath]| -> Vec<MotifInstance> {
            let ctx = ScoringContext::new(g, &case.pattern, paths, &members, &members, Metric::Mos).unwrap();
            let scores = ctx.score_all(&members, &members).unwrap();
            rank(&set, &scores)
                .unwrap()
                .entries()
                .iter()
                .map(|e| e.instance.clone())
                .collect()
        };
        let base = order(&case.score_paths);
        for lambda in [0.5, 3.0] {
            let scaled: Vec<TypedPath> = case
                .score_paths
                .iter()
                .map(|p| p.clone().with_weight(p.weight * lambda))
                .collect();
            if order(&scaled) != base {
                return Err(format!("seed {}: ranking changed under scale {lambda}", case.seed));
            }
        }
        n += 1;
    }
    Ok(format!(
        "{n} cases, additivity exact, ranking unchanged for lambda in {{0.5, 3}}"
    ))
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let base = BenchConfig {
        nodes: 2000,
        reps: 7,
        ..Default::default()
    };
    let (by_k, by_len) = pool.install(|| -> Result<_, String> {
        Ok((
            bench::sweep_degree(&base, &[2.0, 4.0, 8.0]).map_err(|e| e.to_string())?,
            bench::sweep_path_length(&base, &[3, 5, 7, 9]).map_err(|e| e.to_string())?,
        ))
    })?;
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let k_times: Vec<String> = by_k.iter().map(|p| format!("{:.2}ms", ms(p.median))).collect();
    let l_times: Vec<String> = by_len.iter().map(|p| format!("{:.2}ms", ms(p.median))).collect();
    if !by_k.windows(2).all(|w| w[0].median < w[1].median) {
        return Err(format!("degree sweep not strictly increasing: {k_times:?}"));
    }
    let k2 = base.avg_degree * base.avg_degree;
    for w in by_len.windows(2) {
        let ratio = w[1].median.as_secs_f64() / w[0].median.as_secs_f64();
        if w[1].median < w[0].median || ratio > k2 {
            return Err(format!(
                "length sweep step ratio {ratio:.2} outside [1, {k2}]: {l_times:?}"
            ));
        }
    }
    let elapsed = t0.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("bench took {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "k 2/4/8: {k_times:?}; length 3/5/7/9: {l_times:?}; {:.1}s",
        elapsed.as_secs_f64()
    ))
}

/// Writes a synthetic graph and a query over it; returns (graph, query) paths.
fn synthetic_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let cfg = BenchConfig {
        nodes: 300,
        node_types: 3,
        avg_degree: 5.0,
        search_len: 5,
        ..Default::default()
    };
    let (g, q) = bench::workload(&cfg).unwrap();
    let graph_path = dir.join("synth.tsv");
    write_edge_list(&g, std::fs::File::create(&graph_path).unwrap()).unwrap();
    let name = |t| g.node_type_name(t).to_owned();
    let slots: Vec<String> = q
        .pattern
        .slots()
        .iter()
        .map(|s| format!(r#"{{"id": "{}", "type": "{}"}}"#, s.id, name(s.node_type)))
        .collect();
    let edges: Vec<String> = q
        .pattern
        .edges()
        .iter()
        .map(|e| format!(r#"["{}", "{}"]"#, q.pattern.slots()[e.a].id, q.pattern.slots()[e.b].id))
        .collect();
    let start: Vec<String> = q.start[0]
        .nodes()
        .iter()
        .zip(q.pattern.slots())
        .map(|(&n, s)| format!(r#""{}": "{}""#, s.id, g.name(n)))
        .collect();
    let path = |p: &TypedPath| {
        let t: Vec<String> = p.types.iter().map(|&t| format!("\"{}\"", name(t))).collect();
        format!("[{}]", t.join(", "))
    };
    let doc = format!(
        r#"{{"pattern": {{"slots": [{}], "edges": [{}]}}, "start": [{{{}}}], "search_paths": [{}], "score_paths": [{}, {}], "top_k": 5}}"#,
        slots.join(", "),
        edges.join(", "),
        start.join(", "),
        path(&q.search_paths[0]),
        path(&q.score_paths[0]),
        path(&MetaPath::new(vec![
            q.pattern.slot_type(1),
            q.pattern.slot_type(0),
            q.pattern.slot_type(1)
        ])),
    );
    let query_path = dir.join("synth_query.json");
    std::fs::write(&query_path, doc).unwrap();
    (graph_path, query_path)
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_motifrank"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_7() -> Outcome {
    let dir = std::env::temp_dir().join(format!("motifrank-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let (sg, sq) = synthetic_fixture(&dir);
    let g1 = fixture("g1.tsv");
    let g1q = fixture("g1_query.json");
    let inputs = [
        (sg.to_str().unwrap(), sq.to_str().unwrap()),
        (g1.to_str().unwrap(), g1q.to_str().unwrap()),
    ];
    let mut checked = 0;
    let mut rows = 0;
    for (graph, query) in inputs {
        for metric in ["mos", "pathsim", "cossim"] {
            for format in ["tsv", "json"] {
                let base = [
                    "query",
                    "--graph",
                    graph,
                    "--query",
                    query,
                    "--metric",
                    metric,
                    "--format",
                    format,
                    "--groups",
                    "3",
                    "--distribution",
                ];
                let reference = run_cli(&base)?;
                rows += reference.split(|&b| b == b'\n').count();
                for _ in 0..4 {
                    if run_cli(&base)? != reference {
                        return Err(format!("{graph} {metric} {format}: output differs between runs"));
                    }
                    checked += 1;
                }
                for threads in ["1", "4", "8"] {
                    let mut args = vec!["--threads", threads];
                    args.extend(base);
                    if run_cli(&args)? != reference {
                        return Err(format!("{graph} {metric} {format}: --threads {threads} changes output"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "{checked} repeated runs byte-identical ({rows} output lines per pass)"
    ))
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    let mut starts = 0;
    for seed in 0..150u64 {
        let case = generate_case(20_000 + seed, 40, &LENGTHS);
        let set = expand_from(&case.graph, &case.pattern, &case.start, &case.search_paths);
        let keys: BTreeSet<_> = set.keys().iter().cloned().collect();
        if keys.len() != set.len() {
            return Err(format!("seed {}: duplicate canonical key", case.seed));
        }
        let recomputed: BTreeSet<_> = set.members().iter().map(|m| canonical_form(&case.pattern, m)).collect();
        if recomputed != keys {
            return Err(format!("seed {}: stored keys disagree with members", case.seed));
        }
        for s in &case.start {
            if !keys.contains(&canonical_form(&case.pattern, s)) {
                return Err(format!("seed {}: start motif missing", case.seed));
            }
            starts += 1;
        }
        runs += 1;
    }
    let g = g1();
    let spec = parse_query(&std::fs::read_to_string(fixture("g1_query.json")).unwrap()).unwrap();
    let out = run_query(&g, &spec, &QueryOptions::default()).map_err(|e| e.to_string())?;
    let keys: BTreeSet<_> = out.ranked.entries().iter().map(|e| e.key.clone()).collect();
    if keys.len() != out.ranked.len() || !keys.contains(&canonical_form(&out.query.pattern, &out.query.start[0])) {
        return Err("G1 run: duplicate key or missing start".into());
    }
    Ok(format!(
        "{} runs without duplicate keys, {starts} start motifs present",
        runs + 1
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence: path counts", criterion_1),
        ("oracle equivalence: candidates", criterion_2),
        ("G1 fixture table", criterion_3),
        ("metric robustness", criterion_4),
        ("MOS additivity and scale order", criterion_5),
        ("complexity trends", criterion_6),
        ("determinism", criterion_7),
        ("dedup soundness", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

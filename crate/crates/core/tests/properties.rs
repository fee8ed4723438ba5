use std::collections::BTreeMap;

use motifrank_core::fixtures::{g1, G1_QUERY};
use motifrank_core::ingest::{graph_stats, load_edge_list, write_edge_list};
use motifrank_core::motif::{expand_from, MotifInstance};
use motifrank_core::oracle::{check_candidates, check_pair_counts, check_scores, generate_case};
use motifrank_core::pathcount::{pair_counts, reachable_nodes};
use motifrank_core::query::{parse_query, InstanceSpec, MetaPath, ReferenceSource, TypedPath};
use motifrank_core::scoring::{cos_sim, path_sim, rank, Metric, ScoringContext};
use motifrank_core::synth;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_enumeration(seed in any::<u64>()) {
        let case = generate_case(seed, 30, &[3, 4, 5]);
        prop_assert!(check_pair_counts(&case, None).is_ok(), "{:?}", check_pair_counts(&case, None));
        prop_assert!(check_candidates(&case, None).is_ok(), "{:?}", check_candidates(&case, None));
        prop_assert!(check_scores(&case).is_ok(), "{:?}", check_scores(&case));
    }

    #[test]
    fn node_metrics_symmetric_and_bounded(seed in any::<u64>()) {
        let case = generate_case(seed, 30, &[3, 5]);
        let g = &case.graph;
        for p in &case.score_paths {
            let starts = g.nodes_of_type(p.types[0]).to_vec();
            let reach = reachable_nodes(g, &starts, &p.half().unwrap()).unwrap();
            let pc = pair_counts(g, &reach, &reach).unwrap();
            for &x in &starts {
                for &y in &starts {
                    let (a, b) = (path_sim(g, x, y, &pc).unwrap(), path_sim(g, y, x, &pc).unwrap());
                    prop_assert_eq!(a, b);
                    prop_assert!((0.0..=1.0).contains(&a), "PathSim {}", a);
                    let (c, d) = (cos_sim(g, x, y, &reach).unwrap(), cos_sim(g, y, x, &reach).unwrap());
                    prop_assert!((c - d).abs() <= 1e-12);
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&c), "CosSim {}", c);
                }
                let own = path_sim(g, x, x, &pc).unwrap();
                prop_assert!(own == 1.0 || own == 0.0);
            }
        }
    }

    #[test]
    fn mos_additive_and_scale_invariant(seed in any::<u64>(), lambda in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let case = generate_case(seed, 30, &[3, 5, 7]);
        let g = &case.graph;
        let set = expand_from(g, &case.pattern, &case.start, &case.search_paths);
        let members = set.members().to_vec();
        let mut rng = synth::rng(seed);
        let cut = rng.gen_range(0..=members.len());
        let (s1, s2) = members.split_at(cut);
        let ctx = ScoringContext::new(g, &case.pattern, &case.score_paths, &members, &members, Metric::Mos).unwrap();
        for x in &members {
            prop_assert_eq!(ctx.mos(x, &members).unwrap(), ctx.mos(x, s1).unwrap() + ctx.mos(x, s2).unwrap());
        }
        let order = |paths: &[TypedPath]| -> Vec<MotifInstance> {
            let ctx = ScoringContext::new(g, &case.pattern, paths, &members, &members, Metric::Mos).unwrap();
            let scores = ctx.score_all(&members, &members).unwrap();
            rank(&set, &scores).unwrap().entries().iter().map(|e| e.instance.clone()).collect()
        };
        let scaled: Vec<TypedPath> = case.score_paths.iter().map(|p| p.clone().with_weight(p.weight * lambda)).collect();
        prop_assert_eq!(order(&scaled), order(&case.score_paths));
    }

    #[test]
    fn symmetrize_then_half(types in prop::collection::vec(0u8..4, 1..8), edges in prop::collection::vec(0u8..3, 7)) {
        let n = types.len();
        let p: MetaPath<u8, u8> = MetaPath::new(types.clone()).with_edge_types(edges[..n - 1].to_vec());
        let s = p.symmetrize();
        prop_assert_eq!(s.len(), 2 * n - 1);
        prop_assert!(s.is_symmetric());
        prop_assert_eq!(s.reversed(), s.clone());
        let half = s.half().unwrap();
        prop_assert_eq!(half.types, types);
        prop_assert_eq!(half.edge_types.unwrap(), edges[..n - 1].to_vec());
    }

    #[test]
    fn query_json_round_trip(
        metric in prop::sample::select(Metric::ALL.to_vec()),
        top_k in 1usize..50,
        w1 in prop::sample::select(vec![0.5, 1.0, 2.5]),
        threshold in prop::option::of(1usize..5000),
        user_reference in any::<bool>(),
        expand in any::<bool>(),
    ) {
        let mut spec = parse_query(G1_QUERY).unwrap();
        spec.metric = metric;
        spec.top_k = top_k;
        spec.score_paths[0].weight = w1;
        if let Some(t) = threshold {
            spec.degree_thresholds = BTreeMap::from([("term".to_owned(), t)]);
        }
        if user_reference {
            spec.reference = ReferenceSource::UserProvided {
                instances: vec![InstanceSpec(vec!["a2".into(), "a3".into(), "t3".into()])],
                expand,
            };
        }
        let back = parse_query(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn edge_list_round_trip(seed in any::<u64>(), n in 2usize..60, k in 0.5f64..4.0) {
        let cfg = synth::SynthConfig { node_types: 3, nodes: n, avg_degree: k.min(n as f64 - 1.0), seed };
        let g = synth::random_graph(&cfg).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.edge_count(), g.edge_count());
        let isolated = g.nodes().filter(|&v| g.degree(v) == 0).count();
        prop_assert_eq!(back.node_count() + isolated, g.node_count());
        prop_assert_eq!(graph_stats(&back).edges, graph_stats(&g).edges);
    }
}

#[test]
fn g1_round_trips_through_the_writer() {
    let g = g1();
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf).unwrap();
    let back = load_edge_list(buf.as_slice()).unwrap();
    assert_eq!(graph_stats(&back), graph_stats(&g));
}

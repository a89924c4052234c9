mod common;

use common::memberships_bounded;
use fuzzpool::graph::{parse_graph, serialize_graph, FuzzyGraph};
use fuzzpool::nn::{merge_neurons, parse_weights, serialize_weights, MergeStrategy, Network};
use fuzzpool::pooling::{graphs_isomorphic, pool_pair, pool_sequence, IsoMode, PoolPlan};
use fuzzpool::random::{case_rng, random_small_graph};
use proptest::prelude::*;

fn graph(seed: u64, min_n: usize, max_n: usize) -> FuzzyGraph {
    random_small_graph(&mut case_rng(seed, 0), min_n, max_n)
}

fn names(g: &FuzzyGraph) -> Vec<String> {
    g.vertices().map(|(v, _)| v.as_str().to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let g = graph(seed, 0, 9);
        let text = serialize_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_graph(&back), text);
    }

    #[test]
    fn conn_is_symmetric_and_dominates_edges(seed in any::<u64>()) {
        let g = graph(seed, 2, 8);
        let ids = names(&g);
        for p in &ids {
            for q in &ids {
                if p == q {
                    continue;
                }
                let c = g.connectivity_strength(p, q).unwrap();
                prop_assert_eq!(c, g.connectivity_strength(q, p).unwrap());
                if let Some(m) = g.mu(p, q) {
                    prop_assert!(c >= m);
                }
            }
        }
    }

    #[test]
    fn pool_pair_is_well_formed(seed in any::<u64>(), a in 0usize..8, b in 0usize..8) {
        let g = graph(seed, 2, 8);
        let ids = names(&g);
        let (p, q) = (&ids[a % ids.len()], &ids[b % ids.len()]);
        prop_assume!(p != q);
        let r = pool_pair(&g, p, q).unwrap();
        prop_assert!(r.graph.is_well_formed());
        prop_assert!(memberships_bounded(&r.graph));
        prop_assert_eq!(r.graph.vertex_count(), g.vertex_count() - 1);
        let vc = r.merged.unwrap();
        let (sp, sq) = (g.sigma(p).unwrap(), g.sigma(q).unwrap());
        prop_assert_eq!(r.graph.sigma(vc.as_str()), Some(sp.min(sq)));
        // surviving edges keep their membership
        for (u, v, m) in g.edges() {
            if ![u.as_str(), v.as_str()].iter().any(|x| x == p || x == q) {
                prop_assert_eq!(r.graph.mu(u.as_str(), v.as_str()), Some(m));
            }
        }
        prop_assert_eq!(r.mapping.len(), g.vertex_count());
    }

    #[test]
    fn disjoint_pairs_commute(seed in any::<u64>()) {
        let g = graph(seed, 4, 8);
        let ids = names(&g);
        let first = pool_sequence(&g, &PoolPlan::new([(&ids[0], &ids[1]), (&ids[2], &ids[3])])).unwrap();
        let second = pool_sequence(&g, &PoolPlan::new([(&ids[2], &ids[3]), (&ids[0], &ids[1])])).unwrap();
        prop_assert!(graphs_isomorphic(&first.graph, &second.graph, IsoMode::Fuzzy).unwrap());
    }

    #[test]
    fn pooling_everything_leaves_one_vertex(seed in any::<u64>()) {
        let g = graph(seed, 1, 8);
        let ids = names(&g);
        let r = pool_sequence(&g, &PoolPlan::along(&ids)).unwrap();
        prop_assert_eq!(r.graph.vertex_count(), 1);
        let min_sigma = g.vertices().map(|(_, s)| s).fold(1.0, f64::min);
        prop_assert_eq!(r.graph.vertices().next().unwrap().1, min_sigma);
    }

    #[test]
    fn isomorphism_survives_relabelling(seed in any::<u64>()) {
        let g = graph(seed, 1, 7);
        let renamed = |name: &str| format!("x{}", name.len() * 31 + name.bytes().map(usize::from).sum::<usize>());
        let ids = names(&g);
        prop_assume!({
            let mut r: Vec<String> = ids.iter().map(|v| renamed(v)).collect();
            r.sort();
            r.dedup();
            r.len() == ids.len()
        });
        let mut h = FuzzyGraph::new();
        for (v, s) in g.vertices() {
            h = h.add_vertex(&renamed(v.as_str()), s).unwrap();
        }
        for (p, q, m) in g.edges() {
            h = h.add_edge(&renamed(p.as_str()), &renamed(q.as_str()), m).unwrap();
        }
        prop_assert!(graphs_isomorphic(&g, &h, IsoMode::Fuzzy).unwrap());
    }

    #[test]
    fn weights_round_trip(seed in any::<u64>(), h1 in 1usize..6, h2 in 1usize..6) {
        let net = Network::init(&[2, h1, h2, 2], seed).unwrap();
        let back = parse_weights(&serialize_weights(&net)).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn merge_shrinks_one_layer(seed in any::<u64>(), min in any::<bool>()) {
        let net = Network::init(&[2, 5, 4, 2], seed).unwrap();
        let strategy = if min { MergeStrategy::FuzzyMin } else { MergeStrategy::Average };
        let merged = merge_neurons(&net, 1, 1, 3, strategy).unwrap();
        prop_assert_eq!(merged.layer_sizes(), vec![2, 4, 4, 2]);
        let out = merged.predict(&[0.3, 0.7]).unwrap();
        prop_assert!(out.iter().all(|y| *y > 0.0 && *y < 1.0));
    }
}

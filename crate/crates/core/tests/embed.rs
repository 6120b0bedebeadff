use std::collections::BTreeMap;

use rand::Rng;
use sbl_core::embed::*;
use sbl_core::graph::{AdjacencyBits, Graph, VertexSet};
use sbl_core::hrt::{construct, solve_params, HrtGraph};
use sbl_core::rng;
use sbl_core::ErrorClass;

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng::stream(seed, 0);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| r.gen_bool(p))
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

fn thresholds(eps: f64, d: f64) -> Thresholds {
    Thresholds {
        gamma: 0.1,
        eps,
        d,
        delta: 0.3,
        premise: false,
    }
}

fn small_guest() -> HrtGraph {
    // k = 4, r = 3, t = 1, D = 4: eight brooms of one first vertex and three leaves.
    construct(&solve_params(40, 3, 1, Some(4), 0.25, 5).unwrap()).unwrap()
}

#[test]
fn dense_single_edge_into_complete() {
    let hs = Graph::path(2);
    let rep = dense_embed_separator(&hs, &Graph::complete(10), &DenseConfig::new(1)).unwrap();
    assert!(rep.embedding.verified);
    assert_eq!(rep.attempts, 1);
}

#[test]
fn dense_complete_bipartite_separator_does_not_fit_random_host() {
    // k = 36, r = 35: the expander is K_36 and the separator graph is
    // K_{36,36}, which a random graph of density 0.6 on 800 vertices does
    // not contain (expected copies far below one).
    let h = construct(&solve_params(216, 35, 1, Some(36), 0.5, 9).unwrap()).unwrap();
    let (hs, _) = h.graph.induced(&h.separator());
    assert_eq!(hs.edge_count(), 36 * 36);
    let g = gnp(800, 0.6, 3);
    for seed in 0..3 {
        let mut cfg = DenseConfig::new(seed);
        cfg.retries = 5;
        let err = dense_embed_separator(&hs, &g, &cfg).unwrap_err();
        assert_eq!(err.class(), ErrorClass::Failure);
    }
}

#[test]
fn dense_sparse_separator_fits_random_host_and_flags_premise() {
    let h = construct(&solve_params(800, 5, 1, Some(40), 0.1, 11).unwrap()).unwrap();
    let (hs, _) = h.graph.induced(&h.separator());
    assert_eq!(hs.max_degree(), 6);
    let g = gnp(800, 0.6, 3);
    for seed in 0..10 {
        let rep = dense_embed_separator(&hs, &g, &DenseConfig::new(seed)).unwrap();
        assert!(rep.embedding.verified);
        // 8 * 6 * 2^6 * 80 > 800.
        assert!(!rep.premise_holds);
        assert!((rep.premise_log10_required - (8.0 * 6.0 * 64.0 * 80.0f64).log10()).abs() < 1e-9);
    }
}

#[test]
fn dense_rejects_sparse_host_and_odd_guest() {
    let e = dense_embed_separator(&Graph::path(2), &Graph::path(10), &DenseConfig::new(1)).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Parameter);
    let e = dense_embed_separator(&Graph::complete(3), &Graph::complete(10), &DenseConfig::new(1)).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Parameter);
}

#[test]
fn complete_pair_is_regular_for_any_eps() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(40, 2, 1.0, 0.5, 1)).unwrap();
    assert_eq!(g.edge_count(), 20 * 20 + 2 * 190);
    for eps in [0.01, 0.1, 0.5] {
        let res = sample_regularity(&g, &p.clusters[0], &p.clusters[1], eps, 200, 4).unwrap();
        assert!(res.not_falsified && res.evidence_only);
        assert_eq!(res.max_deviation, 0.0);
    }
    p.validate(40).unwrap();
}

#[test]
fn half_dense_pair_is_falsified() {
    // A = 0..40, B = 40..80; only the first half of A sees B.
    let edges: Vec<(usize, usize)> = (0..20).flat_map(|u| (40..80).map(move |v| (u, v))).collect();
    let g = Graph::from_edges(80, edges).unwrap();
    let res = sample_regularity(&g, &VertexSet::range(0..40), &VertexSet::range(40..80), 0.1, 500, 2).unwrap();
    assert!(!res.not_falsified);
    let w = res.witness.unwrap();
    assert!((w.density - 0.5).abs() >= 0.1);
}

#[test]
fn planted_host_pairs_survive_sampling() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(1500, 10, 0.5, 0.3, 7)).unwrap();
    assert_eq!(p.m, 150);
    assert!(p.exceptional.is_empty());
    let res = sample_regularity(&g, &p.clusters[0], &p.clusters[1], 0.1, 1000, 11).unwrap();
    assert!(res.not_falsified, "max deviation {}", res.max_deviation);
    // Every vertex sees about half of each of the nine other clusters and
    // half of its own.
    let expected = 0.5 * (1500.0 - 1.0);
    let min = g.min_degree() as f64;
    assert!(min > 0.85 * expected && min < expected, "min degree {min}");
    for i in 0..10 {
        for j in 0..10 {
            if i != j {
                assert!(p.pair_density[i][j] >= 0.5);
            }
        }
    }
}

#[test]
fn atypical_vertices_are_few_once_subsets_are_large() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(600, 4, 0.5, 0.3, 2)).unwrap();
    let check = atypical_vertex_check(&g, &p.clusters[0], &p.clusters[1], 0.25, 200, 5).unwrap();
    assert!(check.holds, "{check:?}");
}

#[test]
fn planted_host_rejects_infeasible_density() {
    let mut cfg = PlantedHostConfig::new(100, 2, 0.5, 0.3, 1);
    cfg.pair_density = Some(0.4);
    assert!(matches!(planted_regular_host(&cfg), Err(EmbedError::Parameter(_))));
    let cfg = PlantedHostConfig::new(100, 2, 0.3, 0.5, 1);
    assert!(matches!(planted_regular_host(&cfg), Err(EmbedError::Parameter(_))));
}

#[test]
fn single_pair_matches_itself() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(60, 2, 1.0, 0.5, 3)).unwrap();
    let tester = RegularityTester::new(&g);
    let (r, _, _) = reduced_graph_and_matching(&tester, &p, &thresholds(0.1, 0.5), 0.5, 50, 1).unwrap();
    assert_eq!(r.matching, vec![(0, 1)]);
}

#[test]
fn planted_ten_clusters_have_perfect_matching() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(1500, 10, 0.5, 0.3, 4)).unwrap();
    let tester = RegularityTester::new(&g);
    let (r, p2, rep) = reduced_graph_and_matching(&tester, &p, &thresholds(0.1, 0.45), 0.5, 100, 2).unwrap();
    assert_eq!(r.matching.len(), 5);
    assert!(r.dropped.is_none());
    assert_eq!(p2.clusters.len(), 10);
    assert!(rep.find("matching_coverage").unwrap().passed);
}

#[test]
fn reduced_degree_bound_uses_theta() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(200, 10, 1.0, 0.5, 4)).unwrap();
    let tester = RegularityTester::new(&g);
    let (_, _, rep) = reduced_graph_and_matching(&tester, &p, &thresholds(0.01, 0.05), 0.55, 20, 2).unwrap();
    let check = rep.find("reduced_min_degree").unwrap();
    // theta = 2 eps + d = 0.07.
    assert!((check.bound - 0.48 * 10.0).abs() < 1e-9);
}

#[test]
fn odd_cluster_count_drops_one_cluster() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(90, 3, 1.0, 0.5, 3)).unwrap();
    let tester = RegularityTester::new(&g);
    let (r, p2, _) = reduced_graph_and_matching(&tester, &p, &thresholds(0.1, 0.5), 0.5, 10, 1).unwrap();
    assert_eq!(r.matching.len(), 1);
    let dropped = r.dropped.unwrap();
    assert_eq!(p2.clusters.len(), 2);
    assert_eq!(p2.exceptional.len(), 30);
    assert!(p2.exceptional.iter().all(|v| p.clusters[dropped].contains(*v)));
}

#[test]
fn empty_reduced_graph_is_too_sparse() {
    let mut cfg = PlantedHostConfig::new(80, 4, 0.5, 0.3, 1);
    cfg.designated = Some(vec![(0, 1)]);
    let (g, p) = planted_regular_host(&cfg).unwrap();
    let tester = RegularityTester::new(&g);
    let err = reduced_graph_and_matching(&tester, &p, &thresholds(0.1, 0.5), 0.0, 10, 1).unwrap_err();
    assert!(matches!(err, EmbedError::HostDegree(_)), "{err:?}");
}

#[test]
fn complete_pair_needs_no_super_regular_moves() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(60, 2, 1.0, 0.5, 3)).unwrap();
    let tester = RegularityTester::new(&g);
    let th = thresholds(0.1, 0.5);
    let (r, p, _) = reduced_graph_and_matching(&tester, &p, &th, 0.5, 10, 1).unwrap();
    let (p2, rep) = make_super_regular(&tester, &p, &r, &th).unwrap();
    assert_eq!(p2.clusters, p.clusters);
    assert_eq!(rep.counters["moved_per_cluster"], 0);
}

#[test]
fn sabotaged_vertices_are_moved_with_padding() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(200, 2, 0.5, 0.3, 8)).unwrap();
    // Cut five vertices of the first cluster down to ten cross neighbors.
    let sabotaged = [3usize, 17, 42, 60, 99];
    let b = &p.clusters[1];
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| {
            let (a, x) = if sabotaged.contains(&u) { (u, v) } else { (v, u) };
            !(sabotaged.contains(&a) && b.contains(x) && x >= 110)
        })
        .collect();
    let g = Graph::from_edges(200, edges).unwrap();
    let mut p = p.clone();
    p.measure(&g);
    let tester = RegularityTester::new(&g);
    let th = thresholds(0.1, 0.3);
    let r = ReducedGraph {
        graph: Graph::path(2),
        matching: vec![(0, 1)],
        dropped: None,
    };
    let (p2, rep) = make_super_regular(&tester, &p, &r, &th).unwrap();
    assert_eq!(rep.counters["moved_per_cluster"], 5);
    for v in sabotaged {
        assert!(p2.exceptional.contains(v));
    }
    assert_eq!(p2.clusters[0].len(), 95);
    assert_eq!(p2.clusters[1].len(), 95);
    assert!(rep.find("super_regular_degree").unwrap().passed);
}

#[test]
fn too_many_failing_vertices_is_irregular() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(200, 2, 0.5, 0.3, 8)).unwrap();
    let cut: Vec<usize> = (0..30).collect();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| !(cut.contains(&u) && v >= 100) && !(cut.contains(&v) && u >= 100))
        .collect();
    let g = Graph::from_edges(200, edges).unwrap();
    let tester = RegularityTester::new(&g);
    let r = ReducedGraph {
        graph: Graph::path(2),
        matching: vec![(0, 1)],
        dropped: None,
    };
    let err = make_super_regular(&tester, &p, &r, &thresholds(0.1, 0.3)).unwrap_err();
    assert!(matches!(err, EmbedError::Irregular(..)));
}

#[test]
fn no_exceptional_vertices_is_a_no_op() {
    let (g, p) = planted_regular_host(&PlantedHostConfig::new(60, 2, 1.0, 0.5, 3)).unwrap();
    let tester = RegularityTester::new(&g);
    let r = ReducedGraph {
        graph: Graph::path(2),
        matching: vec![(0, 1)],
        dropped: None,
    };
    let (p2, rep) = distribute_exceptional(&tester, &p, &r, &thresholds(0.1, 0.5), 10, 1).unwrap();
    assert_eq!(p2.clusters, p.clusters);
    assert_eq!(rep.counters["exceptional"], 0);
}

#[test]
fn thirty_exceptional_vertices_spread_evenly() {
    // Ten planted clusters of 153; the last three vertices of each become
    // exceptional.
    let (g, _) = planted_regular_host(&PlantedHostConfig::new(1530, 10, 0.5, 0.3, 12)).unwrap();
    let labels: Vec<Option<usize>> = (0..1530).map(|v| (v % 153 < 150).then_some(v / 153)).collect();
    let p = RegularPartition::from_labels(&g, &labels, 0.1, 0.5).unwrap();
    p.validate(1530).unwrap();
    assert_eq!(p.exceptional.len(), 30);
    let th = thresholds(0.1, 0.45);
    let tester = RegularityTester::new(&g);
    let (r, p, _) = reduced_graph_and_matching(&tester, &p, &th, 0.45, 50, 1).unwrap();
    let (p, _) = make_super_regular(&tester, &p, &r, &th).unwrap();
    let (p2, rep) = distribute_exceptional(&tester, &p, &r, &th, 50, 2).unwrap();
    let gained: Vec<usize> = serde_json::from_value(rep.counters["gained"].clone()).unwrap();
    assert_eq!(gained.iter().sum::<usize>(), 30);
    assert!(gained.iter().all(|&x| x <= 6), "{gained:?}");
    assert!(rep.find("max_gain").unwrap().passed);
    assert!(rep.find("size_spread").unwrap().passed);
    assert!(p2.exceptional.is_empty());
    // Direct count of auxiliary degrees against the logged bound.
    let check = rep.find("auxiliary_degree").unwrap();
    assert!(check.passed, "{check:?}");
    let bits = AdjacencyBits::new(&g);
    let masks: Vec<Vec<u64>> = p.clusters.iter().map(|c| bits.mask(c)).collect();
    for &v in &p.exceptional {
        let deg_j = (0..10)
            .filter(|&i| bits.count_in(v, &masks[r.partner(i).unwrap()]) as f64 >= 0.3 * p.m as f64)
            .count();
        assert!(deg_j as f64 >= check.bound);
    }
}

#[test]
fn quotas_split_by_largest_remainder() {
    assert_eq!(cluster_quotas(&[150; 10], 720).unwrap(), vec![72; 10]);
    assert_eq!(cluster_quotas(&[3, 3, 3], 4).unwrap(), vec![2, 1, 1]);
    assert_eq!(cluster_quotas(&[5, 5], 10).unwrap(), vec![5, 5]);
    assert!(cluster_quotas(&[1, 1], 3).is_err());
}

fn matching_only(l: usize, matching: Vec<(usize, usize)>, extra: &[(usize, usize)]) -> ReducedGraph {
    let edges: Vec<(usize, usize)> = matching.iter().chain(extra).copied().collect();
    ReducedGraph {
        graph: Graph::from_edges(l, edges).unwrap(),
        matching,
        dropped: None,
    }
}

#[test]
fn single_matching_edge_takes_everything() {
    let h = small_guest();
    let r = matching_only(2, vec![(0, 1)], &[]);
    let (state, rep) = assign_components(&h, &r, &[16, 16], 0.0, 10, 1).unwrap();
    assert_eq!(state.load.iter().sum::<usize>(), 32);
    assert_eq!(rep.counters["edge_loads"], serde_json::json!([32]));
    assert!(rep.find("edges_on_matching").unwrap().passed);
}

#[test]
fn reference_components_fit_the_load_window() {
    let h = construct(&solve_params(800, 5, 1, Some(40), 0.1, 11).unwrap()).unwrap();
    let r = matching_only(10, vec![(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)], &[]);
    let quota = cluster_quotas(&[150; 10], 720).unwrap();
    let ok = (0..10)
        .filter(|&s| assign_components(&h, &r, &quota, 0.1, 10, s).is_ok())
        .count();
    assert!(ok >= 1);
    let (state, rep) = assign_components(&h, &r, &quota, 0.1, 10_000, 3).unwrap();
    assert!(rep.find("load_window").unwrap().passed);
    // Every edge outside the separator joins matched clusters.
    for (u, v) in h.graph.edges() {
        if let (Some(a), Some(b)) = (state.cluster_of[u], state.cluster_of[v]) {
            assert_eq!(r.partner(a), Some(b));
        }
    }
}

#[test]
fn impossible_window_exhausts_seeds() {
    let h = small_guest();
    let r = matching_only(4, vec![(0, 1), (2, 3)], &[]);
    // Edge loads are multiples of the broom size 4, never 15 or 17.
    let err = assign_components(&h, &r, &[7, 8, 8, 9], 0.0, 50, 1).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Failure);
}

/// Places brooms by hand: `plan[b] = (first cluster, leaf cluster)`.
fn manual_state(h: &HrtGraph, plan: &[(usize, usize)], l: usize) -> AssignmentState {
    let mut state = AssignmentState {
        cluster_of: vec![None; h.graph.vertex_count()],
        image_of: BTreeMap::new(),
        restrictions: BTreeMap::new(),
        load: vec![0; l],
        quota: vec![0; l],
        reassigned_in: vec![0; l],
    };
    for (broom, &(f, leaf)) in h.components.iter().zip(plan) {
        state.cluster_of[broom.first()] = Some(f);
        state.load[f] += 1;
        for &x in &broom.leaves {
            state.cluster_of[x] = Some(leaf);
            state.load[leaf] += 1;
        }
    }
    state.quota = state.load.clone();
    state
}

fn six_cluster_host(designated: Vec<(usize, usize)>) -> (Graph, RegularPartition) {
    let mut cfg = PlantedHostConfig::new(120, 6, 0.5, 0.3, 5);
    cfg.designated = Some(designated);
    planted_regular_host(&cfg).unwrap()
}

#[test]
fn balanced_state_needs_no_leaf_moves() {
    let h = small_guest();
    let (g, p) = six_cluster_host(vec![(0, 1), (2, 3), (4, 5)]);
    let r = matching_only(6, vec![(0, 1), (2, 3), (4, 5)], &[]);
    let mut state = manual_state(&h, &[(0, 1), (0, 1), (0, 1), (0, 1), (3, 2), (3, 2), (4, 5), (4, 5)], 6);
    let before = state.clone();
    let rep = rebalance_leaves(&h, &mut state, &AdjacencyBits::new(&g), &p, &r, &thresholds(0.1, 0.5), 10.0).unwrap();
    assert_eq!(state, before);
    assert_eq!(rep.counters["moved"], 0);
}

#[test]
fn direct_imbalance_moves_exactly_the_surplus() {
    let h = small_guest();
    let designated = vec![(0, 1), (2, 3), (4, 5), (0, 2)];
    let (g, p) = six_cluster_host(designated.clone());
    let r = matching_only(6, vec![(0, 1), (2, 3), (4, 5)], &[(0, 2)]);
    let mut state = manual_state(&h, &[(0, 1), (0, 1), (0, 1), (0, 1), (3, 2), (3, 2), (4, 5), (4, 5)], 6);
    state.quota[1] -= 3;
    state.quota[2] += 3;
    let rep = rebalance_leaves(&h, &mut state, &AdjacencyBits::new(&g), &p, &r, &thresholds(0.1, 0.3), 10.0).unwrap();
    assert_eq!(rep.counters["moved"], 3);
    assert_eq!(state.load, state.quota);
    assert_eq!(state.reassigned_in[2], 3);
    assert_eq!(state.restrictions.len(), 3);
    for (x, t) in &state.restrictions {
        assert_eq!(state.cluster_of[*x], Some(2));
        assert!(t.iter().all(|w| p.clusters[2].contains(*w)));
    }
}

#[test]
fn missing_direct_edge_routes_through_a_matched_pair() {
    let h = small_guest();
    let designated = vec![(0, 1), (2, 3), (4, 5), (0, 2), (3, 5)];
    let (g, p) = six_cluster_host(designated);
    let r = matching_only(6, vec![(0, 1), (2, 3), (4, 5)], &[(0, 2), (3, 5)]);
    let mut state = manual_state(&h, &[(0, 1), (0, 1), (0, 1), (0, 1), (3, 2), (3, 2), (4, 5), (4, 5)], 6);
    state.quota[1] -= 2;
    state.quota[5] += 2;
    let rep = rebalance_leaves(&h, &mut state, &AdjacencyBits::new(&g), &p, &r, &thresholds(0.1, 0.3), 10.0).unwrap();
    assert_eq!(state.load, state.quota);
    let moves = rep.counters["moves"].as_array().unwrap();
    assert_eq!(moves.len(), 1);
    assert_eq!(moves[0]["via"], 2);
    assert_eq!(moves[0]["from"], 1);
    assert_eq!(moves[0]["to"], 5);
    assert_eq!(rep.counters["moved"], 4);
}

#[test]
fn unreachable_deficit_is_a_host_degree_error() {
    let h = small_guest();
    let (g, p) = six_cluster_host(vec![(0, 1), (2, 3), (4, 5)]);
    let r = matching_only(6, vec![(0, 1), (2, 3), (4, 5)], &[]);
    let mut state = manual_state(&h, &[(0, 1), (0, 1), (0, 1), (0, 1), (3, 2), (3, 2), (4, 5), (4, 5)], 6);
    state.quota[1] -= 1;
    state.quota[5] += 1;
    let err = rebalance_leaves(&h, &mut state, &AdjacencyBits::new(&g), &p, &r, &thresholds(0.1, 0.3), 10.0).unwrap_err();
    assert!(matches!(err, EmbedError::HostDegree(_)), "{err:?}");
}

/// Complete host on 100 vertices: clusters 0..30 and 30..60, separator
/// images from 60.
fn complete_setup(h: &HrtGraph) -> (Graph, RegularPartition, AssignmentState) {
    let g = Graph::complete(100);
    let labels: Vec<Option<usize>> = (0..100).map(|v| (v < 60).then_some(v / 30)).collect();
    let p = RegularPartition::from_labels(&g, &labels, 0.5, 0.5).unwrap();
    let mut state = manual_state(h, &[(0, 1); 8], 2);
    let bits = AdjacencyBits::new(&g);
    let r = matching_only(2, vec![(0, 1)], &[]);
    for (i, s) in h.separator().iter().enumerate() {
        state.image_of.insert(*s, 60 + i);
    }
    reassign_first_vertices(h, &mut state, &bits, &p, &r, &thresholds(0.5, 0.5), 6.0, 10.0).unwrap();
    (g, p, state)
}

#[test]
fn blowup_into_complete_host_succeeds() {
    let h = small_guest();
    let (g, p, state) = complete_setup(&h);
    assert_eq!(state.restrictions.len(), 8);
    assert_eq!(state.reassigned_in, vec![0, 0]);
    let (map, rep) = blowup_embed(&h, &state, &g, &p, &BlowupConfig::new(4)).unwrap();
    assert!(map.verified);
    assert!(verify_embedding(&h.graph, &g, &map.map).valid);
    assert!(rep.find("restricted_share").unwrap().passed);
}

#[test]
fn alpha_cap_is_checked_before_placement() {
    let h = small_guest();
    let (g, p, state) = complete_setup(&h);
    let mut cfg = BlowupConfig::new(4);
    cfg.alpha = 0.1;
    let err = blowup_embed(&h, &state, &g, &p, &cfg).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Parameter);
}

#[test]
fn exact_embed_small_cases() {
    assert_eq!(exact_embed(&Graph::path(4), &Graph::cycle(5), 1000).label(), "embeds");
    assert_eq!(
        exact_embed(&Graph::complete(3), &Graph::complete_bipartite(3, 3), 10_000).label(),
        "does_not_embed"
    );
}

#[test]
fn verify_embedding_witnesses() {
    let g = Graph::cycle(6);
    assert!(verify_embedding(&Graph::path(6), &g, &[0, 1, 2, 3, 4, 5]).valid);
    let bad = verify_embedding(&Graph::path(3), &g, &[0, 1, 0]);
    assert!(!bad.valid);
    assert!(matches!(bad.violation, Some(Violation::NotInjective { first: 0, second: 2 })));
}

#[test]
fn random_map_on_reference_instance_fails() {
    use rand::seq::SliceRandom;
    let h = construct(&solve_params(800, 5, 1, Some(40), 0.1, 11).unwrap()).unwrap();
    let (g, _) = planted_regular_host(&PlantedHostConfig::new(1580, 10, 0.5, 0.3, 3)).unwrap();
    let mut map: Vec<usize> = (0..1580).collect();
    map.shuffle(&mut rng::stream(1, 0));
    map.truncate(800);
    let check = verify_embedding(&h.graph, &g, &map);
    assert!(!check.valid);
    assert!(matches!(check.violation, Some(Violation::MissingEdge { .. })));
}

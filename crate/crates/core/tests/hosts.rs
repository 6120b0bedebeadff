use sbl_core::graph::{bfs_distance, VertexSet};
use sbl_core::hosts::{
    build_layered_host, build_two_clique_host, layered_non_embeddability, robust_expander_probe, robust_neighborhood,
    two_clique_host, two_clique_split_feasible, two_sided_mini_guest, LayeredHost, RobustExpanderParams, LAYERS,
};

#[test]
fn layered_host_layers_are_even() {
    for n in [500, 2000] {
        let host = build_layered_host(n).unwrap();
        assert_eq!(host.layers.len(), LAYERS);
        assert!(host.layers.iter().all(|l| l.len() == n / LAYERS));
        // consecutive layers are completely joined
        let (a, b) = (&host.layers[10], &host.layers[11]);
        assert!(a.iter().all(|&u| b.iter().all(|&v| host.graph.has_edge(u, v))));
    }
    assert!(build_layered_host(0).is_err());
    assert!(build_layered_host(150).is_err());
}

#[test]
fn layer_blocks_sit_31_apart() {
    let host = build_layered_host(500).unwrap();
    let d = bfs_distance(&host.graph, &host.layer_union(1, 35), &host.layer_union(66, 100)).unwrap();
    assert_eq!(d.distance, Some(31));
    assert_eq!(d.path.len(), 32);
    let cert = layered_non_embeddability(1, &host).unwrap();
    assert_eq!(cert.guest_short_path_bound, 6);
    assert!(cert.conclusion);
}

#[test]
fn robust_probe_on_layered_host() {
    let host = build_layered_host(1000).unwrap();
    let p = RobustExpanderParams::new(0.002, 0.2).unwrap();
    assert_eq!(p.window(1000), (200, 800));
    let rep = robust_expander_probe(&host.graph, p, 300, &host.adversarial_sets(), 4).unwrap();
    assert_eq!(rep.violations, 0);
    assert!(rep.adversarial_tested >= 18);
    // a block of layers gains at least its two boundary layers
    let s = host.layer_union(30, 60);
    assert!(robust_neighborhood(&host.graph, &s, 0.002).len() >= s.len() + 20);
}

#[test]
fn layered_annotation_round_trip() {
    let host = build_layered_host(500).unwrap();
    let ann = host.to_annotated();
    assert_eq!(LayeredHost::from_annotated(&ann).unwrap(), host);
    let mut broken = ann.clone();
    broken.component = None;
    assert!(LayeredHost::from_annotated(&broken).is_err());
}

#[test]
fn two_clique_rounding() {
    let h = build_two_clique_host(2000, 0.5).unwrap();
    assert_eq!(h.left_size, 1010);
    assert_eq!(h.overlap_size, 20);
    assert_eq!(h.graph.min_degree(), 1009);
    assert_eq!(h.nominal_clique_size, Some(1010.0));
    assert!(build_two_clique_host(1, 0.1).is_err());
    assert!(build_two_clique_host(100, 1.5).is_err());
    assert!(two_clique_host(3, 3, 4).is_err());
}

#[test]
fn mini_guest_split_needs_two_shared_vertices() {
    let guest = two_sided_mini_guest();
    assert_eq!(guest.edge_count(), 16);
    assert!(guest.max_degree() <= 3);
    assert!(!two_clique_split_feasible(&guest, &two_clique_host(8, 9, 1).unwrap()));
    assert!(two_clique_split_feasible(&guest, &two_clique_host(9, 9, 2).unwrap()));
    let parts = two_clique_host(9, 10, 3).unwrap();
    assert_eq!(parts.left_only().len() + parts.overlap().len() + parts.right_only().len(), 16);
    assert!(parts.overlap().is_disjoint(&VertexSet::range(0..6)));
}

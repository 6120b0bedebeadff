//! Exact subgraph search and embedding verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};

/// Injective guest-to-host vertex map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    pub map: Vec<Vertex>,
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongLength { expected: usize, found: usize },
    OutOfRange { guest: Vertex, image: Vertex },
    NotInjective { first: Vertex, second: Vertex },
    MissingEdge { u: Vertex, v: Vertex },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// Checks that `map` is injective and sends every edge of `h` to an edge of
/// `g`. The first violation in guest-id order is reported.
pub fn verify_embedding(h: &Graph, g: &Graph, map: &[Vertex]) -> EmbeddingCheck {
    let fail = |v| EmbeddingCheck {
        valid: false,
        violation: Some(v),
    };
    if map.len() != h.vertex_count() {
        return fail(Violation::WrongLength {
            expected: h.vertex_count(),
            found: map.len(),
        });
    }
    let mut owner = vec![None; g.vertex_count()];
    for (x, &w) in map.iter().enumerate() {
        if w >= g.vertex_count() {
            return fail(Violation::OutOfRange { guest: x, image: w });
        }
        if let Some(first) = owner[w] {
            return fail(Violation::NotInjective { first, second: x });
        }
        owner[w] = Some(x);
    }
    for (u, v) in h.edges() {
        if !g.has_edge(map[u], map[v]) {
            return fail(Violation::MissingEdge { u, v });
        }
    }
    EmbeddingCheck {
        valid: true,
        violation: None,
    }
}

impl EmbeddingMap {
    pub fn checked(h: &Graph, g: &Graph, map: Vec<Vertex>) -> Self {
        let verified = verify_embedding(h, g, &map).valid;
        EmbeddingMap { map, verified }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EmbedOutcome {
    Embeds { embedding: EmbeddingMap, nodes: u64 },
    DoesNotEmbed { nodes: u64 },
    Inconclusive { nodes: u64 },
}

impl EmbedOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            EmbedOutcome::Embeds { .. } => "embeds",
            EmbedOutcome::DoesNotEmbed { .. } => "does_not_embed",
            EmbedOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Twin classes of `g`: vertices with equal open neighborhoods, or equal
/// closed neighborhoods, share a class. Swapping two twins is an
/// automorphism fixing everything else.
pub fn twin_classes(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut open: BTreeMap<&[Vertex], Vec<Vertex>> = BTreeMap::new();
    for v in 0..n {
        open.entry(g.neighbors(v)).or_default().push(v);
    }
    let closed_of = |v: Vertex| {
        let mut c = g.neighbors(v).to_vec();
        let pos = c.partition_point(|&u| u < v);
        c.insert(pos, v);
        c
    };
    let mut closed: BTreeMap<Vec<Vertex>, Vec<Vertex>> = BTreeMap::new();
    for v in 0..n {
        closed.entry(closed_of(v)).or_default().push(v);
    }
    let mut class: Vec<usize> = (0..n).collect();
    for group in open.values().chain(closed.values()) {
        if group.len() > 1 {
            for &v in group {
                class[v] = group[0];
            }
        }
    }
    class
}

/// Exhaustive backtracking search for an injective homomorphism of `h` into
/// `g` (a not necessarily induced subgraph copy).
///
/// Guest vertices are placed in BFS order so every non-root vertex has a
/// placed neighbor; candidates must be adjacent to all placed neighbors'
/// images and have enough degree. Among unused host twins only one
/// representative is tried. `DoesNotEmbed` is returned only when the search
/// space is exhausted within `node_limit` placements.
pub fn exact_embed(h: &Graph, g: &Graph, node_limit: u64) -> EmbedOutcome {
    if h.vertex_count() > g.vertex_count() || h.max_degree() > g.max_degree() || h.edge_count() > g.edge_count() {
        return EmbedOutcome::DoesNotEmbed { nodes: 0 };
    }
    if h.vertex_count() == 0 {
        return EmbedOutcome::Embeds {
            embedding: EmbeddingMap::checked(h, g, Vec::new()),
            nodes: 0,
        };
    }
    let order = search_order(h);
    let mut pos = vec![usize::MAX; h.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let back: Vec<Vec<Vertex>> = order
        .iter()
        .map(|&v| h.neighbors(v).iter().copied().filter(|&u| pos[u] < pos[v]).collect())
        .collect();
    let mut s = Search {
        h,
        g,
        order,
        back,
        twin: twin_classes(g),
        map: vec![usize::MAX; h.vertex_count()],
        used: vec![false; g.vertex_count()],
        nodes: 0,
        limit: node_limit,
        exhausted: false,
    };
    let found = s.go(0);
    let nodes = s.nodes;
    if found {
        EmbedOutcome::Embeds {
            embedding: EmbeddingMap::checked(h, g, s.map),
            nodes,
        }
    } else if s.exhausted {
        EmbedOutcome::Inconclusive { nodes }
    } else {
        EmbedOutcome::DoesNotEmbed { nodes }
    }
}

/// BFS order per component, components by decreasing size, each rooted at
/// its highest-degree vertex.
fn search_order(h: &Graph) -> Vec<Vertex> {
    let mut comps = crate::graph::connected_components(h);
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut seen = vec![false; h.vertex_count()];
    let mut order = Vec::with_capacity(h.vertex_count());
    for c in comps {
        let root = *c
            .iter()
            .max_by_key(|&&v| (h.degree(v), std::cmp::Reverse(v)))
            .expect("nonempty component");
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut i = start;
        while i < order.len() {
            let v = order[i];
            let mut next: Vec<Vertex> = h.neighbors(v).iter().copied().filter(|&u| !seen[u]).collect();
            next.sort_by_key(|&u| (std::cmp::Reverse(h.degree(u)), u));
            for u in next {
                seen[u] = true;
                order.push(u);
            }
            i += 1;
        }
    }
    order
}

struct Search<'a> {
    h: &'a Graph,
    g: &'a Graph,
    order: Vec<Vertex>,
    back: Vec<Vec<Vertex>>,
    twin: Vec<usize>,
    map: Vec<Vertex>,
    used: Vec<bool>,
    nodes: u64,
    limit: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn go(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let need = self.h.degree(x);
        let pool: Vec<Vertex> = match self.back[depth].first() {
            Some(&p) => self.g.neighbors(self.map[p]).to_vec(),
            None => self.g.vertices().collect(),
        };
        let mut tried_classes: Vec<usize> = Vec::new();
        for w in pool {
            if self.used[w] || self.g.degree(w) < need {
                continue;
            }
            if !self.back[depth].iter().all(|&u| self.g.has_edge(self.map[u], w)) {
                continue;
            }
            let class = self.twin[w];
            if tried_classes.contains(&class) {
                continue;
            }
            tried_classes.push(class);
            if self.nodes >= self.limit {
                self.exhausted = true;
                return false;
            }
            self.nodes += 1;
            self.used[w] = true;
            self.map[x] = w;
            if self.go(depth + 1) {
                return true;
            }
            self.used[w] = false;
            self.map[x] = usize::MAX;
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Tries every injection of `h` into `g`.
    fn all_injections(h: &Graph, g: &Graph) -> bool {
        fn go(h: &Graph, g: &Graph, x: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            if x == h.vertex_count() {
                return h.edges().all(|(u, v)| g.has_edge(map[u], map[v]));
            }
            for w in 0..g.vertex_count() {
                if !used[w] {
                    used[w] = true;
                    map.push(w);
                    if go(h, g, x + 1, map, used) {
                        return true;
                    }
                    map.pop();
                    used[w] = false;
                }
            }
            false
        }
        go(h, g, 0, &mut Vec::new(), &mut vec![false; g.vertex_count()])
    }

    fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
        let mut edges = Vec::new();
        let mut i = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[i] {
                    edges.push((u, v));
                }
                i += 1;
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn verify_examples() {
        let h = Graph::path(3);
        let g = Graph::complete(4);
        assert!(verify_embedding(&h, &g, &[0, 1, 2]).valid);
        assert_eq!(
            verify_embedding(&h, &g, &[0, 1, 0]).violation,
            Some(Violation::NotInjective { first: 0, second: 2 })
        );
        let g = Graph::path(4);
        assert_eq!(
            verify_embedding(&h, &g, &[0, 1, 3]).violation,
            Some(Violation::MissingEdge { u: 1, v: 2 })
        );
        assert!(matches!(
            verify_embedding(&h, &g, &[0, 1]).violation,
            Some(Violation::WrongLength { .. })
        ));
    }

    #[test]
    fn exact_examples() {
        let c4 = Graph::cycle(4);
        assert_eq!(exact_embed(&c4, &Graph::complete(4), 1000).label(), "embeds");
        assert_eq!(exact_embed(&c4, &Graph::star(3), 1000).label(), "does_not_embed");
        let out = exact_embed(&Graph::path(4), &Graph::cycle(5), 1000);
        match out {
            EmbedOutcome::Embeds { embedding, .. } => assert!(embedding.verified),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            exact_embed(&Graph::complete(3), &Graph::complete_bipartite(4, 4), 10_000).label(),
            "does_not_embed"
        );
        assert_eq!(exact_embed(&Graph::cycle(9), &Graph::complete(9), 0).label(), "inconclusive");
    }

    #[test]
    fn twins_in_two_cliques() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
        let c = twin_classes(&g);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[3], c[4]);
        assert_ne!(c[0], c[2]);
        assert_ne!(c[0], c[3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn matches_all_injections(
            nh in 1usize..6, ng in 1usize..8,
            hb in proptest::collection::vec(any::<bool>(), 15),
            gb in proptest::collection::vec(proptest::bool::weighted(0.6), 28),
        ) {
            prop_assume!(nh <= ng);
            let h = graph_from_bits(nh, &hb);
            let g = graph_from_bits(ng, &gb);
            let out = exact_embed(&h, &g, u64::MAX);
            prop_assert_eq!(out.label() == "embeds", all_injections(&h, &g));
            if let EmbedOutcome::Embeds { embedding, .. } = out {
                prop_assert!(embedding.verified);
            }
        }
    }
}

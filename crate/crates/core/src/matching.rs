//! Maximum matching in general graphs (Edmonds' blossom algorithm).

use std::collections::VecDeque;

use crate::graph::{Graph, Vertex};

/// Maximum-cardinality matching; entry `v` holds the partner of `v`.
///
/// Vertices are tried as roots in increasing id order and neighbors are
/// scanned in sorted order, so the result is deterministic.
pub fn maximum_matching(g: &Graph) -> Vec<Option<Vertex>> {
    let n = g.vertex_count();
    let mut b = Blossom {
        g,
        mate: vec![None; n],
        parent: vec![None; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    // cheap greedy start
    for v in 0..n {
        if b.mate[v].is_none() {
            if let Some(&u) = g.neighbors(v).iter().find(|&&u| b.mate[u].is_none()) {
                b.mate[v] = Some(u);
                b.mate[u] = Some(v);
            }
        }
    }
    for root in 0..n {
        if b.mate[root].is_none() {
            if let Some(end) = b.find_path(root) {
                b.augment(end);
            }
        }
    }
    b.mate
}

/// Matched pairs `(u, v)` with `u < v`, in increasing order of `u`.
pub fn matching_pairs(mate: &[Option<Vertex>]) -> Vec<(Vertex, Vertex)> {
    mate.iter()
        .enumerate()
        .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
        .collect()
}

struct Blossom<'a> {
    g: &'a Graph,
    mate: Vec<Option<Vertex>>,
    parent: Vec<Option<Vertex>>,
    base: Vec<Vertex>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<Vertex>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: Vertex, mut b: Vertex) -> Vertex {
        let mut seen = vec![false; self.base.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            match self.mate[a] {
                Some(m) => a = self.parent[m].expect("alternating tree"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b].expect("alternating tree")].expect("alternating tree");
        }
    }

    fn mark_path(&mut self, mut v: Vertex, b: Vertex, mut child: Vertex) {
        while self.base[v] != b {
            let m = self.mate[v].expect("matched inside blossom");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("alternating tree");
        }
    }

    fn find_path(&mut self, root: Vertex) -> Option<Vertex> {
        let n = self.base.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = None);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in self.g.neighbors(v) {
                if self.base[v] == self.base[to] || self.mate[v] == Some(to) {
                    continue;
                }
                if to == root || self.mate[to].is_some_and(|m| self.parent[m].is_some()) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match self.mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.used[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: Vertex) {
        loop {
            let pv = self.parent[v].expect("augmenting path");
            let next = self.mate[pv];
            self.mate[v] = Some(pv);
            self.mate[pv] = Some(v);
            match next {
                Some(nv) => v = nv,
                None => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(g: &Graph) -> usize {
        fn go(edges: &[(usize, usize)], i: usize, used: &mut Vec<bool>) -> usize {
            if i == edges.len() {
                return 0;
            }
            let mut best = go(edges, i + 1, used);
            let (u, v) = edges[i];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                best = best.max(1 + go(edges, i + 1, used));
                used[u] = false;
                used[v] = false;
            }
            best
        }
        let edges: Vec<_> = g.edges().collect();
        go(&edges, 0, &mut vec![false; g.vertex_count()])
    }

    fn check_valid(g: &Graph, mate: &[Option<Vertex>]) {
        for (v, m) in mate.iter().enumerate() {
            if let Some(u) = *m {
                assert_eq!(mate[u], Some(v));
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn small_cases() {
        let m = maximum_matching(&Graph::cycle(5));
        assert_eq!(matching_pairs(&m).len(), 2);
        let m = maximum_matching(&Graph::complete(10));
        assert_eq!(matching_pairs(&m).len(), 5);
        assert_eq!(matching_pairs(&maximum_matching(&Graph::star(4))).len(), 1);
        assert!(maximum_matching(&Graph::empty(3)).iter().all(Option::is_none));
        // two triangles joined by an edge need the blossom step
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(matching_pairs(&maximum_matching(&g)).len(), 3);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(n in 1usize..10, bits in proptest::collection::vec(any::<bool>(), 45)) {
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[idx] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let mate = maximum_matching(&g);
            check_valid(&g, &mate);
            prop_assert_eq!(matching_pairs(&mate).len(), brute_force(&g));
        }
    }
}

//! Undirected simple graphs on dense vertex ids `0..n`, sorted vertex sets, and
//! the traversal primitives the rest of the crate is built on.

use std::collections::VecDeque;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ErrorClass;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex sets must be disjoint, both contain {0}")]
    Overlap(Vertex),
    #[error("vertex set must be nonempty")]
    EmptySet,
}

impl GraphError {
    pub fn class(&self) -> ErrorClass {
        ErrorClass::Parameter
    }
}

/// Immutable simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EdgeListRepr", try_from = "EdgeListRepr")]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

#[derive(Serialize, Deserialize)]
struct EdgeListRepr {
    n: usize,
    edges: Vec<[Vertex; 2]>,
}

impl From<Graph> for EdgeListRepr {
    fn from(g: Graph) -> Self {
        EdgeListRepr {
            n: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<EdgeListRepr> for Graph {
    type Error = GraphError;

    fn try_from(repr: EdgeListRepr) -> Result<Self, Self::Error> {
        Graph::from_edges(repr.n, repr.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are merged; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Graph {
            adj,
            edge_count: twice / 2,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("valid complete graph")
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid cycle")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid star")
    }

    /// Complete bipartite graph with classes `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
        Graph::from_edges(a + b, edges).expect("valid complete bipartite graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> Range<Vertex> {
        0..self.adj.len()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let start = list.partition_point(|&v| v <= u);
            list[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// The common degree if the graph is regular (and nonempty).
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adj.first()?.len();
        self.adj.iter().all(|l| l.len() == first).then_some(first)
    }

    /// Fraction of vertex pairs that are edges, `e / C(n, 2)`.
    pub fn edge_density(&self) -> f64 {
        let n = self.vertex_count() as f64;
        if n < 2.0 {
            return 0.0;
        }
        self.edge_count as f64 / (n * (n - 1.0) / 2.0)
    }

    /// Induced subgraph on `set`; returns the subgraph and the map from new
    /// ids back to ids of `self`.
    pub fn induced(&self, set: &VertexSet) -> (Graph, Vec<Vertex>) {
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in set.iter().enumerate() {
            new_id[v] = i;
        }
        let edges = set.iter().flat_map(|&u| {
            let new_id = &new_id;
            self.adj[u]
                .iter()
                .filter(move |&&v| v > u && new_id[v] != usize::MAX)
                .map(move |&v| (new_id[u], new_id[v]))
        });
        let g = Graph::from_edges(set.len(), edges.collect::<Vec<_>>()).expect("induced subgraph");
        (g, set.as_slice().to_vec())
    }

    /// Copy of the graph with the edge `uv` removed (no-op if absent).
    pub fn without_edge(&self, u: Vertex, v: Vertex) -> Graph {
        let edges = self
            .edges()
            .filter(|&(a, b)| !((a, b) == (u, v) || (a, b) == (v, u)));
        Graph::from_edges(self.vertex_count(), edges.collect::<Vec<_>>()).expect("edge removal")
    }
}

/// Sorted set of distinct vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new<I: IntoIterator<Item = Vertex>>(ids: I) -> Self {
        let mut v: Vec<Vertex> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn range(r: Range<Vertex>) -> Self {
        VertexSet(r.collect())
    }

    /// Fails if any id is `>= n`.
    pub fn check_range(&self, n: usize) -> Result<(), GraphError> {
        match self.0.last() {
            Some(&v) if v >= n => Err(GraphError::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vertex> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    /// Smallest element present in both sets.
    pub fn first_common(&self, other: &VertexSet) -> Option<Vertex> {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.0[i]),
            }
        }
        None
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.first_common(other).is_none()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()).copied())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::slice::Iter<'a, Vertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Row-major adjacency bit matrix, for workloads dominated by
/// neighbor-in-set counting on dense graphs.
#[derive(Debug, Clone)]
pub struct AdjacencyBits {
    words: usize,
    bits: Vec<u64>,
}

impl AdjacencyBits {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for u in g.vertices() {
            for &v in g.neighbors(u) {
                bits[u * words + v / 64] |= 1 << (v % 64);
            }
        }
        AdjacencyBits { words, bits }
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.bits[u * self.words + v / 64] & (1 << (v % 64)) != 0
    }

    /// Bit mask of `set` compatible with [`AdjacencyBits::count_in`].
    pub fn mask<'a, I: IntoIterator<Item = &'a Vertex>>(&self, set: I) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for &v in set {
            m[v / 64] |= 1 << (v % 64);
        }
        m
    }

    /// `|N(v) ∩ set|` where `mask` was produced by [`AdjacencyBits::mask`].
    pub fn count_in(&self, v: Vertex, mask: &[u64]) -> usize {
        let row = &self.bits[v * self.words..(v + 1) * self.words];
        row.iter()
            .zip(mask)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// Number of ordered pairs `(a, b)` with `a ∈ A`, `b ∈ B` and `ab` an edge.
///
/// For disjoint sets this is the usual `e(A, B)`. An edge with both ends in
/// `A ∩ B` is counted twice, so `edges_between(V, V) = 2 e(G)`.
pub fn edges_between(g: &Graph, a: &VertexSet, b: &VertexSet) -> usize {
    let in_b = b.mask(g.vertex_count());
    a.iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&v| in_b[v]).count())
        .sum()
}

/// Density `e(X, Y) / (|X| |Y|)` of two disjoint nonempty sets.
pub fn density(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<f64, GraphError> {
    if x.is_empty() || y.is_empty() {
        return Err(GraphError::EmptySet);
    }
    x.check_range(g.vertex_count())?;
    y.check_range(g.vertex_count())?;
    if let Some(v) = x.first_common(y) {
        return Err(GraphError::Overlap(v));
    }
    Ok(edges_between(g, x, y) as f64 / (x.len() as f64 * y.len() as f64))
}

/// Union of the neighborhoods of `set`.
pub fn neighborhood(g: &Graph, set: &VertexSet) -> VertexSet {
    set.iter().flat_map(|&v| g.neighbors(v).iter().copied()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distance {
    /// `None` when no vertex of `Y` is reachable from `X`.
    pub distance: Option<usize>,
    /// A shortest path from `X` to `Y`; empty when unreachable.
    pub path: Vec<Vertex>,
}

/// Hop distance between two vertex sets with a shortest-path witness.
pub fn bfs_distance(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<Distance, GraphError> {
    if x.is_empty() || y.is_empty() {
        return Err(GraphError::EmptySet);
    }
    let n = g.vertex_count();
    x.check_range(n)?;
    y.check_range(n)?;
    if let Some(v) = x.first_common(y) {
        return Ok(Distance {
            distance: Some(0),
            path: vec![v],
        });
    }
    let target = y.mask(n);
    let mut parent = vec![usize::MAX; n];
    let mut seen = x.mask(n);
    let mut queue: VecDeque<Vertex> = x.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            parent[v] = u;
            if target[v] {
                let mut path = vec![v];
                let mut cur = v;
                while parent[cur] != usize::MAX {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Ok(Distance {
                    distance: Some(path.len() - 1),
                    path,
                });
            }
            queue.push_back(v);
        }
    }
    Ok(Distance {
        distance: None,
        path: Vec::new(),
    })
}

/// Single-source hop distances (`usize::MAX` for unreachable vertices).
pub fn bfs_layers(g: &Graph, source: Vertex) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Connected components of `G - S`, each sorted, ordered by smallest vertex.
pub fn components_after_removal(g: &Graph, s: &VertexSet) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let mut blocked = s.mask(n);
    let mut out = Vec::new();
    for start in 0..n {
        if blocked[start] {
            continue;
        }
        blocked[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &v in g.neighbors(u) {
                if !blocked[v] {
                    blocked[v] = true;
                    comp.push(v);
                }
            }
        }
        out.push(VertexSet::new(comp));
    }
    out
}

pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    components_after_removal(g, &VertexSet::default())
}

pub fn is_connected(g: &Graph) -> bool {
    g.vertex_count() <= 1 || connected_components(g).len() == 1
}

/// Proper 2-coloring if one exists. The smallest vertex of every component
/// is placed in the first class.
pub fn bipartition(g: &Graph) -> Option<(VertexSet, VertexSet)> {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return None;
                }
            }
        }
    }
    let zero = (0..n).filter(|&v| color[v] == 0).collect();
    let one = (0..n).filter(|&v| color[v] == 1).collect();
    Some((zero, one))
}

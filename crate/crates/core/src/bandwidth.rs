//! Bandwidth: exact search for small graphs, heuristic orderings for upper
//! bounds, and the short-path lower-bound certificate for the broom family.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_distance, bfs_layers, connected_components, Graph, GraphError, Vertex, VertexSet};
use crate::hrt::HrtGraph;
use crate::rng;
use crate::subgraph::twin_classes;
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BandwidthError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl BandwidthError {
    pub fn class(&self) -> ErrorClass {
        match self {
            BandwidthError::LemmaViolation(_) => ErrorClass::LemmaViolation,
            BandwidthError::Graph(e) => e.class(),
            BandwidthError::Parameter(_) => ErrorClass::Parameter,
        }
    }
}

/// A labelling of the vertices by positions `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ordering {
    position: Vec<usize>,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Ordering {
            position: (0..n).collect(),
        }
    }

    /// `position[v]` is the label of vertex `v`.
    pub fn from_positions(position: Vec<usize>) -> Result<Self, BandwidthError> {
        let n = position.len();
        let mut seen = vec![false; n];
        for &p in &position {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(BandwidthError::Parameter(format!("position {p} is out of range or repeated")));
            }
        }
        Ok(Ordering { position })
    }

    /// `sequence[i]` is the vertex at position `i`.
    pub fn from_sequence(sequence: &[Vertex]) -> Result<Self, BandwidthError> {
        let n = sequence.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(BandwidthError::Parameter(format!("vertex {v} is out of range or repeated")));
            }
            position[v] = i;
        }
        Ok(Ordering { position })
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.position[v]
    }

    pub fn sequence(&self) -> Vec<Vertex> {
        let mut seq = vec![0; self.position.len()];
        for (v, &p) in self.position.iter().enumerate() {
            seq[p] = v;
        }
        seq
    }
}

impl TryFrom<Vec<usize>> for Ordering {
    type Error = BandwidthError;
    fn try_from(position: Vec<usize>) -> Result<Self, Self::Error> {
        Ordering::from_positions(position)
    }
}

impl From<Ordering> for Vec<usize> {
    fn from(o: Ordering) -> Self {
        o.position
    }
}

/// Largest label difference across an edge; 0 without edges.
pub fn ordering_stretch(g: &Graph, order: &Ordering) -> usize {
    g.edges()
        .map(|(u, v)| order.position(u).abs_diff(order.position(v)))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactBandwidth {
    pub exact: Option<usize>,
    pub lower_bound: usize,
    pub upper_bound: usize,
    /// Ordering achieving `upper_bound`.
    pub witness: Ordering,
    pub nodes: u64,
}

/// Exact bandwidth by iterative deepening on the width, one connected
/// component at a time. Returns `exact: None` with the bounds proved so far
/// when `node_limit` placements are exhausted.
pub fn exact_bandwidth(g: &Graph, node_limit: u64) -> ExactBandwidth {
    let n = g.vertex_count();
    let mut position = vec![0; n];
    let mut offset = 0;
    let mut nodes = 0u64;
    let (mut lower, mut upper, mut all_exact) = (0, 0, true);
    for comp in connected_components(g) {
        let (sub, back) = g.induced(&comp);
        let (lo, hi, exact, seq) = component_bandwidth(&sub, node_limit, &mut nodes);
        all_exact &= exact;
        lower = lower.max(lo);
        upper = upper.max(hi);
        for (i, &local) in seq.iter().enumerate() {
            position[back[local]] = offset + i;
        }
        offset += seq.len();
    }
    let witness = Ordering { position };
    debug_assert_eq!(ordering_stretch(g, &witness), upper);
    ExactBandwidth {
        exact: all_exact.then_some(upper),
        lower_bound: if all_exact { upper } else { lower },
        upper_bound: upper,
        witness,
        nodes,
    }
}

fn component_bandwidth(g: &Graph, node_limit: u64, nodes: &mut u64) -> (usize, usize, bool, Vec<Vertex>) {
    let n = g.vertex_count();
    if n <= 1 {
        return (0, 0, true, (0..n).collect());
    }
    let lo = simple_lower_bound(g);
    let mut best = cuthill_mckee(g);
    let greedy = min_width_greedy(g, &mut rng::stream(0, 0));
    let stretch_of = |seq: &[Vertex]| ordering_stretch(g, &Ordering::from_sequence(seq).expect("valid sequence"));
    if stretch_of(&greedy) < stretch_of(&best) {
        best = greedy;
    }
    let hi = stretch_of(&best);
    let twin = twin_classes(g);
    let mut twin_prev = vec![None; n];
    let mut last_of_class: BTreeMap<usize, Vertex> = BTreeMap::new();
    for v in 0..n {
        if let Some(prev) = last_of_class.insert(twin[v], v) {
            twin_prev[v] = Some(prev);
        }
    }
    for b in lo..hi {
        let mut d = Decide {
            g,
            b,
            pos: vec![usize::MAX; n],
            seq: Vec::with_capacity(n),
            unplaced_nb: (0..n).map(|v| g.degree(v)).collect(),
            twin_prev: &twin_prev,
            nodes,
            limit: node_limit,
            exhausted: false,
            failed: HashSet::new(),
        };
        if d.go() {
            let seq = d.seq;
            return (b, b, true, seq);
        }
        if d.exhausted {
            return (b, hi, false, best);
        }
    }
    (hi, hi, true, best)
}

/// `max(ceil(maxdeg/2), ceil((n-1)/diam))` plus the edge-count bound
/// `m <= b n - b(b+1)/2`, for a connected graph.
fn simple_lower_bound(g: &Graph) -> usize {
    let n = g.vertex_count();
    let diam = g
        .vertices()
        .map(|v| bfs_layers(g, v).into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
        .max(1);
    let by_degree = g.max_degree().div_ceil(2);
    let by_diameter = (n - 1).div_ceil(diam);
    let m = g.edge_count();
    let by_edges = (0..n).find(|&b| b * n - b * (b + 1) / 2 >= m).unwrap_or(n - 1);
    by_degree.max(by_diameter).max(by_edges)
}

/// Placed-vertex mask plus the positions still inside the window.
type StateKey = (Vec<u64>, Vec<(usize, Vertex)>);

struct Decide<'a> {
    g: &'a Graph,
    b: usize,
    pos: Vec<usize>,
    seq: Vec<Vertex>,
    unplaced_nb: Vec<usize>,
    twin_prev: &'a [Option<Vertex>],
    nodes: &'a mut u64,
    limit: u64,
    exhausted: bool,
    /// Failed states: placed set plus the recent window that still matters.
    failed: HashSet<StateKey>,
}

impl Decide<'_> {
    fn state_key(&self) -> StateKey {
        let n = self.g.vertex_count();
        let mut mask = vec![0u64; n.div_ceil(64)];
        for &v in &self.seq {
            mask[v / 64] |= 1 << (v % 64);
        }
        let p = self.seq.len();
        let window = self.seq[p.saturating_sub(self.b)..]
            .iter()
            .filter(|&&v| self.unplaced_nb[v] > 0)
            .map(|&v| (p - self.pos[v], v))
            .collect();
        (mask, window)
    }

    fn free(&self, v: Vertex) -> bool {
        self.pos[v] == usize::MAX
    }

    fn go(&mut self) -> bool {
        let n = self.g.vertex_count();
        let p = self.seq.len();
        if p == n {
            return true;
        }
        let mut deadline = vec![usize::MAX; n];
        for &u in &self.seq {
            for &w in self.g.neighbors(u) {
                if self.free(w) {
                    deadline[w] = deadline[w].min(self.pos[u] + self.b);
                }
            }
        }
        let mut dls: Vec<usize> = (0..n).filter(|&v| self.free(v)).map(|v| deadline[v]).filter(|&d| d != usize::MAX).collect();
        dls.sort_unstable();
        if dls.iter().enumerate().any(|(i, &d)| d < p + i) {
            return false;
        }
        // an unplaced vertex and its unplaced neighbors must fit before deadline + b
        for v in (0..n).filter(|&v| self.free(v) && deadline[v] != usize::MAX) {
            if self.unplaced_nb[v] > deadline[v] + self.b - p {
                return false;
            }
        }
        let key = self.state_key();
        if self.failed.contains(&key) {
            return false;
        }
        let mut candidates: Vec<Vertex> = match (0..n).find(|&v| self.free(v) && deadline[v] == p) {
            Some(v) => vec![v],
            None => (0..n)
                .filter(|&v| self.free(v) && self.twin_prev[v].is_none_or(|t| !self.free(t)))
                .collect(),
        };
        candidates.sort_by_key(|&v| (deadline[v], v));
        for v in candidates {
            if self.twin_prev[v].is_some_and(|t| self.free(t)) {
                continue;
            }
            if *self.nodes >= self.limit {
                self.exhausted = true;
                return false;
            }
            *self.nodes += 1;
            self.pos[v] = p;
            self.seq.push(v);
            for &w in self.g.neighbors(v) {
                self.unplaced_nb[w] -= 1;
            }
            if self.go() {
                return true;
            }
            for &w in self.g.neighbors(v) {
                self.unplaced_nb[w] += 1;
            }
            self.seq.pop();
            self.pos[v] = usize::MAX;
            if self.exhausted {
                return false;
            }
        }
        self.failed.insert(key);
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Cuthill-McKee BFS levels from a pseudo-peripheral vertex.
    BfsLevel,
    /// Earliest-deadline-first placement with random tie-breaking.
    MinWidthGreedy,
}

pub fn heuristic_ordering(g: &Graph, strategy: Strategy, seed: u64) -> (Ordering, usize) {
    let seq = match strategy {
        Strategy::BfsLevel => cuthill_mckee(g),
        Strategy::MinWidthGreedy => min_width_greedy(g, &mut rng::stream(seed, 0)),
    };
    let order = Ordering::from_sequence(&seq).expect("heuristics emit permutations");
    let stretch = ordering_stretch(g, &order);
    (order, stretch)
}

/// Repeated BFS from a minimum-degree farthest vertex until the
/// eccentricity stops growing.
fn pseudo_peripheral(g: &Graph, comp: &VertexSet) -> Vertex {
    let mut start = *comp.iter().min_by_key(|&&v| (g.degree(v), v)).expect("nonempty");
    let mut ecc = 0;
    loop {
        let d = bfs_layers(g, start);
        let far = comp.iter().map(|&v| d[v]).max().unwrap_or(0);
        let next = *comp
            .iter()
            .filter(|&&v| d[v] == far)
            .min_by_key(|&&v| (g.degree(v), v))
            .expect("nonempty");
        if far <= ecc {
            return start;
        }
        ecc = far;
        start = next;
    }
}

fn cuthill_mckee(g: &Graph) -> Vec<Vertex> {
    let mut seen = vec![false; g.vertex_count()];
    let mut seq = Vec::with_capacity(g.vertex_count());
    for comp in connected_components(g) {
        let s = pseudo_peripheral(g, &comp);
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            seq.push(v);
            let mut next: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&u| !seen[u]).collect();
            next.sort_by_key(|&u| (g.degree(u), u));
            for u in next {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seq
}

fn min_width_greedy<R: Rng>(g: &Graph, rng: &mut R) -> Vec<Vertex> {
    let n = g.vertex_count();
    let tie: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let mut deadline = vec![usize::MAX; n];
    let mut placed = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    for comp in connected_components(g) {
        let mut next = Some(pseudo_peripheral(g, &comp));
        while let Some(v) = next {
            placed[v] = true;
            let p = seq.len();
            seq.push(v);
            for &u in g.neighbors(v) {
                if !placed[u] {
                    deadline[u] = deadline[u].min(p);
                }
            }
            next = comp
                .iter()
                .copied()
                .filter(|&u| !placed[u] && deadline[u] != usize::MAX)
                .min_by_key(|&u| (deadline[u], tie[u]));
        }
    }
    seq
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortPathWitness {
    pub x: Vertex,
    pub y: Vertex,
    pub path: Vec<Vertex>,
    pub length: usize,
    pub x_set_size: usize,
    pub y_set_size: usize,
    /// `2t + 4`.
    pub bound: usize,
}

/// `floor(0.35 n)`.
pub fn probe_set_size(n: usize) -> usize {
    35 * n / 100
}

/// `ceil(0.3 n / (2t + 4))`, computed exactly.
pub fn short_path_lower_bound(n: usize, t: usize) -> usize {
    (3 * n).div_ceil(10 * (2 * t + 4))
}

/// Shortest path between two large disjoint vertex sets; its length must
/// not exceed `2t + 4`.
pub fn short_path_witness(h: &HrtGraph, x: &VertexSet, y: &VertexSet) -> Result<ShortPathWitness, BandwidthError> {
    let n = h.graph.vertex_count();
    let need = probe_set_size(n);
    if x.len() < need || y.len() < need {
        return Err(BandwidthError::Parameter(format!(
            "sets of size {} and {} are below floor(0.35 n) = {need}",
            x.len(),
            y.len()
        )));
    }
    if let Some(v) = x.first_common(y) {
        return Err(BandwidthError::Parameter(format!("sets share vertex {v}")));
    }
    let bound = 2 * h.params.t + 4;
    let d = bfs_distance(&h.graph, x, y)?;
    let length = d
        .distance
        .ok_or_else(|| BandwidthError::LemmaViolation("no path between the sets".into()))?;
    if length > bound {
        return Err(BandwidthError::LemmaViolation(format!(
            "shortest path has length {length} > 2t+4 = {bound}"
        )));
    }
    Ok(ShortPathWitness {
        x: d.path[0],
        y: *d.path.last().expect("nonempty path"),
        path: d.path,
        length,
        x_set_size: x.len(),
        y_set_size: y.len(),
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    ShortPathCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandwidthBoundReport {
    pub n: usize,
    pub lower_bound: usize,
    pub provenance: Provenance,
    pub upper_bound: usize,
    pub witness: Ordering,
    pub exact: Option<usize>,
    pub t_used: Option<usize>,
    pub probes: usize,
    /// Smallest edge stretch along a witness path over all probed orderings.
    pub min_probe_stretch: usize,
    pub max_witness_length: usize,
    pub heuristic_stretches: BTreeMap<String, usize>,
}

/// Certifies `bw(H) >= ceil(0.3 n / (2t + 4))`: for every probed ordering
/// the first and last `floor(0.35 n)` vertices are joined by a short path,
/// and some edge on it must be stretched at least the bound.
pub fn bandwidth_lower_bound(h: &HrtGraph, probes: usize, seed: u64) -> Result<BandwidthBoundReport, BandwidthError> {
    let g = &h.graph;
    let n = g.vertex_count();
    let t = h.params.t;
    let bound = short_path_lower_bound(n, t);
    let mut named: Vec<(String, Ordering)> = Vec::new();
    for (name, strategy) in [("bfs_level", Strategy::BfsLevel), ("min_width_greedy", Strategy::MinWidthGreedy)] {
        named.push((name.into(), heuristic_ordering(g, strategy, seed).0));
    }
    let random: Vec<Ordering> = (0..probes)
        .into_par_iter()
        .map(|i| {
            let mut seq: Vec<Vertex> = (0..n).collect();
            seq.shuffle(&mut rng::stream(seed, 1 + i as u64));
            Ordering::from_sequence(&seq).expect("shuffle is a permutation")
        })
        .collect();
    let all: Vec<&Ordering> = named.iter().map(|(_, o)| o).chain(&random).collect();
    let results: Vec<(usize, usize)> = all
        .par_iter()
        .map(|order| probe_ordering(h, order, bound))
        .collect::<Result<_, _>>()?;
    let stretches: Vec<usize> = all.iter().map(|o| ordering_stretch(g, o)).collect();
    let best = (0..all.len()).min_by_key(|&i| (stretches[i], i)).expect("at least the heuristics");
    let heuristic_stretches: BTreeMap<String, usize> =
        named.iter().zip(&stretches).map(|((name, _), &s)| (name.clone(), s)).collect();
    if let Some((name, &s)) = heuristic_stretches.iter().find(|(_, &s)| s < bound) {
        return Err(BandwidthError::LemmaViolation(format!("ordering {name} has stretch {s} < {bound}")));
    }
    Ok(BandwidthBoundReport {
        n,
        lower_bound: bound,
        provenance: Provenance::ShortPathCertificate,
        upper_bound: stretches[best],
        witness: all[best].clone(),
        exact: None,
        t_used: Some(t),
        probes: all.len(),
        min_probe_stretch: results.iter().map(|r| r.0).min().unwrap_or(0),
        max_witness_length: results.iter().map(|r| r.1).max().unwrap_or(0),
        heuristic_stretches,
    })
}

/// Returns the largest stretch along the witness path and its length.
fn probe_ordering(h: &HrtGraph, order: &Ordering, bound: usize) -> Result<(usize, usize), BandwidthError> {
    let seq = order.sequence();
    let m = probe_set_size(seq.len());
    let x = VertexSet::new(seq[..m].iter().copied());
    let y = VertexSet::new(seq[seq.len() - m..].iter().copied());
    let w = short_path_witness(h, &x, &y)?;
    let stretch = w
        .path
        .windows(2)
        .map(|e| order.position(e[0]).abs_diff(order.position(e[1])))
        .max()
        .unwrap_or(0);
    if stretch < bound {
        return Err(BandwidthError::LemmaViolation(format!(
            "witness path {:?} has stretch {stretch} < {bound}",
            w.path
        )));
    }
    Ok((stretch, w.length))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub draws: usize,
    pub set_size: usize,
    pub bound: usize,
    pub min_length: usize,
    pub max_length: usize,
}

/// Short-path witnesses for random disjoint pairs of `floor(0.35 n)`-sets.
pub fn random_short_path_probes(h: &HrtGraph, draws: usize, seed: u64) -> Result<ProbeSummary, BandwidthError> {
    let n = h.graph.vertex_count();
    let m = probe_set_size(n);
    let lengths: Vec<usize> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut seq: Vec<Vertex> = (0..n).collect();
            seq.shuffle(&mut rng::stream(seed, i as u64));
            let x = VertexSet::new(seq[..m].iter().copied());
            let y = VertexSet::new(seq[m..2 * m].iter().copied());
            short_path_witness(h, &x, &y).map(|w| w.length)
        })
        .collect::<Result<_, _>>()?;
    Ok(ProbeSummary {
        draws,
        set_size: m,
        bound: 2 * h.params.t + 4,
        min_length: lengths.iter().copied().min().unwrap_or(0),
        max_length: lengths.iter().copied().max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hrt::{build_hrt, solve_params};
    use crate::spectral::{double_cover_with_matching, RegularGraphReport};
    use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};

    fn brute_force(g: &Graph) -> usize {
        let n = g.vertex_count();
        let mut best = n.saturating_sub(1);
        let mut seq: Vec<usize> = (0..n).collect();
        permute(g, &mut seq, 0, &mut best);
        best
    }

    fn permute(g: &Graph, seq: &mut Vec<usize>, i: usize, best: &mut usize) {
        if i == seq.len() {
            let o = Ordering::from_sequence(seq).unwrap();
            *best = (*best).min(ordering_stretch(g, &o));
            return;
        }
        for j in i..seq.len() {
            seq.swap(i, j);
            permute(g, seq, i + 1, best);
            seq.swap(i, j);
        }
    }

    #[test]
    fn stretch_examples() {
        assert_eq!(ordering_stretch(&Graph::path(10), &Ordering::identity(10)), 1);
        let c6 = Graph::cycle(6);
        assert_eq!(ordering_stretch(&c6, &Ordering::identity(6)), 5);
        let zigzag = Ordering::from_sequence(&[0, 1, 5, 2, 4, 3]).unwrap();
        assert_eq!(ordering_stretch(&c6, &zigzag), 2);
        assert_eq!(ordering_stretch(&Graph::complete(7), &Ordering::identity(7)), 6);
        assert_eq!(ordering_stretch(&Graph::empty(4), &Ordering::identity(4)), 0);
        assert!(Ordering::from_sequence(&[0, 0]).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_bandwidth(&Graph::star(8), 1_000_000).exact, Some(4));
        assert_eq!(exact_bandwidth(&Graph::cycle(8), 1_000_000).exact, Some(2));
        assert_eq!(exact_bandwidth(&Graph::complete(5), 1_000_000).exact, Some(4));
        let r = exact_bandwidth(&Graph::empty(3), 10);
        assert_eq!(r.exact, Some(0));
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 3)]).unwrap();
        let r = exact_bandwidth(&two, 1_000_000);
        assert_eq!(r.exact, Some(2));
        assert_eq!(ordering_stretch(&two, &r.witness), 2);
    }

    #[test]
    fn limit_exhaustion_keeps_bounds() {
        let g = Graph::complete_bipartite(3, 5);
        let r = exact_bandwidth(&g, 1);
        assert!(r.lower_bound <= r.upper_bound);
        assert_eq!(ordering_stretch(&g, &r.witness), r.upper_bound);
        let full = exact_bandwidth(&g, u64::MAX);
        assert_eq!(full.exact, Some(brute_force(&g)));
    }

    #[test]
    fn heuristics() {
        let (_, s) = heuristic_ordering(&Graph::path(12), Strategy::BfsLevel, 0);
        assert_eq!(s, 1);
        let (_, s) = heuristic_ordering(&Graph::cycle(10), Strategy::MinWidthGreedy, 3);
        assert_eq!(s, 2);
        let (o, s) = heuristic_ordering(&Graph::complete(6), Strategy::BfsLevel, 0);
        assert_eq!((o.len(), s), (6, 5));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(short_path_lower_bound(800, 1), 40);
        assert_eq!(short_path_lower_bound(1000, 13), 10);
        assert_eq!(short_path_lower_bound(801, 1), 41);
        assert_eq!(probe_set_size(800), 280);
    }

    #[test]
    fn certificate_on_small_instance() {
        let report = RegularGraphReport::from_graph(Graph::complete(4), 0.1).unwrap();
        let f = double_cover_with_matching(&report).unwrap();
        let params = solve_params(8 * (1 + 4), 3, 1, Some(4), 0.5, 0).unwrap();
        let h = build_hrt(&params, &f).unwrap();
        let r = bandwidth_lower_bound(&h, 20, 1).unwrap();
        assert_eq!(r.lower_bound, short_path_lower_bound(40, 1));
        assert!(r.lower_bound <= r.upper_bound);
        assert!(r.min_probe_stretch >= r.lower_bound);
        assert!(r.max_witness_length <= 6);
        let x = VertexSet::range(0..10);
        assert!(matches!(short_path_witness(&h, &x, &x), Err(BandwidthError::Parameter(_))));
        assert!(matches!(
            short_path_witness(&h, &VertexSet::range(0..5), &VertexSet::range(20..40)),
            Err(BandwidthError::Parameter(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn exact_matches_brute_force(n in 1usize..8, bits in proptest::collection::vec(any::<bool>(), 28)) {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] { edges.push((u, v)); }
                    i += 1;
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let r = exact_bandwidth(&g, u64::MAX);
            prop_assert_eq!(r.exact, Some(brute_force(&g)));
            prop_assert_eq!(ordering_stretch(&g, &r.witness), r.upper_bound);
        }
    }
}

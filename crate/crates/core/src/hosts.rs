//! Host graphs that defeat spanning embeddings of the broom family: the
//! 100-layer robust expander and two overlapping cliques.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_distance, components_after_removal, Graph, GraphError, Vertex, VertexSet};
use crate::io::AnnotatedGraph;
use crate::rng;
use crate::spectral::random_subset;
use crate::subgraph::{exact_embed, EmbedOutcome};
use crate::ErrorClass;

pub const LAYERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HostError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl HostError {
    pub fn class(&self) -> ErrorClass {
        match self {
            HostError::LemmaViolation(_) => ErrorClass::LemmaViolation,
            HostError::Graph(e) => e.class(),
            HostError::Parameter(_) => ErrorClass::Parameter,
        }
    }
}

/// Vertices with at least `nu n` neighbors in `s`.
pub fn robust_neighborhood(g: &Graph, s: &VertexSet, nu: f64) -> VertexSet {
    let need = nu * g.vertex_count() as f64;
    let mask = s.mask(g.vertex_count());
    g.vertices()
        .filter(|&v| g.neighbors(v).iter().filter(|&&u| mask[u]).count() as f64 + 1e-9 >= need)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustExpanderParams {
    pub nu: f64,
    pub tau: f64,
}

impl RobustExpanderParams {
    pub fn new(nu: f64, tau: f64) -> Result<Self, HostError> {
        if !(0.0 < nu && nu <= tau && tau < 1.0) {
            return Err(HostError::Parameter(format!("need 0 < nu <= tau < 1, got nu={nu}, tau={tau}")));
        }
        Ok(RobustExpanderParams { nu, tau })
    }

    /// Admissible set sizes `ceil(tau n) ..= floor((1 - tau) n)`.
    pub fn window(&self, n: usize) -> (usize, usize) {
        let lo = (self.tau * n as f64 - 1e-9).ceil() as usize;
        let hi = ((1.0 - self.tau) * n as f64 + 1e-9).floor() as usize;
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustViolation {
    pub set_size: usize,
    pub neighborhood_size: usize,
    pub required: f64,
    pub set: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustProbeReport {
    pub params: RobustExpanderParams,
    pub window: (usize, usize),
    pub random_trials: usize,
    pub adversarial_tested: usize,
    pub violations: usize,
    pub first_violation: Option<RobustViolation>,
    /// Always true: passing sets are evidence, not a proof over all sets.
    pub sampling_only: bool,
}

/// Tests `|RN(S)| >= |S| + nu n` on random sets with sizes uniform in the
/// window and on the supplied structured candidates that fall inside it.
pub fn robust_expander_probe(
    g: &Graph,
    params: RobustExpanderParams,
    trials: usize,
    adversarial: &[VertexSet],
    seed: u64,
) -> Result<RobustProbeReport, HostError> {
    if trials == 0 {
        return Err(HostError::Parameter("trials must be at least 1".into()));
    }
    let n = g.vertex_count();
    let (lo, hi) = params.window(n);
    if lo > hi || hi == 0 {
        return Err(HostError::Parameter(format!("empty size window [{lo}, {hi}] for tau={}", params.tau)));
    }
    let check = |s: &VertexSet| {
        let rn = robust_neighborhood(g, s, params.nu).len();
        let required = s.len() as f64 + params.nu * n as f64;
        (rn as f64 + 1e-9 < required).then(|| RobustViolation {
            set_size: s.len(),
            neighborhood_size: rn,
            required,
            set: s.clone(),
        })
    };
    let structured: Vec<&VertexSet> = adversarial.iter().filter(|s| (lo..=hi).contains(&s.len())).collect();
    let mut found: Vec<RobustViolation> = structured.par_iter().filter_map(|s| check(s)).collect();
    let random: Vec<Option<RobustViolation>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let size = r.gen_range(lo..=hi);
            check(&random_subset(&mut r, n, size))
        })
        .collect();
    found.extend(random.into_iter().flatten());
    Ok(RobustProbeReport {
        params,
        window: (lo, hi),
        random_trials: trials,
        adversarial_tested: structured.len(),
        violations: found.len(),
        first_violation: found.into_iter().next(),
        sampling_only: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredHost {
    pub graph: Graph,
    pub layers: Vec<VertexSet>,
}

/// Layers `A_1..A_100` of size `n/100`; consecutive layers are joined
/// completely and the two end layers are cliques.
pub fn build_layered_host(n: usize) -> Result<LayeredHost, HostError> {
    if n == 0 || !n.is_multiple_of(LAYERS) {
        return Err(HostError::Parameter(format!("n={n} must be a positive multiple of {LAYERS}")));
    }
    let s = n / LAYERS;
    let layers: Vec<VertexSet> = (0..LAYERS).map(|i| VertexSet::range(i * s..(i + 1) * s)).collect();
    let mut edges = Vec::new();
    for w in layers.windows(2) {
        for &u in w[0].iter() {
            edges.extend(w[1].iter().map(|&v| (u, v)));
        }
    }
    for end in [&layers[0], &layers[LAYERS - 1]] {
        let e = end.as_slice();
        for (i, &u) in e.iter().enumerate() {
            edges.extend(e[i + 1..].iter().map(|&v| (u, v)));
        }
    }
    Ok(LayeredHost {
        graph: Graph::from_edges(n, edges)?,
        layers,
    })
}

impl LayeredHost {
    /// Layers are stored in the `component` map.
    pub fn to_annotated(&self) -> AnnotatedGraph {
        let component = self
            .layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |&v| (v, i)))
            .collect();
        AnnotatedGraph {
            component: Some(component),
            ..AnnotatedGraph::plain(&self.graph)
        }
    }

    pub fn from_annotated(ann: &AnnotatedGraph) -> Result<Self, HostError> {
        let graph = ann.graph()?;
        let comp = ann
            .component
            .as_ref()
            .ok_or_else(|| HostError::Parameter("layered host file has no layer map".into()))?;
        let mut layers = vec![Vec::new(); LAYERS];
        for (&v, &i) in comp {
            layers
                .get_mut(i)
                .ok_or_else(|| HostError::Parameter(format!("layer index {i} out of range")))?
                .push(v);
        }
        Ok(LayeredHost {
            graph,
            layers: layers.into_iter().map(VertexSet::new).collect(),
        })
    }

    /// `A_i ∪ ... ∪ A_j` (1-based, inclusive).
    pub fn layer_union(&self, i: usize, j: usize) -> VertexSet {
        self.layers[i - 1..j].iter().flat_map(|l| l.iter().copied()).collect()
    }

    /// Prefixes, suffixes, contiguous blocks and alternating layer unions.
    pub fn adversarial_sets(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        for len in [20, 25, 35, 50, 65, 80] {
            out.push(self.layer_union(1, len));
            out.push(self.layer_union(LAYERS - len + 1, LAYERS));
            let start = (LAYERS - len) / 2 + 1;
            out.push(self.layer_union(start, start + len - 1));
        }
        for parity in 0..2 {
            out.push(
                self.layers
                    .iter()
                    .skip(parity)
                    .step_by(2)
                    .flat_map(|l| l.iter().copied())
                    .collect(),
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    DistanceObstruction,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonEmbeddabilityCertificate {
    pub host_x: VertexSet,
    pub host_y: VertexSet,
    pub host_distance: usize,
    pub host_path: Vec<Vertex>,
    /// `2t + 4`.
    pub guest_short_path_bound: usize,
    /// True means the guest provably does not embed.
    pub conclusion: bool,
    pub method: CertificateMethod,
}

/// The guest joins any two `0.35 n`-sets by a path of length at most
/// `2t + 4`, while the host keeps the first and last 35 layers 31 apart.
pub fn layered_non_embeddability(t: usize, host: &LayeredHost) -> Result<NonEmbeddabilityCertificate, HostError> {
    if host.layers.len() != LAYERS {
        return Err(HostError::Parameter(format!("host has {} layers", host.layers.len())));
    }
    let x = host.layer_union(1, 35);
    let y = host.layer_union(66, LAYERS);
    let d = bfs_distance(&host.graph, &x, &y)?;
    let dist = d.distance.ok_or_else(|| HostError::LemmaViolation("layer blocks are disconnected".into()))?;
    if dist != 31 {
        return Err(HostError::LemmaViolation(format!("layer blocks at distance {dist}, expected 31")));
    }
    let bound = 2 * t + 4;
    Ok(NonEmbeddabilityCertificate {
        host_x: x,
        host_y: y,
        host_distance: dist,
        host_path: d.path,
        guest_short_path_bound: bound,
        conclusion: bound < dist,
        method: CertificateMethod::DistanceObstruction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoCliqueHost {
    pub graph: Graph,
    pub left_size: usize,
    pub right_size: usize,
    pub overlap_size: usize,
    /// Clique size before rounding, `n/2 + gamma n / 100`, when built from
    /// `(n, gamma)`.
    pub nominal_clique_size: Option<f64>,
}

impl TwoCliqueHost {
    /// Vertices in the left clique only.
    pub fn left_only(&self) -> VertexSet {
        VertexSet::range(0..self.left_size - self.overlap_size)
    }

    pub fn overlap(&self) -> VertexSet {
        let a = self.left_size - self.overlap_size;
        VertexSet::range(a..self.left_size)
    }

    pub fn right_only(&self) -> VertexSet {
        VertexSet::range(self.left_size..self.graph.vertex_count())
    }
}

/// Cliques on `left` and `right` vertices sharing `overlap` vertices.
/// Numbering: left-only, then shared, then right-only.
pub fn two_clique_host(left: usize, right: usize, overlap: usize) -> Result<TwoCliqueHost, HostError> {
    if overlap > left.min(right) || left == 0 || right == 0 {
        return Err(HostError::Parameter(format!(
            "overlap {overlap} must not exceed clique sizes {left}, {right}"
        )));
    }
    let n = left + right - overlap;
    let a = left - overlap;
    let mut edges = Vec::new();
    for block in [0..left, a..n] {
        for u in block.clone() {
            edges.extend((u + 1..block.end).map(|v| (u, v)));
        }
    }
    Ok(TwoCliqueHost {
        graph: Graph::from_edges(n, edges)?,
        left_size: left,
        right_size: right,
        overlap_size: overlap,
        nominal_clique_size: None,
    })
}

/// Two equal cliques of size `round(n/2 + gamma n/100)`; the overlap is
/// then fixed so the total is exactly `n`.
pub fn build_two_clique_host(n: usize, gamma: f64) -> Result<TwoCliqueHost, HostError> {
    if n < 2 || !(0.0..=1.0).contains(&gamma) {
        return Err(HostError::Parameter(format!("need n >= 2 and gamma in [0, 1], got n={n}, gamma={gamma}")));
    }
    let nominal = n as f64 / 2.0 + gamma * n as f64 / 100.0;
    let c = nominal.round() as usize;
    if 2 * c < n || c > n {
        let suggestion = ((n as f64 / (1.0 + gamma / 50.0)).round() as usize).max(2);
        return Err(HostError::Parameter(format!(
            "clique size {c} cannot cover n={n}; try n={}",
            suggestion + suggestion % 2
        )));
    }
    let mut host = two_clique_host(c, c, 2 * c - n)?;
    host.nominal_clique_size = Some(nominal);
    Ok(host)
}

/// Spanning-subgraph search for equal-order guest and host.
pub fn exhaustive_non_embedding(h: &Graph, g: &Graph, node_limit: u64) -> Result<EmbedOutcome, HostError> {
    if h.vertex_count() != g.vertex_count() {
        return Err(HostError::Parameter(format!(
            "guest has {} vertices, host {}",
            h.vertex_count(),
            g.vertex_count()
        )));
    }
    Ok(exact_embed(h, g, node_limit))
}

/// Exact criterion for a spanning copy in a two-clique host: some set `Z`
/// of `overlap` guest vertices leaves components that pack into the two
/// clique-only parts. Enumerates `Z`, so only for small guests.
pub fn two_clique_split_feasible(h: &Graph, host: &TwoCliqueHost) -> bool {
    let n = h.vertex_count();
    if n != host.graph.vertex_count() {
        return false;
    }
    let o = host.overlap_size;
    let want = host.left_size - o;
    let mut z: Vec<Vertex> = (0..o).collect();
    loop {
        let sizes: Vec<usize> = components_after_removal(h, &VertexSet::new(z.iter().copied()))
            .iter()
            .map(VertexSet::len)
            .collect();
        let mut reach = vec![false; want + 1];
        reach[0] = true;
        for s in sizes {
            for x in (s..=want).rev() {
                reach[x] |= reach[x - s];
            }
        }
        if reach[want] {
            return true;
        }
        // next combination of o elements from 0..n
        let mut i = o;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if z[i] < n - o + i {
                break;
            }
        }
        z[i] += 1;
        for j in i + 1..o {
            z[j] = z[j - 1] + 1;
        }
    }
}

/// A 16-vertex analog of the broom family: separator `K_{2,2}` and one
/// broom (first vertex plus two leaves) per separator vertex. Deleting two
/// vertices is needed to split it into parts of 6 and 8 vertices.
pub fn two_sided_mini_guest() -> Graph {
    let mut edges = vec![(0, 2), (0, 3), (1, 2), (1, 3)];
    for s in 0..4 {
        let first = 4 + 3 * s;
        edges.extend([(s, first), (first, first + 1), (first, first + 2)]);
    }
    Graph::from_edges(16, edges).expect("fixed edges")
}

/// Degree statistics of a host, keyed by degree.
pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in g.vertices() {
        *h.entry(g.degree(v)).or_insert(0) += 1;
    }
    h
}

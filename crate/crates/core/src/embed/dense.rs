//! Randomized greedy embedding of a bounded-degree bipartite graph into a
//! dense host.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::graph::{bipartition, AdjacencyBits, Graph, Vertex};
use crate::rng;
use crate::subgraph::EmbeddingMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseConfig {
    /// Required host edge density.
    pub rho: f64,
    pub retries: usize,
    pub seed: u64,
    /// Optional host labels; when present, each placement prefers the label
    /// used least so far, spreading the image over the labelled parts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance_labels: Option<Vec<Option<usize>>>,
}

impl DenseConfig {
    pub fn new(seed: u64) -> Self {
        DenseConfig {
            rho: 0.5,
            retries: 50,
            seed,
            balance_labels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseEmbedReport {
    pub embedding: EmbeddingMap,
    pub attempts: usize,
    pub host_order: usize,
    pub host_density: f64,
    pub guest_order: usize,
    pub guest_max_degree: usize,
    /// `log10(8 Δ rho^-Δ n)`, the host order the size premise asks for.
    pub premise_log10_required: f64,
    pub premise_holds: bool,
    /// Smallest candidate set met in the successful attempt.
    pub min_candidates: usize,
    /// Placements where no candidate kept a `rho/2` share of unused
    /// neighbors, so the full candidate set was used.
    pub degree_fallbacks: usize,
}

/// Embeds `hs` into `g` vertex by vertex in BFS order, placing each vertex in
/// the common neighborhood of its placed neighbors.
pub fn dense_embed_separator(hs: &Graph, g: &Graph, cfg: &DenseConfig) -> Result<DenseEmbedReport, EmbedError> {
    if !(cfg.rho > 0.0 && cfg.rho <= 1.0) {
        return Err(EmbedError::Parameter(format!("rho = {} must lie in (0, 1]", cfg.rho)));
    }
    if bipartition(hs).is_none() {
        return Err(EmbedError::Parameter("guest is not bipartite".into()));
    }
    let density = g.edge_density();
    if density < cfg.rho {
        return Err(EmbedError::Parameter(format!(
            "host density {density:.4} is below rho = {}",
            cfg.rho
        )));
    }
    if let Some(labels) = &cfg.balance_labels {
        if labels.len() != g.vertex_count() {
            return Err(EmbedError::Parameter("balance labels do not match the host".into()));
        }
    }
    let (n, big_n) = (hs.vertex_count(), g.vertex_count());
    let delta = hs.max_degree();
    let required = (8.0 * delta.max(1) as f64 * n.max(1) as f64).log10() + delta as f64 * (1.0 / cfg.rho).log10();
    let premise_holds = big_n > 0 && (big_n as f64).log10() >= required;
    if n > big_n {
        return Err(EmbedError::Parameter(format!("guest has {n} vertices, host {big_n}")));
    }

    let order = bfs_order(hs);
    let bits = AdjacencyBits::new(g);
    let mut last = (0, 0);
    for attempt in 0..cfg.retries.max(1) {
        match greedy_attempt(hs, g, &bits, &order, cfg, attempt as u64) {
            Ok((map, min_candidates, degree_fallbacks)) => {
                let embedding = EmbeddingMap::checked(hs, g, map);
                if !embedding.verified {
                    return Err(EmbedError::EmbeddingFailed("greedy produced an invalid map".into()));
                }
                return Ok(DenseEmbedReport {
                    embedding,
                    attempts: attempt + 1,
                    host_order: big_n,
                    host_density: density,
                    guest_order: n,
                    guest_max_degree: delta,
                    premise_log10_required: required,
                    premise_holds,
                    min_candidates,
                    degree_fallbacks,
                });
            }
            Err(stuck) => last = stuck,
        }
    }
    Err(EmbedError::EmbeddingFailed(format!(
        "{} attempts dead-ended; last one stuck after {} of {n} vertices with {} placed neighbors",
        cfg.retries.max(1),
        last.0,
        last.1
    )))
}

fn bfs_order(h: &Graph) -> Vec<Vertex> {
    let mut seen = vec![false; h.vertex_count()];
    let mut order = Vec::with_capacity(h.vertex_count());
    for root in h.vertices() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in h.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// One greedy pass. On a dead end returns `(placed so far, placed neighbors
/// of the stuck vertex)`.
fn greedy_attempt(
    hs: &Graph,
    g: &Graph,
    bits: &AdjacencyBits,
    order: &[Vertex],
    cfg: &DenseConfig,
    attempt: u64,
) -> Result<(Vec<Vertex>, usize, usize), (usize, usize)> {
    let mut r = rng::stream(cfg.seed, attempt);
    let big_n = g.vertex_count();
    let mut image = vec![usize::MAX; hs.vertex_count()];
    let mut used = vec![false; big_n];
    let mut unused_deg: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut unused = big_n;
    let mut label_use = std::collections::BTreeMap::<usize, usize>::new();
    let mut min_candidates = usize::MAX;
    let mut fallbacks = 0;
    for (placed, &u) in order.iter().enumerate() {
        let anchors: Vec<Vertex> = hs
            .neighbors(u)
            .iter()
            .filter(|&&w| image[w] != usize::MAX)
            .map(|&w| image[w])
            .collect();
        let candidates: Vec<Vertex> = match anchors.split_first() {
            None => (0..big_n).filter(|&v| !used[v]).collect(),
            Some((&first, rest)) => g
                .neighbors(first)
                .iter()
                .copied()
                .filter(|&v| !used[v] && rest.iter().all(|&a| bits.has_edge(a, v)))
                .collect(),
        };
        if candidates.is_empty() {
            return Err((placed, anchors.len()));
        }
        min_candidates = min_candidates.min(candidates.len());
        let cut = cfg.rho / 2.0 * unused as f64;
        let mut pool: Vec<Vertex> = candidates.iter().copied().filter(|&v| unused_deg[v] as f64 >= cut).collect();
        if pool.is_empty() {
            fallbacks += 1;
            pool = candidates;
        }
        if let Some(labels) = &cfg.balance_labels {
            let key = |v: Vertex| labels[v].map_or(usize::MAX, |l| label_use.get(&l).copied().unwrap_or(0));
            let best = pool.iter().map(|&v| key(v)).min().expect("nonempty pool");
            pool.retain(|&v| key(v) == best);
        }
        let v = *pool.choose(&mut r).expect("nonempty pool");
        image[u] = v;
        used[v] = true;
        unused -= 1;
        for &w in g.neighbors(v) {
            unused_deg[w] -= 1;
        }
        if let Some(l) = cfg.balance_labels.as_ref().and_then(|ls| ls[v]) {
            *label_use.entry(l).or_default() += 1;
        }
    }
    Ok((image, min_candidates, fallbacks))
}

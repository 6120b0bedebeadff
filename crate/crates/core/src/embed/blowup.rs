//! Randomized greedy stand-in for the blow-up step: every broom is placed
//! inside its assigned clusters, respecting restriction sets, with bounded
//! backtracking, restarts and reseeds. The result is always verified.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::assign::AssignmentState;
use super::partition::RegularPartition;
use super::{Check, EmbedError, Relation, StageReport};
use crate::graph::{Graph, Vertex};
use crate::hrt::{Broom, HrtGraph};
use crate::rng;
use crate::subgraph::EmbeddingMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupConfig {
    /// Every restriction set must cover at least `c` of its cluster.
    pub c: f64,
    /// At most `alpha` of a cluster may be restricted.
    pub alpha: f64,
    pub seed: u64,
    /// Candidate tries per broom attempt.
    pub node_budget: usize,
    pub component_restarts: usize,
    pub reseeds: usize,
}

impl BlowupConfig {
    pub fn new(seed: u64) -> Self {
        BlowupConfig {
            c: 0.2,
            alpha: 0.3,
            seed,
            node_budget: 2000,
            component_restarts: 20,
            reseeds: 5,
        }
    }
}

struct Placement<'a> {
    g: &'a Graph,
    host_cluster: Vec<Option<usize>>,
    state: &'a AssignmentState,
    used: Vec<bool>,
    image: Vec<Vertex>,
}

impl Placement<'_> {
    /// Unused host vertices allowed for `z` next to the image of `parent`.
    fn candidates(&self, z: Vertex, parent: Vertex) -> Vec<Vertex> {
        let cluster = self.state.cluster_of[z];
        let restriction = self.state.restrictions.get(&z);
        self.g
            .neighbors(self.image[parent])
            .iter()
            .copied()
            .filter(|&w| {
                !self.used[w] && self.host_cluster[w] == cluster && restriction.is_none_or(|t| t.contains(w))
            })
            .collect()
    }

    /// Places the leaves of `broom`, most constrained first. Undoes its own
    /// placements on failure.
    fn leaves<R: Rng>(&mut self, broom: &Broom, r: &mut R) -> bool {
        let last = broom.last();
        let mut order: Vec<(usize, Vertex, Vec<Vertex>)> = broom
            .leaves
            .iter()
            .map(|&x| {
                let c = self.candidates(x, last);
                (c.len(), x, c)
            })
            .collect();
        order.sort_by_key(|(n, x, _)| (*n, *x));
        let mut placed = Vec::new();
        for (_, x, cands) in order {
            let free: Vec<Vertex> = cands.into_iter().filter(|&w| !self.used[w]).collect();
            let Some(&w) = free.choose(r) else {
                for &w in &placed {
                    self.used[w] = false;
                }
                return false;
            };
            self.used[w] = true;
            self.image[x] = w;
            placed.push(w);
        }
        true
    }

    /// Depth-first over the path, leaves greedily at the end.
    fn path<R: Rng>(&mut self, broom: &Broom, depth: usize, r: &mut R, budget: &mut usize) -> bool {
        if depth == broom.path.len() {
            return self.leaves(broom, r);
        }
        let z = broom.path[depth];
        let parent = if depth == 0 { broom.anchor } else { broom.path[depth - 1] };
        let mut cands = self.candidates(z, parent);
        cands.shuffle(r);
        for w in cands {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            self.used[w] = true;
            self.image[z] = w;
            if self.path(broom, depth + 1, r, budget) {
                return true;
            }
            self.used[w] = false;
        }
        false
    }
}

/// Embeds every broom into the host according to `state`, after checking
/// the restriction caps.
pub fn blowup_embed(
    h: &HrtGraph,
    state: &AssignmentState,
    g: &Graph,
    p: &RegularPartition,
    cfg: &BlowupConfig,
) -> Result<(EmbeddingMap, StageReport), EmbedError> {
    let mut report = StageReport::new("blowup");
    let l = p.clusters.len();
    let mut restricted = vec![0usize; l];
    let mut min_ratio: f64 = 1.0;
    for (&x, t) in &state.restrictions {
        let c = state.cluster_of[x].ok_or_else(|| EmbedError::Parameter(format!("restricted vertex {x} is unassigned")))?;
        if t.iter().any(|&w| !p.clusters[c].contains(w)) {
            return Err(EmbedError::Parameter(format!("restriction of {x} leaves its cluster")));
        }
        restricted[c] += 1;
        min_ratio = min_ratio.min(t.len() as f64 / p.clusters[c].len() as f64);
    }
    let max_share = (0..l)
        .map(|i| restricted[i] as f64 / p.clusters[i].len() as f64)
        .fold(0.0, f64::max);
    report.counter("restricted_per_cluster", &restricted);
    let size_check = Check::new("restriction_size", min_ratio, Relation::AtLeast, cfg.c, true);
    let share_check = Check::new("restricted_share", max_share, Relation::AtMost, cfg.alpha, true);
    let caps_ok = size_check.passed && share_check.passed;
    report.checks.push(size_check);
    report.checks.push(share_check);
    if !caps_ok {
        return Err(EmbedError::Parameter(format!(
            "restriction caps fail before placement: smallest set {min_ratio:.3} (need {}), largest share {max_share:.3} (allowed {})",
            cfg.c, cfg.alpha
        )));
    }
    let mut load = vec![0usize; l];
    for c in state.cluster_of.iter().flatten() {
        load[*c] += 1;
    }
    if let Some(i) = (0..l).find(|&i| load[i] > p.clusters[i].len()) {
        return Err(EmbedError::Parameter(format!("cluster {i} is over-assigned")));
    }

    let n = h.graph.vertex_count();
    let mut host_cluster = vec![None; g.vertex_count()];
    for (i, c) in p.clusters.iter().enumerate() {
        for &w in c {
            host_cluster[w] = Some(i);
        }
    }
    let mut order: Vec<usize> = (0..h.components.len()).collect();
    order.sort_by_key(|&b| std::cmp::Reverse(h.components[b].path.len() + h.components[b].leaves.len()));

    let mut restarts_used = 0;
    let mut last_failure = String::new();
    for reseed in 0..cfg.reseeds.max(1) {
        let seed = rng::derive_seed(cfg.seed, reseed as u64);
        let mut place = Placement {
            g,
            host_cluster: host_cluster.clone(),
            state,
            used: vec![false; g.vertex_count()],
            image: vec![usize::MAX; n],
        };
        for (&x, &w) in &state.image_of {
            place.image[x] = w;
            place.used[w] = true;
        }
        let mut failed = None;
        for &b in &order {
            let broom = &h.components[b];
            let ok = (0..cfg.component_restarts.max(1)).any(|attempt| {
                let mut r = rng::stream(seed, (b * cfg.component_restarts.max(1) + attempt) as u64);
                let mut budget = cfg.node_budget;
                let done = place.path(broom, 0, &mut r, &mut budget);
                if !done {
                    restarts_used += 1;
                }
                done
            });
            if !ok {
                failed = Some(b);
                break;
            }
        }
        match failed {
            None => {
                let map = EmbeddingMap::checked(&h.graph, g, place.image);
                report.counter("reseeds", reseed);
                report.counter("component_restarts", restarts_used);
                report.check(Check::new("verified", map.verified as u8 as f64, Relation::Equal, 1.0, true))?;
                return Ok((map, report));
            }
            Some(b) => {
                let occupancy: Vec<String> = p
                    .clusters
                    .iter()
                    .map(|c| format!("{}/{}", c.iter().filter(|&&w| place.used[w]).count(), c.len()))
                    .collect();
                let first = h.components[b].first();
                let candidates = place.candidates(first, h.components[b].anchor).len();
                last_failure = format!(
                    "broom {b} failed after {restarts_used} restarts; first-vertex candidates {candidates}; cluster occupancy {occupancy:?}"
                );
            }
        }
    }
    Err(EmbedError::EmbeddingFailed(last_failure))
}

//! Assigning broom vertices to clusters: random placement on matching edges,
//! reassignment of first vertices next to their mapped anchors, and leaf
//! moves that bring every cluster to its quota.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::partition::{ReducedGraph, RegularPartition};
use super::{Check, EmbedError, Relation, StageReport, Thresholds};
use crate::graph::{AdjacencyBits, Graph, Vertex, VertexSet};
use crate::hrt::HrtGraph;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentState {
    /// Cluster of every guest vertex outside the separator.
    pub cluster_of: Vec<Option<usize>>,
    /// Host image of every separator vertex.
    pub image_of: BTreeMap<Vertex, Vertex>,
    /// Candidate host sets of restricted guest vertices.
    pub restrictions: BTreeMap<Vertex, VertexSet>,
    pub load: Vec<usize>,
    pub quota: Vec<usize>,
    /// Vertices moved into each cluster by reassignments.
    pub reassigned_in: Vec<usize>,
}

impl AssignmentState {
    fn place(&mut self, x: Vertex, to: usize) {
        if let Some(from) = self.cluster_of[x] {
            self.load[from] -= 1;
        }
        self.cluster_of[x] = Some(to);
        self.load[to] += 1;
    }
}

/// Splits `total` over clusters proportionally to `sizes` with largest
/// remainders (ties to lower ids).
pub fn cluster_quotas(sizes: &[usize], total: usize) -> Result<Vec<usize>, EmbedError> {
    let sum: usize = sizes.iter().sum();
    if total > sum {
        return Err(EmbedError::Parameter(format!(
            "{total} guest vertices do not fit into clusters of total size {sum}"
        )));
    }
    if sum == 0 {
        return Ok(vec![0; sizes.len()]);
    }
    let mut quota: Vec<usize> = sizes.iter().map(|&s| s * total / sum).collect();
    let mut rest: Vec<(usize, usize)> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| (s * total % sum, i))
        .collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = total - quota.iter().sum::<usize>();
    for &(_, i) in rest.iter().take(missing) {
        quota[i] += 1;
    }
    Ok(quota)
}

/// Two sides of a broom: vertices at even and odd distance from its first
/// vertex.
fn broom_sides(h: &HrtGraph, b: usize) -> [Vec<Vertex>; 2] {
    let broom = &h.components[b];
    let mut sides = [Vec::new(), Vec::new()];
    for (i, &v) in broom.path.iter().enumerate() {
        sides[i % 2].push(v);
    }
    sides[broom.path.len() % 2].extend(&broom.leaves);
    sides
}

/// Puts every broom on a uniformly random matching edge with a random side
/// flip, resampling until every edge load is within `slack` of its quota.
pub fn assign_components(
    h: &HrtGraph,
    reduced: &ReducedGraph,
    quota: &[usize],
    slack: f64,
    retries: usize,
    seed: u64,
) -> Result<(AssignmentState, StageReport), EmbedError> {
    let mut report = StageReport::new("assign");
    let edges = &reduced.matching;
    if edges.is_empty() {
        return Err(EmbedError::Parameter("matching is empty".into()));
    }
    let l = reduced.graph.vertex_count();
    if quota.len() != l {
        return Err(EmbedError::Parameter("one quota per cluster is required".into()));
    }
    let sides: Vec<[Vec<Vertex>; 2]> = (0..h.components.len()).map(|b| broom_sides(h, b)).collect();
    let targets: Vec<usize> = edges.iter().map(|&(a, b)| quota[a] + quota[b]).collect();
    let within = |loads: &[usize]| -> f64 {
        loads
            .iter()
            .zip(&targets)
            .map(|(&x, &t)| (x as f64 - t as f64).abs() / (t.max(1) as f64))
            .fold(0.0, f64::max)
    };
    let mut best = f64::INFINITY;
    let mut best_loads = Vec::new();
    for attempt in 0..retries.max(1) {
        let mut r = rng::stream(seed, attempt as u64);
        let picks: Vec<(usize, bool)> = sides
            .iter()
            .map(|_| (r.gen_range(0..edges.len()), r.gen_bool(0.5)))
            .collect();
        let mut loads = vec![0usize; edges.len()];
        for (s, &(e, _)) in sides.iter().zip(&picks) {
            loads[e] += s[0].len() + s[1].len();
        }
        let dev = within(&loads);
        if dev < best {
            best = dev;
            best_loads = loads.clone();
        }
        if dev > slack {
            continue;
        }
        let mut state = AssignmentState {
            cluster_of: vec![None; h.graph.vertex_count()],
            image_of: BTreeMap::new(),
            restrictions: BTreeMap::new(),
            load: vec![0; l],
            quota: quota.to_vec(),
            reassigned_in: vec![0; l],
        };
        for (s, &(e, flip)) in sides.iter().zip(&picks) {
            let (a, b) = edges[e];
            let (even, odd) = if flip { (b, a) } else { (a, b) };
            for &v in &s[0] {
                state.place(v, even);
            }
            for &v in &s[1] {
                state.place(v, odd);
            }
        }
        report.counter("attempts", attempt + 1);
        report.counter("edge_loads", &loads);
        report.counter("edge_targets", &targets);
        report.check(Check::new("load_window", dev, Relation::AtMost, slack, true))?;
        let split = h
            .graph
            .edges()
            .filter(|&(u, v)| match (state.cluster_of[u], state.cluster_of[v]) {
                (Some(a), Some(b)) => reduced.partner(a) != Some(b),
                _ => false,
            })
            .count();
        report.check(Check::new("edges_on_matching", split as f64, Relation::Equal, 0.0, true))?;
        return Ok((state, report));
    }
    Err(EmbedError::SeedExhaustion(format!(
        "no assignment within load window {slack} after {retries} draws; best deviation {best:.3}, loads {best_loads:?} vs {targets:?}"
    )))
}

/// Counts of neighbors of host vertices inside clusters.
struct ClusterView<'a> {
    bits: &'a AdjacencyBits,
    masks: Vec<Vec<u64>>,
    clusters: &'a [VertexSet],
}

impl<'a> ClusterView<'a> {
    fn new(bits: &'a AdjacencyBits, p: &'a RegularPartition) -> Self {
        ClusterView {
            bits,
            masks: p.clusters.iter().map(|c| bits.mask(c)).collect(),
            clusters: &p.clusters,
        }
    }

    fn count(&self, v: Vertex, cluster: usize) -> usize {
        self.bits.count_in(v, &self.masks[cluster])
    }

    fn neighbors_in(&self, v: Vertex, cluster: usize) -> VertexSet {
        self.clusters[cluster].iter().copied().filter(|&w| self.bits.has_edge(v, w)).collect()
    }
}

/// Moves first vertices whose anchor image has fewer than `threshold`
/// neighbors in their cluster, and restricts every first vertex to the
/// neighborhood of its anchor image.
#[allow(clippy::too_many_arguments)]
pub fn reassign_first_vertices(
    h: &HrtGraph,
    state: &mut AssignmentState,
    bits: &AdjacencyBits,
    p: &RegularPartition,
    reduced: &ReducedGraph,
    th: &Thresholds,
    threshold: f64,
    cap: f64,
) -> Result<StageReport, EmbedError> {
    let mut report = StageReport::new("first_vertices");
    let view = ClusterView::new(bits, p);
    let l = p.clusters.len();
    let mut moved = 0;
    let mut min_l = usize::MAX;
    let mut min_choices = usize::MAX;
    for broom in &h.components {
        let y = broom.first();
        let v = *state
            .image_of
            .get(&broom.anchor)
            .ok_or_else(|| EmbedError::Parameter(format!("anchor {} has no image", broom.anchor)))?;
        let cy = state.cluster_of[y].ok_or_else(|| EmbedError::Parameter(format!("vertex {y} is unassigned")))?;
        if view.count(v, cy) as f64 >= threshold {
            state.restrictions.insert(y, view.neighbors_in(v, cy));
            continue;
        }
        let partner = reduced
            .partner(cy)
            .ok_or_else(|| EmbedError::Parameter(format!("cluster {cy} is unmatched")))?;
        let rich: Vec<usize> = (0..l).filter(|&j| view.count(v, j) as f64 >= threshold).collect();
        let choices: Vec<usize> = rich
            .iter()
            .copied()
            .filter(|&j| j != partner && reduced.graph.has_edge(j, partner))
            .collect();
        min_l = min_l.min(rich.len());
        min_choices = min_choices.min(choices.len());
        let Some(&j) = choices.iter().min_by_key(|&&j| (state.reassigned_in[j], j)) else {
            return Err(EmbedError::HostDegree(format!(
                "anchor image {v} has {} rich clusters and none adjacent to cluster {partner}",
                rich.len()
            )));
        };
        state.place(y, j);
        state.reassigned_in[j] += 1;
        state.restrictions.insert(y, view.neighbors_in(v, j));
        moved += 1;
    }
    report.counter("threshold", threshold);
    report.counter("reassigned", moved);
    report.counter("reassigned_in", &state.reassigned_in);
    if moved > 0 {
        report.check(Check::new(
            "rich_clusters",
            min_l as f64,
            Relation::AtLeast,
            l as f64 / 2.0,
            th.premise,
        ))?;
        report.check(Check::new(
            "reassignment_choices",
            min_choices as f64,
            Relation::AtLeast,
            2.0 * th.gamma_cbrt() * l as f64,
            th.premise,
        ))?;
    }
    report.check(Check::new(
        "reassignment_cap",
        state.reassigned_in.iter().copied().max().unwrap_or(0) as f64,
        Relation::AtMost,
        cap,
        true,
    ))?;
    Ok(report)
}

/// Host vertices of `cluster` with more than `delta |parent cluster|`
/// neighbors in the parent cluster.
fn typical_for(view: &ClusterView, cluster: usize, parent: usize, delta: f64) -> VertexSet {
    let cut = delta * view.clusters[parent].len() as f64;
    view.clusters[cluster]
        .iter()
        .copied()
        .filter(|&w| view.count(w, parent) as f64 > cut)
        .collect()
}

/// Leaves in `from` that may move to `to`: unrestricted, with a parent in a
/// cluster other than `to` that is adjacent to `to` in the reduced graph.
/// Leaves whose parent sits in `preferred` come first, then leaves of
/// parents that have lost the fewest leaves.
fn movable(
    leaves: &[(Vertex, Vertex)],
    state: &AssignmentState,
    reduced: &Graph,
    from: usize,
    to: usize,
    preferred: Option<usize>,
    taken: &BTreeMap<Vertex, usize>,
) -> Vec<(Vertex, Vertex)> {
    let mut out: Vec<(Vertex, Vertex)> = leaves
        .iter()
        .copied()
        .filter(|&(x, parent)| {
            let pc = state.cluster_of[parent];
            state.cluster_of[x] == Some(from)
                && !state.restrictions.contains_key(&x)
                && pc.is_some_and(|c| c != to && reduced.has_edge(c, to))
        })
        .collect();
    out.sort_by_key(|&(x, parent)| {
        (
            preferred != state.cluster_of[parent],
            taken.get(&parent).copied().unwrap_or(0),
            x,
        )
    });
    out
}

/// Matched pair, intermediate cluster, and the two batches of (leaf, parent) moves.
type Route = ((usize, usize), usize, Vec<(Vertex, Vertex)>, Vec<(Vertex, Vertex)>);

/// Moves leaves until every cluster holds exactly its quota. The most
/// over-assigned cluster is processed first; when no leaf can move directly
/// the move is routed through a matched pair.
#[allow(clippy::too_many_arguments)]
pub fn rebalance_leaves(
    h: &HrtGraph,
    state: &mut AssignmentState,
    bits: &AdjacencyBits,
    p: &RegularPartition,
    reduced: &ReducedGraph,
    th: &Thresholds,
    cap: f64,
) -> Result<StageReport, EmbedError> {
    let mut report = StageReport::new("leaves");
    let view = ClusterView::new(bits, p);
    let l = p.clusters.len();
    let leaves: Vec<(Vertex, Vertex)> = h
        .components
        .iter()
        .flat_map(|b| b.leaves.iter().map(move |&x| (x, b.last())))
        .collect();
    let mut supply = vec![0usize; l];
    for &(x, _) in &leaves {
        if let Some(c) = state.cluster_of[x] {
            supply[c] += 1;
        }
    }
    let (t, dd, m) = (h.params.t, h.params.broom_degree, p.m);
    let supply_bound = (dd - 1) as f64 * (1.0 - th.gamma) * m as f64 / (2.0 * (t + dd - 1) as f64);
    report.counter("leaf_supply", &supply);
    report.check(Check::new(
        "leaf_supply",
        supply.iter().copied().min().unwrap_or(0) as f64,
        Relation::AtLeast,
        supply_bound,
        false,
    ))?;

    let mut taken: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut moves: Vec<serde_json::Value> = Vec::new();
    let mut moved_total = 0;
    let relocate = |state: &mut AssignmentState,
                        taken: &mut BTreeMap<Vertex, usize>,
                        list: &[(Vertex, Vertex)],
                        to: usize| {
        for &(x, parent) in list {
            let pc = state.cluster_of[parent].expect("parents are assigned");
            state.place(x, to);
            state.reassigned_in[to] += 1;
            state.restrictions.insert(x, typical_for(&view, to, pc, th.delta));
            *taken.entry(parent).or_default() += 1;
        }
    };
    let limit = leaves.len() + l * l + 1;
    for _ in 0..limit {
        let surplus: Vec<i64> = (0..l).map(|i| state.load[i] as i64 - state.quota[i] as i64).collect();
        let Some(s) = (0..l).filter(|&i| surplus[i] > 0).max_by_key(|&i| (surplus[i], std::cmp::Reverse(i))) else {
            break;
        };
        let i = (0..l)
            .filter(|&i| surplus[i] < 0)
            .max_by_key(|&i| (-surplus[i], std::cmp::Reverse(i)))
            .expect("loads and quotas have equal totals");
        let amount = surplus[s].min(-surplus[i]) as usize;
        let j = reduced.partner(s);
        let direct = movable(&leaves, state, &reduced.graph, s, i, j, &taken);
        if !direct.is_empty() {
            let take = &direct[..amount.min(direct.len())];
            relocate(state, &mut taken, take, i);
            moved_total += take.len();
            moves.push(serde_json::json!({"from": s, "to": i, "count": take.len()}));
            continue;
        }
        // Two hops: s -> p, then p -> i, for a matched pair (p, q).
        let mut route: Option<Route> = None;
        for &(a, b) in &reduced.matching {
            for (pp, q) in [(a, b), (b, a)] {
                if pp == s || pp == i {
                    continue;
                }
                let first = movable(&leaves, state, &reduced.graph, s, pp, j, &taken);
                let second = movable(&leaves, state, &reduced.graph, pp, i, Some(q), &taken);
                if !first.is_empty() && !second.is_empty() {
                    let n = amount.min(first.len()).min(second.len());
                    let key = (state.reassigned_in[pp], pp);
                    if route.as_ref().is_none_or(|(k, ..)| key < *k) {
                        route = Some((key, pp, first[..n].to_vec(), second[..n].to_vec()));
                    }
                }
            }
        }
        let Some((_, pp, first, second)) = route else {
            if leaves.iter().all(|&(x, _)| state.cluster_of[x] != Some(s) || state.restrictions.contains_key(&x)) {
                return Err(EmbedError::Parameter(format!(
                    "cluster {s} has no movable leaves (D = {dd}, t = {t}, m = {m})"
                )));
            }
            return Err(EmbedError::HostDegree(format!(
                "no direct or two-hop route from cluster {s} to cluster {i}"
            )));
        };
        relocate(state, &mut taken, &second, i);
        relocate(state, &mut taken, &first, pp);
        moved_total += first.len() + second.len();
        moves.push(serde_json::json!({"from": s, "via": pp, "to": i, "count": first.len()}));
    }
    report.counter("moved", moved_total);
    report.counter("moves", &moves);
    report.counter("reassigned_in", &state.reassigned_in);
    let off = (0..l).filter(|&i| state.load[i] != state.quota[i]).count();
    report.check(Check::new("clusters_off_quota", off as f64, Relation::Equal, 0.0, true))?;
    report.check(Check::new(
        "reassignment_cap",
        state.reassigned_in.iter().copied().max().unwrap_or(0) as f64,
        Relation::AtMost,
        cap,
        true,
    ))?;
    Ok(report)
}

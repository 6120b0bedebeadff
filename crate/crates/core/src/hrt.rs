//! The separator/broom family: a double-cover expander on the separator `S`
//! with `|S|` pendant brooms, one per separator vertex.
//!
//! Vertex numbering is fixed: `S_A = 0..k`, `S_B = k..2k`, then the brooms in
//! anchor order, each listed path first (first vertex to last vertex) and
//! then its leaves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bipartition, components_after_removal, is_connected, Graph, GraphError, Vertex, VertexSet};
use crate::io::{AnnotatedGraph, Role};
use crate::spectral::{double_cover_with_matching, near_ramanujan, DoubleCover, ExpanderConfig, ExpanderError};
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HrtError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("infeasible parameters: {reason}{}", nearest_n.map(|m| format!(" (nearest feasible n: {m})")).unwrap_or_default())]
    Infeasible {
        reason: String,
        nearest_n: Option<usize>,
    },
    #[error("annotation: {0}")]
    Annotation(String),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl HrtError {
    pub fn class(&self) -> ErrorClass {
        match self {
            HrtError::Expander(e) => e.class(),
            _ => ErrorClass::Parameter,
        }
    }
}

/// `1 / (8 r 2^r)`, the separability parameter of the asymptotic statement.
pub fn gamma_nominal(r: usize) -> f64 {
    1.0 / (8.0 * r as f64 * 2f64.powi(r as i32))
}

/// Default `gamma` used to pick `k` when no hint is given.
pub const DEFAULT_GAMMA_TARGET: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub k: usize,
    /// Degree of the last broom vertex (it carries `broom_degree - 1` leaves).
    pub broom_degree: usize,
    pub gamma_nominal: f64,
    /// `2k / n`.
    pub gamma_achieved: f64,
    pub seed: u64,
}

impl ConstructionParams {
    /// Vertices per broom, `t + D - 1`.
    pub fn component_size(&self) -> usize {
        self.t + self.broom_degree - 1
    }

    pub fn max_degree(&self) -> usize {
        (self.r + 2).max(self.broom_degree)
    }
}

fn check_k(n: usize, r: usize, t: usize, k: usize) -> Result<usize, String> {
    if k <= r {
        return Err(format!("k={k} must exceed r={r}"));
    }
    if !(k * r).is_multiple_of(2) {
        return Err(format!("k*r must be even (k={k}, r={r})"));
    }
    if !n.is_multiple_of(2 * k) {
        return Err(format!("2k={} does not divide n={n}", 2 * k));
    }
    let per = n / (2 * k);
    if per < t + 2 {
        return Err(format!("broom degree n/(2k) - t = {per} - {t} is below 2"));
    }
    Ok(per - t)
}

fn auto_k(n: usize, r: usize, t: usize, gamma: f64) -> Option<usize> {
    let cap = (n as f64 * gamma / 2.0 + 1e-9).floor() as usize;
    (r + 1..=cap).rev().find(|&k| check_k(n, r, t, k).is_ok())
}

/// Chooses `k` and the broom degree `D` so that `n = 2k (t + D)` exactly.
///
/// With `k_hint` the hint is validated; otherwise `k` is the largest value
/// with `2k <= gamma_target n` that divides evenly and leaves `D >= 2`.
pub fn solve_params(
    n: usize,
    r: usize,
    t: usize,
    k_hint: Option<usize>,
    gamma_target: f64,
    seed: u64,
) -> Result<ConstructionParams, HrtError> {
    if r < 3 {
        return Err(HrtError::Parameter(format!("r={r} must be at least 3")));
    }
    if t < 1 {
        return Err(HrtError::Parameter("t must be at least 1".into()));
    }
    if !(gamma_target > 0.0 && gamma_target <= 1.0) {
        return Err(HrtError::Parameter(format!("gamma={gamma_target} must lie in (0, 1]")));
    }
    let (k, d) = match k_hint {
        Some(k) => match check_k(n, r, t, k) {
            Ok(d) => (k, d),
            Err(reason) => {
                let nearest = if k > r && (k * r).is_multiple_of(2) {
                    let step = 2 * k;
                    let lo = step * (t + 2);
                    let down = (n / step) * step;
                    let cand = [down, down + step]
                        .into_iter()
                        .filter(|&m| m >= lo)
                        .min_by_key(|&m| m.abs_diff(n));
                    Some(cand.unwrap_or(lo))
                } else {
                    None
                };
                return Err(HrtError::Infeasible {
                    reason,
                    nearest_n: nearest,
                });
            }
        },
        None => match auto_k(n, r, t, gamma_target) {
            Some(k) => (k, check_k(n, r, t, k).expect("auto_k validated")),
            None => {
                let nearest = (1..=n.max(1000))
                    .flat_map(|d| [n.checked_sub(d), Some(n + d)])
                    .flatten()
                    .find(|&m| auto_k(m, r, t, gamma_target).is_some());
                return Err(HrtError::Infeasible {
                    reason: format!("no k with 2k <= {gamma_target} n divides n={n} evenly"),
                    nearest_n: nearest,
                });
            }
        },
    };
    Ok(ConstructionParams {
        n,
        r,
        t,
        k,
        broom_degree: d,
        gamma_nominal: gamma_nominal(r),
        gamma_achieved: 2.0 * k as f64 / n as f64,
        seed,
    })
}

/// One component of `H - S`: a path whose first vertex hangs off `anchor`
/// and whose last vertex carries the leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Broom {
    pub anchor: Vertex,
    pub path: Vec<Vertex>,
    pub leaves: Vec<Vertex>,
}

impl Broom {
    pub fn first(&self) -> Vertex {
        self.path[0]
    }

    pub fn last(&self) -> Vertex {
        *self.path.last().expect("nonempty path")
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.path.iter().chain(&self.leaves).copied()
    }
}

/// Spectral data of the expander the cover was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpanderSummary {
    pub lambda: f64,
    pub ramanujan_threshold: f64,
    pub near_ramanujan: bool,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HrtGraph {
    pub graph: Graph,
    pub s_a: VertexSet,
    pub s_b: VertexSet,
    pub components: Vec<Broom>,
    pub params: ConstructionParams,
    pub expander: Option<ExpanderSummary>,
}

#[derive(Serialize, Deserialize)]
struct StoredParams {
    #[serde(flatten)]
    params: ConstructionParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expander: Option<ExpanderSummary>,
}

/// Attaches brooms to the double cover `f`.
pub fn build_hrt(params: &ConstructionParams, f: &DoubleCover) -> Result<HrtGraph, HrtError> {
    let (k, t, d) = (params.k, params.t, params.broom_degree);
    if f.k != k || f.r != params.r {
        return Err(HrtError::Parameter(format!(
            "cover has k={}, degree {}; params ask for k={k}, r={}",
            f.k,
            f.r + 1,
            params.r
        )));
    }
    if t < 1 || d < 2 || params.n != 2 * k * (t + d) {
        return Err(HrtError::Parameter(format!(
            "n={} must equal 2k(t+D) = {} with t >= 1, D >= 2",
            params.n,
            2 * k * (t + d)
        )));
    }
    let size = t + d - 1;
    let mut edges: Vec<(Vertex, Vertex)> = f.graph.edges().collect();
    let mut components = Vec::with_capacity(2 * k);
    for anchor in 0..2 * k {
        let base = 2 * k + anchor * size;
        let path: Vec<Vertex> = (base..base + t).collect();
        let leaves: Vec<Vertex> = (base + t..base + size).collect();
        edges.push((anchor, path[0]));
        edges.extend(path.windows(2).map(|w| (w[0], w[1])));
        edges.extend(leaves.iter().map(|&l| (path[t - 1], l)));
        components.push(Broom { anchor, path, leaves });
    }
    Ok(HrtGraph {
        graph: Graph::from_edges(params.n, edges)?,
        s_a: f.class_v1.clone(),
        s_b: f.class_v2.clone(),
        components,
        params: *params,
        expander: Some(ExpanderSummary {
            lambda: f.source.lambda,
            ramanujan_threshold: f.source.ramanujan_threshold,
            near_ramanujan: f.source.near_ramanujan,
            attempts: f.source.attempts,
        }),
    })
}

/// Generates the expander from `params.seed` and builds the graph.
pub fn construct(params: &ConstructionParams) -> Result<HrtGraph, HrtError> {
    let report = near_ramanujan(&ExpanderConfig::new(params.k, params.r, params.seed))?;
    let f = double_cover_with_matching(&report)?;
    build_hrt(params, &f)
}

impl HrtGraph {
    pub fn separator(&self) -> VertexSet {
        self.s_a.union(&self.s_b)
    }

    /// Broom vertices anchored in `S_A`.
    pub fn a_star(&self) -> VertexSet {
        self.anchored_in(&self.s_a)
    }

    /// Broom vertices anchored in `S_B`.
    pub fn b_star(&self) -> VertexSet {
        self.anchored_in(&self.s_b)
    }

    fn anchored_in(&self, side: &VertexSet) -> VertexSet {
        self.components
            .iter()
            .filter(|b| side.contains(b.anchor))
            .flat_map(|b| b.vertices())
            .collect()
    }

    /// Broom index of each non-separator vertex.
    pub fn component_of(&self) -> Vec<Option<usize>> {
        let mut c = vec![None; self.graph.vertex_count()];
        for (i, b) in self.components.iter().enumerate() {
            for v in b.vertices() {
                c[v] = Some(i);
            }
        }
        c
    }

    pub fn to_annotated(&self) -> AnnotatedGraph {
        let mut roles = BTreeMap::new();
        let mut component = BTreeMap::new();
        for &v in self.s_a.iter() {
            roles.insert(v, Role::Sa);
        }
        for &v in self.s_b.iter() {
            roles.insert(v, Role::Sb);
        }
        for (i, b) in self.components.iter().enumerate() {
            for &v in &b.path {
                roles.insert(v, Role::Path);
            }
            roles.insert(b.last(), Role::Last);
            // with t = 1 the first vertex is also the last one
            roles.insert(b.first(), Role::First);
            for &l in &b.leaves {
                roles.insert(l, Role::Leaf);
            }
            for v in b.vertices() {
                component.insert(v, i);
            }
        }
        let stored = StoredParams {
            params: self.params,
            expander: self.expander,
        };
        AnnotatedGraph {
            roles: Some(roles),
            component: Some(component),
            params: Some(serde_json::to_value(stored).expect("params serialize")),
            ..AnnotatedGraph::plain(&self.graph)
        }
    }

    /// Rebuilds the role structure from an annotated file. Only the
    /// annotation is trusted here; [`verify_structure`] checks it against
    /// the edges.
    pub fn from_annotated(ann: &AnnotatedGraph) -> Result<Self, HrtError> {
        let graph = ann.graph()?;
        let missing = |what: &str| HrtError::Annotation(format!("missing {what}"));
        let stored: StoredParams = serde_json::from_value(ann.params.clone().ok_or_else(|| missing("params"))?)
            .map_err(|e| HrtError::Annotation(format!("params: {e}")))?;
        let roles = ann.roles.as_ref().ok_or_else(|| missing("roles"))?;
        let comp = ann.component.as_ref().ok_or_else(|| missing("component"))?;
        let with_role = |r: Role| roles.iter().filter(move |(_, &x)| x == r).map(|(&v, _)| v);
        let s_a: VertexSet = with_role(Role::Sa).collect();
        let s_b: VertexSet = with_role(Role::Sb).collect();
        let s = s_a.union(&s_b);
        let mut groups: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        for (&v, &c) in comp {
            groups.entry(c).or_default().push(v);
        }
        let mut components = Vec::with_capacity(groups.len());
        for (c, members) in groups {
            let role = |v: Vertex| roles.get(&v).copied();
            let first = members
                .iter()
                .copied()
                .find(|&v| role(v) == Some(Role::First))
                .ok_or_else(|| HrtError::Annotation(format!("component {c} has no first vertex")))?;
            let anchor = graph
                .neighbors(first)
                .iter()
                .copied()
                .find(|&u| s.contains(u))
                .ok_or_else(|| HrtError::Annotation(format!("first vertex {first} has no separator neighbor")))?;
            let mut path = vec![first];
            let mut prev = None;
            let mut cur = first;
            while role(cur) != Some(Role::Last) && !(path.len() == 1 && stored.params.t == 1) {
                let next = graph.neighbors(cur).iter().copied().find(|&u| {
                    Some(u) != prev && comp.get(&u) == Some(&c) && matches!(role(u), Some(Role::Path | Role::Last))
                });
                match next {
                    Some(u) => {
                        prev = Some(cur);
                        cur = u;
                        path.push(u);
                    }
                    None => break,
                }
                if path.len() > members.len() {
                    return Err(HrtError::Annotation(format!("component {c} path does not terminate")));
                }
            }
            let leaves = members.iter().copied().filter(|&v| role(v) == Some(Role::Leaf)).collect();
            components.push(Broom { anchor, path, leaves });
        }
        Ok(HrtGraph {
            graph,
            s_a,
            s_b,
            components,
            params: stored.params,
            expander: stored.expander,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorCertificate {
    pub separator: VertexSet,
    pub n: usize,
    pub gamma_required: f64,
    pub max_component_size: usize,
    pub component_count: usize,
    pub valid: bool,
}

/// Checks `|S| <= gamma n` and that every component of `G - S` has at most
/// `gamma n` vertices.
pub fn certify_separator(g: &Graph, s: &VertexSet, gamma: f64) -> Result<SeparatorCertificate, GraphError> {
    s.check_range(g.vertex_count())?;
    let comps = components_after_removal(g, s);
    let n = g.vertex_count();
    let cap = gamma * n as f64 + 1e-9;
    let max_component_size = comps.iter().map(VertexSet::len).max().unwrap_or(0);
    Ok(SeparatorCertificate {
        separator: s.clone(),
        n,
        gamma_required: gamma,
        max_component_size,
        component_count: comps.len(),
        valid: s.len() as f64 <= cap && max_component_size as f64 <= cap,
    })
}

pub fn verify_separator(h: &HrtGraph, gamma: f64) -> Result<SeparatorCertificate, GraphError> {
    certify_separator(&h.graph, &h.separator(), gamma)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureCheck {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub passed: bool,
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn check(&self, name: &str) -> Option<&StructureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// AHU canonical string of the tree hanging from `root`, not entering
/// vertices outside `allowed`.
fn rooted_code(g: &Graph, root: Vertex, allowed: &[bool]) -> String {
    fn go(g: &Graph, v: Vertex, parent: Option<Vertex>, allowed: &[bool], depth: usize) -> String {
        if depth > g.vertex_count() {
            return "!".into();
        }
        let mut kids: Vec<String> = g
            .neighbors(v)
            .iter()
            .filter(|&&u| Some(u) != parent && allowed[u])
            .map(|&u| go(g, u, Some(v), allowed, depth + 1))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    go(g, root, None, allowed, 0)
}

fn broom_code(t: usize, d: usize) -> String {
    let size = t + d - 1;
    let mut edges: Vec<(usize, usize)> = (1..t).map(|i| (i - 1, i)).collect();
    edges.extend((t..size).map(|l| (t - 1, l)));
    let b = Graph::from_edges(size, edges).expect("broom edges valid");
    rooted_code(&b, 0, &vec![true; size])
}

/// Checks every structural invariant of the family and reports each with a
/// witness on failure.
pub fn verify_structure(h: &HrtGraph) -> StructureReport {
    let g = &h.graph;
    let p = &h.params;
    let n = g.vertex_count();
    let s = h.separator();
    let in_s = s.mask(n);
    let in_a = h.s_a.mask(n);
    let in_b = h.s_b.mask(n);
    let mut checks = Vec::new();
    let mut push = |name: &str, witness: Option<String>| {
        checks.push(StructureCheck {
            name: name.into(),
            passed: witness.is_none(),
            witness,
        })
    };

    push(
        "vertex_count",
        (n != p.n || p.n != 2 * p.k * (p.t + p.broom_degree) || h.s_a.len() != p.k || h.s_b.len() != p.k).then(|| {
            format!(
                "|V|={n}, n={}, 2k(t+D)={}, |S_A|={}, |S_B|={}",
                p.n,
                2 * p.k * (p.t + p.broom_degree),
                h.s_a.len(),
                h.s_b.len()
            )
        }),
    );

    push("bipartite", odd_edge(g).map(|(u, v)| format!("edge {u}-{v} closes an odd cycle")));

    let inside = |mask: &[bool]| {
        g.edges()
            .find(|&(u, v)| mask[u] && mask[v])
            .map(|(u, v)| format!("edge {u}-{v}"))
    };
    push("s_a_independent", inside(&in_a));
    push("s_b_independent", inside(&in_b));

    let cross_bad = s.iter().copied().find(|&v| {
        let other = if in_a[v] { &in_b } else { &in_a };
        g.neighbors(v).iter().filter(|&&u| other[u]).count() != p.r + 1
    });
    push(
        "cover_regular",
        cross_bad.map(|v| format!("vertex {v} has {} cross neighbors, expected {}", {
            let other = if in_a[v] { &in_b } else { &in_a };
            g.neighbors(v).iter().filter(|&&u| other[u]).count()
        }, p.r + 1)),
    );

    let comps = components_after_removal(g, &s);
    let expected = broom_code(p.t, p.broom_degree);
    let mut iso_witness = (comps.len() != 2 * p.k).then(|| format!("{} components, expected {}", comps.len(), 2 * p.k));
    let mut attach_witness = None;
    let mut anchors_seen = vec![false; n];
    for c in &comps {
        let attach: Vec<Vertex> = c.iter().copied().filter(|&v| g.neighbors(v).iter().any(|&u| in_s[u])).collect();
        let min = c.as_slice()[0];
        if attach.len() != 1 {
            attach_witness.get_or_insert(format!("component containing {min} has {} vertices adjacent to S", attach.len()));
            iso_witness.get_or_insert(format!("component containing {min} has no unique attachment vertex"));
            continue;
        }
        let y = attach[0];
        let s_nb: Vec<Vertex> = g.neighbors(y).iter().copied().filter(|&u| in_s[u]).collect();
        if s_nb.len() != 1 {
            attach_witness.get_or_insert(format!("first vertex {y} has {} separator neighbors", s_nb.len()));
        } else if std::mem::replace(&mut anchors_seen[s_nb[0]], true) {
            attach_witness.get_or_insert(format!("separator vertex {} anchors two components", s_nb[0]));
        }
        let allowed = c.mask(n);
        let edges_inside: usize = c.iter().map(|&v| g.neighbors(v).iter().filter(|&&u| allowed[u]).count()).sum::<usize>() / 2;
        if edges_inside + 1 != c.len() || rooted_code(g, y, &allowed) != expected {
            iso_witness.get_or_insert(format!("component rooted at {y} ({} vertices) is not the broom", c.len()));
        }
    }
    if attach_witness.is_none() {
        if let Some(v) = s.iter().copied().find(|&v| g.neighbors(v).iter().filter(|&&u| !in_s[u]).count() != 1) {
            attach_witness = Some(format!("separator vertex {v} does not have exactly one broom neighbor"));
        }
    }
    push("components_isomorphic", iso_witness);
    push("anchor_bijection", attach_witness);

    push(
        "separator_degree",
        s.iter()
            .copied()
            .find(|&v| g.degree(v) != p.r + 2)
            .map(|v| format!("vertex {v} has degree {}", g.degree(v))),
    );
    push(
        "max_degree",
        (g.max_degree() != p.max_degree()).then(|| format!("max degree {} != max(r+2, D) = {}", g.max_degree(), p.max_degree())),
    );
    push(
        "broom_degree_bound",
        (p.broom_degree * p.k >= 3 * p.n).then(|| format!("D={} >= 3n/k", p.broom_degree)),
    );
    push("connected", (!is_connected(g)).then(|| "graph is disconnected".to_string()));
    push("annotation", annotation_mismatch(h));

    StructureReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn odd_edge(g: &Graph) -> Option<(Vertex, Vertex)> {
    if bipartition(g).is_some() {
        return None;
    }
    let mut color = vec![usize::MAX; g.vertex_count()];
    for s in g.vertices() {
        if color[s] != usize::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if color[u] == usize::MAX {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                }
            }
        }
    }
    g.edges().find(|&(u, v)| color[u] == color[v])
}

fn annotation_mismatch(h: &HrtGraph) -> Option<String> {
    let g = &h.graph;
    let p = &h.params;
    if h.components.len() != 2 * p.k {
        return Some(format!("{} brooms annotated", h.components.len()));
    }
    for b in &h.components {
        if b.path.len() != p.t || b.leaves.len() + 1 != p.broom_degree {
            return Some(format!("broom at anchor {} has path {} and {} leaves", b.anchor, b.path.len(), b.leaves.len()));
        }
        if !g.has_edge(b.anchor, b.first()) {
            return Some(format!("anchor {} not adjacent to first vertex {}", b.anchor, b.first()));
        }
        if let Some(w) = b.path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            return Some(format!("path edge {}-{} missing", w[0], w[1]));
        }
        if let Some(&l) = b.leaves.iter().find(|&&l| !g.has_edge(b.last(), l)) {
            return Some(format!("leaf edge {}-{l} missing", b.last()));
        }
    }
    None
}

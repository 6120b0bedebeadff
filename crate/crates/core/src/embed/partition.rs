//! Planted regular partitions and the partition-level stages: restriction to
//! unused vertices, reduced graph and matching, super-regularity and the
//! distribution of exceptional vertices.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, EmbedError, Relation, StageReport, Thresholds};
use crate::graph::{AdjacencyBits, Graph, Vertex, VertexSet};
use crate::matching::{matching_pairs, maximum_matching};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularPartition {
    pub clusters: Vec<VertexSet>,
    /// The exceptional cluster.
    pub exceptional: VertexSet,
    /// Common cluster size when the partition was formed.
    pub m: usize,
    pub eps: f64,
    pub d: f64,
    pub pair_density: Vec<Vec<f64>>,
    pub planted: bool,
}

impl RegularPartition {
    /// Builds a partition from per-vertex labels (`None` = exceptional) and
    /// measures every pair density in `g`.
    pub fn from_labels(g: &Graph, labels: &[Option<usize>], eps: f64, d: f64) -> Result<Self, EmbedError> {
        if labels.len() != g.vertex_count() {
            return Err(EmbedError::Parameter(format!(
                "{} labels for a host on {} vertices",
                labels.len(),
                g.vertex_count()
            )));
        }
        let count = labels.iter().flatten().max().map_or(0, |&c| c + 1);
        let mut clusters = vec![Vec::new(); count];
        let mut exceptional = Vec::new();
        for (v, label) in labels.iter().enumerate() {
            match label {
                Some(c) => clusters[*c].push(v),
                None => exceptional.push(v),
            }
        }
        let clusters: Vec<VertexSet> = clusters.into_iter().map(VertexSet::new).collect();
        let m = clusters.iter().map(VertexSet::len).min().unwrap_or(0);
        let mut p = RegularPartition {
            pair_density: Vec::new(),
            clusters,
            exceptional: VertexSet::new(exceptional),
            m,
            eps,
            d,
            planted: false,
        };
        p.measure(g);
        Ok(p)
    }

    /// Recomputes `pair_density` exactly.
    pub fn measure(&mut self, g: &Graph) {
        let bits = AdjacencyBits::new(g);
        self.pair_density = pair_densities(&bits, &self.clusters);
    }

    /// Checks every structural invariant against a host on `n` vertices.
    pub fn validate(&self, n: usize) -> Result<(), EmbedError> {
        let bad = |msg: String| Err(EmbedError::Parameter(msg));
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.d > 0.0 && self.d <= 1.0) {
            return bad(format!("eps = {} and d = {} must lie in (0, 1)", self.eps, self.d));
        }
        let mut seen = vec![false; n];
        for set in self.clusters.iter().chain(std::iter::once(&self.exceptional)) {
            for &v in set {
                if v >= n || seen[v] {
                    return bad(format!("vertex {v} is out of range or in two clusters"));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return bad(format!("vertex {v} is in no cluster"));
        }
        if self.clusters.iter().any(|c| c.len() != self.m) {
            return bad(format!("clusters are not all of size {}", self.m));
        }
        if self.exceptional.len() as f64 > self.eps * n as f64 {
            return bad(format!(
                "|W_0| = {} exceeds eps n = {:.1}",
                self.exceptional.len(),
                self.eps * n as f64
            ));
        }
        let l = self.clusters.len();
        if self.pair_density.len() != l || self.pair_density.iter().any(|row| row.len() != l) {
            return bad("pair_density has the wrong shape".into());
        }
        for i in 0..l {
            for j in 0..l {
                let x = self.pair_density[i][j];
                if !(0.0..=1.0).contains(&x) || x != self.pair_density[j][i] {
                    return bad(format!("pair_density[{i}][{j}] = {x} is invalid"));
                }
            }
        }
        Ok(())
    }

    /// Cluster index of every host vertex; `None` for exceptional vertices
    /// and vertices outside the partition.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                out[v] = Some(i);
            }
        }
        out
    }
}

fn pair_densities(bits: &AdjacencyBits, clusters: &[VertexSet]) -> Vec<Vec<f64>> {
    let l = clusters.len();
    let masks: Vec<Vec<u64>> = clusters.iter().map(|c| bits.mask(c)).collect();
    let upper: Vec<Vec<f64>> = (0..l)
        .into_par_iter()
        .map(|i| {
            (0..l)
                .map(|j| {
                    if j <= i || clusters[i].is_empty() || clusters[j].is_empty() {
                        return 0.0;
                    }
                    let e: usize = clusters[i].iter().map(|&u| bits.count_in(u, &masks[j])).sum();
                    e as f64 / (clusters[i].len() * clusters[j].len()) as f64
                })
                .collect()
        })
        .collect();
    let mut out = vec![vec![0.0; l]; l];
    for i in 0..l {
        for j in i + 1..l {
            out[i][j] = upper[i][j];
            out[j][i] = upper[i][j];
        }
    }
    out
}

/// Parameters of a planted host. Every designated pair of clusters carries a
/// random bipartite graph; other pairs are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedHostConfig {
    pub n: usize,
    pub clusters: usize,
    /// Density threshold recorded in the partition; designated pairs are
    /// planted at `pair_density >= d`.
    pub d: f64,
    /// Every vertex of a designated pair keeps more than `delta_super m`
    /// neighbors across the pair.
    pub delta_super: f64,
    pub pair_density: Option<f64>,
    /// Edge probability inside a cluster (default: the pair density).
    pub intra_density: Option<f64>,
    /// Edge probability from leftover vertices to everything.
    pub exceptional_density: Option<f64>,
    /// Designated pairs; all pairs when absent.
    pub designated: Option<Vec<(usize, usize)>>,
    /// Regularity parameter stored in the partition (default `d / 20`).
    pub eps: Option<f64>,
    /// Resample until `min degree >= fraction * n`.
    pub min_degree_fraction: Option<f64>,
    pub seed: u64,
}

impl PlantedHostConfig {
    pub fn new(n: usize, clusters: usize, d: f64, delta_super: f64, seed: u64) -> Self {
        PlantedHostConfig {
            n,
            clusters,
            d,
            delta_super,
            pair_density: None,
            intra_density: None,
            exceptional_density: None,
            designated: None,
            eps: None,
            min_degree_fraction: None,
            seed,
        }
    }
}

const PLANT_ATTEMPTS: u64 = 20;

/// Generates a host with a known regular partition.
pub fn planted_regular_host(cfg: &PlantedHostConfig) -> Result<(Graph, RegularPartition), EmbedError> {
    let l = cfg.clusters;
    if l == 0 || cfg.n < l {
        return Err(EmbedError::Parameter(format!(
            "cannot split {} vertices into {l} clusters",
            cfg.n
        )));
    }
    let p = cfg.pair_density.unwrap_or(cfg.d);
    let intra = cfg.intra_density.unwrap_or(p);
    let outer = cfg.exceptional_density.unwrap_or(p);
    let eps = cfg.eps.unwrap_or(cfg.d / 20.0);
    let in_unit = |x: f64| (0.0..=1.0).contains(&x);
    if !(cfg.d > 0.0 && cfg.d <= 1.0) || !(cfg.delta_super > 0.0 && cfg.delta_super < 1.0) {
        return Err(EmbedError::Parameter(format!(
            "d = {} must lie in (0, 1] and delta_super = {} in (0, 1)",
            cfg.d, cfg.delta_super
        )));
    }
    if !in_unit(p) || !in_unit(intra) || !in_unit(outer) || !(eps > 0.0 && eps < 1.0) {
        return Err(EmbedError::Parameter("densities must lie in [0, 1] and eps in (0, 1)".into()));
    }
    if p < cfg.d || p <= cfg.delta_super {
        return Err(EmbedError::Parameter(format!(
            "pair density {p} cannot meet density {} and super-regular degree {}",
            cfg.d, cfg.delta_super
        )));
    }
    let designated = match &cfg.designated {
        Some(pairs) => {
            for &(a, b) in pairs {
                if a >= l || b >= l || a == b {
                    return Err(EmbedError::Parameter(format!("bad designated pair ({a}, {b})")));
                }
            }
            pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
        }
        None => (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b))).collect::<Vec<_>>(),
    };
    let m = cfg.n / l;
    let clusters: Vec<VertexSet> = (0..l).map(|i| VertexSet::range(i * m..(i + 1) * m)).collect();
    let exceptional = VertexSet::range(l * m..cfg.n);

    let mut last_min = 0;
    for attempt in 0..PLANT_ATTEMPTS {
        let seed = rng::derive_seed(cfg.seed, attempt);
        let mut adj = BitMatrix::new(cfg.n);
        for (idx, &(a, b)) in designated.iter().enumerate() {
            plant_pair(&mut adj, &clusters[a], &clusters[b], p, cfg.delta_super, seed, idx as u64)?;
        }
        let base = designated.len() as u64;
        for (i, c) in clusters.iter().enumerate() {
            let mut r = rng::stream(seed, base + i as u64);
            for (x, &u) in c.iter().enumerate() {
                for &v in &c.as_slice()[x + 1..] {
                    if r.gen_bool(intra) {
                        adj.set(u, v);
                    }
                }
            }
        }
        let mut r = rng::stream(seed, base + l as u64);
        for &u in &exceptional {
            for v in 0..cfg.n {
                if v != u && !(exceptional.contains(v) && v < u) && r.gen_bool(outer) {
                    adj.set(u, v);
                }
            }
        }
        let g = adj.into_graph();
        last_min = g.min_degree();
        let ok = cfg
            .min_degree_fraction
            .is_none_or(|f| last_min as f64 >= f * cfg.n as f64);
        if ok {
            let bits = AdjacencyBits::new(&g);
            let pair_density = pair_densities(&bits, &clusters);
            return Ok((
                g,
                RegularPartition {
                    clusters,
                    exceptional,
                    m,
                    eps,
                    d: cfg.d,
                    pair_density,
                    planted: true,
                },
            ));
        }
    }
    Err(EmbedError::Parameter(format!(
        "planted host never reached min degree {:.1} (last {last_min}); densities too low",
        cfg.min_degree_fraction.unwrap_or(0.0) * cfg.n as f64
    )))
}

struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    fn set(&mut self, u: Vertex, v: Vertex) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn clear(&mut self, u: Vertex, v: Vertex) {
        self.bits[u * self.words + v / 64] &= !(1 << (v % 64));
        self.bits[v * self.words + u / 64] &= !(1 << (u % 64));
    }

    fn get(&self, u: Vertex, v: Vertex) -> bool {
        self.bits[u * self.words + v / 64] & (1 << (v % 64)) != 0
    }

    fn into_graph(self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for w in 0..self.words {
                let mut word = self.bits[u * self.words + w];
                while word != 0 {
                    let v = w * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
        }
        Graph::from_edges(self.n, edges).expect("bit matrix edges are simple")
    }
}

/// Random bipartite graph between `a` and `b`; rows of vertices whose cross
/// degree is at most `delta |other side|` are redrawn.
fn plant_pair(
    adj: &mut BitMatrix,
    a: &VertexSet,
    b: &VertexSet,
    p: f64,
    delta: f64,
    seed: u64,
    stream: u64,
) -> Result<(), EmbedError> {
    let mut r = rng::stream(seed, 1 << 32 | stream);
    for &u in a {
        for &v in b {
            if r.gen_bool(p) {
                adj.set(u, v);
            }
        }
    }
    let degree = |adj: &BitMatrix, u: Vertex, other: &VertexSet| other.iter().filter(|&&v| adj.get(u, v)).count();
    for _round in 0..100 {
        let mut changed = false;
        for (side, other) in [(a, b), (b, a)] {
            for &u in side {
                let mut tries = 0;
                while degree(adj, u, other) as f64 <= delta * other.len() as f64 {
                    tries += 1;
                    if tries > 100 {
                        return Err(EmbedError::Parameter(format!(
                            "density {p} cannot keep degrees above {delta}"
                        )));
                    }
                    for &v in other {
                        if r.gen_bool(p) {
                            adj.set(u, v);
                        } else {
                            adj.clear(u, v);
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            top_up(adj, a, b, p, &mut r);
            return Ok(());
        }
    }
    Err(EmbedError::Parameter("super-regular resampling did not settle".into()))
}

/// Adds random cross edges until the pair density reaches `p`.
fn top_up<R: Rng>(adj: &mut BitMatrix, a: &VertexSet, b: &VertexSet, p: f64, r: &mut R) {
    let target = (p * (a.len() * b.len()) as f64).ceil() as usize;
    let mut count: usize = a.iter().map(|&u| b.iter().filter(|&&v| adj.get(u, v)).count()).sum();
    while count < target {
        let u = a.as_slice()[r.gen_range(0..a.len())];
        let v = b.as_slice()[r.gen_range(0..b.len())];
        if !adj.get(u, v) {
            adj.set(u, v);
            count += 1;
        }
    }
}

/// A sampled subset pair whose density deviates by at least `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrregularWitness {
    pub x: VertexSet,
    pub y: VertexSet,
    pub density: f64,
}

/// Outcome of regularity sampling. `not_falsified` is evidence only; a
/// witness is a certificate of irregularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityResult {
    pub not_falsified: bool,
    pub evidence_only: bool,
    pub samples: usize,
    pub pair_density: f64,
    pub max_deviation: f64,
    pub witness: Option<IrregularWitness>,
}

/// Worst atypical-vertex count over sampled `Y`: vertices `x` of `A` with
/// `|N(x) ∩ Y| <= (d(A, B) - eps) |Y|`, against the allowance `eps |A|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtypicalCheck {
    pub samples: usize,
    pub max_atypical: usize,
    pub allowed: f64,
    pub holds: bool,
}

/// Bit-matrix backed sampler, reusable across many pairs of one host.
pub struct RegularityTester {
    bits: AdjacencyBits,
    n: usize,
}

impl RegularityTester {
    pub fn new(g: &Graph) -> Self {
        RegularityTester {
            bits: AdjacencyBits::new(g),
            n: g.vertex_count(),
        }
    }

    pub fn bits(&self) -> &AdjacencyBits {
        &self.bits
    }

    fn check_pair(&self, a: &VertexSet, b: &VertexSet) -> Result<(), EmbedError> {
        a.check_range(self.n)?;
        b.check_range(self.n)?;
        if a.is_empty() || b.is_empty() {
            return Err(EmbedError::Parameter("regularity test on an empty set".into()));
        }
        if let Some(v) = a.first_common(b) {
            return Err(EmbedError::Parameter(format!("pair sets share vertex {v}")));
        }
        Ok(())
    }

    fn edges(&self, x: &[Vertex], y_mask: &[u64]) -> usize {
        x.iter().map(|&u| self.bits.count_in(u, y_mask)).sum()
    }

    pub fn density(&self, a: &VertexSet, b: &VertexSet) -> f64 {
        let mask = self.bits.mask(b);
        self.edges(a.as_slice(), &mask) as f64 / (a.len() * b.len()) as f64
    }

    pub fn sample(
        &self,
        a: &VertexSet,
        b: &VertexSet,
        eps: f64,
        samples: usize,
        seed: u64,
    ) -> Result<RegularityResult, EmbedError> {
        self.check_pair(a, b)?;
        let base = self.density(a, b);
        let mut r = rng::stream(seed, 0);
        let mut max_deviation: f64 = 0.0;
        for _ in 0..samples {
            let x = random_part(&mut r, a, eps);
            let y = random_part(&mut r, b, eps);
            let mask = self.bits.mask(&y);
            let dens = self.edges(&x, &mask) as f64 / (x.len() * y.len()) as f64;
            let dev = (dens - base).abs();
            max_deviation = max_deviation.max(dev);
            if dev >= eps {
                return Ok(RegularityResult {
                    not_falsified: false,
                    evidence_only: false,
                    samples,
                    pair_density: base,
                    max_deviation,
                    witness: Some(IrregularWitness {
                        x: VertexSet::new(x),
                        y: VertexSet::new(y),
                        density: dens,
                    }),
                });
            }
        }
        Ok(RegularityResult {
            not_falsified: true,
            evidence_only: true,
            samples,
            pair_density: base,
            max_deviation,
            witness: None,
        })
    }

    pub fn atypical(
        &self,
        a: &VertexSet,
        b: &VertexSet,
        eps: f64,
        samples: usize,
        seed: u64,
    ) -> Result<AtypicalCheck, EmbedError> {
        self.check_pair(a, b)?;
        let base = self.density(a, b);
        let allowed = eps * a.len() as f64;
        let mut r = rng::stream(seed, 1);
        let mut worst = 0;
        for _ in 0..samples {
            let y = random_part(&mut r, b, eps);
            let mask = self.bits.mask(&y);
            let cut = (base - eps) * y.len() as f64;
            let atypical = a
                .iter()
                .filter(|&&x| self.bits.count_in(x, &mask) as f64 <= cut)
                .count();
            worst = worst.max(atypical);
        }
        Ok(AtypicalCheck {
            samples,
            max_atypical: worst,
            allowed,
            holds: worst as f64 <= allowed,
        })
    }
}

/// Random subset of `set` whose size is uniform on `[ceil(eps |set|) + 1, |set|]`.
fn random_part<R: Rng>(r: &mut R, set: &VertexSet, eps: f64) -> Vec<Vertex> {
    let n = set.len();
    let lo = ((eps * n as f64).ceil() as usize + 1).min(n);
    let size = r.gen_range(lo..=n);
    let mut picked: Vec<Vertex> = sample(r, n, size).into_iter().map(|i| set.as_slice()[i]).collect();
    picked.sort_unstable();
    picked
}

/// Samples subset pairs of `(a, b)` looking for a density deviation of at
/// least `eps`.
pub fn sample_regularity(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<RegularityResult, EmbedError> {
    RegularityTester::new(g).sample(a, b, eps, samples, seed)
}

/// Atypical-vertex count check on `(a, b)`.
pub fn atypical_vertex_check(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<AtypicalCheck, EmbedError> {
    RegularityTester::new(g).atypical(a, b, eps, samples, seed)
}

/// Drops used host vertices from every cluster and equalizes cluster sizes,
/// moving the surplus (highest ids first) into the exceptional cluster.
pub fn restrict_to_unused(
    g: &Graph,
    p: &RegularPartition,
    used: &[bool],
    th: &Thresholds,
) -> Result<(RegularPartition, StageReport), EmbedError> {
    let mut report = StageReport::new("restrict");
    let mut exceptional: Vec<Vertex> = p.exceptional.iter().copied().filter(|&v| !used[v]).collect();
    let kept: Vec<Vec<Vertex>> = p
        .clusters
        .iter()
        .map(|c| c.iter().copied().filter(|&v| !used[v]).collect())
        .collect();
    let m = kept.iter().map(Vec::len).min().unwrap_or(0);
    if m == 0 {
        return Err(EmbedError::HostDegree("a cluster has no unused vertex left".into()));
    }
    let removed: Vec<usize> = p.clusters.iter().zip(&kept).map(|(c, k)| c.len() - k.len()).collect();
    let clusters: Vec<VertexSet> = kept
        .into_iter()
        .map(|mut k| {
            exceptional.extend(k.drain(m..));
            VertexSet::new(k)
        })
        .collect();
    let remaining = used.iter().filter(|u| !**u).count();
    let mut out = RegularPartition {
        clusters,
        exceptional: VertexSet::new(exceptional),
        m,
        eps: p.eps,
        d: p.d,
        pair_density: Vec::new(),
        planted: p.planted,
    };
    out.measure(g);
    report.counter("removed_per_cluster", &removed);
    report.counter("m", m);
    report.counter("exceptional", out.exceptional.len());
    report.counter("gamma_prime", th.gamma_prime());
    report.counter("gamma_double_prime", th.gamma_double_prime());
    report.check(Check::new(
        "exceptional_size",
        out.exceptional.len() as f64,
        Relation::AtMost,
        p.eps * remaining as f64,
        true,
    ))?;
    report.check(Check::new(
        "gamma_prime_exceeds_cbrt",
        th.gamma_prime(),
        Relation::AtLeast,
        th.gamma_cbrt(),
        th.premise,
    ))?;
    Ok((out, report))
}

/// Reduced graph on the clusters with a maximum matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedGraph {
    pub graph: Graph,
    pub matching: Vec<(usize, usize)>,
    /// Index (before removal) of a cluster left uncovered and moved into the
    /// exceptional cluster.
    pub dropped: Option<usize>,
}

impl ReducedGraph {
    /// Matching partner of cluster `i`.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.matching.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn partners(&self) -> Vec<Option<usize>> {
        (0..self.graph.vertex_count()).map(|i| self.partner(i)).collect()
    }
}

/// Builds the reduced graph from measured densities and regularity sampling,
/// then matches clusters. `min_degree_fraction` is the host's
/// `min degree / order` on the vertices still in play.
pub fn reduced_graph_and_matching(
    tester: &RegularityTester,
    p: &RegularPartition,
    th: &Thresholds,
    min_degree_fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<(ReducedGraph, RegularPartition, StageReport), EmbedError> {
    let mut report = StageReport::new("reduced_graph");
    let l = p.clusters.len();
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b))).collect();
    let verdicts: Vec<(bool, bool, f64)> = pairs
        .par_iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            if p.pair_density[a][b] < th.d {
                return Ok((false, false, 0.0));
            }
            let s = rng::derive_seed(seed, idx as u64);
            let reg = tester.sample(&p.clusters[a], &p.clusters[b], th.eps, samples, s)?;
            let aty = tester.atypical(&p.clusters[a], &p.clusters[b], th.eps, samples.min(50), s)?;
            Ok((reg.not_falsified, !reg.not_falsified, aty.max_atypical as f64 / aty.allowed))
        })
        .collect::<Result<_, EmbedError>>()?;
    let mut edges = Vec::new();
    let mut falsified = 0;
    let mut worst_atypical: f64 = 0.0;
    for (&(a, b), &(edge, fals, ratio)) in pairs.iter().zip(&verdicts) {
        if edge {
            edges.push((a, b));
            worst_atypical = worst_atypical.max(ratio);
        }
        falsified += fals as usize;
    }
    let graph = Graph::from_edges(l, edges)?;
    let theta = 2.0 * th.eps + th.d;
    report.counter("clusters", l);
    report.counter("edges", graph.edge_count());
    report.counter("falsified_pairs", falsified);
    report.counter("theta", theta);
    report.check(Check::new(
        "atypical_vertices_ratio",
        worst_atypical,
        Relation::AtMost,
        1.0,
        false,
    ))?;
    let min_deg = Check::new(
        "reduced_min_degree",
        graph.min_degree() as f64,
        Relation::AtLeast,
        (min_degree_fraction - theta) * l as f64,
        true,
    );
    if !min_deg.passed {
        let msg = format!(
            "reduced graph min degree {} below {:.2}",
            min_deg.value, min_deg.bound
        );
        report.checks.push(min_deg);
        return Err(EmbedError::HostDegree(msg));
    }
    report.checks.push(min_deg);

    let matching = matching_pairs(&maximum_matching(&graph));
    let uncovered: Vec<usize> = {
        let mut covered = vec![false; l];
        for &(a, b) in &matching {
            covered[a] = true;
            covered[b] = true;
        }
        (0..l).filter(|&i| !covered[i]).collect()
    };
    let coverage = Check::new(
        "matching_coverage",
        (2 * matching.len()) as f64,
        Relation::AtLeast,
        l.saturating_sub(1) as f64,
        true,
    );
    if !coverage.passed {
        report.checks.push(coverage);
        return Err(EmbedError::HostDegree(format!(
            "matching leaves {} clusters uncovered",
            uncovered.len()
        )));
    }
    report.checks.push(coverage);
    report.counter("matching", &matching);

    let mut out = p.clone();
    let mut reduced = ReducedGraph {
        graph,
        matching,
        dropped: None,
    };
    if let Some(&u) = uncovered.first() {
        let mut exceptional = out.exceptional.clone().into_vec();
        exceptional.extend(out.clusters.remove(u).iter().copied());
        out.exceptional = VertexSet::new(exceptional);
        let keep: Vec<usize> = (0..l).filter(|&i| i != u).collect();
        let reindex = |i: usize| if i > u { i - 1 } else { i };
        let edges: Vec<(usize, usize)> = reduced
            .graph
            .edges()
            .filter(|&(a, b)| a != u && b != u)
            .map(|(a, b)| (reindex(a), reindex(b)))
            .collect();
        reduced.graph = Graph::from_edges(l - 1, edges)?;
        reduced.matching = reduced.matching.iter().map(|&(a, b)| (reindex(a), reindex(b))).collect();
        reduced.dropped = Some(u);
        out.pair_density = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| p.pair_density[i][j]).collect())
            .collect();
        report.counter("dropped_cluster", u);
    }
    Ok((reduced, out, report))
}

/// Moves low cross-degree vertices of every matched pair into the exceptional
/// cluster, discarding the same number from every cluster.
pub fn make_super_regular(
    tester: &RegularityTester,
    p: &RegularPartition,
    reduced: &ReducedGraph,
    th: &Thresholds,
) -> Result<(RegularPartition, StageReport), EmbedError> {
    let mut report = StageReport::new("super_regular");
    let bits = tester.bits();
    let l = p.clusters.len();
    let partners = reduced.partners();
    let mut clusters: Vec<Vec<Vertex>> = p.clusters.iter().map(|c| c.as_slice().to_vec()).collect();
    let mut exceptional = p.exceptional.clone().into_vec();
    let base = p.m;
    let allowance = th.eps * base as f64;
    let mut total_moved = 0;
    let mut failing_first = Vec::new();
    for round in 0..base {
        let masks: Vec<Vec<u64>> = clusters.iter().map(|c| bits.mask(c)).collect();
        // (vertex, cross degree) per cluster, low degree first.
        let degrees: Vec<Vec<(usize, Vertex)>> = (0..l)
            .map(|i| {
                let Some(j) = partners[i] else { return Vec::new() };
                let mut d: Vec<(usize, Vertex)> = clusters[i]
                    .iter()
                    .map(|&u| (bits.count_in(u, &masks[j]), u))
                    .collect();
                d.sort_unstable();
                d
            })
            .collect();
        let failing: Vec<usize> = (0..l)
            .map(|i| match partners[i] {
                Some(j) => {
                    let cut = th.delta * clusters[j].len() as f64;
                    degrees[i].iter().filter(|(deg, _)| *deg as f64 <= cut).count()
                }
                None => 0,
            })
            .collect();
        if round == 0 {
            failing_first = failing.clone();
        }
        let q = failing.iter().copied().max().unwrap_or(0);
        if q == 0 {
            break;
        }
        if (total_moved + q) as f64 > allowance {
            let worst = (0..l).max_by_key(|&i| failing[i]).unwrap_or(0);
            return Err(EmbedError::Irregular(
                worst,
                partners[worst].unwrap_or(worst),
                format!(
                    "{} vertices fail the degree test, allowance eps m = {allowance:.1}",
                    total_moved + q
                ),
            ));
        }
        for i in 0..l {
            // Matched clusters drop their q lowest cross-degree vertices,
            // which include every failing one.
            let drop: Vec<Vertex> = if partners[i].is_some() {
                degrees[i].iter().take(q).map(|&(_, u)| u).collect()
            } else {
                clusters[i].iter().rev().take(q).copied().collect()
            };
            clusters[i].retain(|u| !drop.contains(u));
            exceptional.extend(drop);
        }
        total_moved += q;
    }
    let masks: Vec<Vec<u64>> = clusters.iter().map(|c| bits.mask(c)).collect();
    let mut worst_ratio = f64::INFINITY;
    for &(a, b) in &reduced.matching {
        for (x, y) in [(a, b), (b, a)] {
            let min = clusters[x].iter().map(|&u| bits.count_in(u, &masks[y])).min().unwrap_or(0);
            worst_ratio = worst_ratio.min(min as f64 / clusters[y].len() as f64);
        }
    }
    report.counter("failing_per_cluster", &failing_first);
    report.counter("moved_per_cluster", total_moved);
    report.counter("m", base - total_moved);
    report.check(Check::new(
        "moved_per_cluster",
        total_moved as f64,
        Relation::AtMost,
        allowance,
        true,
    ))?;
    report.check(Check::new(
        "super_regular_degree",
        worst_ratio,
        Relation::AtLeast,
        th.delta + f64::EPSILON,
        true,
    ))?;
    let mut out = RegularPartition {
        clusters: clusters.into_iter().map(VertexSet::new).collect(),
        exceptional: VertexSet::new(exceptional),
        m: base - total_moved,
        eps: p.eps,
        d: p.d,
        pair_density: Vec::new(),
        planted: p.planted,
    };
    out.pair_density = pair_densities(bits, &out.clusters);
    Ok((out, report))
}

/// Assigns every exceptional vertex to its least-loaded neighbor in the
/// auxiliary graph `J`, where `v ~ W_i` iff `v` has at least `delta m`
/// neighbors in the matching partner of `W_i`.
pub fn distribute_exceptional(
    tester: &RegularityTester,
    p: &RegularPartition,
    reduced: &ReducedGraph,
    th: &Thresholds,
    samples: usize,
    seed: u64,
) -> Result<(RegularPartition, StageReport), EmbedError> {
    let mut report = StageReport::new("exceptional");
    let bits = tester.bits();
    let l = p.clusters.len();
    let partners = reduced.partners();
    let m = p.m;
    let w0 = p.exceptional.len();
    let masks: Vec<Vec<u64>> = p.clusters.iter().map(|c| bits.mask(c)).collect();
    let mut gained = vec![0usize; l];
    let mut added: Vec<Vec<Vertex>> = vec![Vec::new(); l];
    let mut min_j_degree = usize::MAX;
    for &v in &p.exceptional {
        let neighbors: Vec<usize> = (0..l)
            .filter(|&i| {
                partners[i].is_some_and(|j| bits.count_in(v, &masks[j]) as f64 >= th.delta * m as f64)
            })
            .collect();
        min_j_degree = min_j_degree.min(neighbors.len());
        let Some(&target) = neighbors.iter().min_by_key(|&&i| (gained[i], i)) else {
            return Err(EmbedError::HostDegree(format!(
                "exceptional vertex {v} has no neighbor in the auxiliary graph"
            )));
        };
        gained[target] += 1;
        added[target].push(v);
    }
    let clusters: Vec<VertexSet> = p
        .clusters
        .iter()
        .zip(added)
        .map(|(c, a)| c.union(&VertexSet::new(a)))
        .collect();
    let sizes: Vec<usize> = clusters.iter().map(VertexSet::len).collect();
    let spread = sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0);
    report.counter("exceptional", w0);
    report.counter("gained", &gained);
    report.counter("sizes", &sizes);
    if w0 > 0 {
        report.check(Check::new(
            "auxiliary_degree",
            min_j_degree as f64,
            Relation::AtLeast,
            (0.5 + th.gamma_double_prime()) * l as f64,
            th.premise,
        ))?;
    }
    report.check(Check::new(
        "max_gain",
        gained.iter().copied().max().unwrap_or(0) as f64,
        Relation::AtMost,
        (2 * w0).div_ceil(l.max(1)) as f64,
        true,
    ))?;
    report.check(Check::new(
        "size_spread",
        spread as f64,
        Relation::AtMost,
        3.0 * th.eps * m as f64,
        true,
    ))?;
    if w0 > 0 {
        let eps2 = (2.0 * th.eps.sqrt()).min(1.0);
        let mut worst: f64 = 0.0;
        let mut falsified = 0;
        for (idx, &(a, b)) in reduced.matching.iter().enumerate() {
            let res = tester.sample(&clusters[a], &clusters[b], eps2, samples, rng::derive_seed(seed, idx as u64))?;
            worst = worst.max(res.max_deviation);
            falsified += !res.not_falsified as usize;
        }
        report.counter("perturbed_eps", eps2);
        report.check(Check::new(
            "perturbed_pairs_falsified",
            falsified as f64,
            Relation::Equal,
            0.0,
            false,
        ))?;
        report.counter("perturbed_max_deviation", worst);
    }
    let mut out = RegularPartition {
        clusters,
        exceptional: VertexSet::new(Vec::new()),
        m,
        eps: p.eps,
        d: p.d,
        pair_density: Vec::new(),
        planted: p.planted,
    };
    out.pair_density = pair_densities(bits, &out.clusters);
    Ok((out, report))
}

//! End-to-end run of every stage with a JSON-friendly report.

use serde::{Deserialize, Serialize};

use super::assign::{assign_components, cluster_quotas, rebalance_leaves, reassign_first_vertices};
use super::blowup::{blowup_embed, BlowupConfig};
use super::dense::{dense_embed_separator, DenseConfig};
use super::partition::{
    distribute_exceptional, make_super_regular, reduced_graph_and_matching, restrict_to_unused, RegularPartition,
    RegularityTester,
};
use super::{Check, EmbedError, Relation, StageReport, Thresholds};
use crate::graph::{AdjacencyBits, Graph, VertexSet};
use crate::hrt::HrtGraph;
use crate::rng;
use crate::subgraph::{verify_embedding, EmbeddingMap};
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub rho: f64,
    pub dense_retries: usize,
    /// Spread the separator image evenly over the clusters.
    pub balance_separator: bool,
    /// Overrides the partition's regularity parameter.
    pub eps: Option<f64>,
    /// Overrides the partition's density threshold.
    pub d: Option<f64>,
    /// Super-regularity degree fraction.
    pub delta: f64,
    /// Overrides the guest's achieved separability.
    pub gamma: Option<f64>,
    pub regularity_samples: usize,
    /// Relative window for matching-edge loads.
    pub load_slack: f64,
    pub assign_retries: usize,
    /// Neighbor count (as a fraction of m) below which a first vertex is
    /// moved; default `3 gamma^(2/3)`.
    pub first_threshold: Option<f64>,
    /// Cap on vertices moved into one cluster (as a fraction of m); default
    /// `gamma^(2/3)`.
    pub reassign_cap: Option<f64>,
    pub c: f64,
    pub alpha: f64,
    pub node_budget: usize,
    pub component_restarts: usize,
    pub reseeds: usize,
}

impl PipelineConfig {
    pub fn new(seed: u64) -> Self {
        PipelineConfig {
            seed,
            rho: 0.5,
            dense_retries: 50,
            balance_separator: true,
            eps: None,
            d: None,
            delta: 0.3,
            gamma: None,
            regularity_samples: 200,
            load_slack: 0.1,
            assign_retries: 10_000,
            first_threshold: None,
            reassign_cap: None,
            c: 0.2,
            alpha: 0.3,
            node_budget: 2000,
            component_restarts: 20,
            reseeds: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ErrorClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub guest_order: usize,
    pub host_order: usize,
    pub host_min_degree: usize,
    pub thresholds: Thresholds,
    /// Minimum degree fraction `1/2 + 3 gamma^(1/3)` that enforces the
    /// degree-counting checks.
    pub premise_min_degree_fraction: f64,
    pub stages: Vec<StageReport>,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingMap>,
}

impl PipelineReport {
    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == name)
    }

    /// Every enforced check of every stage passed.
    pub fn enforced_checks_pass(&self) -> bool {
        self.stages
            .iter()
            .flat_map(|s| &s.checks)
            .all(|c| !c.enforced || c.passed)
    }
}

/// Runs every stage; failures are reported in [`PipelineReport::outcome`].
pub fn run_pipeline(h: &HrtGraph, g: &Graph, partition: &RegularPartition, cfg: &PipelineConfig) -> PipelineReport {
    let gamma = cfg.gamma.unwrap_or(h.params.gamma_achieved);
    let premise_fraction = 0.5 + 3.0 * gamma.cbrt();
    let thresholds = Thresholds {
        gamma,
        eps: cfg.eps.unwrap_or(partition.eps),
        d: cfg.d.unwrap_or(partition.d),
        delta: cfg.delta,
        premise: g.min_degree() as f64 >= premise_fraction * g.vertex_count() as f64,
    };
    let mut report = PipelineReport {
        config: cfg.clone(),
        guest_order: h.graph.vertex_count(),
        host_order: g.vertex_count(),
        host_min_degree: g.min_degree(),
        thresholds,
        premise_min_degree_fraction: premise_fraction,
        stages: Vec::new(),
        outcome: Outcome {
            success: false,
            error: None,
            class: None,
            failed_stage: None,
        },
        embedding: None,
    };
    match stages(h, g, partition, cfg, &thresholds, &mut report.stages) {
        Ok(map) => {
            report.outcome.success = map.verified;
            report.embedding = Some(map);
        }
        Err((stage, e)) => {
            report.outcome.error = Some(e.to_string());
            report.outcome.class = Some(e.class());
            report.outcome.failed_stage = Some(stage.into());
        }
    }
    report
}

fn stages(
    h: &HrtGraph,
    g: &Graph,
    partition: &RegularPartition,
    cfg: &PipelineConfig,
    th: &Thresholds,
    out: &mut Vec<StageReport>,
) -> Result<EmbeddingMap, (&'static str, EmbedError)> {
    let at = |stage: &'static str| move |e: EmbedError| (stage, e);
    partition.validate(g.vertex_count()).map_err(at("input"))?;
    let seed = |i: u64| rng::derive_seed(cfg.seed, i);

    // Separator into the whole host.
    let separator = h.separator();
    let (hs, back) = h.graph.induced(&separator);
    let mut dense = DenseConfig::new(seed(1));
    dense.rho = cfg.rho;
    dense.retries = cfg.dense_retries;
    if cfg.balance_separator {
        dense.balance_labels = Some(partition.labels(g.vertex_count()));
    }
    let step1 = dense_embed_separator(&hs, g, &dense).map_err(at("separator"))?;
    let mut used = vec![false; g.vertex_count()];
    for &w in &step1.embedding.map {
        used[w] = true;
    }
    let bits = AdjacencyBits::new(g);
    let rest = VertexSet::new(g.vertices().filter(|&v| !used[v]));
    let rest_mask = bits.mask(&rest);
    let rest_min = rest.iter().map(|&v| bits.count_in(v, &rest_mask)).min().unwrap_or(0);
    let rest_fraction = rest_min as f64 / rest.len().max(1) as f64;
    let mut report = StageReport::new("separator");
    report.counter("attempts", step1.attempts);
    report.counter("premise_log10_required", step1.premise_log10_required);
    report.counter("premise_holds", step1.premise_holds);
    report.counter("min_candidates", step1.min_candidates);
    report.counter("degree_fallbacks", step1.degree_fallbacks);
    report.counter("remaining_min_degree", rest_min);
    let checks = [
        Check::new("verified", step1.embedding.verified as u8 as f64, Relation::Equal, 1.0, true),
        Check::new(
            "remaining_min_degree_fraction",
            rest_fraction,
            Relation::AtLeast,
            0.5 + 2.0 * th.gamma_cbrt(),
            th.premise,
        ),
    ];
    out.push(report);
    for c in checks {
        out.last_mut().expect("pushed").check(c).map_err(at("separator"))?;
    }

    let (p, report) = restrict_to_unused(g, partition, &used, th).map_err(at("restrict"))?;
    out.push(report);
    let tester = RegularityTester::new(g);
    let (reduced, p, report) =
        reduced_graph_and_matching(&tester, &p, th, rest_fraction, cfg.regularity_samples, seed(3))
            .map_err(at("reduced_graph"))?;
    out.push(report);
    let (p, report) = make_super_regular(&tester, &p, &reduced, th).map_err(at("super_regular"))?;
    out.push(report);
    let (p, report) =
        distribute_exceptional(&tester, &p, &reduced, th, cfg.regularity_samples, seed(5)).map_err(at("exceptional"))?;
    out.push(report);

    let sizes: Vec<usize> = p.clusters.iter().map(VertexSet::len).collect();
    let total = h.graph.vertex_count() - separator.len();
    let quota = cluster_quotas(&sizes, total).map_err(at("assign"))?;
    let (mut state, mut report) =
        assign_components(h, &reduced, &quota, cfg.load_slack, cfg.assign_retries, seed(6)).map_err(at("assign"))?;
    report.counter("quota", &quota);
    out.push(report);
    for (i, &x) in back.iter().enumerate() {
        state.image_of.insert(x, step1.embedding.map[i]);
    }

    let m = p.m as f64;
    let threshold = cfg.first_threshold.unwrap_or(3.0 * th.gamma_two_thirds()) * m;
    let cap = cfg.reassign_cap.unwrap_or(th.gamma_two_thirds()) * m;
    let report = reassign_first_vertices(h, &mut state, &bits, &p, &reduced, th, threshold, cap)
        .map_err(at("first_vertices"))?;
    out.push(report);
    let report = rebalance_leaves(h, &mut state, &bits, &p, &reduced, th, cap).map_err(at("leaves"))?;
    out.push(report);

    let blow = BlowupConfig {
        c: cfg.c,
        alpha: cfg.alpha,
        seed: seed(8),
        node_budget: cfg.node_budget,
        component_restarts: cfg.component_restarts,
        reseeds: cfg.reseeds,
    };
    let (map, report) = blowup_embed(h, &state, g, &p, &blow).map_err(at("blowup"))?;
    out.push(report);
    let recheck = verify_embedding(&h.graph, g, &map.map);
    if !recheck.valid {
        return Err((
            "blowup",
            EmbedError::EmbeddingFailed(format!("final map fails verification: {:?}", recheck.violation)),
        ));
    }
    Ok(map)
}

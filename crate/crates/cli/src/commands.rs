use std::collections::BTreeMap;
use std::path::Path;

use sbl_core::bandwidth::{bandwidth_lower_bound, exact_bandwidth};
use sbl_core::embed::{
    dense_embed_separator, exact_embed, planted_regular_host, run_pipeline, DenseConfig, EmbedError, PipelineConfig,
    PlantedHostConfig, RegularPartition,
};
use sbl_core::graph::{bfs_distance, Graph, GraphError};
use sbl_core::hosts::{
    build_layered_host, build_two_clique_host, degree_histogram, exhaustive_non_embedding, layered_non_embeddability,
    robust_expander_probe, HostError, LayeredHost, RobustExpanderParams,
};
use sbl_core::hrt::{construct, solve_params, verify_separator, verify_structure, HrtError, HrtGraph};
use sbl_core::io::{load_graph, read_file, write_atomic, AnnotatedGraph, IoError};
use sbl_core::spectral::{
    double_cover_with_matching, expansion_trials, mixing_trials, near_ramanujan, thirds_edge_check, ExpanderConfig,
    ExpanderError, RegularGraphReport, ThirdsTarget,
};
use sbl_core::sweep::{run_sweep, to_csv, SweepConfig};
use sbl_core::{bandwidth::BandwidthError, ErrorClass};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// A failed command: its class picks the exit code.
#[derive(Debug)]
pub struct Fail {
    pub class: ErrorClass,
    pub message: String,
}

impl Fail {
    pub fn parameter(message: impl Into<String>) -> Self {
        Fail {
            class: ErrorClass::Parameter,
            message: message.into(),
        }
    }
}

macro_rules! fail_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Fail {
            fn from(e: $t) -> Self {
                Fail { class: e.class(), message: e.to_string() }
            }
        }
    )*};
}

fail_from!(
    GraphError,
    IoError,
    ExpanderError,
    HrtError,
    BandwidthError,
    HostError,
    EmbedError,
    sbl_core::Error
);

/// What a command produced: a report plus an optional non-success class for
/// runs whose report is still worth writing.
pub struct Done {
    pub report: Value,
    pub status: Option<(ErrorClass, String)>,
}

impl Done {
    fn ok<T: Serialize>(report: &T) -> Self {
        Done {
            report: to_value(report),
            status: None,
        }
    }

    fn flag(mut self, class: ErrorClass, failed: bool, message: impl Into<String>) -> Self {
        if failed && self.status.is_none() {
            self.status = Some((class, message.into()));
        }
        self
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), Fail> {
    if ok {
        Ok(())
    } else {
        Err(Fail::parameter(message()))
    }
}

fn unit_interval(name: &str, x: f64) -> Result<(), Fail> {
    check(x > 0.0 && x <= 1.0, || format!("{name}={x} must lie in (0, 1]"))
}

fn write_graph(path: &Path, ann: &AnnotatedGraph) -> Result<(), Fail> {
    Ok(write_atomic(path, &ann.to_json())?)
}

fn load_plain(path: &Path) -> Result<Graph, Fail> {
    Ok(load_graph(path)?.graph()?)
}

/// Spectral fields of a regular graph, without the graph itself.
#[derive(Serialize)]
struct RegularSummary<'a> {
    r: usize,
    k: usize,
    lambda: f64,
    ramanujan_threshold: f64,
    eig_tolerance: f64,
    is_ramanujan: bool,
    near_ramanujan: bool,
    seed: u64,
    attempts: usize,
    edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<&'a Path>,
}

fn summary<'a>(rep: &RegularGraphReport, out: Option<&'a Path>) -> RegularSummary<'a> {
    RegularSummary {
        r: rep.r,
        k: rep.k,
        lambda: rep.lambda,
        ramanujan_threshold: rep.ramanujan_threshold,
        eig_tolerance: rep.eig_tolerance,
        is_ramanujan: rep.is_ramanujan,
        near_ramanujan: rep.near_ramanujan,
        seed: rep.seed,
        attempts: rep.attempts,
        edges: rep.graph.edge_count(),
        out,
    }
}

pub fn expander_gen(a: &ExpanderGen) -> Result<Done, Fail> {
    check(a.r >= 1 && a.k > a.r, || format!("need 1 <= r < k, got r={}, k={}", a.r, a.k))?;
    let mut cfg = ExpanderConfig::new(a.k, a.r, a.seed.seed);
    cfg.max_resamples = a.max_resamples;
    if let Some(tol) = a.eig_tolerance {
        check(tol >= 0.0, || format!("eig tolerance {tol} is negative"))?;
        cfg.eig_tolerance = tol;
    }
    let rep = near_ramanujan(&cfg)?;
    let mut ann = AnnotatedGraph::plain(&rep.graph);
    ann.params = Some(json!({ "r": rep.r, "k": rep.k, "lambda": rep.lambda, "seed": rep.seed }));
    write_graph(&a.out, &ann)?;
    Ok(Done::ok(&summary(&rep, Some(&a.out))))
}

pub fn expander_verify(a: &ExpanderVerify) -> Result<Done, Fail> {
    check(a.trials > 0, || "trials must be at least 1".into())?;
    let g = load_plain(&a.input)?;
    let rep = RegularGraphReport::from_graph(g, 0.0)?;
    let tol = sbl_core::spectral::default_eig_tolerance(rep.r);
    let rep = RegularGraphReport {
        eig_tolerance: tol,
        is_ramanujan: rep.lambda <= rep.ramanujan_threshold + tol,
        near_ramanujan: rep.lambda <= rep.ramanujan_threshold + tol,
        ..rep
    };
    let mixing = mixing_trials(&rep.graph, rep.lambda, a.trials, a.seed.seed)?;
    let thirds = if rep.k >= 3 {
        Some(thirds_edge_check(ThirdsTarget::Plain(&rep.graph), a.trials, a.seed.seed)?)
    } else {
        None
    };
    let cover = double_cover_with_matching(&rep)?;
    let expansion = expansion_trials(&cover, a.trials, a.seed.seed)?;
    let (mv, ev) = (mixing.violations, expansion.failures);
    let report = json!({
        "graph": summary(&rep, None),
        "mixing": mixing,
        "thirds": thirds,
        "double_cover": {
            "vertices": cover.graph.vertex_count(),
            "regular_degree": cover.graph.regular_degree(),
            "bipartite": sbl_core::graph::bipartition(&cover.graph).is_some(),
            "expansion": expansion,
        },
    });
    Ok(Done { report, status: None }
        .flag(ErrorClass::LemmaViolation, mv > 0, format!("{mv} mixing violations at the measured eigenvalue"))
        .flag(ErrorClass::LemmaViolation, ev > 0, format!("{ev} double-cover expansion failures")))
}

pub fn hrt_build(a: &HrtBuild) -> Result<Done, Fail> {
    let params = solve_params(a.n, a.r, a.t, a.k, a.gamma, a.seed.seed)?;
    let h = construct(&params)?;
    let sep = verify_separator(&h, params.gamma_achieved.max(a.gamma))?;
    let structure = verify_structure(&h);
    write_graph(&a.out, &h.to_annotated())?;
    let passed = structure.passed;
    let report = json!({
        "params": params,
        "vertices": h.graph.vertex_count(),
        "edges": h.graph.edge_count(),
        "max_degree": h.graph.max_degree(),
        "expander": h.expander,
        "separator": sep,
        "structure": structure,
        "out": a.out,
    });
    Ok(Done { report, status: None }.flag(ErrorClass::LemmaViolation, !passed, "structure check failed"))
}

fn load_hrt(path: &Path) -> Result<HrtGraph, Fail> {
    Ok(HrtGraph::from_annotated(&load_graph(path)?)?)
}

pub fn hrt_verify(a: &HrtVerify) -> Result<Done, Fail> {
    unit_interval("gamma", a.gamma)?;
    let h = load_hrt(&a.input)?;
    let sep = verify_separator(&h, a.gamma)?;
    let structure = verify_structure(&h);
    let (valid, passed) = (sep.valid, structure.passed);
    let report = json!({ "params": h.params, "separator": sep, "structure": structure });
    Ok(Done { report, status: None }
        .flag(ErrorClass::LemmaViolation, !passed, "structure check failed")
        .flag(ErrorClass::Failure, !valid, format!("separator is not {}-separating", a.gamma)))
}

pub fn bw_exact(a: &BwExact) -> Result<Done, Fail> {
    let g = load_plain(&a.input)?;
    let bw = exact_bandwidth(&g, a.limit);
    Ok(Done::ok(&json!({ "n": g.vertex_count(), "edges": g.edge_count(), "bandwidth": bw })))
}

pub fn bw_bound(a: &BwBound) -> Result<Done, Fail> {
    let h = load_hrt(&a.input)?;
    Ok(Done::ok(&bandwidth_lower_bound(&h, a.probes, a.seed.seed)?))
}

fn layered_summary(host: &LayeredHost) -> Result<Value, Fail> {
    let g = &host.graph;
    let d = bfs_distance(g, &host.layer_union(1, 35), &host.layer_union(66, host.layers.len()))?;
    Ok(json!({
        "n": g.vertex_count(),
        "edges": g.edge_count(),
        "layers": host.layers.len(),
        "min_degree": g.min_degree(),
        "max_degree": g.max_degree(),
        "degree_histogram": degree_histogram(g),
        "block_distance": d.distance,
    }))
}

pub fn host_layered(a: &HostLayered) -> Result<Done, Fail> {
    let host = build_layered_host(a.n)?;
    if let Some(out) = &a.out {
        write_graph(out, &host.to_annotated())?;
    }
    Ok(Done::ok(&layered_summary(&host)?))
}

pub fn host_twoclique(a: &HostTwoClique) -> Result<Done, Fail> {
    let host = build_two_clique_host(a.n, a.gamma)?;
    if let Some(out) = &a.out {
        write_graph(out, &AnnotatedGraph::plain(&host.graph))?;
    }
    Ok(Done::ok(&json!({
        "n": host.graph.vertex_count(),
        "left_size": host.left_size,
        "right_size": host.right_size,
        "overlap_size": host.overlap_size,
        "nominal_clique_size": host.nominal_clique_size,
        "min_degree": host.graph.min_degree(),
        "edges": host.graph.edge_count(),
    })))
}

pub fn host_probe(a: &HostProbe) -> Result<Done, Fail> {
    let params = RobustExpanderParams::new(a.nu, a.tau)?;
    let ann = load_graph(&a.input)?;
    let g = ann.graph()?;
    // Layer unions are the natural adversaries when the file is a layered host.
    let adversarial = LayeredHost::from_annotated(&ann)
        .map(|h| h.adversarial_sets())
        .unwrap_or_default();
    let rep = robust_expander_probe(&g, params, a.trials, &adversarial, a.seed.seed)?;
    Ok(Done::ok(&rep))
}

pub fn host_certify(a: &HostCertify) -> Result<Done, Fail> {
    let ann = load_graph(&a.input)?;
    if let Some(guest) = &a.guest {
        let h = load_plain(guest)?;
        let outcome = exhaustive_non_embedding(&h, &ann.graph()?, a.limit)?;
        return Ok(Done::ok(&json!({
            "method": "exhaustive",
            "label": outcome.label(),
            "conclusion": outcome.label() == "does_not_embed",
            "outcome": outcome,
        })));
    }
    check(a.t >= 1, || "t must be at least 1".into())?;
    let host = LayeredHost::from_annotated(&ann)?;
    Ok(Done::ok(&layered_non_embeddability(a.t, &host)?))
}

fn load_partition(a: &EmbedPipeline, host: &AnnotatedGraph, g: &Graph) -> Result<RegularPartition, Fail> {
    if let Some(path) = &a.partition {
        let text = read_file(path)?;
        let p: RegularPartition = serde_json::from_str(&text).map_err(IoError::from)?;
        return Ok(p);
    }
    let comp = host
        .component
        .as_ref()
        .ok_or_else(|| Fail::parameter("host has no component labels; pass --partition"))?;
    let stored = |key: &str| host.params.as_ref().and_then(|p| p.get(key)).and_then(Value::as_f64);
    let eps = a.eps.or_else(|| stored("eps")).ok_or_else(|| Fail::parameter("--eps is required"))?;
    let d = a.d.or_else(|| stored("d")).ok_or_else(|| Fail::parameter("--d is required"))?;
    let mut labels = vec![None; g.vertex_count()];
    for (&v, &c) in comp {
        check(v < labels.len(), || format!("labelled vertex {v} is out of range"))?;
        labels[v] = Some(c);
    }
    Ok(RegularPartition::from_labels(g, &labels, eps, d)?)
}

pub fn embed_pipeline(a: &EmbedPipeline) -> Result<Done, Fail> {
    for (name, x) in [("rho", a.rho), ("delta", a.delta), ("c", a.c), ("alpha", a.alpha)] {
        unit_interval(name, x)?;
    }
    for (name, x) in [("eps", a.eps), ("d", a.d), ("gamma", a.gamma), ("reassign-cap", a.reassign_cap)] {
        if let Some(x) = x {
            unit_interval(name, x)?;
        }
    }
    check(a.samples > 0, || "samples must be at least 1".into())?;
    let h = load_hrt(&a.guest)?;
    let host = load_graph(&a.host)?;
    let g = host.graph()?;
    let partition = load_partition(a, &host, &g)?;
    let mut cfg = PipelineConfig::new(a.seed.seed);
    cfg.rho = a.rho;
    cfg.eps = a.eps;
    cfg.d = a.d;
    cfg.delta = a.delta;
    cfg.gamma = a.gamma;
    cfg.c = a.c;
    cfg.alpha = a.alpha;
    cfg.first_threshold = Some(a.first_threshold.unwrap_or(a.c));
    cfg.reassign_cap = a.reassign_cap;
    cfg.regularity_samples = a.samples;
    let rep = run_pipeline(&h, &g, &partition, &cfg);
    let status = (!rep.outcome.success).then(|| {
        (
            rep.outcome.class.unwrap_or(ErrorClass::Failure),
            rep.outcome.error.clone().unwrap_or_else(|| "embedding not verified".into()),
        )
    });
    Ok(Done {
        report: to_value(&rep),
        status,
    })
}

pub fn embed_dense(a: &EmbedDense) -> Result<Done, Fail> {
    unit_interval("rho", a.rho)?;
    let hs = load_plain(&a.guest)?;
    let g = load_plain(&a.host)?;
    let mut cfg = DenseConfig::new(a.seed.seed);
    cfg.rho = a.rho;
    cfg.retries = a.retries;
    Ok(Done::ok(&dense_embed_separator(&hs, &g, &cfg)?))
}

pub fn embed_exact(a: &EmbedExact) -> Result<Done, Fail> {
    let h = load_plain(&a.guest)?;
    let g = load_plain(&a.host)?;
    Ok(Done::ok(&exact_embed(&h, &g, a.limit)))
}

pub fn embed_planted(a: &EmbedPlanted) -> Result<Done, Fail> {
    for (name, x) in [
        ("d", a.d),
        ("delta-super", a.delta_super),
        ("pair-density", a.pair_density),
        ("eps", a.eps),
        ("min-degree-fraction", a.min_degree_fraction),
    ] {
        unit_interval(name, x)?;
    }
    let mut cfg = PlantedHostConfig::new(a.n, a.clusters, a.d, a.delta_super, a.seed.seed);
    cfg.pair_density = Some(a.pair_density);
    cfg.eps = Some(a.eps);
    cfg.min_degree_fraction = Some(a.min_degree_fraction);
    let (g, p) = planted_regular_host(&cfg)?;
    let mut ann = AnnotatedGraph::plain(&g);
    let component: BTreeMap<usize, usize> = p
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
        .collect();
    ann.component = Some(component);
    ann.params = Some(to_value(&cfg));
    write_graph(&a.out, &ann)?;
    if let Some(path) = &a.partition_out {
        let mut text = serde_json::to_string(&p).expect("partition serializes");
        text.push('\n');
        write_atomic(path, &text)?;
    }
    Ok(Done::ok(&json!({
        "config": cfg,
        "n": g.vertex_count(),
        "edges": g.edge_count(),
        "min_degree": g.min_degree(),
        "clusters": p.clusters.len(),
        "cluster_size": p.m,
        "exceptional": p.exceptional.len(),
        "eps": p.eps,
        "d": p.d,
    })))
}

/// Sweep output is CSV text or a JSON row array; not wrapped in an envelope.
pub fn sweep(a: &SweepArgs) -> Result<String, Fail> {
    unit_interval("gamma", a.gamma)?;
    let ks: Vec<Option<usize>> = a.k.iter().map(|&k| Some(k)).collect();
    let mut cfg = SweepConfig::grid(&a.n, &a.r, &a.t, &ks, a.seed.seed);
    cfg.gamma = a.gamma;
    cfg.probes = a.probes;
    cfg.pipeline_runs = a.pipeline_runs;
    let rows = run_sweep(&cfg);
    match a.format {
        Format::Csv => to_csv(&rows).map_err(|e| Fail {
            class: ErrorClass::Io,
            message: e.to_string(),
        }),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "config": cfg, "rows": rows })).expect("rows serialize");
            s.push('\n');
            Ok(s)
        }
    }
}

//! Parameter sweeps: one CSV row per grid point, computed in parallel and
//! emitted in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::bandwidth_lower_bound;
use crate::embed::{planted_regular_host, run_pipeline, PipelineConfig, PlantedHostConfig};
use crate::hosts::{build_layered_host, layered_non_embeddability, LAYERS};
use crate::hrt::{construct, solve_params, verify_separator, verify_structure, DEFAULT_GAMMA_TARGET};
use crate::rng;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub points: Vec<SweepPoint>,
    pub seed: u64,
    /// Separability target used to pick `k` and to certify the separator.
    pub gamma: f64,
    /// Random orderings probed per point.
    pub probes: usize,
    /// Pipeline runs per point; zero skips the pipeline columns.
    pub pipeline_runs: usize,
}

impl SweepConfig {
    /// Cartesian product in `n`, `r`, `t`, `k` order.
    pub fn grid(ns: &[usize], rs: &[usize], ts: &[usize], ks: &[Option<usize>], seed: u64) -> Self {
        let ks: &[Option<usize>] = if ks.is_empty() { &[None] } else { ks };
        let mut points = Vec::new();
        for &n in ns {
            for &r in rs {
                for &t in ts {
                    for &k in ks {
                        points.push(SweepPoint { n, r, t, k });
                    }
                }
            }
        }
        SweepConfig {
            points,
            seed,
            gamma: DEFAULT_GAMMA_TARGET,
            probes: 20,
            pipeline_runs: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub k: Option<usize>,
    pub broom_degree: Option<usize>,
    pub gamma_achieved: Option<f64>,
    pub gamma_nominal: Option<f64>,
    pub bw_lower_bound: Option<usize>,
    pub bw_upper_bound: Option<usize>,
    pub separator_valid: Option<bool>,
    pub structure_valid: Option<bool>,
    pub layered_nonembed: Option<bool>,
    pub pipeline_runs: usize,
    pub pipeline_successes: usize,
    pub pipeline_success_rate: Option<f64>,
    pub error: Option<String>,
}

pub const CSV_HEADER: [&str; 16] = [
    "n",
    "r",
    "t",
    "k",
    "broom_degree",
    "gamma_achieved",
    "gamma_nominal",
    "bw_lower_bound",
    "bw_upper_bound",
    "separator_valid",
    "structure_valid",
    "layered_nonembed",
    "pipeline_runs",
    "pipeline_successes",
    "pipeline_success_rate",
    "error",
];

pub fn run_sweep(cfg: &SweepConfig) -> Vec<SweepRow> {
    cfg.points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let seed = rng::derive_seed(cfg.seed, i as u64);
            let mut row = SweepRow {
                n: p.n,
                r: p.r,
                t: p.t,
                k: p.k,
                ..Default::default()
            };
            if let Err(e) = fill_row(&mut row, p, cfg, seed) {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect()
}

fn fill_row(row: &mut SweepRow, p: &SweepPoint, cfg: &SweepConfig, seed: u64) -> Result<(), Error> {
    // Layered host column depends only on n and t.
    if p.n > 0 && p.n.is_multiple_of(LAYERS) {
        let host = build_layered_host(p.n)?;
        row.layered_nonembed = Some(layered_non_embeddability(p.t, &host)?.conclusion);
    }
    let params = solve_params(p.n, p.r, p.t, p.k, cfg.gamma, seed)?;
    row.k = Some(params.k);
    row.broom_degree = Some(params.broom_degree);
    row.gamma_achieved = Some(params.gamma_achieved);
    row.gamma_nominal = Some(params.gamma_nominal);
    let h = construct(&params)?;
    row.separator_valid = Some(verify_separator(&h, cfg.gamma)?.valid);
    row.structure_valid = Some(verify_structure(&h).passed);
    let bw = bandwidth_lower_bound(&h, cfg.probes, seed)?;
    row.bw_lower_bound = Some(bw.lower_bound);
    row.bw_upper_bound = Some(bw.upper_bound);
    if cfg.pipeline_runs > 0 {
        row.pipeline_runs = cfg.pipeline_runs;
        for run in 0..cfg.pipeline_runs {
            let run_seed = rng::derive_seed(seed, 1000 + run as u64);
            let (g, part) = planted_regular_host(&reference_host(p.n, run_seed))?;
            let mut pc = PipelineConfig::new(run_seed);
            pc.first_threshold = Some(pc.c);
            let report = run_pipeline(&h, &g, &part, &pc);
            row.pipeline_successes += report.outcome.success as usize;
        }
        row.pipeline_success_rate = Some(row.pipeline_successes as f64 / cfg.pipeline_runs as f64);
    }
    Ok(())
}

/// Planted host used by sweeps: about twice the guest order, ten clusters,
/// pair density 0.62, min degree at least 0.55 of the order.
pub fn reference_host(guest_order: usize, seed: u64) -> PlantedHostConfig {
    let n = (guest_order * 79).div_ceil(400) * 10;
    let mut cfg = PlantedHostConfig::new(n, 10, 0.5, 0.3, seed);
    cfg.pair_density = Some(0.62);
    cfg.eps = Some(0.1);
    cfg.min_degree_fraction = Some(0.55);
    cfg
}

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

/// CSV text with a header line; an empty sweep yields the header only.
pub fn to_csv(rows: &[SweepRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.r.to_string(),
            r.t.to_string(),
            cell(&r.k),
            cell(&r.broom_degree),
            cell(&r.gamma_achieved),
            cell(&r.gamma_nominal),
            cell(&r.bw_lower_bound),
            cell(&r.bw_upper_bound),
            cell(&r.separator_valid),
            cell(&r.structure_valid),
            cell(&r.layered_nonembed),
            r.pipeline_runs.to_string(),
            r.pipeline_successes.to_string(),
            cell(&r.pipeline_success_rate),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

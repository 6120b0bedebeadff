//! Desk-scale embedding of the broom family into dense hosts.
//!
//! The stages mirror the proof strategy: embed the separator greedily into
//! the dense host, work with a planted regular partition of what is left,
//! match clusters, make matched pairs super-regular, absorb exceptional
//! vertices, assign and rebalance components, and finally place every
//! component with a restriction-aware randomized greedy. Every stage returns
//! a [`StageReport`] with its checks; the final map is always re-verified.

mod assign;
mod blowup;
mod dense;
mod partition;
mod pipeline;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;
use crate::ErrorClass;

pub use assign::{
    assign_components, cluster_quotas, rebalance_leaves, reassign_first_vertices, AssignmentState,
};
pub use blowup::{blowup_embed, BlowupConfig};
pub use dense::{dense_embed_separator, DenseConfig, DenseEmbedReport};
pub use partition::{
    atypical_vertex_check, distribute_exceptional, make_super_regular, planted_regular_host,
    reduced_graph_and_matching, restrict_to_unused, sample_regularity, AtypicalCheck, PlantedHostConfig,
    ReducedGraph, RegularPartition, RegularityResult, RegularityTester,
};
pub use pipeline::{run_pipeline, Outcome, PipelineConfig, PipelineReport};

pub use crate::subgraph::{exact_embed, verify_embedding, EmbedOutcome, EmbeddingCheck, EmbeddingMap, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    /// The host does not have the degree structure a stage relies on.
    #[error("host degree condition fails: {0}")]
    HostDegree(String),
    #[error("pair ({0}, {1}) is too irregular: {2}")]
    Irregular(usize, usize, String),
    #[error("stage {stage}: check {check} failed ({value} vs {bound})")]
    StageCheck {
        stage: String,
        check: String,
        value: f64,
        bound: f64,
    },
    #[error("{0}")]
    SeedExhaustion(String),
    #[error("embedding failed: {0}")]
    EmbeddingFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl EmbedError {
    pub fn class(&self) -> ErrorClass {
        match self {
            EmbedError::StageCheck { .. } => ErrorClass::LemmaViolation,
            EmbedError::SeedExhaustion(_) | EmbedError::EmbeddingFailed(_) => ErrorClass::Failure,
            EmbedError::Graph(e) => e.class(),
            _ => ErrorClass::Parameter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// One numeric assertion of a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
    /// Unenforced checks are recorded only; they either depend on a premise
    /// the host does not meet or are statistical.
    pub enforced: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: Relation, bound: f64, enforced: bool) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= bound + 1e-9,
            Relation::AtLeast => value + 1e-9 >= bound,
            Relation::Equal => (value - bound).abs() <= 1e-9,
        };
        Check {
            name: name.into(),
            value,
            bound,
            relation,
            passed,
            enforced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub checks: Vec<Check>,
    pub counters: BTreeMap<String, serde_json::Value>,
}

impl StageReport {
    pub fn new(stage: &str) -> Self {
        StageReport {
            stage: stage.into(),
            checks: Vec::new(),
            counters: BTreeMap::new(),
        }
    }

    pub fn counter<T: Serialize>(&mut self, key: &str, value: T) {
        self.counters
            .insert(key.into(), serde_json::to_value(value).expect("counter serializes"));
    }

    /// Records a check and fails with [`EmbedError::StageCheck`] if it is
    /// enforced and violated.
    pub fn check(&mut self, check: Check) -> Result<(), EmbedError> {
        let err = (check.enforced && !check.passed).then(|| EmbedError::StageCheck {
            stage: self.stage.clone(),
            check: check.name.clone(),
            value: check.value,
            bound: check.bound,
        });
        self.checks.push(check);
        err.map_or(Ok(()), Err)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Instance-level constants shared by the stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Separability of the guest actually built.
    pub gamma: f64,
    pub eps: f64,
    /// Density threshold for reduced-graph edges.
    pub d: f64,
    /// Super-regularity degree fraction.
    pub delta: f64,
    /// Whether the host meets `min degree >= (1/2 + 3 gamma^(1/3)) n`;
    /// degree-counting checks are enforced only then.
    pub premise: bool,
}

impl Thresholds {
    pub fn gamma_cbrt(&self) -> f64 {
        self.gamma.cbrt()
    }

    pub fn gamma_two_thirds(&self) -> f64 {
        self.gamma.powf(2.0 / 3.0)
    }

    /// `2 gamma^(1/3) - sqrt(gamma) - eps`.
    pub fn gamma_prime(&self) -> f64 {
        2.0 * self.gamma_cbrt() - self.gamma.sqrt() - self.eps
    }

    /// `3 (gamma^(1/3) - 2 (eps + d))`.
    pub fn gamma_double_prime(&self) -> f64 {
        3.0 * (self.gamma_cbrt() - 2.0 * (self.eps + self.d))
    }
}

//! Construction and certification toolkit for bounded-degree bipartite graphs
//! that have small separators yet linear bandwidth.
//!
//! The crate covers four areas:
//!
//! * [`spectral`]: random near-Ramanujan regular graphs, the expander mixing
//!   bound and the bipartite double cover with a perfect matching.
//! * [`hrt`] and [`bandwidth`]: the separator/broom construction and its
//!   separator, structure and bandwidth certificates.
//! * [`hosts`]: the layered robust expander and two-clique host graphs with
//!   non-embeddability certificates.
//! * [`embed`]: an executable desk-scale embedding pipeline into dense hosts
//!   with planted regular partitions.

pub mod bandwidth;
pub mod embed;
pub mod graph;
pub mod hosts;
pub mod hrt;
pub mod io;
pub mod matching;
pub mod rng;
pub mod spectral;
pub mod subgraph;
pub mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph::{Graph, Vertex, VertexSet};

/// Coarse classification of failures, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    /// Invalid input or infeasible parameters.
    Parameter,
    /// A mathematical invariant that must hold was observed to fail.
    LemmaViolation,
    /// A randomized procedure exhausted its retry budget.
    Failure,
    /// File or format problems.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error(transparent)]
    Expander(#[from] spectral::ExpanderError),
    #[error(transparent)]
    Hrt(#[from] hrt::HrtError),
    #[error(transparent)]
    Bandwidth(#[from] bandwidth::BandwidthError),
    #[error(transparent)]
    Host(#[from] hosts::HostError),
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Graph(e) => e.class(),
            Error::Io(e) => e.class(),
            Error::Expander(e) => e.class(),
            Error::Hrt(e) => e.class(),
            Error::Bandwidth(e) => e.class(),
            Error::Host(e) => e.class(),
            Error::Embed(e) => e.class(),
        }
    }
}

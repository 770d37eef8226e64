//! Spectral fragility analysis of weighted bipartite credit networks.
//!
//! Banks lend to firms; the lending and borrowing shares define a
//! bank-to-bank propagation matrix `P = AB`, whose non-trivial eigenvectors
//! score how shocks circulate between banks and their borrowers. This crate
//! holds the algorithmic core and needs only `alloc`:
//!
//! * [`network`] – the weighted bipartite graph, aggregates and components
//! * [`matrices`] – the share matrices and the propagation operator
//! * [`spectral`] – eigenpairs of `P`, dual scores and propagation traces
//! * [`nullmodel`] – stub-rewired replicas and ensemble significance
//! * [`stats`] – CCDFs, Kendall's tau-b and log-log fits
//! * [`temporal`] – yearly panels, eigenvalue series and heatmaps
//! * [`synth`] – seeded synthetic networks for experiments and tests
#![no_std]

extern crate alloc;

pub mod error;
pub mod lanczos;
pub mod linalg;
pub mod matrices;
pub mod network;
pub mod nullmodel;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod temporal;

pub use error::{NetworkError, NullModelError, PanelError, SpectralError, StatsError};
pub use matrices::ShareMatrices;
pub use network::{BipartiteNetwork, CreditRecord, NodeAggregates};
pub use nullmodel::{NullEnsembleSummary, RewiredReplica};
pub use spectral::{PropagationTrace, SpectralOptions, SpectralResult};
pub use temporal::{HeatmapMatrix, YearPanel};

//! File formats, parallel ensembles and the command-line interface on top
//! of [`fragility_core`].

pub mod cli;
pub mod ensemble;
pub mod input;
pub mod report;

pub use fragility_core as core;

use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("record {row}: empty bank or firm id")]
    EmptyId { row: usize },
    #[error("record {row} ({bank}, {firm}): amount is not finite")]
    NonFiniteAmount { row: usize, bank: String, firm: String },
    #[error("record {row} ({bank}, {firm}): summed amount {amount} is not positive")]
    NonPositiveWeight {
        row: usize,
        bank: String,
        firm: String,
        amount: f64,
    },
    #[error("no valid edges")]
    EmptyNetwork,
    #[error("duplicate edge ({bank}, {firm})")]
    DuplicateEdge { bank: String, firm: String },
    #[error("node {0} has no edges")]
    IsolatedNode(String),
    #[error("edge refers to a node outside the registry")]
    IndexOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("eigensolver did not converge for rank {rank}")]
    ConvergenceFailure { rank: usize },
    #[error("requested {requested} eigenpairs but the network has {available} banks")]
    InvalidRank { requested: usize, available: usize },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown bank {0}")]
    UnknownBank(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NullModelError {
    #[error("no simple matching found after {attempts} restarts")]
    MatchingExhausted { attempts: usize },
    #[error("replica {index}: {source}")]
    Replica {
        index: usize,
        #[source]
        source: alloc::boxed::Box<NullModelError>,
    },
    #[error("ensemble needs at least 2 replicas, got {0}")]
    TooFewReplicas(usize),
    #[error("observed spectrum has {observed} ranks, ensemble has {ensemble}")]
    RankMismatch { observed: usize, ensemble: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("inputs have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("input is constant; statistic undefined")]
    DegenerateInput,
    #[error("value at position {0} is not positive")]
    NonPositiveValue(usize),
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PanelError {
    #[error("year {year}: {source}")]
    Network {
        year: i32,
        #[source]
        source: NetworkError,
    },
    #[error("year {year}: {banks} banks, rank {rank} requested")]
    InsufficientRank { year: i32, banks: usize, rank: usize },
    #[error("year {year}: {source}")]
    Spectral {
        year: i32,
        #[source]
        source: SpectralError,
    },
    #[error("rank list must be non-empty and 1-based")]
    InvalidRanks,
    #[error("alias chain starting at {0} is cyclic")]
    AliasCycle(String),
}

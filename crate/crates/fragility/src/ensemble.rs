//! Null-model ensemble with replicas solved on the rayon pool.
//!
//! Each replica draws from its own derived seed and the reduction sorts by
//! replica index, so the summary is bit-identical to the sequential one.

use fragility_core::network::BipartiteNetwork;
use fragility_core::nullmodel::{replica_outcome, summarize, NullEnsembleSummary};
use fragility_core::{NullModelError, SpectralOptions};
use rayon::prelude::*;

pub fn parallel_ensemble(
    net: &BipartiteNetwork,
    replicas: usize,
    ranks: usize,
    seed: u64,
    opts: &SpectralOptions,
) -> Result<NullEnsembleSummary, NullModelError> {
    if replicas < 2 {
        return Err(NullModelError::TooFewReplicas(replicas));
    }
    let outcomes = (0..replicas)
        .into_par_iter()
        .map(|i| replica_outcome(net, i, seed, ranks, opts))
        .collect::<Result<Vec<_>, _>>()?;
    summarize(net.n_banks(), ranks, seed, outcomes)
}

//! Degree/weight-preserving random replicas and ensemble significance.
//!
//! Every edge is cut into a bank-stub, which keeps the edge weight, and a
//! firm-stub. Stubs are re-matched uniformly at random subject to the graph
//! staying simple. Bank strengths, bank degrees, per-bank weight multisets
//! and firm degrees survive exactly; firm strengths are randomized.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::NullModelError;
use crate::matrices::ShareMatrices;
use crate::network::{BipartiteNetwork, Edge};
use crate::rng::{derive_seed, SeededRng, RNG_ID};
use crate::spectral::{fragility_spectrum_with, SpectralOptions, SpectralResult};

/// Whole-matching restarts allowed before giving up.
pub const MAX_RESTARTS: usize = 1000;
/// Re-draws of a colliding firm-stub before a restart.
pub const LOCAL_RETRIES: usize = 100;
pub const DEFAULT_REPLICAS: usize = 10;
pub const DEFAULT_THRESHOLD: f64 = 2.0;
/// Spreads and differences of `λ̃` below this are rounding noise and count
/// as exact zeros.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RewiredReplica {
    pub network: BipartiteNetwork,
    pub seed: u64,
    /// Matching attempts used, counting the successful one.
    pub attempts: usize,
}

pub fn rewire(net: &BipartiteNetwork, seed: u64) -> Result<RewiredReplica, NullModelError> {
    rewire_with_budget(net, seed, MAX_RESTARTS)
}

pub fn rewire_with_budget(net: &BipartiteNetwork, seed: u64, restarts: usize) -> Result<RewiredReplica, NullModelError> {
    let mut rng = SeededRng::new(seed);
    let edges = net.edges();
    let total = edges.len();
    let mut firm_stubs: Vec<usize> = edges.iter().map(|e| e.firm).collect();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); net.n_banks()];

    for attempt in 1..=restarts {
        rng.shuffle(&mut firm_stubs);
        for a in &mut assigned {
            a.clear();
        }
        let mut complete = true;
        'stubs: for p in 0..total {
            let bank = edges[p].bank;
            let mut retries = 0;
            while assigned[bank].contains(&firm_stubs[p]) {
                if retries == LOCAL_RETRIES || p + 1 == total {
                    complete = false;
                    break 'stubs;
                }
                let q = rng.index_in(p + 1, total);
                firm_stubs.swap(p, q);
                retries += 1;
            }
            assigned[bank].push(firm_stubs[p]);
        }
        if complete {
            let rewired: Vec<Edge> = edges
                .iter()
                .zip(&firm_stubs)
                .map(|(e, &firm)| Edge {
                    bank: e.bank,
                    firm,
                    weight: e.weight,
                })
                .collect();
            let network = BipartiteNetwork::from_edges(net.banks().clone(), net.firms().clone(), rewired)?;
            return Ok(RewiredReplica {
                network,
                seed,
                attempts: attempt,
            });
        }
    }
    Err(NullModelError::MatchingExhausted { attempts: restarts })
}

/// Per-replica quantities feeding the ensemble summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub index: usize,
    pub seed: u64,
    pub attempts: usize,
    pub components: usize,
    /// `λ̃_k`, `k = 1..K`.
    pub normalized: Vec<f64>,
    /// `abs_vectors[k - 2][μ] = |x_μ^(k)|` for `k = 2..K`.
    pub abs_vectors: Vec<Vec<f64>>,
}

/// Generates and solves replica `index` of the ensemble seeded by `master_seed`.
pub fn replica_outcome(
    net: &BipartiteNetwork,
    index: usize,
    master_seed: u64,
    ranks: usize,
    opts: &SpectralOptions,
) -> Result<ReplicaOutcome, NullModelError> {
    let wrap = |e: NullModelError| NullModelError::Replica {
        index,
        source: alloc::boxed::Box::new(e),
    };
    let seed = derive_seed(master_seed, index as u64);
    let replica = rewire(net, seed).map_err(wrap)?;
    let shares = ShareMatrices::new(&replica.network);
    let spectrum = fragility_spectrum_with(&shares, ranks, opts).map_err(|e| wrap(e.into()))?;
    Ok(ReplicaOutcome {
        index,
        seed,
        attempts: replica.attempts,
        components: spectrum.components,
        normalized: spectrum.normalized,
        abs_vectors: spectrum.fragility_vectors[1.min(ranks)..]
            .iter()
            .map(|x| x.iter().map(|v| v.abs()).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullEnsembleSummary {
    pub replicas: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub ranks: usize,
    pub lambda_mean: Vec<f64>,
    /// Sample standard deviation (`R − 1` denominator).
    pub lambda_std: Vec<f64>,
    /// `component_mean[μ][k - 2]`: mean of `|x_μ^(k)|` over replicas, `k = 2..K`.
    pub component_mean: Vec<Vec<f64>>,
    pub replica_components: Vec<usize>,
    pub replica_attempts: Vec<usize>,
}

/// Reduces replica outcomes (any order) into a summary. Outcomes are sorted
/// by replica index first, so the result does not depend on the order in
/// which they were produced.
pub fn summarize(
    n_banks: usize,
    ranks: usize,
    seed: u64,
    mut outcomes: Vec<ReplicaOutcome>,
) -> Result<NullEnsembleSummary, NullModelError> {
    let r = outcomes.len();
    if r < 2 {
        return Err(NullModelError::TooFewReplicas(r));
    }
    outcomes.sort_by_key(|o| o.index);
    let mut lambda_mean = vec![0.0; ranks];
    let mut lambda_std = vec![0.0; ranks];
    for k in 0..ranks {
        let mean = outcomes.iter().map(|o| o.normalized[k]).sum::<f64>() / r as f64;
        let ss: f64 = outcomes.iter().map(|o| (o.normalized[k] - mean) * (o.normalized[k] - mean)).sum();
        lambda_mean[k] = mean;
        let std = libm::sqrt(ss / (r - 1) as f64);
        lambda_std[k] = if std < NOISE_FLOOR { 0.0 } else { std };
    }
    let nontrivial = ranks.saturating_sub(1);
    let mut component_mean = vec![vec![0.0; nontrivial]; n_banks];
    for o in &outcomes {
        for (k, vals) in o.abs_vectors.iter().enumerate() {
            for (mu, v) in vals.iter().enumerate() {
                component_mean[mu][k] += v;
            }
        }
    }
    for row in &mut component_mean {
        for v in row {
            *v /= r as f64;
        }
    }
    Ok(NullEnsembleSummary {
        replicas: r,
        seed,
        rng: RNG_ID,
        ranks,
        lambda_mean,
        lambda_std,
        component_mean,
        replica_components: outcomes.iter().map(|o| o.components).collect(),
        replica_attempts: outcomes.iter().map(|o| o.attempts).collect(),
    })
}

pub fn ensemble_summary(
    net: &BipartiteNetwork,
    replicas: usize,
    ranks: usize,
    seed: u64,
) -> Result<NullEnsembleSummary, NullModelError> {
    ensemble_summary_with(net, replicas, ranks, seed, &SpectralOptions::default())
}

pub fn ensemble_summary_with(
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
        .map(|i| replica_outcome(net, i, seed, ranks, opts))
        .collect::<Result<Vec<_>, _>>()?;
    summarize(net.n_banks(), ranks, seed, outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    /// `(λ̃_obs − mean) / std`; `±∞` when the ensemble has zero spread and
    /// the observation differs from it, `0` when it matches (both up to
    /// [`NOISE_FLOOR`]).
    pub z: Vec<f64>,
    pub flags: Vec<bool>,
    pub threshold: f64,
}

pub fn significance(
    observed: &SpectralResult,
    summary: &NullEnsembleSummary,
    threshold: f64,
) -> Result<Significance, NullModelError> {
    if observed.normalized.len() != summary.ranks {
        return Err(NullModelError::RankMismatch {
            observed: observed.normalized.len(),
            ensemble: summary.ranks,
        });
    }
    let mut z = Vec::with_capacity(summary.ranks);
    let mut flags = Vec::with_capacity(summary.ranks);
    for k in 0..summary.ranks {
        let obs = observed.normalized[k];
        let (mean, std) = (summary.lambda_mean[k], summary.lambda_std[k]);
        if std > 0.0 {
            let zk = (obs - mean) / std;
            z.push(zk);
            flags.push(zk > threshold);
        } else if (obs - mean).abs() <= NOISE_FLOOR {
            z.push(0.0);
            flags.push(false);
        } else {
            z.push(if obs > mean { f64::INFINITY } else { f64::NEG_INFINITY });
            flags.push(true);
        }
    }
    Ok(Significance { z, flags, threshold })
}

//! Fragility eigenproblem `Px = λx` and everything derived from it.
//!
//! `P = AB` is not symmetric, but with `D = diag(w_μ)` the matrix
//! `S = D^{1/2} P D^{-1/2}` is, with entries
//! `S_μν = Σ_i w_μi w_νi / (w_i √(w_μ w_ν))`. Eigenpairs are computed on `S`
//! and mapped back with `x = D^{-1/2} s`, which makes the fragility vectors
//! orthonormal under the weight metric `Σ_μ w_μ x_μ^(k) x_μ^(l) = δ_kl`.
//!
//! The `λ = 1` eigenspace is known in closed form (vectors constant on each
//! connected component), so it is never left to the numerical solver: the
//! dense path shifts it out of the way and the Lanczos path deflates it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SpectralError;
use crate::lanczos::{largest_eigenpairs, LanczosOptions};
use crate::linalg::{axpy, dot, norm, scale, symmetric_eigen, DenseMatrix};
use crate::matrices::ShareMatrices;
use crate::network::BipartiteNetwork;

/// Eigenvalues closer than this are treated as one degenerate eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense below `dense_limit` banks, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub solver: Solver,
    pub dense_limit: usize,
    pub tol: f64,
    /// Lanczos budget is `matvec_factor * n` operator applications.
    pub matvec_factor: usize,
    /// Seed of the Lanczos start vectors.
    pub start_seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            solver: Solver::Auto,
            dense_limit: 512,
            tol: 1e-10,
            matvec_factor: 50,
            start_seed: 0x5EED,
        }
    }
}

/// Top-K eigen-structure of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Descending, clamped to `[0, 1]`.
    pub eigenvalues: Vec<f64>,
    /// `fragility_vectors[k][μ]`, metric-orthonormal.
    pub fragility_vectors: Vec<Vec<f64>>,
    /// `dual_vectors[k][μ] = w_μ x_μ^(k)`.
    pub dual_vectors: Vec<Vec<f64>>,
    /// `λ_k / tr P`.
    pub normalized: Vec<f64>,
    /// `tr P`, equal to the sum of the full spectrum.
    pub trace: f64,
    /// Number of connected components (multiplicity of `λ = 1`).
    pub components: usize,
}

impl SpectralResult {
    pub fn rank_count(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// States `x̃, Px̃, …, Pʳx̃` of a perturbation with the trivial modes removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTrace {
    pub steps: usize,
    pub states: Vec<Vec<f64>>,
}

pub fn fragility_spectrum(shares: &ShareMatrices<'_>, k: usize) -> Result<SpectralResult, SpectralError> {
    fragility_spectrum_with(shares, k, &SpectralOptions::default())
}

/// Every eigenpair of `P` (dense solver).
pub fn full_spectrum(shares: &ShareMatrices<'_>) -> Result<SpectralResult, SpectralError> {
    let opts = SpectralOptions {
        solver: Solver::Dense,
        ..SpectralOptions::default()
    };
    fragility_spectrum_with(shares, shares.n_banks(), &opts)
}

pub fn fragility_spectrum_with(
    shares: &ShareMatrices<'_>,
    k: usize,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectralError> {
    let n = shares.n_banks();
    if k == 0 || k > n {
        return Err(SpectralError::InvalidRank {
            requested: k,
            available: n,
        });
    }
    let net = shares.network();
    let strength = shares.bank_strength();
    let sqrt_w: Vec<f64> = strength.iter().map(|&w| libm::sqrt(w)).collect();
    let priority = id_priority(net);
    let trivial = trivial_symmetric_modes(net, &sqrt_w, &priority);
    let c = trivial.len();

    let use_dense = match opts.solver {
        Solver::Dense => true,
        Solver::Lanczos => false,
        Solver::Auto => n <= opts.dense_limit,
    };

    let mut values: Vec<f64> = vec![1.0; c.min(k)];
    let mut modes: Vec<Vec<f64>> = trivial.iter().take(k).cloned().collect();
    if k > c {
        let (mut vals, mut vecs) = if use_dense {
            dense_nontrivial(shares, &trivial)?
        } else {
            let coupling = edge_coupling(shares, &sqrt_w);
            let lopts = LanczosOptions {
                tol: opts.tol,
                max_matvecs: opts.matvec_factor.saturating_mul(n).max(1),
                seed: opts.start_seed,
            };
            let out = largest_eigenpairs(|s| apply_symmetric(net, &coupling, s), n, k - c, &trivial, &lopts)
                .map_err(|e| match e {
                    SpectralError::ConvergenceFailure { rank } => SpectralError::ConvergenceFailure { rank: rank + c },
                    other => other,
                })?;
            (out.values, out.vectors)
        };
        canonicalize_degenerate(&vals, &mut vecs, &priority);
        vals.truncate(k - c);
        vecs.truncate(k - c);
        values.extend(vals);
        modes.extend(vecs);
    }

    let fragility_vectors: Vec<Vec<f64>> = modes
        .into_iter()
        .map(|s| {
            let mut x: Vec<f64> = s.iter().zip(&sqrt_w).map(|(si, r)| si / r).collect();
            fix_sign(&mut x, &priority);
            x
        })
        .collect();
    let eigenvalues: Vec<f64> = values.into_iter().map(|l| l.clamp(0.0, 1.0)).collect();
    let trace = shares.trace();
    let normalized = eigenvalues.iter().map(|l| l / trace).collect();
    let dual_vectors = dual_scores(&fragility_vectors, strength);
    Ok(SpectralResult {
        eigenvalues,
        fragility_vectors,
        dual_vectors,
        normalized,
        trace,
        components: c,
    })
}

/// `λ̃_k = λ_k / tr P`.
pub fn normalized_eigenvalues(result: &SpectralResult) -> Vec<f64> {
    result.eigenvalues.iter().map(|l| l / result.trace).collect()
}

/// Firm scores `y = Bx`.
pub fn firm_scores(shares: &ShareMatrices<'_>, x: &[f64]) -> Result<Vec<f64>, SpectralError> {
    if x.len() != shares.n_banks() {
        return Err(SpectralError::DimensionMismatch {
            expected: shares.n_banks(),
            got: x.len(),
        });
    }
    Ok(shares.apply_b(x))
}

/// Dual (left) eigenvectors `u_μ = w_μ x_μ`.
pub fn dual_scores(fragility_vectors: &[Vec<f64>], strengths: &[f64]) -> Vec<Vec<f64>> {
    fragility_vectors
        .iter()
        .map(|x| x.iter().zip(strengths).map(|(xi, w)| xi * w).collect())
        .collect()
}

/// Metric-normalized trivial modes in bank space: `x_μ = 1/√W_c` on
/// component `c`, zero elsewhere.
pub fn trivial_modes(net: &BipartiteNetwork) -> Vec<Vec<f64>> {
    let strength = net.bank_strengths();
    let sqrt_w: Vec<f64> = strength.iter().map(|&w| libm::sqrt(w)).collect();
    trivial_symmetric_modes(net, &sqrt_w, &id_priority(net))
        .into_iter()
        .map(|s| s.iter().zip(&sqrt_w).map(|(si, r)| si / r).collect())
        .collect()
}

/// Applies `P` `r` times to `x0` after projecting out the trivial modes
/// under the weight metric. The projection is repeated after every step so
/// that rounding cannot feed the `λ = 1` space.
pub fn propagate(shares: &ShareMatrices<'_>, x0: &[f64], r: usize) -> Result<PropagationTrace, SpectralError> {
    let n = shares.n_banks();
    if x0.len() != n {
        return Err(SpectralError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let trivial = trivial_modes(shares.network());
    let w = shares.bank_strength();
    let project = |x: &mut Vec<f64>| {
        for t in &trivial {
            let c = weighted_dot(x, t, w);
            axpy(-c, t, x);
        }
    };
    let mut state = x0.to_vec();
    project(&mut state);
    let mut states = Vec::with_capacity(r + 1);
    states.push(state.clone());
    for _ in 0..r {
        state = shares.apply_p(&state);
        project(&mut state);
        states.push(state.clone());
    }
    Ok(PropagationTrace { steps: r, states })
}

/// `Σ_μ w_μ a_μ b_μ`.
pub fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| w * x * y).sum()
}

/// Rayleigh quotient `Σ_i (Σ_μ w_μi x_μ)² / w_i  /  Σ_μ w_μ x_μ²`,
/// computed from raw weights.
pub fn rayleigh_quotient(net: &BipartiteNetwork, x: &[f64]) -> f64 {
    let agg = net.aggregates();
    let mut flow = vec![0.0; net.n_firms()];
    for e in net.edges() {
        flow[e.firm] += e.weight * x[e.bank];
    }
    let num: f64 = flow.iter().zip(&agg.firm_strength).map(|(f, w)| f * f / w).sum();
    let den: f64 = x.iter().zip(&agg.bank_strength).map(|(xi, w)| w * xi * xi).sum();
    num / den
}

/// Tie-break order of banks: position of each bank's id in sorted id order.
/// Choices inside degenerate eigenspaces follow it, so results do not depend
/// on the order in which records were read.
fn id_priority(net: &BipartiteNetwork) -> Vec<usize> {
    let ids = net.banks().ids();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    let mut priority = vec![0; ids.len()];
    for (pos, &b) in order.iter().enumerate() {
        priority[b] = pos;
    }
    priority
}

// One mode per component, components ordered by their first bank in id order.
fn trivial_symmetric_modes(net: &BipartiteNetwork, sqrt_w: &[f64], priority: &[usize]) -> Vec<Vec<f64>> {
    let comps = net.connected_components();
    let mut first = vec![usize::MAX; comps.count];
    for (b, &c) in comps.bank_component.iter().enumerate() {
        first[c] = first[c].min(priority[b]);
    }
    let mut slot: Vec<usize> = (0..comps.count).collect();
    slot.sort_by_key(|&c| first[c]);
    let mut rank = vec![0; comps.count];
    for (pos, &c) in slot.iter().enumerate() {
        rank[c] = pos;
    }
    let mut modes = vec![vec![0.0; net.n_banks()]; comps.count];
    for (b, &c) in comps.bank_component.iter().enumerate() {
        modes[rank[c]][b] = sqrt_w[b];
    }
    for m in &mut modes {
        let nrm = norm(m);
        scale(1.0 / nrm, m);
    }
    modes
}

// Coupling `w_μi / √(w_μ w_i)` per edge; `S = C Cᵀ`.
fn edge_coupling(shares: &ShareMatrices<'_>, sqrt_w: &[f64]) -> Vec<f64> {
    let fw = shares.firm_strength();
    shares
        .network()
        .edges()
        .iter()
        .map(|e| e.weight / (sqrt_w[e.bank] * libm::sqrt(fw[e.firm])))
        .collect()
}

fn apply_symmetric(net: &BipartiteNetwork, coupling: &[f64], s: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; net.n_firms()];
    for (e, &c) in net.edges().iter().zip(coupling) {
        t[e.firm] += c * s[e.bank];
    }
    let mut out = vec![0.0; net.n_banks()];
    for (e, &c) in net.edges().iter().zip(coupling) {
        out[e.bank] += c * t[e.firm];
    }
    out
}

/// Dense `S` (symmetric by construction).
pub fn symmetric_propagation(shares: &ShareMatrices<'_>) -> DenseMatrix {
    let net = shares.network();
    let sqrt_w: Vec<f64> = shares.bank_strength().iter().map(|&w| libm::sqrt(w)).collect();
    let coupling = edge_coupling(shares, &sqrt_w);
    let n = net.n_banks();
    let mut s = DenseMatrix::zeros(n, n);
    let edges = net.edges();
    for f in 0..net.n_firms() {
        let idx = net.firm_edge_indices(f);
        for &k in idx {
            for &l in idx {
                s[(edges[k].bank, edges[l].bank)] += coupling[k] * coupling[l];
            }
        }
    }
    s
}

// Full dense eigensolve of `S + QQᵀ`: the trivial eigenvalues move to 2 and
// are dropped, the rest are untouched.
fn dense_nontrivial(shares: &ShareMatrices<'_>, trivial: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectralError> {
    let mut s = symmetric_propagation(shares);
    let n = s.rows();
    for q in trivial {
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += q[i] * q[j];
            }
        }
    }
    let eig = symmetric_eigen(&s)?;
    let c = trivial.len();
    Ok((eig.values[c..].to_vec(), eig.vectors[c..].to_vec()))
}

/// Replaces the basis of every degenerate cluster (consecutive values within
/// [`DEGENERACY_TOL`]) by a canonical one that depends only on the
/// eigenspace: column-pivoted Gram–Schmidt on the cluster's projector.
/// Near-equal pivots go to the coordinate with the lowest `priority`.
pub fn canonicalize_degenerate(values: &[f64], vectors: &mut [Vec<f64>], priority: &[usize]) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end - 1] - values[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let basis = canonical_basis(&vectors[start..end], priority);
            for (slot, v) in vectors[start..end].iter_mut().zip(basis) {
                *slot = v;
            }
        }
        start = end;
    }
}

fn canonical_basis(space: &[Vec<f64>], priority: &[usize]) -> Vec<Vec<f64>> {
    let d = space.len();
    let n = space[0].len();
    let mut basis: Vec<Vec<f64>> = space.to_vec();
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        // ‖Π e_j‖² for the remaining space
        let weights: Vec<f64> = (0..n).map(|j| basis.iter().map(|b| b[j] * b[j]).sum()).collect();
        let max = weights.iter().cloned().fold(0.0, f64::max);
        let pivot = (0..n)
            .filter(|&j| weights[j] >= max * (1.0 - 1e-8))
            .min_by_key(|&j| priority[j])
            .unwrap_or(0);
        let mut q = vec![0.0; n];
        for b in &basis {
            axpy(b[pivot], b, &mut q);
        }
        let nrm = norm(&q);
        scale(1.0 / nrm, &mut q);
        for b in &mut basis {
            let c = dot(b, &q);
            axpy(-c, &q, b);
        }
        basis = orthonormal_subset(basis, d - out.len() - 1);
        out.push(q);
    }
    out
}

// Modified Gram–Schmidt with largest-norm pivoting, keeping `keep` vectors.
fn orthonormal_subset(mut vecs: Vec<Vec<f64>>, keep: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(keep);
    while out.len() < keep && !vecs.is_empty() {
        let (idx, _) = vecs
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut v = vecs.swap_remove(idx);
        let nrm = norm(&v);
        scale(1.0 / nrm, &mut v);
        for other in &mut vecs {
            let c = dot(other, &v);
            axpy(-c, &v, other);
        }
        out.push(v);
    }
    out
}

// Largest-magnitude component made positive; near-ties go by `priority`.
fn fix_sign(x: &mut [f64], priority: &[usize]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let best = (0..x.len())
        .filter(|&i| x[i].abs() >= max * (1.0 - 1e-9))
        .min_by_key(|&i| priority[i]);
    if best.is_some_and(|i| x[i] < 0.0) {
        scale(-1.0, x);
    }
}

//! Lanczos iteration with full reorthogonalization for the largest
//! eigenpairs of a symmetric operator.
//!
//! The operator is only ever applied to vectors; it never has to exist as a
//! matrix. A set of known orthonormal eigenvectors can be deflated, in which
//! case the search runs in their orthogonal complement.
//!
//! A single Krylov sequence sees one direction per distinct eigenvalue, so
//! after the first pass the converged vectors are locked and a second
//! sequence looks for anything larger that was missed (extra copies of a
//! repeated eigenvalue). This repeats until nothing new turns up.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SpectralError;
use crate::linalg::{axpy, dot, norm, scale, tridiagonal_eigen};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Residual bound `‖Sv − θv‖` for an accepted Ritz pair (unit `v`).
    pub tol: f64,
    /// Total operator applications allowed, across all passes.
    pub max_matvecs: usize,
    /// Seed of the random start vectors.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub matvecs: usize,
}

struct Budget {
    used: usize,
    max: usize,
}

/// Largest `k` eigenpairs of the symmetric operator `op` on `R^n`,
/// restricted to the orthogonal complement of `deflate`.
pub fn largest_eigenpairs<F>(
    mut op: F,
    n: usize,
    k: usize,
    deflate: &[Vec<f64>],
    opts: &LanczosOptions,
) -> Result<LanczosOutcome, SpectralError>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let available = n.saturating_sub(deflate.len());
    let k = k.min(available);
    let mut rng = SeededRng::new(opts.seed);
    let mut budget = Budget {
        used: 0,
        max: opts.max_matvecs,
    };
    let mut found = krylov_pass(&mut op, n, k, deflate, opts.tol, &mut rng, &mut budget, deflate.len())?;

    loop {
        let mut locked: Vec<Vec<f64>> = deflate.to_vec();
        locked.extend(found.iter().map(|(_, v)| v.clone()));
        if locked.len() >= n {
            break;
        }
        let extra = krylov_pass(&mut op, n, 1, &locked, opts.tol, &mut rng, &mut budget, deflate.len() + found.len())?;
        let Some((mu, y)) = extra.into_iter().next() else {
            break;
        };
        let smallest = found.last().map(|(v, _)| *v).unwrap_or(f64::NEG_INFINITY);
        if found.len() < k || mu > smallest + opts.tol {
            found.push((mu, y));
            found.sort_by(|a, b| b.0.total_cmp(&a.0));
            found.truncate(k);
        } else {
            break;
        }
    }

    let (values, vectors) = found.into_iter().unzip();
    Ok(LanczosOutcome {
        values,
        vectors,
        matvecs: budget.used,
    })
}

#[allow(clippy::too_many_arguments)]
fn krylov_pass<F>(
    op: &mut F,
    n: usize,
    k: usize,
    locked: &[Vec<f64>],
    tol: f64,
    rng: &mut SeededRng,
    budget: &mut Budget,
    rank_offset: usize,
) -> Result<Vec<(f64, Vec<f64>)>, SpectralError>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let available = n - locked.len();
    if k == 0 || available == 0 {
        return Ok(Vec::new());
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let Some(mut v) = random_orthogonal(rng, n, locked, &basis) else {
        return Ok(Vec::new());
    };
    basis.push(v.clone());
    let mut since_check = 0usize;

    loop {
        if budget.used >= budget.max {
            return Err(SpectralError::ConvergenceFailure { rank: rank_offset + 1 });
        }
        let mut w = op(&v);
        budget.used += 1;
        let j = basis.len() - 1;
        let a = dot(&w, &v);
        alpha.push(a);
        axpy(-a, &v, &mut w);
        if j > 0 && beta[j - 1] != 0.0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
        }
        let b = norm(&w);
        let exhausted = basis.len() == available;
        let breakdown = b <= 1e-12;
        since_check += 1;

        if exhausted || basis.len() >= k && (breakdown || since_check >= check_interval(basis.len())) {
            since_check = 0;
            let ritz = tridiagonal_eigen(&alpha, &beta)?;
            let last = basis.len() - 1;
            let residual_scale = if breakdown || exhausted { 0.0 } else { b };
            let wanted = k.min(ritz.values.len());
            let unconverged = (0..wanted).find(|&i| (residual_scale * ritz.vectors[i][last]).abs() > tol);
            if unconverged.is_none() {
                return Ok((0..wanted)
                    .map(|i| (ritz.values[i], ritz_vector(&basis, &ritz.vectors[i])))
                    .collect());
            }
            if exhausted {
                return Err(SpectralError::ConvergenceFailure {
                    rank: rank_offset + unconverged.unwrap_or(0) + 1,
                });
            }
        }

        if breakdown {
            // invariant subspace: continue with a fresh direction
            beta.push(0.0);
            match random_orthogonal(rng, n, locked, &basis) {
                Some(next) => v = next,
                None => return Err(SpectralError::ConvergenceFailure { rank: rank_offset + 1 }),
            }
        } else {
            beta.push(b);
            scale(1.0 / b, &mut w);
            v = w;
        }
        basis.push(v.clone());
    }
}

fn check_interval(dim: usize) -> usize {
    (dim / 8).max(1)
}

fn ritz_vector(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; basis[0].len()];
    for (b, &c) in basis.iter().zip(coeffs) {
        axpy(c, b, &mut y);
    }
    let nrm = norm(&y);
    scale(1.0 / nrm, &mut y);
    y
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    for q in against {
        let c = dot(w, q);
        axpy(-c, q, w);
    }
}

fn random_orthogonal(rng: &mut SeededRng, n: usize, locked: &[Vec<f64>], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    if locked.len() + basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
        let start = norm(&v);
        for _ in 0..2 {
            orthogonalize(&mut v, locked);
            orthogonalize(&mut v, basis);
        }
        let nrm = norm(&v);
        if nrm > 1e-8 * start {
            scale(1.0 / nrm, &mut v);
            return Some(v);
        }
    }
    None
}

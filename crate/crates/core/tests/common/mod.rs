//! Independent oracles shared by the integration tests. Nothing here calls
//! into the symmetrized solver path.
#![allow(dead_code)]

use fragility_core::matrices::ShareMatrices;
use fragility_core::network::BipartiteNetwork;
use nalgebra::DMatrix;

/// Dense `P` built straight from edge weights: `P_μν = Σ_i (w_μi/w_μ)(w_νi/w_i)`.
pub fn oracle_p(net: &BipartiteNetwork) -> DMatrix<f64> {
    let (n, m) = (net.n_banks(), net.n_firms());
    let mut w = DMatrix::<f64>::zeros(n, m);
    for e in net.edges() {
        w[(e.bank, e.firm)] = e.weight;
    }
    let bank: Vec<f64> = (0..n).map(|b| w.row(b).sum()).collect();
    let firm: Vec<f64> = (0..m).map(|f| w.column(f).sum()).collect();
    let a = DMatrix::from_fn(n, m, |b, f| w[(b, f)] / bank[b]);
    let bm = DMatrix::from_fn(m, n, |f, b| w[(b, f)] / firm[f]);
    a * bm
}

/// Eigenvalues of the general (non-symmetric) matrix `P` via real Schur
/// decomposition, sorted descending by real part.
pub fn oracle_eigenvalues(p: &DMatrix<f64>) -> Vec<f64> {
    let ev = p.clone().complex_eigenvalues();
    let mut vals: Vec<f64> = ev
        .iter()
        .map(|c| {
            assert!(c.im.abs() < 1e-8, "oracle found complex eigenvalue {c}");
            c.re
        })
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Right eigenvector of `P` for `lambda`: the right singular vector of
/// `P − λI` with the smallest singular value.
pub fn oracle_eigenvector(p: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let n = p.nrows();
    let shifted = p - DMatrix::<f64>::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &s)| if s < b.1 { (i, s) } else { b });
    vt.row(idx).iter().copied().collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Component count with a union-find over bank and firm nodes.
pub fn union_find_components(net: &BipartiteNetwork) -> usize {
    let n = net.n_banks();
    let mut parent: Vec<usize> = (0..n + net.n_firms()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in net.edges() {
        let (a, b) = (find(&mut parent, e.bank), find(&mut parent, n + e.firm));
        if a != b {
            parent[a] = b;
        }
    }
    (0..parent.len()).filter(|&x| find(&mut parent, x) == x).count()
}

/// Kendall tau-b by counting all `n(n−1)/2` pairs.
pub fn kendall_brute_force(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).signum();
            let dy = (y[i] - y[j]).signum();
            if x[i] == x[j] && y[i] == y[j] {
                continue;
            } else if x[i] == x[j] {
                tx += 1;
            } else if y[i] == y[j] {
                ty += 1;
            } else if dx == dy {
                conc += 1;
            } else {
                disc += 1;
            }
        }
    }
    let s = (conc - disc) as f64;
    s / (((conc + disc + tx) as f64) * ((conc + disc + ty) as f64)).sqrt()
}

/// `max |uᵀP − λuᵀ| / ‖u‖` using the dense oracle `P`.
pub fn left_residual(p: &DMatrix<f64>, u: &[f64], lambda: f64) -> f64 {
    let n = u.len();
    let norm: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    (0..n)
        .map(|nu| {
            let s: f64 = (0..n).map(|mu| u[mu] * p[(mu, nu)]).sum();
            (s - lambda * u[nu]).abs()
        })
        .fold(0.0, f64::max)
        / norm
}

pub fn shares_of(net: &BipartiteNetwork) -> ShareMatrices<'_> {
    ShareMatrices::new(net)
}

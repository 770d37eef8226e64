//! Row-stochastic share matrices and the propagation operator.
//!
//! `A[μ,i] = w_μi / w_μ` (lending shares, n×m) and `B[i,μ] = w_μi / w_i`
//! (borrowing shares, m×n) are stored edge-indexed, so both share the
//! sparsity pattern of the network. `P = AB` is materialized densely only
//! while `n` stays under a cap; otherwise it is applied as `x ↦ A(Bx)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SpectralError;
use crate::linalg::DenseMatrix;
use crate::network::BipartiteNetwork;

/// Largest bank count for which `P` is materialized densely by default.
pub const DEFAULT_DENSE_CAP: usize = 2048;

#[derive(Debug, Clone)]
pub struct ShareMatrices<'a> {
    net: &'a BipartiteNetwork,
    lending: Vec<f64>,
    borrowing: Vec<f64>,
    bank_strength: Vec<f64>,
    firm_strength: Vec<f64>,
    propagation: Option<DenseMatrix>,
}

impl<'a> ShareMatrices<'a> {
    pub fn new(net: &'a BipartiteNetwork) -> Self {
        Self::with_dense_cap(net, DEFAULT_DENSE_CAP)
    }

    pub fn with_dense_cap(net: &'a BipartiteNetwork, dense_cap: usize) -> Self {
        let agg = net.aggregates();
        let lending: Vec<f64> = net.edges().iter().map(|e| e.weight / agg.bank_strength[e.bank]).collect();
        let borrowing: Vec<f64> = net.edges().iter().map(|e| e.weight / agg.firm_strength[e.firm]).collect();
        let mut shares = Self {
            net,
            lending,
            borrowing,
            bank_strength: agg.bank_strength,
            firm_strength: agg.firm_strength,
            propagation: None,
        };
        if net.n_banks() <= dense_cap {
            shares.propagation = Some(shares.dense_p());
        }
        shares
    }

    pub fn network(&self) -> &'a BipartiteNetwork {
        self.net
    }

    pub fn n_banks(&self) -> usize {
        self.net.n_banks()
    }

    pub fn n_firms(&self) -> usize {
        self.net.n_firms()
    }

    pub fn bank_strength(&self) -> &[f64] {
        &self.bank_strength
    }

    pub fn firm_strength(&self) -> &[f64] {
        &self.firm_strength
    }

    /// `A` entries aligned with `network().edges()`.
    pub fn lending_shares(&self) -> &[f64] {
        &self.lending
    }

    /// `B` entries aligned with `network().edges()`.
    pub fn borrowing_shares(&self) -> &[f64] {
        &self.borrowing
    }

    /// Dense `P`, if it was materialized.
    pub fn propagation(&self) -> Option<&DenseMatrix> {
        self.propagation.as_ref()
    }

    pub fn a_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n_banks(), self.n_firms());
        for (e, &v) in self.net.edges().iter().zip(&self.lending) {
            a[(e.bank, e.firm)] = v;
        }
        a
    }

    pub fn b_dense(&self) -> DenseMatrix {
        let mut b = DenseMatrix::zeros(self.n_firms(), self.n_banks());
        for (e, &v) in self.net.edges().iter().zip(&self.borrowing) {
            b[(e.firm, e.bank)] = v;
        }
        b
    }

    /// Dense `P = AB`, accumulated firm by firm.
    pub fn dense_p(&self) -> DenseMatrix {
        let n = self.n_banks();
        let mut p = DenseMatrix::zeros(n, n);
        let edges = self.net.edges();
        for f in 0..self.n_firms() {
            let idx = self.net.firm_edge_indices(f);
            for &k in idx {
                let mu = edges[k].bank;
                let a = self.lending[k];
                for &l in idx {
                    p[(mu, edges[l].bank)] += a * self.borrowing[l];
                }
            }
        }
        p
    }

    /// Nonzero entries of row `mu` of `P`, sorted by column.
    pub fn p_row(&self, mu: usize) -> Vec<(usize, f64)> {
        let mut row = vec![0.0; self.n_banks()];
        let mut touched = Vec::new();
        let edges = self.net.edges();
        let start = self.edge_offset(mu);
        for (off, e) in self.net.bank_edges(mu).iter().enumerate() {
            let a = self.lending[start + off];
            for &l in self.net.firm_edge_indices(e.firm) {
                let nu = edges[l].bank;
                if row[nu] == 0.0 {
                    touched.push(nu);
                }
                row[nu] += a * self.borrowing[l];
            }
        }
        touched.sort_unstable();
        touched.into_iter().map(|nu| (nu, row[nu])).collect()
    }

    fn edge_offset(&self, mu: usize) -> usize {
        self.net.bank_edge_range(mu).start
    }

    /// `y = Bx` (firm vector from a bank vector).
    pub fn apply_b(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_firms()];
        for (e, &b) in self.net.edges().iter().zip(&self.borrowing) {
            y[e.firm] += b * x[e.bank];
        }
        y
    }

    /// `x = Ay` (bank vector from a firm vector).
    pub fn apply_a(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_banks()];
        for (e, &a) in self.net.edges().iter().zip(&self.lending) {
            x[e.bank] += a * y[e.firm];
        }
        x
    }

    /// `Px`, using the dense matrix when available.
    pub fn apply_p(&self, x: &[f64]) -> Vec<f64> {
        match &self.propagation {
            Some(p) => p.mul_vec(x),
            None => self.apply_a(&self.apply_b(x)),
        }
    }

    /// `uᵀP` returned as a column vector.
    pub fn apply_pt(&self, u: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n_firms()];
        for (e, &a) in self.net.edges().iter().zip(&self.lending) {
            v[e.firm] += a * u[e.bank];
        }
        let mut out = vec![0.0; self.n_banks()];
        for (e, &b) in self.net.edges().iter().zip(&self.borrowing) {
            out[e.bank] += b * v[e.firm];
        }
        out
    }

    /// `tr P = Σ_{μ,i} A_μi B_iμ`.
    pub fn trace(&self) -> f64 {
        self.lending.iter().zip(&self.borrowing).map(|(a, b)| a * b).sum()
    }

    /// Row `mu` of `A` as `(firm index, share)` pairs.
    pub fn lending_row(&self, mu: usize) -> Vec<(usize, f64)> {
        let start = self.edge_offset(mu);
        self.net
            .bank_edges(mu)
            .iter()
            .enumerate()
            .map(|(off, e)| (e.firm, self.lending[start + off]))
            .collect()
    }

    /// Lending pattern `a_μ` of the bank named `bank`, keyed by firm id.
    pub fn lending_pattern(&self, bank: &str) -> Result<Vec<(&'a str, f64)>, SpectralError> {
        let mu = self
            .net
            .banks()
            .get(bank)
            .ok_or_else(|| SpectralError::UnknownBank(bank.into()))?;
        let net = self.net;
        Ok(self
            .lending_row(mu)
            .into_iter()
            .map(|(f, v)| (net.firms().id(f), v))
            .collect())
    }
}

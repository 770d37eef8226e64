mod common;

use common::*;
use fragility_core::matrices::ShareMatrices;
use fragility_core::network::{BipartiteNetwork, CreditRecord};
use fragility_core::nullmodel::{ensemble_summary, rewire, significance};
use fragility_core::rng::SeededRng;
use fragility_core::spectral::{
    firm_scores, fragility_spectrum, fragility_spectrum_with, full_spectrum, rayleigh_quotient, Solver,
};
use fragility_core::stats::{student_t_cdf, student_t_quantile};
use fragility_core::synth::{block_network, disjoint_union, random_network, Block, LogNormal};
use fragility_core::SpectralOptions;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn lanczos() -> SpectralOptions {
    SpectralOptions {
        solver: Solver::Lanczos,
        ..SpectralOptions::default()
    }
}

fn dense() -> SpectralOptions {
    SpectralOptions {
        solver: Solver::Dense,
        ..SpectralOptions::default()
    }
}

#[test]
fn dense_p_matches_weight_formula() {
    let mut rng = SeededRng::new(11);
    for _ in 0..20 {
        let net = random_network(&mut rng, 15, 40, 0.2, LogNormal::default());
        let shares = ShareMatrices::new(&net);
        let oracle = oracle_p(&net);
        let p = shares.dense_p();
        let x: Vec<f64> = (0..15).map(|_| rng.uniform()).collect();
        let px = shares.apply_p(&x);
        let ptx = shares.apply_pt(&x);
        for mu in 0..15 {
            for nu in 0..15 {
                assert!((p[(mu, nu)] - oracle[(mu, nu)]).abs() < 1e-14);
            }
            let row: f64 = (0..15).map(|nu| oracle[(mu, nu)] * x[nu]).sum();
            let col: f64 = (0..15).map(|nu| oracle[(nu, mu)] * x[nu]).sum();
            assert!((px[mu] - row).abs() < 1e-13);
            assert!((ptx[mu] - col).abs() < 1e-13);
        }
        assert!((shares.trace() - oracle.trace()).abs() < 1e-13);
    }
}

#[test]
fn components_match_union_find() {
    let mut rng = SeededRng::new(12);
    for i in 0..30 {
        let parts: Vec<BipartiteNetwork> = (0..1 + i % 4)
            .map(|_| random_network(&mut rng, 6, 10, 0.15, LogNormal::default()))
            .collect();
        let net = disjoint_union(&parts);
        assert_eq!(net.connected_components().count, union_find_components(&net));
    }
}

#[test]
fn lanczos_matches_dense_on_mid_sized_networks() {
    let mut rng = SeededRng::new(13);
    for &(n, m) in &[(100, 300), (250, 600), (600, 1500)] {
        let net = random_network(&mut rng, n, m, 8.0 / n as f64, LogNormal::default());
        let shares = ShareMatrices::new(&net);
        let a = fragility_spectrum_with(&shares, 8, &lanczos()).unwrap();
        let b = fragility_spectrum_with(&shares, 8, &dense()).unwrap();
        assert_eq!(a.components, b.components);
        for k in 0..8 {
            assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-9, "n={n} rank {}", k + 1);
            if k > 0 && (b.eigenvalues[k - 1] - b.eigenvalues[k]).min(b.eigenvalues[k] - b.eigenvalues.get(k + 1).copied().unwrap_or(0.0)) > 1e-4 {
                assert!(cosine(&a.fragility_vectors[k], &b.fragility_vectors[k]).abs() > 1.0 - 1e-8);
            }
        }
    }
}

#[test]
fn auto_switches_to_lanczos_above_dense_limit() {
    let mut rng = SeededRng::new(14);
    let net = random_network(&mut rng, 520, 1200, 0.015, LogNormal::default());
    let shares = ShareMatrices::new(&net);
    let auto = fragility_spectrum(&shares, 4).unwrap();
    let forced = fragility_spectrum_with(&shares, 4, &lanczos()).unwrap();
    assert_eq!(auto, forced);
}

#[test]
fn lanczos_finds_repeated_eigenvalues() {
    // three identical copies: every eigenvalue of the copy appears three times
    let mut rng = SeededRng::new(15);
    let part = random_network(&mut rng, 40, 90, 0.1, LogNormal::default());
    let net = disjoint_union(&[part.clone(), part.clone(), part]);
    let shares = ShareMatrices::new(&net);
    let a = fragility_spectrum_with(&shares, 9, &lanczos()).unwrap();
    let b = fragility_spectrum_with(&shares, 9, &dense()).unwrap();
    for k in 0..9 {
        assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-9);
    }
    assert_eq!(a.eigenvalues[..3], [1.0, 1.0, 1.0]);
    assert!((a.eigenvalues[3] - a.eigenvalues[5]).abs() < 1e-9);
}

#[test]
fn vectors_are_right_eigenvectors_of_oracle_p() {
    let mut rng = SeededRng::new(16);
    let net = random_network(&mut rng, 30, 80, 0.15, LogNormal::default());
    let p = oracle_p(&net);
    let r = full_spectrum(&ShareMatrices::new(&net)).unwrap();
    for (x, &l) in r.fragility_vectors.iter().zip(&r.eigenvalues) {
        let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for mu in 0..30 {
            let px: f64 = (0..30).map(|nu| p[(mu, nu)] * x[nu]).sum();
            assert!((px - l * x[mu]).abs() / xn < 1e-9);
        }
        assert!((rayleigh_quotient(&net, x) - l).abs() < 1e-9);
    }
}

#[test]
fn firm_scores_match_borrowing_shares() {
    let mut rng = SeededRng::new(17);
    let net = random_network(&mut rng, 12, 30, 0.3, LogNormal::default());
    let shares = ShareMatrices::new(&net);
    let r = fragility_spectrum(&shares, 3).unwrap();
    let y = firm_scores(&shares, &r.fragility_vectors[1]).unwrap();
    let mut firm_total = vec![0.0; net.n_firms()];
    let mut weighted = vec![0.0; net.n_firms()];
    for e in net.edges() {
        firm_total[e.firm] += e.weight;
        weighted[e.firm] += e.weight * r.fragility_vectors[1][e.bank];
    }
    for i in 0..net.n_firms() {
        assert!((y[i] - weighted[i] / firm_total[i]).abs() < 1e-14);
    }
}

#[test]
fn t_quantiles_match_statrs() {
    for &dof in &[1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 198.0, 1000.0] {
        let dist = StudentsT::new(0.0, 1.0, dof).unwrap();
        for &p in &[0.6, 0.9, 0.95, 0.975, 0.995] {
            let q = student_t_quantile(p, dof);
            let expect = dist.inverse_cdf(p);
            assert!((q - expect).abs() < 1e-6 * expect.abs().max(1.0), "dof {dof} p {p}: {q} vs {expect}");
        }
        for &t in &[-3.0, -0.5, 0.0, 0.7, 2.2] {
            assert!((student_t_cdf(t, dof) - dist.cdf(t)).abs() < 1e-10);
        }
    }
}

fn aggregates_match(a: &BipartiteNetwork, b: &BipartiteNetwork) -> bool {
    let (x, y) = (a.aggregates(), b.aggregates());
    x.bank_strength == y.bank_strength && x.bank_degree == y.bank_degree && x.firm_degree == y.firm_degree
}

#[test]
fn rewiring_audit_on_heavy_tailed_network() {
    let mut rng = SeededRng::new(18);
    let net = random_network(&mut rng, 50, 200, 0.1, LogNormal { mu: 7.0, sigma: 2.0 });
    for seed in 0..10 {
        let r = rewire(&net, seed).unwrap();
        assert!(aggregates_match(&net, &r.network));
        assert_eq!(r.network.edges().len(), net.edges().len());
        let base = ShareMatrices::new(&net);
        let rep = ShareMatrices::new(&r.network);
        for mu in 0..50 {
            let sorted = |s: &ShareMatrices<'_>| {
                let mut v: Vec<u64> = s.lending_row(mu).iter().map(|&(_, a)| a.to_bits()).collect();
                v.sort_unstable();
                v
            };
            assert_eq!(sorted(&base), sorted(&rep));
        }
    }
}

#[test]
fn single_edge_ensemble() {
    let net = BipartiteNetwork::from_records(&[CreditRecord::new("b", "f", 5.0)]).unwrap();
    let s = ensemble_summary(&net, 2, 1, 42).unwrap();
    assert_eq!(s.lambda_mean, vec![1.0]);
    assert_eq!(s.lambda_std, vec![0.0]);
    let obs = fragility_spectrum(&ShareMatrices::new(&net), 1).unwrap();
    assert_eq!(significance(&obs, &s, 2.0).unwrap().flags, vec![false]);
}

fn planted() -> BipartiteNetwork {
    let blocks = [Block { banks: 25, firms: 100 }, Block { banks: 25, firms: 100 }];
    block_network(&mut SeededRng::new(19), &blocks, 0.3, 0.02, LogNormal::default()).network
}

#[test]
fn planted_blocks_are_detected() {
    let net = planted();
    let shares = ShareMatrices::new(&net);
    let obs = fragility_spectrum(&shares, 6).unwrap();
    let s = ensemble_summary(&net, 10, 6, 42).unwrap();
    assert!(obs.normalized[1] > s.lambda_mean[1] + 3.0 * s.lambda_std[1]);

    let obs = fragility_spectrum(&shares, 10).unwrap();
    let s = ensemble_summary(&net, 10, 10, 42).unwrap();
    let sig = significance(&obs, &s, 2.0).unwrap();
    assert!(sig.flags[1]);
    assert!(sig.flags[6..].iter().all(|f| !f), "z = {:?}", sig.z);
}

#[test]
fn ensemble_is_bit_reproducible() {
    let net = planted();
    let a = ensemble_summary(&net, 5, 4, 7).unwrap();
    let b = ensemble_summary(&net, 5, 4, 7).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.lambda_mean), bits(&b.lambda_mean));
    assert_eq!(bits(&a.lambda_std), bits(&b.lambda_std));
    assert_eq!(a, b);
    assert_ne!(a.lambda_mean, ensemble_summary(&net, 5, 4, 8).unwrap().lambda_mean);
}

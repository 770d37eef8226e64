//! Heavy-tail and rank-correlation statistics: empirical CCDFs, Kendall's
//! tau-b and log-log least-squares exponents.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::StatsError;

/// Empirical survival function `P_>(x) = #{v ≥ x} / N` at each distinct value.
#[derive(Debug, Clone, PartialEq)]
pub struct Ccdf {
    pub points: Vec<(f64, f64)>,
}

pub fn ccdf(values: &[f64]) -> Result<Ccdf, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if let Some(i) = values.iter().position(|v| v.is_nan() || *v <= 0.0) {
        return Err(StatsError::NonPositiveValue(i));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        points.push((v, (sorted.len() - i) as f64 / total));
        while i < sorted.len() && sorted[i] == v {
            i += 1;
        }
    }
    Ok(Ccdf { points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallTau {
    pub tau: f64,
    /// `tau` in units of its standard deviation under independence,
    /// `√(2(2n+5) / (9n(n−1)))`.
    pub sigma_multiples: f64,
}

/// Kendall's tau-b in `O(n log n)` (Knight's merge-sort algorithm).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<KendallTau, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::InsufficientPoints { needed: 2, got: n });
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let total = (n as u64) * (n as u64 - 1) / 2;
    let x_ties = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let joint_ties = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = ys.clone();
    let swaps = merge_count(&mut ys, &mut buf);
    let y_ties = tied_pairs(&ys, |a, b| a == b);

    if total == x_ties || total == y_ties {
        return Err(StatsError::DegenerateInput);
    }
    let s = total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    let tau = s / libm::sqrt((total - x_ties) as f64 * (total - y_ties) as f64);
    let nf = n as f64;
    let sigma = libm::sqrt(2.0 * (2.0 * nf + 5.0) / (9.0 * nf * (nf - 1.0)));
    Ok(KendallTau {
        tau,
        sigma_multiples: tau / sigma,
    })
}

// Number of pairs inside runs of equal neighbours in a sorted slice.
fn tied_pairs<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut ties = 0u64;
    let mut run = 1u64;
    for i in 1..sorted.len() {
        if eq(&sorted[i - 1], &sorted[i]) {
            run += 1;
        } else {
            ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    ties + run * (run - 1) / 2
}

// Bottom-up merge sort of `v`, returning the number of inversions
// (strictly greater element moved past a smaller one).
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if v[j].total_cmp(&v[i]) == Ordering::Less {
                    buf[k] = v[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + (hi - j)].copy_from_slice(&v[j..hi]);
            lo = hi;
        }
        v.copy_from_slice(buf);
        width *= 2;
    }
    swaps
}

/// Least-squares fit of `log y = a log x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval on `exponent`
    /// (Student t, `n − 2` degrees of freedom).
    pub ci95: f64,
    pub n_points: usize,
}

impl TailFit {
    /// Exponent `b` of `y/x ∝ y^b` implied by `y ∝ x^a`, i.e. `(1 − a)/a`
    /// with its propagated interval.
    pub fn ratio_exponent(&self) -> (f64, f64) {
        let a = self.exponent;
        ((1.0 - a) / a, self.ci95 / (a * a))
    }
}

pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<TailFit, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientPoints { needed: 3, got: n });
    }
    if let Some(i) = x.iter().zip(y).position(|(a, b)| !(*a > 0.0 && *b > 0.0)) {
        return Err(StatsError::NonPositiveValue(i));
    }
    let lx: Vec<f64> = x.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateInput);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let se = libm::sqrt(sse / (nf - 2.0) / sxx);
    Ok(TailFit {
        exponent: slope,
        intercept,
        ci95: student_t_quantile(0.975, nf - 2.0) * se,
        n_points: n,
    })
}

/// CDF of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    let tail = 0.5 * regularized_beta(dof / (dof + t * t), dof / 2.0, 0.5);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile of Student's t distribution by bisection on [`student_t_cdf`].
pub fn student_t_quantile(p: f64, dof: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0 && dof > 0.0);
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, dof);
    }
    let mut hi = 1.0;
    while student_t_cdf(hi, dof) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Regularized incomplete beta `I_x(a, b)` (continued fraction, modified Lentz).
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * libm::log(x) + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_fraction(1.0 - x, b, a) / b
    }
}

fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..500 {
        let m = m as f64;
        let num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let num = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

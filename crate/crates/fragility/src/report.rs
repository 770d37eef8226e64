//! Output documents: JSON reports and CSV tables.
//!
//! Every JSON report carries `schema_version`, the command name and an echo
//! of the configuration that produced it. Maps keyed by bank id keep the
//! network's bank order.

use std::io::{self, Write};

use fragility_core::matrices::ShareMatrices;
use fragility_core::network::BipartiteNetwork;
use fragility_core::nullmodel::{NullEnsembleSummary, Significance};
use fragility_core::stats::{ccdf, kendall_tau, loglog_fit, Ccdf, KendallTau, TailFit};
use fragility_core::temporal::{HeatmapMatrix, SeriesPoint};
use fragility_core::SpectralResult;
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias_file: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a ConfigEcho,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, command: &str, config: &ConfigEcho, body: T) -> io::Result<()> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        body,
    };
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)
}

fn by_bank<T: Serialize>(net: &BipartiteNetwork, per_bank: impl Fn(usize) -> T) -> Map<String, Value> {
    (0..net.n_banks())
        .map(|mu| (net.banks().id(mu).to_string(), serde_json::to_value(per_bank(mu)).unwrap_or(Value::Null)))
        .collect()
}

/// Non-finite values become `null`.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Serialize)]
pub struct SpectrumBody {
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    pub normalized: Vec<f64>,
    pub vectors: Map<String, Value>,
    pub trace: f64,
    pub components: usize,
}

pub fn spectrum_body(net: &BipartiteNetwork, r: &SpectralResult) -> SpectrumBody {
    SpectrumBody {
        k: r.rank_count(),
        eigenvalues: r.eigenvalues.clone(),
        normalized: r.normalized.clone(),
        vectors: by_bank(net, |mu| r.fragility_vectors.iter().map(|x| x[mu]).collect::<Vec<f64>>()),
        trace: r.trace,
        components: r.components,
    }
}

pub fn write_spectrum_csv<W: Write>(out: W, net: &BipartiteNetwork, r: &SpectralResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "eigenvalue", "normalized", "bank_id", "x"])?;
    for k in 0..r.rank_count() {
        for mu in 0..net.n_banks() {
            w.write_record([
                (k + 1).to_string(),
                r.eigenvalues[k].to_string(),
                r.normalized[k].to_string(),
                net.banks().id(mu).to_string(),
                r.fragility_vectors[k][mu].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub struct NullcheckBody {
    #[serde(rename = "R")]
    pub replicas: usize,
    pub seed: u64,
    pub rng: &'static str,
    #[serde(rename = "K")]
    pub ranks: usize,
    pub observed: Vec<f64>,
    pub lambda_mean: Vec<f64>,
    pub lambda_std: Vec<f64>,
    pub z: Vec<Option<f64>>,
    pub flags: Vec<bool>,
    pub threshold: f64,
    pub component_mean: Map<String, Value>,
    pub replica_components: Vec<usize>,
    pub replica_attempts: Vec<usize>,
}

pub fn nullcheck_body(
    net: &BipartiteNetwork,
    observed: &SpectralResult,
    summary: &NullEnsembleSummary,
    sig: &Significance,
) -> NullcheckBody {
    NullcheckBody {
        replicas: summary.replicas,
        seed: summary.seed,
        rng: summary.rng,
        ranks: summary.ranks,
        observed: observed.normalized.clone(),
        lambda_mean: summary.lambda_mean.clone(),
        lambda_std: summary.lambda_std.clone(),
        z: sig.z.iter().copied().map(finite).collect(),
        flags: sig.flags.clone(),
        threshold: sig.threshold,
        component_mean: by_bank(net, |mu| summary.component_mean[mu].clone()),
        replica_components: summary.replica_components.clone(),
        replica_attempts: summary.replica_attempts.clone(),
    }
}

pub fn write_nullcheck_csv<W: Write>(out: W, body: &NullcheckBody) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "observed", "lambda_mean", "lambda_std", "z", "flag"])?;
    for k in 0..body.ranks {
        w.write_record([
            (k + 1).to_string(),
            body.observed[k].to_string(),
            body.lambda_mean[k].to_string(),
            body.lambda_std[k].to_string(),
            body.z[k].map(|z| z.to_string()).unwrap_or_default(),
            body.flags[k].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct TauReport {
    pub tau: f64,
    pub sigma_multiples: f64,
}

impl From<KendallTau> for TauReport {
    fn from(t: KendallTau) -> Self {
        Self {
            tau: t.tau,
            sigma_multiples: t.sigma_multiples,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub exponent: f64,
    pub intercept: f64,
    pub ci95: f64,
    pub n_points: usize,
    /// Exponent `b` of `w/k ∝ k^b`.
    pub ratio_exponent: f64,
    pub ratio_ci95: f64,
}

impl From<TailFit> for FitReport {
    fn from(f: TailFit) -> Self {
        let (ratio_exponent, ratio_ci95) = f.ratio_exponent();
        Self {
            exponent: f.exponent,
            intercept: f.intercept,
            ci95: f.ci95,
            n_points: f.n_points,
            ratio_exponent,
            ratio_ci95,
        }
    }
}

/// Distribution and correlation battery. Statistics that are undefined for
/// the input (constant series, too few points) are `None`.
#[derive(Debug, Serialize)]
pub struct StatsBody {
    pub n_banks: usize,
    pub n_firms: usize,
    pub ccdf: Map<String, Value>,
    /// Kendall tau of (w_μ, k_μ) and of (w_i, k_i).
    pub kendall_bank: Option<TauReport>,
    pub kendall_firm: Option<TauReport>,
    /// Least-squares fit of `k_μ ∝ w_μ^a`.
    pub fit_bank: Option<FitReport>,
    #[serde(skip)]
    pub curves: Vec<(&'static str, Ccdf)>,
}

pub fn stats_body(net: &BipartiteNetwork) -> StatsBody {
    let agg = net.aggregates();
    let deg = |v: &[usize]| v.iter().map(|&d| d as f64).collect::<Vec<f64>>();
    let (bank_deg, firm_deg) = (deg(&agg.bank_degree), deg(&agg.firm_degree));
    let series: [(&'static str, &[f64]); 4] = [
        ("bank_strength", &agg.bank_strength),
        ("firm_strength", &agg.firm_strength),
        ("bank_degree", &bank_deg),
        ("firm_degree", &firm_deg),
    ];
    // inputs are strictly positive by construction, so ccdf cannot fail
    let curves: Vec<(&'static str, Ccdf)> = series
        .iter()
        .filter_map(|(name, v)| ccdf(v).ok().map(|c| (*name, c)))
        .collect();
    let ccdf_map = curves
        .iter()
        .map(|(name, c)| (name.to_string(), serde_json::json!(c.points)))
        .collect();
    StatsBody {
        n_banks: net.n_banks(),
        n_firms: net.n_firms(),
        ccdf: ccdf_map,
        kendall_bank: kendall_tau(&agg.bank_strength, &bank_deg).ok().map(Into::into),
        kendall_firm: kendall_tau(&agg.firm_strength, &firm_deg).ok().map(Into::into),
        fit_bank: loglog_fit(&agg.bank_strength, &bank_deg).ok().map(Into::into),
        curves,
    }
}

/// Long-form table `record,name,x,y`: CCDF points, then `kendall` rows
/// (`x` = tau, `y` = sigma multiples), then `fit` rows.
pub fn write_stats_csv<W: Write>(out: W, body: &StatsBody) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["record", "name", "x", "y"])?;
    for (name, c) in &body.curves {
        for (x, p) in &c.points {
            w.write_record(["ccdf", name, &x.to_string(), &p.to_string()])?;
        }
    }
    for (name, t) in [("bank", &body.kendall_bank), ("firm", &body.kendall_firm)] {
        if let Some(t) = t {
            w.write_record(["kendall", name, &t.tau.to_string(), &t.sigma_multiples.to_string()])?;
        }
    }
    if let Some(f) = &body.fit_bank {
        w.write_record(["fit", "exponent", &f.exponent.to_string(), &f.ci95.to_string()])?;
        w.write_record(["fit", "intercept", &f.intercept.to_string(), ""])?;
        w.write_record(["fit", "ratio_exponent", &f.ratio_exponent.to_string(), &f.ratio_ci95.to_string()])?;
        w.write_record(["fit", "n_points", &f.n_points.to_string(), ""])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SeriesRow {
    pub year: i32,
    pub values: Vec<f64>,
    pub sum: f64,
}

#[derive(Debug, Serialize)]
pub struct SeriesBody {
    pub ranks: Vec<usize>,
    pub series: Vec<SeriesRow>,
}

pub fn series_body(ranks: &[usize], series: &[SeriesPoint]) -> SeriesBody {
    SeriesBody {
        ranks: ranks.to_vec(),
        series: series
            .iter()
            .map(|p| SeriesRow {
                year: p.year,
                values: p.values.clone(),
                sum: p.sum,
            })
            .collect(),
    }
}

/// `year,lambda<r>...,sum`.
pub fn write_series_csv<W: Write>(out: W, ranks: &[usize], series: &[SeriesPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["year".to_string()];
    header.extend(ranks.iter().map(|r| format!("lambda{r}")));
    header.push("sum".into());
    w.write_record(&header)?;
    for p in series {
        let mut row = vec![p.year.to_string()];
        row.extend(p.values.iter().map(f64::to_string));
        row.push(p.sum.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct HeatmapBody<'a> {
    pub ranks: &'a [usize],
    pub years: &'a [i32],
    pub roster: &'a [String],
    pub cells: &'a [Vec<Option<f64>>],
}

/// First row `year,<roster ids>`, then one row per year; absent banks are
/// empty fields.
pub fn write_heatmap_csv<W: Write>(out: W, h: &HeatmapMatrix) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["year"];
    header.extend(h.roster.iter().map(String::as_str));
    w.write_record(&header)?;
    for (year, row) in h.years.iter().zip(&h.cells) {
        let mut rec = vec![year.to_string()];
        rec.extend(row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub row_id: String,
    pub col_id: String,
    pub value: f64,
}

/// Non-zero entries of `A` (banks × firms), `B` (firms × banks) and `P`
/// (banks × banks), row by row.
pub fn matrix_entries(shares: &ShareMatrices<'_>) -> [(&'static str, Vec<Entry>); 3] {
    let net = shares.network();
    let bank = |mu: usize| net.banks().id(mu).to_string();
    let firm = |i: usize| net.firms().id(i).to_string();
    let mut a = Vec::new();
    for mu in 0..net.n_banks() {
        for (i, v) in shares.lending_row(mu) {
            a.push(Entry {
                row_id: bank(mu),
                col_id: firm(i),
                value: v,
            });
        }
    }
    let mut b = Vec::new();
    for i in 0..net.n_firms() {
        for &e in net.firm_edge_indices(i) {
            b.push(Entry {
                row_id: firm(i),
                col_id: bank(net.edges()[e].bank),
                value: shares.borrowing_shares()[e],
            });
        }
    }
    let mut p = Vec::new();
    for mu in 0..net.n_banks() {
        for (nu, v) in shares.p_row(mu) {
            p.push(Entry {
                row_id: bank(mu),
                col_id: bank(nu),
                value: v,
            });
        }
    }
    [("A", a), ("B", b), ("P", p)]
}

/// One coordinate table `row_id,col_id,value`, optionally prefixed by a
/// `matrix` column naming which matrix each entry belongs to.
pub fn write_entries_csv<W: Write>(out: W, tables: &[(&str, &[Entry])], with_name: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if with_name {
        w.write_record(["matrix", "row_id", "col_id", "value"])?;
    } else {
        w.write_record(["row_id", "col_id", "value"])?;
    }
    for (name, entries) in tables {
        for e in *entries {
            let value = e.value.to_string();
            if with_name {
                w.write_record([name, e.row_id.as_str(), e.col_id.as_str(), value.as_str()])?;
            } else {
                w.write_record([e.row_id.as_str(), e.col_id.as_str(), value.as_str()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

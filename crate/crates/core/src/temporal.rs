//! Yearly panels: one network per year, normalized-eigenvalue series and
//! per-bank eigenvector heatmaps aligned on a global bank roster.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::PanelError;
use crate::matrices::ShareMatrices;
use crate::network::{BipartiteNetwork, CreditRecord};
use crate::spectral::{fragility_spectrum_with, SpectralOptions, SpectralResult};

/// Ranks tracked by default (the two leading non-trivial modes).
pub const DEFAULT_RANKS: [usize; 2] = [2, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRecord {
    pub year: i32,
    pub bank: String,
    pub firm: String,
    pub amount: f64,
}

impl PanelRecord {
    pub fn new(year: i32, bank: impl Into<String>, firm: impl Into<String>, amount: f64) -> Self {
        Self {
            year,
            bank: bank.into(),
            firm: firm.into(),
            amount,
        }
    }
}

/// `old` is reported as `new` from `effective_year` onwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasRule {
    pub old: String,
    pub new: String,
    pub effective_year: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    // old id -> rules sorted by effective year
    rules: BTreeMap<String, Vec<(i32, String)>>,
    len: usize,
}

impl AliasTable {
    pub fn new(rules: impl IntoIterator<Item = AliasRule>) -> Self {
        let mut table = Self::default();
        for r in rules {
            table.rules.entry(r.old).or_default().push((r.effective_year, r.new));
            table.len += 1;
        }
        for v in table.rules.values_mut() {
            v.sort();
        }
        table
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Follows alias chains for a record dated `year`.
    pub fn resolve(&self, bank: &str, year: i32) -> Result<String, PanelError> {
        let mut current = String::from(bank);
        for _ in 0..=self.len {
            let next = self
                .rules
                .get(&current)
                .and_then(|rules| rules.iter().rev().find(|(eff, _)| *eff <= year))
                .map(|(_, new)| new.clone());
            match next {
                Some(n) => current = n,
                None => return Ok(current),
            }
        }
        Err(PanelError::AliasCycle(bank.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearPanel {
    pub snapshots: BTreeMap<i32, BipartiteNetwork>,
    /// Every bank of every year, in first-appearance order.
    pub roster: Vec<String>,
}

pub fn load_panel(records: &[PanelRecord], aliases: Option<&AliasTable>) -> Result<YearPanel, PanelError> {
    let mut by_year: BTreeMap<i32, Vec<CreditRecord>> = BTreeMap::new();
    let mut roster = Vec::new();
    let mut seen = BTreeSet::new();
    for r in records {
        let bank = match aliases {
            Some(a) => a.resolve(&r.bank, r.year)?,
            None => r.bank.clone(),
        };
        if seen.insert(bank.clone()) {
            roster.push(bank.clone());
        }
        by_year
            .entry(r.year)
            .or_default()
            .push(CreditRecord::new(bank, r.firm.clone(), r.amount));
    }
    let mut snapshots = BTreeMap::new();
    for (year, recs) in by_year {
        let net = BipartiteNetwork::from_records(&recs).map_err(|source| PanelError::Network { year, source })?;
        snapshots.insert(year, net);
    }
    Ok(YearPanel { snapshots, roster })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub year: i32,
    /// `λ̃_k` for each requested rank, in request order.
    pub values: Vec<f64>,
    pub sum: f64,
}

/// Years × roster banks; `None` where the bank is absent that year.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapMatrix {
    pub years: Vec<i32>,
    pub roster: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

fn validate_ranks(ranks: &[usize]) -> Result<usize, PanelError> {
    if ranks.is_empty() || ranks.contains(&0) {
        return Err(PanelError::InvalidRanks);
    }
    Ok(ranks.iter().copied().max().unwrap_or(1))
}

fn year_spectrum(year: i32, net: &BipartiteNetwork, k: usize, opts: &SpectralOptions) -> Result<SpectralResult, PanelError> {
    if net.n_banks() < k {
        return Err(PanelError::InsufficientRank {
            year,
            banks: net.n_banks(),
            rank: k,
        });
    }
    let shares = ShareMatrices::new(net);
    fragility_spectrum_with(&shares, k, opts).map_err(|source| PanelError::Spectral { year, source })
}

pub fn lambda_series(panel: &YearPanel, ranks: &[usize], opts: &SpectralOptions) -> Result<Vec<SeriesPoint>, PanelError> {
    let k = validate_ranks(ranks)?;
    panel
        .snapshots
        .iter()
        .map(|(&year, net)| {
            let spectrum = year_spectrum(year, net, k, opts)?;
            Ok(series_point(year, &spectrum, ranks))
        })
        .collect()
}

fn series_point(year: i32, spectrum: &SpectralResult, ranks: &[usize]) -> SeriesPoint {
    let values: Vec<f64> = ranks.iter().map(|&r| spectrum.normalized[r - 1]).collect();
    SeriesPoint {
        year,
        sum: values.iter().sum(),
        values,
    }
}

pub fn heatmap(panel: &YearPanel, ranks: &[usize], opts: &SpectralOptions) -> Result<HeatmapMatrix, PanelError> {
    Ok(analyze_panel(panel, ranks, opts)?.heatmap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelAnalysis {
    pub series: Vec<SeriesPoint>,
    pub heatmap: HeatmapMatrix,
}

/// Series and heatmap from one eigensolve per year.
pub fn analyze_panel(panel: &YearPanel, ranks: &[usize], opts: &SpectralOptions) -> Result<PanelAnalysis, PanelError> {
    let k = validate_ranks(ranks)?;
    let mut series = Vec::with_capacity(panel.snapshots.len());
    let mut cells = Vec::with_capacity(panel.snapshots.len());
    for (&year, net) in &panel.snapshots {
        let spectrum = year_spectrum(year, net, k, opts)?;
        series.push(series_point(year, &spectrum, ranks));
        cells.push(heatmap_row(panel, net, &spectrum, ranks));
    }
    Ok(PanelAnalysis {
        series,
        heatmap: HeatmapMatrix {
            years: panel.snapshots.keys().copied().collect(),
            roster: panel.roster.clone(),
            cells,
        },
    })
}

fn heatmap_row(panel: &YearPanel, net: &BipartiteNetwork, spectrum: &SpectralResult, ranks: &[usize]) -> Vec<Option<f64>> {
    let mut row = vec![None; panel.roster.len()];
    for (slot, id) in row.iter_mut().zip(&panel.roster) {
        if let Some(mu) = net.banks().get(id) {
            let total: f64 = ranks.iter().map(|&r| spectrum.fragility_vectors[r - 1][mu].abs()).sum();
            *slot = Some(total / ranks.len() as f64);
        }
    }
    row
}

//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid input or configuration, 2 when
//! the eigensolver fails to converge or the null model cannot find a simple
//! rewiring.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fragility_core::matrices::ShareMatrices;
use fragility_core::network::BipartiteNetwork;
use fragility_core::nullmodel::{significance, DEFAULT_REPLICAS, DEFAULT_THRESHOLD};
use fragility_core::spectral::fragility_spectrum_with;
use fragility_core::temporal::{analyze_panel, load_panel};
use fragility_core::{NetworkError, NullModelError, PanelError, SpectralError, SpectralOptions};

use crate::ensemble::parallel_ensemble;
use crate::input::{self, EdgeList, InputError};
use crate::report::{self, ConfigEcho};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;
/// Rank count used when `--k` is not given.
pub const DEFAULT_K: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "fragility", version, about = "Spectral fragility analysis of bank-firm credit networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Edge-list CSV with columns bank_id, firm_id, amount and optionally year.
    #[arg(long)]
    pub input: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct Single {
    #[command(flatten)]
    pub common: Common,
    /// Year to analyse when the input has a year column.
    #[arg(long)]
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Args)]
pub struct PanelArgs {
    #[command(flatten)]
    pub common: Common,
    /// Ranks tracked per year.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub ranks: Vec<usize>,
    /// CSV with columns old_id, new_id, effective_year.
    #[arg(long)]
    pub alias_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strength/degree CCDFs, Kendall tau and the degree-strength exponent fit.
    Stats(Single),
    /// Leading eigenvalues and fragility vectors (default JSON).
    Spectrum {
        #[command(flatten)]
        single: Single,
        /// Number of eigenpairs; capped at the number of banks.
        #[arg(long, default_value_t = DEFAULT_K, value_parser = rank_count)]
        k: usize,
    },
    /// Compare the spectrum against a rewired null ensemble (default JSON).
    Nullcheck {
        #[command(flatten)]
        single: Single,
        /// Number of eigenpairs; capped at the number of banks.
        #[arg(long, default_value_t = DEFAULT_K, value_parser = rank_count)]
        k: usize,
        /// Number of replicas.
        #[arg(long, default_value_t = DEFAULT_REPLICAS, value_parser = replica_count)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// z-score above which a rank is flagged.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Per-year normalized eigenvalue series (default CSV).
    Panel(PanelArgs),
    /// Per-year, per-bank mean |x| over the tracked ranks (default CSV).
    Heatmap(PanelArgs),
    /// Coordinate dump of A, B and P (default CSV). When --output is a
    /// directory, writes A.csv, B.csv and P.csv into it.
    ExportMatrices(Single),
}

fn count_at_least(s: &str, min: usize) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v < min {
        return Err(format!("must be at least {min}"));
    }
    Ok(v)
}

fn rank_count(s: &str) -> Result<usize, String> {
    count_at_least(s, 1)
}

fn replica_count(s: &str) -> Result<usize, String> {
    count_at_least(s, 2)
}

/// A failed run: exit code plus one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self::invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::invalid(format!("write failed: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::invalid(format!("write failed: {e}"))
    }
}

fn network_failure(e: &NetworkError, line: impl Fn(usize) -> Option<u64>) -> Failure {
    let at = |row: usize| line(row).map_or_else(|| format!("record {row}"), |l| format!("line {l}"));
    Failure::invalid(match e {
        NetworkError::EmptyId { row } => format!("{}: empty bank or firm id", at(*row)),
        NetworkError::NonFiniteAmount { row, bank, firm } => format!("{} ({bank}, {firm}): amount is not finite", at(*row)),
        NetworkError::NonPositiveWeight { row, bank, firm, amount } => {
            format!("{} ({bank}, {firm}): summed amount {amount} is not positive", at(*row))
        }
        other => other.to_string(),
    })
}

fn spectral_failure(e: SpectralError) -> Failure {
    match e {
        SpectralError::ConvergenceFailure { .. } => Failure::numeric(e.to_string()),
        _ => Failure::invalid(e.to_string()),
    }
}

fn null_failure(e: NullModelError) -> Failure {
    fn numeric(e: &NullModelError) -> bool {
        match e {
            NullModelError::MatchingExhausted { .. } => true,
            NullModelError::Spectral(SpectralError::ConvergenceFailure { .. }) => true,
            NullModelError::Replica { source, .. } => numeric(source),
            _ => false,
        }
    }
    if numeric(&e) {
        Failure::numeric(e.to_string())
    } else {
        Failure::invalid(e.to_string())
    }
}

fn panel_failure(e: PanelError, list: &EdgeList) -> Failure {
    match e {
        PanelError::Network { year, source } => {
            let inner = network_failure(&source, |row| list.line_in_year(year, row));
            Failure::invalid(format!("year {year}: {}", inner.message))
        }
        PanelError::Spectral {
            source: SpectralError::ConvergenceFailure { .. },
            ..
        } => Failure::numeric(e.to_string()),
        other => Failure::invalid(other.to_string()),
    }
}

fn load_single(args: &Single) -> Result<BipartiteNetwork, Failure> {
    let list = input::read_edge_list_path(&args.common.input)?;
    let sel = list.select(args.year)?;
    BipartiteNetwork::from_records(&sel.records).map_err(|e| network_failure(&e, |row| sel.lines.get(row).copied()))
}

fn echo(common: &Common) -> ConfigEcho {
    ConfigEcho {
        input: common.input.display().to_string(),
        ..ConfigEcho::default()
    }
}

fn sink(output: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn finish(mut out: Box<dyn Write>) -> Result<(), Failure> {
    out.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Stats(args) => run_stats(&args),
        Command::Spectrum { single, k } => run_spectrum(&single, k),
        Command::Nullcheck {
            single,
            k,
            r,
            seed,
            threshold,
        } => run_nullcheck(&single, k, r, seed, threshold),
        Command::Panel(args) => run_panel(&args, false),
        Command::Heatmap(args) => run_panel(&args, true),
        Command::ExportMatrices(args) => run_export(&args),
    }
}

fn run_stats(args: &Single) -> Result<(), Failure> {
    let net = load_single(args)?;
    let config = ConfigEcho {
        year: args.year,
        ..echo(&args.common)
    };
    let body = report::stats_body(&net);
    let mut out = sink(args.common.output.as_deref())?;
    match args.common.format.unwrap_or(Format::Json) {
        Format::Json => report::write_json(&mut out, "stats", &config, &body)?,
        Format::Csv => report::write_stats_csv(&mut out, &body)?,
    }
    finish(out)
}

fn run_spectrum(args: &Single, k: usize) -> Result<(), Failure> {
    let net = load_single(args)?;
    let shares = ShareMatrices::new(&net);
    let result = fragility_spectrum_with(&shares, k.min(net.n_banks()), &SpectralOptions::default()).map_err(spectral_failure)?;
    let config = ConfigEcho {
        year: args.year,
        k: Some(k),
        ..echo(&args.common)
    };
    let mut out = sink(args.common.output.as_deref())?;
    match args.common.format.unwrap_or(Format::Json) {
        Format::Json => report::write_json(&mut out, "spectrum", &config, report::spectrum_body(&net, &result))?,
        Format::Csv => report::write_spectrum_csv(&mut out, &net, &result)?,
    }
    finish(out)
}

fn run_nullcheck(args: &Single, k: usize, r: usize, seed: u64, threshold: f64) -> Result<(), Failure> {
    let net = load_single(args)?;
    let k_eff = k.min(net.n_banks());
    let opts = SpectralOptions::default();
    let observed = fragility_spectrum_with(&ShareMatrices::new(&net), k_eff, &opts).map_err(spectral_failure)?;
    let summary = parallel_ensemble(&net, r, k_eff, seed, &opts).map_err(null_failure)?;
    let sig = significance(&observed, &summary, threshold).map_err(null_failure)?;
    let body = report::nullcheck_body(&net, &observed, &summary, &sig);
    let config = ConfigEcho {
        year: args.year,
        k: Some(k),
        r: Some(r),
        seed: Some(seed),
        threshold: Some(threshold),
        ..echo(&args.common)
    };
    let mut out = sink(args.common.output.as_deref())?;
    match args.common.format.unwrap_or(Format::Json) {
        Format::Json => report::write_json(&mut out, "nullcheck", &config, &body)?,
        Format::Csv => report::write_nullcheck_csv(&mut out, &body)?,
    }
    finish(out)
}

fn run_panel(args: &PanelArgs, heatmap: bool) -> Result<(), Failure> {
    let list = input::read_edge_list_path(&args.common.input)?;
    let aliases = match &args.alias_file {
        Some(path) => Some(input::read_aliases(input::open(path)?)?),
        None => None,
    };
    let records = list.panel_records()?;
    let panel = load_panel(&records, aliases.as_ref()).map_err(|e| panel_failure(e, &list))?;
    let analysis = analyze_panel(&panel, &args.ranks, &SpectralOptions::default()).map_err(|e| panel_failure(e, &list))?;
    let config = ConfigEcho {
        ranks: Some(args.ranks.clone()),
        alias_file: args.alias_file.as_ref().map(|p| p.display().to_string()),
        ..echo(&args.common)
    };
    let mut out = sink(args.common.output.as_deref())?;
    match (heatmap, args.common.format.unwrap_or(Format::Csv)) {
        (false, Format::Csv) => report::write_series_csv(&mut out, &args.ranks, &analysis.series)?,
        (false, Format::Json) => {
            report::write_json(&mut out, "panel", &config, report::series_body(&args.ranks, &analysis.series))?
        }
        (true, Format::Csv) => report::write_heatmap_csv(&mut out, &analysis.heatmap)?,
        (true, Format::Json) => {
            let h = &analysis.heatmap;
            let body = report::HeatmapBody {
                ranks: &args.ranks,
                years: &h.years,
                roster: &h.roster,
                cells: &h.cells,
            };
            report::write_json(&mut out, "heatmap", &config, body)?
        }
    }
    finish(out)
}

fn run_export(args: &Single) -> Result<(), Failure> {
    let net = load_single(args)?;
    let shares = ShareMatrices::new(&net);
    let tables = report::matrix_entries(&shares);
    let format = args.common.format.unwrap_or(Format::Csv);
    if let (Some(dir), Format::Csv) = (&args.common.output, format) {
        if dir.is_dir() {
            for (name, entries) in &tables {
                let path = dir.join(format!("{name}.csv"));
                let file = File::create(&path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
                report::write_entries_csv(BufWriter::new(file), &[(name, entries)], false)?;
            }
            return Ok(());
        }
    }
    let mut out = sink(args.common.output.as_deref())?;
    match format {
        Format::Csv => {
            let refs: Vec<(&str, &[report::Entry])> = tables.iter().map(|(n, e)| (*n, e.as_slice())).collect();
            report::write_entries_csv(&mut out, &refs, true)?
        }
        Format::Json => {
            let config = ConfigEcho {
                year: args.year,
                ..echo(&args.common)
            };
            let body: serde_json::Map<String, serde_json::Value> = tables
                .iter()
                .map(|(n, e)| (n.to_string(), serde_json::json!(e)))
                .collect();
            report::write_json(&mut out, "export-matrices", &config, body)?
        }
    }
    finish(out)
}

//! Edge-list and alias-file readers.
//!
//! Edge lists are CSV with a header naming at least `bank_id`, `firm_id` and
//! `amount`; an optional `year` column turns the file into a panel. Column
//! order is free and unknown columns are ignored.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use fragility_core::network::CreditRecord;
use fragility_core::temporal::{AliasRule, AliasTable, PanelRecord};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("line {line}: cannot parse {column} `{value}`")]
    BadField { line: u64, column: &'static str, value: String },
    #[error("input has no year column, so --year cannot be used")]
    NoYearColumn,
    #[error("input spans {0} years; select one with --year")]
    AmbiguousYear(usize),
    #[error("no records for year {0}")]
    EmptyYear(i32),
    #[error("panel input needs a `year` column")]
    YearRequired,
}

/// One data row of an edge list, with its 1-based line number in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRow {
    pub line: u64,
    pub year: Option<i32>,
    pub bank: String,
    pub firm: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub rows: Vec<EdgeRow>,
    pub has_year: bool,
}

/// Records of one network plus the source line of each record.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub records: Vec<CreditRecord>,
    pub lines: Vec<u64>,
}

fn column(headers: &csv::StringRecord, name: &'static str) -> Option<usize> {
    headers.iter().position(|h| h.trim() == name)
}

fn required(headers: &csv::StringRecord, name: &'static str) -> Result<usize, InputError> {
    column(headers, name).ok_or(InputError::MissingColumn(name))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, column: &'static str) -> Result<T, InputError> {
    let raw = record.get(idx).unwrap_or("").trim();
    raw.parse().map_err(|_| InputError::BadField {
        line: line_of(record),
        column,
        value: raw.to_string(),
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input)
}

pub fn read_edge_list<R: Read>(input: R) -> Result<EdgeList, InputError> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let bank = required(&headers, "bank_id")?;
    let firm = required(&headers, "firm_id")?;
    let amount = required(&headers, "amount")?;
    let year = column(&headers, "year");
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(EdgeRow {
            line: line_of(&rec),
            year: year.map(|i| parse(&rec, i, "year")).transpose()?,
            bank: rec.get(bank).unwrap_or("").to_string(),
            firm: rec.get(firm).unwrap_or("").to_string(),
            amount: parse(&rec, amount, "amount")?,
        });
    }
    Ok(EdgeList {
        rows,
        has_year: year.is_some(),
    })
}

pub fn open(path: &Path) -> Result<File, InputError> {
    File::open(path).map_err(|source| InputError::Open {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_edge_list_path(path: &Path) -> Result<EdgeList, InputError> {
    read_edge_list(open(path)?)
}

impl EdgeList {
    pub fn years(&self) -> BTreeSet<i32> {
        self.rows.iter().filter_map(|r| r.year).collect()
    }

    /// Records of a single network. Panel input must name its year unless
    /// it holds only one.
    pub fn select(&self, year: Option<i32>) -> Result<Selection, InputError> {
        let wanted = match (year, self.has_year) {
            (Some(_), false) => return Err(InputError::NoYearColumn),
            (Some(y), true) => Some(y),
            (None, true) if self.years().len() > 1 => return Err(InputError::AmbiguousYear(self.years().len())),
            (None, _) => None,
        };
        let mut records = Vec::new();
        let mut lines = Vec::new();
        for r in &self.rows {
            if wanted.is_some() && r.year != wanted {
                continue;
            }
            records.push(CreditRecord::new(r.bank.clone(), r.firm.clone(), r.amount));
            lines.push(r.line);
        }
        if let (Some(y), true) = (wanted, records.is_empty()) {
            return Err(InputError::EmptyYear(y));
        }
        Ok(Selection { records, lines })
    }

    pub fn panel_records(&self) -> Result<Vec<PanelRecord>, InputError> {
        if !self.has_year {
            return Err(InputError::YearRequired);
        }
        Ok(self
            .rows
            .iter()
            .map(|r| PanelRecord::new(r.year.unwrap_or_default(), r.bank.clone(), r.firm.clone(), r.amount))
            .collect())
    }

    /// Source line of the `row`-th record of `year` (records in file order).
    pub fn line_in_year(&self, year: i32, row: usize) -> Option<u64> {
        self.rows.iter().filter(|r| r.year == Some(year)).nth(row).map(|r| r.line)
    }
}

/// Alias file with header `old_id,new_id,effective_year`.
pub fn read_aliases<R: Read>(input: R) -> Result<AliasTable, InputError> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let old = required(&headers, "old_id")?;
    let new = required(&headers, "new_id")?;
    let year = required(&headers, "effective_year")?;
    let mut rules = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rules.push(AliasRule {
            old: rec.get(old).unwrap_or("").to_string(),
            new: rec.get(new).unwrap_or("").to_string(),
            effective_year: parse(&rec, year, "effective_year")?,
        });
    }
    Ok(AliasTable::new(rules))
}

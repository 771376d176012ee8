//! The append-only CSV of benchmark runs.

use std::fs::OpenOptions;
use std::path::Path;

use crate::hypergraph::EdgeWeight;

use super::{FormatError, FormatResult};

pub const HEADER: [&str; 18] = [
    "instance",
    "algorithm",
    "k",
    "seed",
    "epsilon",
    "d",
    "connectivity",
    "max_block_weights",
    "balanced",
    "time_total",
    "time_coarsen",
    "time_initial",
    "time_refine",
    "time_rebalance",
    "rebalance_calls",
    "greedy_rounds",
    "fallback_calls",
    "excluded",
];

/// One partitioner run. Times are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub k: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub d: usize,
    pub connectivity: EdgeWeight,
    pub max_block_weights: Vec<f64>,
    pub balanced: bool,
    pub time_total: f64,
    pub time_coarsen: f64,
    pub time_initial: f64,
    pub time_refine: f64,
    pub time_rebalance: f64,
    pub rebalance_calls: usize,
    pub greedy_rounds: usize,
    pub fallback_calls: usize,
    /// The (instance, k) pair failed the heavy-vertex filter; the run was not
    /// performed and only identifying fields are meaningful.
    pub excluded: bool,
}

impl RunRecord {
    fn to_fields(&self) -> Vec<String> {
        let weights: Vec<String> = self.max_block_weights.iter().map(|&w| format_g6(w)).collect();
        vec![
            self.instance.clone(),
            self.algorithm.clone(),
            self.k.to_string(),
            self.seed.to_string(),
            format_g6(self.epsilon),
            self.d.to_string(),
            self.connectivity.to_string(),
            weights.join(";"),
            u8::from(self.balanced).to_string(),
            format_g6(self.time_total),
            format_g6(self.time_coarsen),
            format_g6(self.time_initial),
            format_g6(self.time_refine),
            format_g6(self.time_rebalance),
            self.rebalance_calls.to_string(),
            self.greedy_rounds.to_string(),
            self.fallback_calls.to_string(),
            u8::from(self.excluded).to_string(),
        ]
    }

    fn from_fields(row: &csv::StringRecord, line: usize) -> FormatResult<Self> {
        if row.len() != HEADER.len() {
            return Err(super::parse_error(
                line,
                format!("expected {} fields, found {}", HEADER.len(), row.len()),
            ));
        }
        let int = |i: usize| -> FormatResult<i64> { super::parse_int(&row[i], line, HEADER[i]) };
        let float = |i: usize| -> FormatResult<f64> {
            row[i]
                .parse()
                .map_err(|_| super::parse_error(line, format!("expected {}, found `{}`", HEADER[i], &row[i])))
        };
        let flag = |i: usize| -> FormatResult<bool> {
            match &row[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(super::parse_error(line, format!("expected 0 or 1 for {}, found `{other}`", HEADER[i]))),
            }
        };
        let max_block_weights = if row[7].is_empty() {
            Vec::new()
        } else {
            row[7]
                .split(';')
                .map(|t| {
                    t.parse()
                        .map_err(|_| super::parse_error(line, format!("expected block weight, found `{t}`")))
                })
                .collect::<FormatResult<_>>()?
        };
        Ok(Self {
            instance: row[0].to_string(),
            algorithm: row[1].to_string(),
            k: int(2)? as usize,
            seed: super::parse_int(&row[3], line, HEADER[3])?,
            epsilon: float(4)?,
            d: int(5)? as usize,
            connectivity: int(6)?,
            max_block_weights,
            balanced: flag(8)?,
            time_total: float(9)?,
            time_coarsen: float(10)?,
            time_initial: float(11)?,
            time_refine: float(12)?,
            time_rebalance: float(13)?,
            rebalance_calls: int(14)? as usize,
            greedy_rounds: int(15)? as usize,
            fallback_calls: int(16)? as usize,
            excluded: flag(17)?,
        })
    }
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 5.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Appends `record`, writing the header first when the file is new or empty.
pub fn append_run_record(path: impl AsRef<Path>, record: &RunRecord) -> FormatResult<()> {
    append_run_records(path, std::slice::from_ref(record))
}

pub fn append_run_records(path: impl AsRef<Path>, records: &[RunRecord]) -> FormatResult<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        writer.write_record(HEADER)?;
    }
    for r in records {
        writer.write_record(r.to_fields())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_run_records(path: impl AsRef<Path>) -> FormatResult<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(FormatError::Invalid(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        out.push(RunRecord::from_fields(&row?, i + 2)?);
    }
    Ok(out)
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use seqrep::benchmarks::BenchmarkLabel;
use seqrep::optimizer::RateResult;
use seqrep::params::ExperimentParams;
use seqrep::ModelError;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Appends a row given as `(column, value)` pairs; the first row fixes
    /// the header.
    pub fn push(&mut self, row: Vec<(String, String)>) {
        if self.columns.is_empty() {
            self.columns = row.iter().map(|(k, _)| k.clone()).collect();
        }
        debug_assert_eq!(self.columns.len(), row.len());
        self.rows.push(row.into_iter().map(|(_, v)| v).collect());
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Fixed-width text for the terminal.
    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].len())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut s = line(&self.columns);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&line(r));
            s.push('\n');
        }
        s
    }
}

pub fn col(name: &str, value: impl Into<String>) -> (String, String) {
    (name.to_string(), value.into())
}

/// The common rate columns of every sweep.
pub fn rate_columns(result: &std::result::Result<RateResult, ModelError>) -> Vec<(String, String)> {
    let mut row = Vec::new();
    let ok = result.as_ref().ok();
    let f = |g: &dyn Fn(&RateResult) -> String| ok.map(g).unwrap_or_default();
    row.push(col("n_star", f(&|r| r.n_star_opt.to_string())));
    row.push(col("R_lower", f(&|r| num(r.r_lower))));
    row.push(col("R_upper", f(&|r| num(r.r_upper))));
    row.push(col("protocol", f(&|r| r.protocol.name().to_string())));
    row.push(col("branch", f(&|r| r.branch.name().to_string())));
    row.push(col("regime", f(&|r| r.regime.map(|g| g.name()).unwrap_or("").to_string())));
    row.push(col("uses_method", f(&|r| method_name(r).to_string())));
    row.push(col("skf", f(&|r| num(r.skf))));
    row.push(col("e_x", f(&|r| num(r.e_x))));
    row.push(col("e_z", f(&|r| num(r.e_z))));
    row.push(col("p_A", f(&|r| num(r.p_a))));
    row.push(col("p_B", f(&|r| num(r.p_b))));
    row.push(col("err_term", f(&|r| num(r.err_term))));
    for label in BenchmarkLabel::ALL {
        row.push(col(&format!("bm_{label}"), f(&|r| r.benchmark(label).map(num).unwrap_or_default())));
    }
    for label in BenchmarkLabel::ALL {
        row.push(col(&format!("verdict_{label}"), f(&|r| r.surpasses(label).to_string())));
    }
    row.push(col("error", result.as_ref().err().map(|e| e.to_string()).unwrap_or_default()));
    row
}

pub fn method_name(r: &RateResult) -> &'static str {
    use seqrep::optimizer::UsesMethod::*;
    match r.method {
        Bounds => "bounds",
        ExactNoCutoff => "exact_no_cutoff",
        MonteCarlo => "monte_carlo",
    }
}

pub fn config_hash(params: &ExperimentParams) -> String {
    hex::encode(Sha256::digest(params.to_config_string().as_bytes()))
}

/// Provenance of one run: the rows plus everything needed to reproduce them.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: Vec<String>,
    pub config_hash: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub params: ExperimentParams,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RunRecord {
    pub fn new(params: &ExperimentParams, seed: u64, table: &Table) -> Self {
        RunRecord {
            command: std::env::args().collect(),
            config_hash: config_hash(params),
            seed,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            params: *params,
            columns: table.columns.clone(),
            rows: table.rows.clone(),
        }
    }
}

pub fn record_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("record.json")
    } else {
        out.with_extension("json")
    }
}

/// Writes the CSV to `out` and the record next to it, or the CSV to stdout.
pub fn emit(table: &Table, out: Option<&Path>, params: &ExperimentParams, seed: u64) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write_csv(file)?;
            let rec = record_path(path);
            let json = serde_json::to_string_pretty(&RunRecord::new(params, seed, table))?;
            std::fs::write(&rec, json + "\n").with_context(|| format!("writing {}", rec.display()))?;
            eprintln!("wrote {} and {}", path.display(), rec.display());
        }
        None => table.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

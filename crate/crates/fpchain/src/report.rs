//! Result rows and their CSV / JSONL serialization.
//!
//! CSV columns, in order:
//! `experiment,p,gamma,chain,metric,value,oracle,runtime_ms,seed,config_hash`.
//! An absent oracle is an empty field. JSONL rows carry the same keys,
//! sorted. Exact rationals are always written as `"num/den"` strings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub p: u64,
    pub gamma: u64,
    pub chain: String,
    pub metric: String,
    pub value: String,
    pub oracle: Option<String>,
    pub runtime_ms: u64,
    pub seed: u64,
    pub config_hash: String,
}

impl ResultRow {
    pub fn is_error(&self) -> bool {
        self.metric == "error"
    }
}

pub const CSV_HEADER: &str = "experiment,p,gamma,chain,metric,value,oracle,runtime_ms,seed,config_hash";

/// `num/den`, denominator always present.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_string(num: impl Into<BigInt>, den: impl Into<BigInt>) -> String {
    rational_string(&BigRational::new(num.into(), den.into()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Serializes rows to bytes in the given format.
pub fn render(rows: &[ResultRow], format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
            for r in rows {
                w.serialize(r).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        OutputFormat::Jsonl => {
            let mut out = Vec::new();
            for r in rows {
                // serde_json's Map is ordered by key unless preserve_order is on.
                let v = serde_json::to_value(r).expect("rows serialize");
                serde_json::to_writer(&mut out, &v).expect("in-memory write");
                out.push(b'\n');
            }
            out
        }
    }
}

/// Writes `dir/stem.<ext>` and returns its path.
pub fn emit_report(
    rows: &[ResultRow],
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    allow_empty: bool,
) -> Result<PathBuf, HarnessError> {
    if rows.is_empty() && !allow_empty {
        return Err(HarnessError::EmptyReport);
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    fs::write(&path, render(rows, format)).map_err(io_err(&path))?;
    Ok(path)
}

/// `step,state` CSV for a sampled trajectory.
pub fn write_path_csv(path: &Path, states: &[u64]) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    let mut body = String::from("step,state\n");
    for (i, s) in states.iter().enumerate() {
        body.push_str(&format!("{i},{s}\n"));
    }
    f.write_all(body.as_bytes()).map_err(io_err(path))
}

/// `step,tv` CSV for a mixing trajectory.
pub fn write_tv_csv(path: &Path, tv: &[f64]) -> Result<(), HarnessError> {
    let mut body = String::from("step,tv\n");
    for (i, v) in tv.iter().enumerate() {
        body.push_str(&format!("{i},{v:e}\n"));
    }
    fs::write(path, body).map_err(io_err(path))
}

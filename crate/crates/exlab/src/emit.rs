//! CSV and JSON result files.
//!
//! CSV has one row per (record, bound) pair, or a single row with empty
//! bound columns for a record without bounds. Exact values are written as
//! `p/q`. JSON is an array of records with exact values as
//! `{"num": p, "den": q}`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::record::{format_float, ResultRecord, Value};

pub const CSV_COLUMNS: [&str; 14] = [
    "suite",
    "n",
    "m",
    "gamma",
    "strategy",
    "param_k",
    "param_r",
    "param_t",
    "cost",
    "worst_err",
    "mean_err",
    "bound_name",
    "bound_value",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn opt_value(v: &Option<Value>) -> String {
    match v {
        Some(Value::Float(x)) => format_float(*x),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let head = [
            r.suite.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.gamma.to_string(),
            r.strategy.clone(),
            opt(&r.param_k),
            opt(&r.param_r),
            opt(&r.param_t),
            opt(&r.cost),
            opt_value(&r.worst_err),
            opt_value(&r.mean_err),
        ];
        let seed = r.seed.to_string();
        if r.bounds.is_empty() {
            w.write_record(head.iter().map(String::as_str).chain(["", "", &seed]))?;
        }
        for b in &r.bounds {
            let value = b.value.to_string();
            w.write_record(head.iter().map(String::as_str).chain([b.name.as_str(), &value, &seed]))?;
        }
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[ResultRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n").map_err(|e| HarnessError::Json(serde_json::Error::io(e)))?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    Ok(serde_json::from_reader(input)?)
}

/// Writes `records` to `path`, replacing any existing file.
pub fn emit(records: &[ResultRecord], format: Format, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(records, &mut out)?,
        Format::Json => write_json(records, &mut out)?,
    }
    out.flush().map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::BoundEntry;
    use exlab_core::ExactRational;

    fn record() -> ResultRecord {
        ResultRecord {
            suite: "majority".into(),
            n: 4,
            m: 2,
            gamma: ExactRational::new(1, 8),
            strategy: "majority".into(),
            param_k: None,
            param_r: None,
            param_t: None,
            cost: Some(1),
            worst_err: Some(Value::Exact(ExactRational::one())),
            mean_err: Some(Value::Exact(ExactRational::new(1, 16))),
            bounds: vec![
                BoundEntry::new("majority_error_formula", ExactRational::new(1, 8)),
                BoundEntry::new("classical_ic_lower_bound", 1.678071905112638),
            ],
            seed: 9,
            trials: None,
            wall_time: None,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "suite,n,m,gamma,strategy,param_k,param_r,param_t,cost,worst_err,mean_err,bound_name,bound_value,seed\n"
        );
    }

    #[test]
    fn csv_rows_per_bound() {
        let mut buf = Vec::new();
        write_csv(&[record()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "majority,4,2,1/8,majority,,,,1,1/1,1/16,majority_error_formula,1/8,9");
        assert_eq!(lines[2], "majority,4,2,1/8,majority,,,,1,1/1,1/16,classical_ic_lower_bound,1.678071905112638,9");
    }

    #[test]
    fn json_round_trip() {
        let records = vec![record(), ResultRecord { bounds: vec![], worst_err: None, ..record() }];
        let mut buf = Vec::new();
        write_json(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains(r#""num": 1,"#) && text.contains(r#""den": 8"#));
        assert_eq!(read_json(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.csv")), Some(Format::Csv));
        assert_eq!(Format::from_path(Path::new("b.json")), Some(Format::Json));
        assert_eq!(Format::from_path(Path::new("b")), None);
    }
}

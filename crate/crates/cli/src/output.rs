//! CSV curve files and JSON manifests.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CliError, Result};
use crate::experiment::{CurvePoint, CurveSeries, Manifest};

pub const CSV_HEADER: [&str; 5] = ["snr_db", "value", "std_error", "method", "label"];

/// Shortest scientific form that parses back to the same `f64`.
fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv<W: Write>(series: &[CurveSeries], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in series {
        for p in &s.points {
            let value = p.value.map(sci).unwrap_or_default();
            w.write_record([sci(p.snr_db), value, sci(p.std_error), p.method.clone(), s.label.clone()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(series: &[CurveSeries], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(series, BufWriter::new(file))
}

fn field(s: &str, what: &str, line: u64) -> Result<f64> {
    s.parse().map_err(|_| CliError::Parse(format!("line {line}: bad {what} '{s}'")))
}

/// Groups rows by label in order of first appearance.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<CurveSeries>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(CliError::Parse(format!("unexpected header {:?}", r.headers()?)));
    }
    let mut series: Vec<CurveSeries> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CSV_HEADER.len() {
            return Err(CliError::Parse(format!("line {line}: expected 5 fields")));
        }
        let point = CurvePoint {
            snr_db: field(&rec[0], "snr_db", line)?,
            value: if rec[1].is_empty() { None } else { Some(field(&rec[1], "value", line)?) },
            std_error: field(&rec[2], "std_error", line)?,
            method: rec[3].to_string(),
        };
        let label = &rec[4];
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => series.push(CurveSeries {
                label: label.to_string(),
                points: vec![point],
            }),
        }
    }
    Ok(series)
}

pub fn parse_csv(path: &Path) -> Result<Vec<CurveSeries>> {
    read_csv(File::open(path).map_err(io_err(path))?)
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

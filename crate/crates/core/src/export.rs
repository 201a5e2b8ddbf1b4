//! Triangle export as CSV (`n,j,value`) or JSON lines. Values are written as
//! decimal strings (`p/q` when a general gamma produces a non-integer).

use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::triangle::StirlingTriangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" | "jsonl" => Ok(TableFormat::Json),
            other => Err(LabError::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub n: usize,
    pub j: usize,
    pub value: String,
}

impl EntryRecord {
    pub fn parse_value(&self) -> Result<Rational> {
        Rational::from_str(&self.value)
            .map_err(|_| LabError::Parse(format!("bad value {:?} at ({}, {})", self.value, self.n, self.j)))
    }
}

pub fn records(tri: &StirlingTriangle) -> impl Iterator<Item = EntryRecord> + '_ {
    tri.entries().map(|(n, j, v)| EntryRecord {
        n,
        j,
        value: v.to_string(),
    })
}

pub fn write_csv<W: Write>(tri: &StirlingTriangle, mut out: W) -> io::Result<()> {
    writeln!(out, "n,j,value")?;
    for rec in records(tri) {
        writeln!(out, "{},{},{}", rec.n, rec.j, rec.value)?;
    }
    Ok(())
}

pub fn write_jsonl<W: Write>(tri: &StirlingTriangle, mut out: W) -> io::Result<()> {
    for rec in records(tri) {
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_table<W: Write>(tri: &StirlingTriangle, format: TableFormat, out: W) -> io::Result<()> {
    match format {
        TableFormat::Csv => write_csv(tri, out),
        TableFormat::Json => write_jsonl(tri, out),
    }
}

/// Parses JSON-lines records, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<EntryRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| LabError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| LabError::Parse(e.to_string()))?);
    }
    Ok(out)
}

/// Reassembles a triangle from records in row-major order; the recurrence is
/// re-checked for every row.
pub fn triangle_from_records(
    gamma: crate::gamma::GammaParam,
    records: &[EntryRecord],
) -> Result<StirlingTriangle> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for rec in records {
        if rec.n == rows.len() {
            rows.push(Vec::with_capacity(rec.n + 1));
        }
        let row = rows
            .get_mut(rec.n)
            .filter(|r| r.len() == rec.j)
            .ok_or_else(|| LabError::Parse(format!("record ({}, {}) out of order", rec.n, rec.j)))?;
        row.push(rec.parse_value()?);
    }
    if rows.iter().enumerate().any(|(n, r)| r.len() != n + 1) {
        return Err(LabError::Parse("incomplete row in records".into()));
    }
    StirlingTriangle::from_rows(gamma, rows)
}

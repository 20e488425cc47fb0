// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV ingestion and emission.
//!
//! Data cells are written in shortest round-trip form so a re-read value is
//! bit-identical; report figures go through [`fmt_sig`].

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::series::TimeSeries;

/// A column selected by header name or by 0-based position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

impl From<&str> for ColumnRef {
    fn from(s: &str) -> Self {
        ColumnRef::Name(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvOptions {
    pub delimiter: char,
    pub has_header: bool,
    /// Tokens read as missing, compared after trimming. The empty field is always missing.
    pub missing_tokens: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: true,
            missing_tokens: vec!["NaN".into(), "nan".into(), "NA".into(), "".into()],
        }
    }
}

impl CsvOptions {
    fn delimiter_byte(&self) -> Result<u8> {
        u8::try_from(self.delimiter)
            .map_err(|_| ImputeError::InvalidInput("delimiter must be a single ASCII byte".into()))
    }

    fn is_missing(&self, token: &str) -> bool {
        let t = token.trim();
        t.is_empty() || self.missing_tokens.iter().any(|m| m == t)
    }
}

/// A whole CSV file as text cells, kept so outputs can reproduce the
/// untouched columns verbatim.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub headers: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path, opts: &CsvOptions) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => ImputeError::FileNotFound(path.to_path_buf()),
            _ => ImputeError::Io(e),
        })?;
        Self::parse(&text, opts)
    }

    /// Parses CSV text. A blank line is a row whose single field is empty,
    /// so a one-column file can mark gaps with empty lines.
    pub fn parse(text: &str, opts: &CsvOptions) -> Result<Self> {
        let normalised: String = text
            .lines()
            .map(|l| if l.trim().is_empty() { "\"\"" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(opts.delimiter_byte()?)
            .has_headers(opts.has_header)
            .flexible(true)
            .from_reader(normalised.as_bytes());
        let headers = if opts.has_header {
            Some(reader.headers()?.iter().map(str::to_string).collect())
        } else {
            None
        };
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self { headers, rows })
    }

    pub fn column_index(&self, column: &ColumnRef) -> Result<usize> {
        match column {
            ColumnRef::Name(name) => {
                let by_name = self
                    .headers
                    .as_ref()
                    .and_then(|h| h.iter().position(|c| c.trim() == name));
                match (by_name, name.parse::<usize>()) {
                    (Some(i), _) => Ok(i),
                    // a bare number that is not a header selects by position
                    (None, Ok(i)) => self.column_index(&ColumnRef::Index(i)),
                    (None, Err(_)) => Err(ImputeError::ColumnNotFound(name.clone())),
                }
            }
            ColumnRef::Index(i) => {
                let width = self
                    .headers
                    .as_ref()
                    .map(Vec::len)
                    .or_else(|| self.rows.iter().map(Vec::len).max())
                    .unwrap_or(0);
                if *i < width {
                    Ok(*i)
                } else {
                    Err(ImputeError::ColumnNotFound(column.to_string()))
                }
            }
        }
    }

    /// Parses one column as a series. Row numbers in errors are 1-based data rows.
    pub fn series(&self, column: &ColumnRef, opts: &CsvOptions) -> Result<TimeSeries> {
        let col = self.column_index(column)?;
        let mut values = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let token = row.get(col).map(String::as_str).unwrap_or("");
            if opts.is_missing(token) {
                values.push(f64::NAN);
                continue;
            }
            let parsed = token
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ImputeError::ParseError {
                    row: r + 1,
                    token: token.to_string(),
                })?;
            values.push(parsed);
        }
        TimeSeries::new(values)
    }

    /// Replaces `column` with `series` (present cells in round-trip form,
    /// missing cells empty). Cells whose value is unchanged keep their text.
    pub fn with_column(&self, col: usize, before: &TimeSeries, after: &TimeSeries) -> Self {
        let mut out = self.clone();
        for (r, row) in out.rows.iter_mut().enumerate() {
            if row.len() <= col {
                row.resize(col + 1, String::new());
            }
            let (b, a) = (before.values()[r], after.values()[r]);
            if a.to_bits() == b.to_bits() {
                continue;
            }
            row[col] = if a.is_nan() {
                String::new()
            } else {
                fmt_exact(a)
            };
        }
        out
    }

    /// Appends a column; `header` is ignored for header-less tables.
    pub fn push_column(&mut self, header: &str, cells: impl IntoIterator<Item = String>) {
        if let Some(h) = self.headers.as_mut() {
            h.push(header.to_string());
        }
        let width = self
            .headers
            .as_ref()
            .map(|h| h.len() - 1)
            .unwrap_or_else(|| self.rows.iter().map(Vec::len).max().unwrap_or(0));
        for (row, cell) in self.rows.iter_mut().zip(cells) {
            row.resize(width, String::new());
            row.push(cell);
        }
    }

    pub fn write(&self, path: &Path, opts: &CsvOptions) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(opts.delimiter_byte()?)
            .flexible(true)
            .from_path(path)?;
        if let Some(h) = &self.headers {
            writer.write_record(h)?;
        }
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Reads one column of a CSV file as a series.
pub fn ingest_csv(path: &Path, column: &ColumnRef, opts: &CsvOptions) -> Result<TimeSeries> {
    CsvTable::read(path, opts)?.series(column, opts)
}

/// Writes the `index,true_value` sidecar.
pub fn write_truth(path: &Path, truth: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "true_value"])?;
    for &(i, v) in truth {
        w.write_record([i.to_string(), fmt_exact(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth(path: &Path) -> Result<Vec<(usize, f64)>> {
    if !path.exists() {
        return Err(ImputeError::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut truth = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let bad = |token: &str| ImputeError::ParseError {
            row: r + 1,
            token: token.to_string(),
        };
        let idx = rec.get(0).unwrap_or("");
        let val = rec.get(1).unwrap_or("");
        let i = idx.trim().parse::<usize>().map_err(|_| bad(idx))?;
        let v = val.trim().parse::<f64>().map_err(|_| bad(val))?;
        truth.push((i, v));
    }
    Ok(truth)
}

/// Shortest representation that parses back to the same bits.
pub fn fmt_exact(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

/// Nine significant digits; `NaN` for undefined values.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (8 - magnitude).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding can carry into an extra digit (9.9999999996 -> 10.00000000)
        let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
        let significant = digits.trim_start_matches('0').len();
        if significant > 9 && decimals > 0 {
            format!("{v:.prec$}", prec = decimals - 1)
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), fmt_sig)
}

//! CSV and matrix text I/O. Numbers are written with 17 significant digits
//! so they read back bit-exactly; files are replaced atomically.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::function::HalfLineGrid;
use crate::linalg::Matrix;

/// `{:.16e}`, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = ::csv::Writer::from_writer(Vec::new());
        let io = |e: ::csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_num(v))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }
}

/// Write through a temporary file in the target directory, then rename, so
/// a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Parse `z,value` rows; a non-numeric first row is taken as a header.
pub fn parse_samples(text: &str) -> Result<(HalfLineGrid, Vec<f64>)> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut zs = Vec::new();
    let mut vs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "sample row {} has {} fields, expected 2",
                i + 1,
                rec.len()
            )));
        }
        let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match parsed {
            (Ok(z), Ok(v)) => {
                zs.push(z);
                vs.push(v);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "sample row {}: cannot parse `{},{}`",
                    i + 1,
                    &rec[0],
                    &rec[1]
                )))
            }
        }
    }
    Ok((HalfLineGrid::new(zs)?, vs))
}

pub fn read_samples(path: &Path) -> Result<(HalfLineGrid, Vec<f64>)> {
    parse_samples(&fs::read_to_string(path)?)
}

/// Dense square matrix, one row per line, entries separated by commas or
/// whitespace.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::InvalidMatrix(format!("bad entry `{s}`")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

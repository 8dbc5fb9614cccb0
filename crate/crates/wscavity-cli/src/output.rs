//! Tables, their CSV/JSON renderings and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Self::Bool(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Num)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form remarks carried into the JSON body and the manifest.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_float(*x).unwrap_or_else(|| x.to_string()),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(t) => t.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Empty => String::new(),
                })
                .collect();
            w.write_record(&fields).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Numbers are emitted with the same digits as the CSV; non-finite values
    /// become null.
    pub fn to_json(&self, command: &str) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("string serialises");
        let cell = |c: &Cell| match c {
            Cell::Num(x) => format_float(*x).unwrap_or_else(|| "null".into()),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => quote(t),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => "null".into(),
        };
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"command\": {},\n", quote(command)));
        out.push_str(&format!(
            "  \"columns\": {},\n",
            list(self.columns.iter().map(|c| quote(c)).collect())
        ));
        out.push_str("  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&list(row.iter().map(cell).collect()));
        }
        out.push_str(if self.rows.is_empty() { "],\n" } else { "\n  ],\n" });
        out.push_str(&format!("  \"notes\": {}\n}}\n", list(self.notes.iter().map(|n| quote(n)).collect())));
        out
    }

    pub fn render(&self, format: Format, command: &str) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json(command)),
        }
    }
}

/// Provenance record written next to every data file.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub library_version: &'static str,
    pub command: String,
    pub config_path: Option<String>,
    pub config_sha256: String,
    pub seed: u64,
    pub format: Format,
    pub quick: bool,
    pub unit_system: &'static str,
    pub data_sha256: String,
    pub notes: Vec<String>,
}

pub const UNIT_SYSTEM: &str =
    "inputs in SI with explicit suffixes (Hz-type frequencies converted to rad/s); lattice depths in E_R; outputs dimensionless unless the column name carries a unit";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp-{}", std::process::id()));
    let tmp = dir.join(name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(CliError::Io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "x", "label"]);
        t.push(vec![3usize.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![4usize.into(), f64::INFINITY.into(), Cell::Empty]);
        t.note("one");
        t
    }

    #[test]
    fn float_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            let s = format_float(x).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().trim_start_matches('-').len(), 18);
        }
        assert!(format_float(f64::NAN).is_none());
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,x,label");
        assert_eq!(lines[1], "3,1.0000000000000001e-1,\"a,b\"");
        assert_eq!(lines[2], "4,inf,");
    }

    #[test]
    fn json_mirrors_csv_values() {
        let t = sample();
        let json = t.to_json("demo");
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"][0][1].as_f64().unwrap(), 0.1);
        assert!(v["rows"][1][1].is_null());
        assert_eq!(v["columns"][2], "label");
        assert!(json.contains("1.0000000000000001e-1"));
        let empty = Table::new(&["a"]).to_json("e");
        assert!(serde_json::from_str::<serde_json::Value>(&empty).is_ok());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(manifest_path(&p).file_name().unwrap(), "out.csv.manifest.json");
        assert!(write_atomic(&dir.path().join("missing/x.csv"), "c").is_err());
    }
}

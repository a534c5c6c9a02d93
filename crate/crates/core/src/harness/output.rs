//! Result tables and run directories.
//!
//! Every row written into a run directory ends with a `scenario_hash` column. Files are only ever
//! appended to, and appending rows of a different hash to an existing file is refused.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::link::LinkReport;
use super::sweep::SweepResult;
use crate::dimensioning::{fmt_num, DimensioningReport};
use crate::error::{Error, Result};
use crate::powermodel::PowerRow;

pub const HASH_COLUMN: &str = "scenario_hash";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    /// File extension inside a run directory. JSON results are stored one object per line.
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(fmt_num(*v)),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Named result table with fixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn dimensioning(name: &'static str, reports: &[DimensioningReport]) -> Self {
        let mut t = Table::new(name, &DimensioningReport::CSV_HEADER);
        for r in reports {
            t.push(vec![
                r.bw_per_wavelength_ghz.into(),
                r.min_sampling_rate_ghz.into(),
                r.zone_index.into(),
                r.arof_bw_ghz.into(),
                r.arof_rate_gbps.into(),
                r.drof_bw_ghz.into(),
                r.drof_rate_gbps.into(),
                r.bandwidth_ratio.into(),
                r.rate_ratio.into(),
            ]);
        }
        t
    }

    pub fn power(name: &'static str, rows: &[PowerRow]) -> Self {
        let mut t = Table::new(name, &["n_t", "arof_watts", "drof_watts"]);
        for r in rows {
            t.push(vec![r.n_t.into(), r.arof_watts.into(), r.drof_watts.into()]);
        }
        t
    }

    fn push_link(&mut self, r: &LinkReport) {
        for c in &r.channels {
            self.push(vec![
                r.kind.as_str().into(),
                r.wdm_channels.into(),
                r.laser_power_dbm.into(),
                c.channel.into(),
                c.evm_percent.into(),
            ]);
        }
    }

    pub fn link(report: &LinkReport) -> Self {
        let mut t = Table::new("link", &EVM_COLUMNS);
        t.push_link(report);
        t
    }

    /// Per-channel EVM of every successful point.
    pub fn sweep(result: &SweepResult) -> Self {
        let mut t = Table::new("sweep", &EVM_COLUMNS);
        for r in result.points.iter().filter_map(|p| p.report.as_ref()) {
            t.push_link(r);
        }
        t
    }

    pub fn dynamic_range(result: &SweepResult) -> Self {
        let mut t = Table::new("dynrange", &["kind", "wdm", "threshold", "dynamic_range_db"]);
        for d in &result.dynamic_ranges {
            t.push(vec![
                d.kind.as_str().into(),
                d.wdm.into(),
                d.threshold_percent.into(),
                d.dynamic_range_db.into(),
            ]);
        }
        t
    }

    /// Failed sweep points, or `None` when the grid is complete.
    pub fn failures(result: &SweepResult) -> Option<Self> {
        let mut t = Table::new("failures", &["kind", "wdm", "laser_dbm", "error"]);
        for p in result.failed() {
            t.push(vec![
                p.kind.as_str().into(),
                p.wdm.into(),
                p.laser_dbm.into(),
                p.error.as_deref().unwrap_or_default().into(),
            ]);
        }
        (!t.rows.is_empty()).then_some(t)
    }

    fn header(&self, hash: Option<&str>) -> Vec<&str> {
        let mut h = self.columns.clone();
        if hash.is_some() {
            h.push(HASH_COLUMN);
        }
        h
    }

    fn csv_rows(&self, hash: Option<&str>, with_header: bool) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if with_header {
            w.write_record(self.header(hash)).map_err(csv_err)?;
        }
        for row in &self.rows {
            let mut rec: Vec<String> = row.iter().map(Cell::csv).collect();
            if let Some(h) = hash {
                rec.push(h.to_string());
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    fn json_objects(&self, hash: Option<&str>) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let mut m: Map<String, Value> = self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                if let Some(h) = hash {
                    m.insert(HASH_COLUMN.into(), Value::from(h));
                }
                Value::Object(m)
            })
            .collect()
    }

    /// Standalone rendering: CSV with header, or a JSON array of row objects.
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => Ok(String::from_utf8(self.csv_rows(None, true)?).expect("utf-8 csv")),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json_objects(None)).expect("json rows");
                s.push('\n');
                Ok(s)
            }
        }
    }
}

const EVM_COLUMNS: [&str; 5] = ["kind", "wdm", "laser_dbm", "channel", "evm_percent"];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("{other:?}")),
    }
}

/// Output directory of one run, `<root>/<UTC timestamp>_<hash prefix>`.
#[derive(Debug, Clone)]
pub struct RunDir {
    path: PathBuf,
    hash: String,
}

impl RunDir {
    pub fn create(root: &Path, hash: &str) -> Result<Self> {
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
        let prefix: String = hash.chars().take(8).collect();
        Self::open(root.join(format!("{stamp}_{prefix}")), hash)
    }

    /// Use `path` as the run directory, creating it if needed.
    pub fn open(path: PathBuf, hash: &str) -> Result<Self> {
        fs::create_dir_all(&path)?;
        Ok(Self {
            path,
            hash: hash.to_string(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Append `table` to `<name>.<ext>`, checking the provenance of rows already there.
    pub fn append(&self, table: &Table, format: OutputFormat) -> Result<PathBuf> {
        let file = self.path.join(format!("{}.{}", table.name, format.extension()));
        let exists = file.exists();
        if exists {
            self.check(&file, table, format)?;
        }
        let bytes = match format {
            OutputFormat::Csv => table.csv_rows(Some(&self.hash), !exists)?,
            OutputFormat::Json => table
                .json_objects(Some(&self.hash))
                .iter()
                .flat_map(|v| {
                    let mut line = serde_json::to_vec(v).expect("json row");
                    line.push(b'\n');
                    line
                })
                .collect(),
        };
        OpenOptions::new().create(true).append(true).open(&file)?.write_all(&bytes)?;
        Ok(file)
    }

    fn check(&self, file: &Path, table: &Table, format: OutputFormat) -> Result<()> {
        let mismatch = |found: String| Error::Provenance {
            file: file.display().to_string(),
            expected: self.hash.clone(),
            found,
        };
        match format {
            OutputFormat::Csv => {
                let mut r = csv::Reader::from_path(file).map_err(csv_err)?;
                let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
                if header != table.header(Some(&self.hash)) {
                    return Err(Error::Config(format!("{}: unexpected header {header:?}", file.display())));
                }
                for rec in r.records() {
                    let rec = rec.map_err(csv_err)?;
                    let found = rec.get(rec.len().saturating_sub(1)).unwrap_or_default();
                    if found != self.hash {
                        return Err(mismatch(found.to_string()));
                    }
                }
            }
            OutputFormat::Json => {
                for line in fs::read_to_string(file)?.lines().filter(|l| !l.trim().is_empty()) {
                    let v: Value = serde_json::from_str(line).map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
                    let found = v.get(HASH_COLUMN).and_then(Value::as_str).unwrap_or_default();
                    if found != self.hash {
                        return Err(mismatch(found.to_string()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("demo", &["kind", "n", "x"]);
        t.push(vec!["arof".into(), 3usize.into(), 0.1.into()]);
        t.push(vec!["drof".into(), 4usize.into(), f64::INFINITY.into()]);
        t
    }

    #[test]
    fn standalone_rendering() {
        assert_eq!(table().render(OutputFormat::Csv).unwrap(), "kind,n,x\narof,3,0.1\ndrof,4,inf\n");
        let v: Value = serde_json::from_str(&table().render(OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(v[0]["x"], 0.1);
        assert_eq!(v[1]["x"], "inf");
        let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["kind", "n", "x"]);
    }

    #[test]
    fn append_keeps_one_header_and_checks_hash() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::open(dir.path().join("r"), "abc").unwrap();
        let f = run.append(&table(), OutputFormat::Csv).unwrap();
        run.append(&table(), OutputFormat::Csv).unwrap();
        let text = fs::read_to_string(&f).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap(), "kind,n,x,scenario_hash");
        assert!(text.lines().skip(1).all(|l| l.ends_with(",abc")));

        let other = RunDir::open(dir.path().join("r"), "def").unwrap();
        assert!(matches!(other.append(&table(), OutputFormat::Csv), Err(Error::Provenance { .. })));
        assert_eq!(fs::read_to_string(&f).unwrap(), text);
    }

    #[test]
    fn json_lines_append_and_check() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::open(dir.path().to_path_buf(), "abc").unwrap();
        let f = run.append(&table(), OutputFormat::Json).unwrap();
        run.append(&table(), OutputFormat::Json).unwrap();
        let text = fs::read_to_string(&f).unwrap();
        assert_eq!(text.lines().count(), 4);
        let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first[HASH_COLUMN], "abc");
        let other = RunDir::open(dir.path().to_path_buf(), "zzz").unwrap();
        assert!(matches!(other.append(&table(), OutputFormat::Json), Err(Error::Provenance { .. })));
    }

    #[test]
    fn run_dir_name() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::create(dir.path(), "0123456789abcdef").unwrap();
        let name = run.path().file_name().unwrap().to_str().unwrap().to_string();
        assert!(name.ends_with("Z_01234567"), "{name}");
        assert_eq!(name.len(), "20260101T000000Z_01234567".len());
    }
}

//! Result tables: CSV data files plus a TOML metadata sidecar.
//!
//! Numbers are written in scientific notation with 17 significant digits, so
//! every `f64` survives a round trip. Files are first written under a
//! temporary name in the output directory and renamed once all of them are
//! complete, so an error never leaves a partial result behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Diagnostic, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// One rectangular data file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// File stem, e.g. `transfer-sweep` or `transfer-disorder_trials`.
    pub name: String,
    /// Lines written as `# …` comments above the header (units, conventions).
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            out.push_str("# ");
            out.push_str(n);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        out
    }
}

/// A table read back from disk, all cells as text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedTable {
    pub fn number(&self, row: usize, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row)?.get(c)?.parse().ok()
    }
}

pub fn parse_csv(text: &str) -> Result<ParsedTable, csv::Error> {
    let notes = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(ParsedTable {
        notes,
        columns,
        rows,
    })
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    /// The first table is the experiment's primary data file.
    pub tables: Vec<ResultTable>,
    /// Scalar results, written to the sidecar's `[summary]` section.
    pub summary: toml::Table,
}

/// Sidecar contents: artifact version, seed, wall time, the originating config
/// and the scalar summary.
pub fn metadata(output: &RunOutput, wall_time_s: f64) -> String {
    let mut t = toml::Table::new();
    t.insert("fluxion_version".into(), env!("CARGO_PKG_VERSION").into());
    t.insert("experiment".into(), output.config.experiment.name().into());
    t.insert(
        "seed".into(),
        toml::Value::Integer(output.config.seed as i64),
    );
    t.insert("wall_time_s".into(), wall_time_s.into());
    t.insert(
        "files".into(),
        toml::Value::Array(
            output
                .tables
                .iter()
                .map(|tb| format!("{}.csv", tb.name).into())
                .collect(),
        ),
    );
    let config: toml::Table =
        toml::from_str(&output.config.to_toml()).expect("config serializes to TOML");
    t.insert("config".into(), config.into());
    t.insert("summary".into(), output.summary.clone().into());
    toml::to_string(&t).expect("metadata serializes")
}

/// Rebuilds the originating config from a sidecar.
pub fn config_from_metadata(text: &str) -> Result<RunConfig, Vec<Diagnostic>> {
    let t: toml::Table = toml::from_str(text)
        .map_err(|e| vec![Diagnostic::new("metadata", e.message().to_string())])?;
    let config = t
        .get("config")
        .and_then(|c| c.as_table())
        .ok_or_else(|| vec![Diagnostic::new("metadata", "missing [config] section")])?;
    RunConfig::parse(&toml::to_string(config).expect("table serializes"), None)
}

fn temp_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!(".{name}.tmp-{}", std::process::id()))
}

/// Writes all tables and the sidecar into `dir`, returning the final paths.
pub fn write_output(
    output: &RunOutput,
    dir: &Path,
    wall_time_s: f64,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = output
        .tables
        .iter()
        .map(|t| (format!("{}.csv", t.name), t.to_csv()))
        .collect();
    files.push((
        format!("{}.meta.toml", output.config.experiment.name()),
        metadata(output, wall_time_s),
    ));

    let mut staged = Vec::with_capacity(files.len());
    let result = (|| {
        for (name, body) in &files {
            let tmp = temp_path(dir, name);
            staged.push(tmp.clone());
            let mut f = fs::File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        let mut finals = Vec::with_capacity(files.len());
        for ((name, _), tmp) in files.iter().zip(&staged) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest)?;
            finals.push(dest);
        }
        Ok(finals)
    })();
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

//! Output tables written as CSV or JSON with fixed column order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use factor_bench::dataset::format_g10;
use factor_bench::diagnostics::HistogramBin;
use factor_bench::estimators::Exclusion;
use factor_bench::DescriptiveStats;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_g10(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // parse the 10-digit text so both formats carry the same value
            Cell::Num(v) if v.is_finite() => {
                serde_json::from_str(&format_g10(*v)).unwrap_or_else(|_| json!(format_g10(*v)))
            }
            Cell::Num(v) => json!(format_g10(*v)),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
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
        Cell::Int(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: impl Into<String>, columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            name: name.into(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let mut s = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": rows }))
                    .expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// Destination directory plus the chosen format.
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn table(&mut self, t: &Table) -> Result<()> {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        self.raw(&format!("{}.{ext}", t.name), t.render(self.format).as_bytes())
    }

    /// Writes a file whose format does not follow `--format`.
    pub fn raw(&mut self, file: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(file);
        let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        f.write_all(bytes)?;
        self.written.push(path);
        Ok(())
    }
}

/// Six-number summaries side by side, one column per series.
pub fn describe_table(name: &str, series: &[(String, DescriptiveStats)]) -> Table {
    let mut t = Table::new(name, std::iter::once("statistic".to_string()).chain(series.iter().map(|(c, _)| c.clone())));
    for row in 0..6 {
        let label = series.first().map_or("", |(_, s)| s.rows()[row].0);
        let mut cells = vec![Cell::from(label)];
        cells.extend(series.iter().map(|(_, s)| Cell::Num(s.rows()[row].1)));
        t.push(cells);
    }
    t
}

pub fn histogram_table(name: &str, bins: &[HistogramBin<f64>]) -> Table {
    let mut t = Table::new(name, ["lower", "upper", "count"]);
    for b in bins {
        t.push(vec![b.lower.into(), b.upper.into(), b.count.into()]);
    }
    t
}

/// Exclusions tagged with the context they arose in.
#[derive(Default)]
pub struct Exclusions {
    tags: Vec<&'static str>,
    rows: Vec<(Vec<String>, Exclusion)>,
}

impl Exclusions {
    pub fn new(tags: &[&'static str]) -> Self {
        Exclusions {
            tags: tags.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn extend<'a>(&mut self, tags: &[&str], items: impl IntoIterator<Item = &'a Exclusion>) {
        debug_assert_eq!(tags.len(), self.tags.len());
        for e in items {
            self.rows.push((tags.iter().map(|s| s.to_string()).collect(), e.clone()));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn table(&self, name: &str) -> Table {
        let columns = self.tags.iter().copied().chain(["identity", "permno", "cusip", "reason"]);
        let mut t = Table::new(name, columns);
        for (tags, e) in &self.rows {
            let mut cells: Vec<Cell> = tags.iter().map(|s| Cell::from(s.as_str())).collect();
            cells.extend([
                e.identity.label.as_str().into(),
                e.identity.permno.as_str().into(),
                e.identity.cusip.as_str().into(),
                e.reason.as_str().into(),
            ]);
            t.push(cells);
        }
        t
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

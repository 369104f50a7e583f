use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use summa_core::scalar::{fmt_float, Scalar};
use summa_core::{NormValue, Q};

use crate::Format;

/// A report cell. Rationals render as `p/q` strings and floats keep 12 significant
/// digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Rational(Q),
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<Cell>),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn int(n: usize) -> Cell {
        Cell::Int(n as i64)
    }

    pub fn rationals(xs: &[Q]) -> Cell {
        Cell::List(xs.iter().cloned().map(Cell::Rational).collect())
    }

    pub fn indices(xs: &[usize]) -> Cell {
        Cell::List(xs.iter().map(|&x| Cell::int(x)).collect())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Rational(x) => Value::String(x.to_string()),
            Cell::Float(x) => float_json(*x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::List(xs) => Value::Array(xs.iter().map(Cell::to_json).collect()),
            Cell::Empty => Value::Null,
        }
    }

    fn to_text(&self) -> String {
        match self {
            Cell::Rational(x) => x.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::List(xs) => {
                let parts: Vec<String> = xs.iter().map(Cell::to_text).collect();
                format!("[{}]", parts.join(", "))
            }
            Cell::Empty => String::new(),
        }
    }
}

fn float_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(fmt_float(x));
    }
    let rounded: f64 = fmt_float(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

impl From<Q> for Cell {
    fn from(x: Q) -> Self {
        Cell::Rational(x)
    }
}

impl From<&Q> for Cell {
    fn from(x: &Q) -> Self {
        Cell::Rational(x.clone())
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&Scalar> for Cell {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Exact(x) => Cell::Rational(x.clone()),
            Scalar::Float(x) => Cell::Float(*x),
        }
    }
}

impl From<Scalar> for Cell {
    fn from(s: Scalar) -> Self {
        Cell::from(&s)
    }
}

impl From<&NormValue> for Cell {
    fn from(v: &NormValue) -> Self {
        Cell::from(v.to_scalar())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Instances examined.
    pub count: usize,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            passed,
            count: 1,
            witness: None,
        }
    }
}

/// Output of one command: echoed command line, named values, tables and checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub values: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    pub fn value(&mut self, name: &str, v: impl Into<Cell>) -> &mut Self {
        self.values.push((name.to_string(), v.into()));
        self
    }

    pub fn check(&mut self, name: &str, passed: bool) -> &mut Self {
        self.checks.push(Check::new(name, passed));
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn summary(&self) -> (usize, usize) {
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        (self.checks.len() - failed, failed)
    }

    fn render_json(&self) -> String {
        let values: Map<String, Value> = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "columns": t.columns,
                    "rows": t.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "count": c.count, "witness": c.witness}))
            .collect();
        let (passed, failed) = self.summary();
        let doc = json!({
            "command": self.command,
            "values": values,
            "tables": tables,
            "checks": checks,
            "summary": {"passed": passed, "failed": failed, "status": if failed == 0 { "pass" } else { "fail" }},
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("reports serialize");
        out.push('\n');
        out
    }

    fn render_csv(&self) -> String {
        let mut blocks: Vec<Vec<u8>> = Vec::new();
        let block = |header: &[String], rows: Vec<Vec<String>>| -> Vec<u8> {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for r in rows {
                w.write_record(&r).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        };
        if !self.values.is_empty() {
            let rows = self.values.iter().map(|(k, v)| vec![k.clone(), v.to_text()]).collect();
            blocks.push(block(&["name".into(), "value".into()], rows));
        }
        for t in &self.tables {
            let rows = t.rows.iter().map(|r| r.iter().map(Cell::to_text).collect()).collect();
            blocks.push(block(&t.columns, rows));
        }
        if !self.checks.is_empty() {
            let rows = self
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        if c.passed { "pass" } else { "fail" }.to_string(),
                        c.count.to_string(),
                        c.witness.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            let header: Vec<String> = ["check", "status", "count", "witness"].iter().map(|s| s.to_string()).collect();
            blocks.push(block(&header, rows));
        }
        let parts: Vec<String> = blocks.into_iter().map(|b| String::from_utf8(b).expect("utf-8")).collect();
        parts.join("\n")
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "$ {}", self.command);
        if !self.values.is_empty() {
            let width = self.values.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (k, v) in &self.values {
                let _ = writeln!(out, "  {k:<width$}  {}", v.to_text());
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::to_text).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|i| {
                    cells
                        .iter()
                        .filter_map(|r| r.get(i))
                        .chain(std::iter::once(&t.columns[i]))
                        .map(|s| s.chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |row: &[String]| -> String {
                let parts: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                format!("  {}", parts.join("  ").trim_end())
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            for c in &self.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = write!(out, "  {status}  {} ({})", c.name, c.count);
                if let Some(w) = &c.witness {
                    let _ = write!(out, "  witness: {w}");
                }
                let _ = writeln!(out);
            }
        }
        let (passed, failed) = self.summary();
        let _ = writeln!(out, "\n{passed} passed, {failed} failed");
        out
    }
}

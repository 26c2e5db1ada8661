//! Persisted results: check records and scan tables.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// The comparison a check records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "relation", content = "lower")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// `lower <= observed <= bound`
    Within(f64),
}

/// One verified inequality. `status` is `Pass` exactly when the recorded
/// comparison holds; a NaN observation fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub observed: f64,
    pub bound: f64,
    #[serde(flatten)]
    pub relation: Relation,
    pub anchor: String,
    pub context: String,
}

impl CheckReport {
    fn make(name: &str, observed: f64, bound: f64, relation: Relation, anchor: &str, context: String) -> Self {
        let holds = match relation {
            Relation::AtMost => observed <= bound,
            Relation::AtLeast => observed >= bound,
            Relation::Within(lo) => lo <= observed && observed <= bound,
        };
        CheckReport {
            name: name.to_string(),
            status: if holds { Status::Pass } else { Status::Fail },
            observed,
            bound,
            relation,
            anchor: anchor.to_string(),
            context,
        }
    }

    pub fn at_most(name: &str, observed: f64, bound: f64, anchor: &str, context: impl Into<String>) -> Self {
        Self::make(name, observed, bound, Relation::AtMost, anchor, context.into())
    }

    pub fn at_least(name: &str, observed: f64, bound: f64, anchor: &str, context: impl Into<String>) -> Self {
        Self::make(name, observed, bound, Relation::AtLeast, anchor, context.into())
    }

    pub fn within(
        name: &str,
        observed: f64,
        lower: f64,
        upper: f64,
        anchor: &str,
        context: impl Into<String>,
    ) -> Self {
        Self::make(name, observed, upper, Relation::Within(lower), anchor, context.into())
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        let rel = match self.relation {
            Relation::AtMost => format!("<= {:.6e}", self.bound),
            Relation::AtLeast => format!(">= {:.6e}", self.bound),
            Relation::Within(lo) => format!("in [{:.6e}, {:.6e}]", lo, self.bound),
        };
        write!(
            f,
            "[{tag}] {}: observed {:.6e} {rel} ({})",
            self.name, self.observed, self.anchor
        )
    }
}

/// One JSON record per line.
pub fn write_reports<W: Write>(out: &mut W, reports: &[CheckReport]) -> Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).map_err(|e| Error::config("report", e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_reports<R: BufRead>(input: R) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// A named table of real columns with configuration metadata and free-text
/// footer lines (fit summaries, skipped rows).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

// Printed first, in this order, on the header line.
const HEADER_KEYS: [&str; 3] = ["grid", "radii", "tol"];

impl ScanTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        ScanTable {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.to_string(), value.to_string());
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a column; panics on an unknown name.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self
            .column_index(name)
            .unwrap_or_else(|| panic!("table {} has no column {name}", self.name));
        self.rows.iter().map(|r| r[i]).collect()
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// `# name=.. grid=.. radii=.. tol=..`, further `# key=value` lines, the
    /// CSV body, then `# note: ..` footer lines.
    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        let get = |k: &str| self.meta.get(k).map(String::as_str).unwrap_or("-");
        writeln!(
            out,
            "# name={} grid={} radii={} tol={}",
            self.name,
            get("grid"),
            get("radii"),
            get("tol")
        )?;
        for (k, v) in &self.meta {
            if !HEADER_KEYS.contains(&k.as_str()) {
                writeln!(out, "# {k}={v}")?;
            }
        }
        let mut body = csv::Writer::from_writer(Vec::new());
        body.write_record(&self.columns)
            .and_then(|_| {
                for r in &self.rows {
                    body.write_record(r.iter().map(|v| v.to_string()))?;
                }
                Ok(())
            })
            .map_err(|e| Error::config("table", e.to_string()))?;
        let bytes = body
            .into_inner()
            .map_err(|e| Error::config("table", e.to_string()))?;
        out.write_all(&bytes)?;
        for n in &self.notes {
            writeln!(out, "# note: {n}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut text = String::new();
        let mut table = ScanTable::new("", &[]);
        let mut first = true;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if first {
                    for tok in rest.split_whitespace() {
                        match tok.split_once('=') {
                            Some(("name", v)) => table.name = v.to_string(),
                            Some((k, v)) => table.set_meta(k, v),
                            None => {}
                        }
                    }
                } else if let Some(n) = rest.strip_prefix("note:") {
                    table.notes.push(n.trim().to_string());
                } else if let Some((k, v)) = rest.split_once('=') {
                    table.set_meta(k, v);
                }
            } else if first {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected '# name=...' header".into(),
                });
            } else {
                text.push_str(&line);
                text.push('\n');
            }
            first = false;
        }
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let parse_err = |e: csv::Error| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        };
        table.columns = rdr
            .headers()
            .map_err(parse_err)?
            .iter()
            .map(str::to_string)
            .collect();
        for rec in rdr.records() {
            let rec = rec.map_err(parse_err)?;
            let row = rec
                .iter()
                .map(|v| {
                    v.parse::<f64>().map_err(|e| Error::Parse {
                        line: rec.position().map(|p| p.line() as usize).unwrap_or(0),
                        message: format!("'{v}': {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }
}

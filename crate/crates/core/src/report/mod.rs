//! Versioned report documents and their text, CSV and JSON renderings.

mod builders;

pub use builders::{
    bounds_report, string_report, table1_report, REFERENCE_ETAS, REFERENCE_SIN_THETA_BOUND,
    REFERENCE_TEMPLE_KATO, REFERENCE_TOLERANCE,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Schema identifier carried by every document.
pub const SCHEMA_VERSION: &str = "report-v1";

/// Significant digits in text and CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// One table cell. JSON keeps numbers at full precision; non-finite values
/// are stored as text so the document stays valid JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Null,
    Bool(bool),
    Int(i64),
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Number(x)
        } else if x.is_nan() {
            Cell::Text("nan".into())
        } else if x > 0.0 {
            Cell::Text("inf".into())
        } else {
            Cell::Text("-inf".into())
        }
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::num)
    }

    pub fn int(i: usize) -> Self {
        Cell::Int(i as i64)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// The value as printed in text and CSV output.
    pub fn render(&self) -> String {
        match self {
            Cell::Null => "-".into(),
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Number(x) => format_significant(*x, SIGNIFICANT_DIGITS),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

/// `x` with `digits` significant digits: positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return Cell::num(x).render();
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    // Rounding can carry into the next decade, e.g. 9.9999999999996.
    let sci = format!("{:.*e}", digits - 1, x);
    let exp = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if (-4..9).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tolerances: Tolerances<f64>,
}

impl Metadata {
    pub fn new(seed: u64, tolerances: Tolerances<f64>) -> Self {
        Self {
            tool: "ritzcert".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            tolerances,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub id: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(id: &str, title: &str, columns: &[&str]) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width in section {}",
            self.id
        );
        self.rows.push(row);
    }

    /// Cell in the first row whose leading cell is the text `key`.
    pub fn lookup(&self, key: &str, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows
            .iter()
            .find(|r| matches!(r.first(), Some(Cell::Text(t)) if t == key))
            .and_then(|r| r.get(c))
    }

    pub fn column(&self, column: &str) -> Option<Vec<&Cell>> {
        let c = self.columns.iter().position(|x| x == column)?;
        Some(self.rows.iter().map(|r| &r[c]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Note {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// `sinΘ_p = 1`, so no eigenvalue or eigenvector bound follows.
    NotApplicable,
    /// A check the report itself performs did not hold.
    CheckFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub command: String,
    pub metadata: Metadata,
    pub status: Status,
    pub sections: Vec<Section>,
    pub notes: Vec<Note>,
}

impl ReportDocument {
    pub fn new(command: &str, metadata: Metadata) -> Self {
        Self {
            schema: SCHEMA_VERSION.into(),
            command: command.into(),
            metadata,
            status: Status::Ok,
            sections: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, id: &str, text: impl Into<String>) {
        self.notes.push(Note {
            id: id.into(),
            text: text.into(),
        });
    }

    pub fn section(&self, id: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: "report".into(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::Parse {
                source_name: "report".into(),
                line: 1,
                message: format!("unsupported schema {:?}", doc.schema),
            });
        }
        Ok(doc)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        let _ = writeln!(
            out,
            "{} {} ({}), seed {}",
            m.tool, self.command, m.version, m.seed
        );
        let t = &m.tolerances;
        let rank = t
            .rank_tol
            .map_or("auto".to_string(), |r| format_significant(r, 3));
        let _ = writeln!(
            out,
            "tolerances: rank {rank}, symmetry {}, quadrature {}, secular {}",
            format_significant(t.sym_tol, 3),
            format_significant(t.quad_tol, 3),
            format_significant(t.secular_tol, 3)
        );
        let status = match self.status {
            Status::Ok => "ok",
            Status::NotApplicable => "bounds not applicable",
            Status::CheckFailed => "check failed",
        };
        let _ = writeln!(out, "status: {status}");
        for s in &self.sections {
            let _ = writeln!(out, "\n== {} ==", s.title);
            let cells: Vec<Vec<String>> = s
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::render).collect())
                .collect();
            let widths: Vec<usize> = (0..s.columns.len())
                .map(|c| {
                    cells
                        .iter()
                        .map(|r| r[c].chars().count())
                        .chain(std::iter::once(s.columns[c].chars().count()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |fields: &[String]| {
                fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, &w)| format!("{f:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(&s.columns));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out, "\n== Notes ==");
            for n in &self.notes {
                let _ = writeln!(out, "[{}] {}", n.id, n.text);
            }
        }
        out
    }

    /// One block per section: a header row led by `section`, then the rows
    /// led by the section id; blocks are separated by an empty record.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                w.write_record(std::iter::empty::<&str>())
                    .expect("in-memory write");
            }
            w.write_record(std::iter::once("section").chain(s.columns.iter().map(String::as_str)))
                .expect("in-memory write");
            for r in &s.rows {
                w.write_record(std::iter::once(s.id.clone()).chain(r.iter().map(Cell::render)))
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

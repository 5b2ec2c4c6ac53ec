//! Run reports and their two renderings.
//!
//! The machine form is pretty-printed JSON whose `schema` field is
//! [`SCHEMA`]. Maps are ordered and nothing depends on the clock, so one
//! spec with one seed always yields the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "modcoh-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: CommandEcho,
    pub checks: Vec<Check>,
    pub proofs: Vec<ProofTrace>,
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, Cell>,
    pub notes: Vec<String>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEcho {
    pub subcommand: String,
    pub spec: String,
    pub options: BTreeMap<String, Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub subject: Option<String>,
    pub status: String,
    pub passed: bool,
    pub evidence: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofTrace {
    pub goal: String,
    pub base: Vec<String>,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStep {
    pub rule: String,
    /// `b<k>` names the k-th base statement, `s<k>` an earlier step.
    pub premises: Vec<String>,
    pub selection: Vec<String>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Flag(bool),
    Number(f64),
    Text(String),
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Flag(b)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Number(x)
        } else {
            Cell::Text(x.to_string())
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Cell {
        Cell::Number(x as f64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Flag(b) => write!(f, "{b}"),
            Cell::Number(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub passed: bool,
    pub exit_code: u8,
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

impl Report {
    pub fn new(subcommand: &str, spec: &str) -> Report {
        Report {
            schema: SCHEMA.to_string(),
            command: CommandEcho {
                subcommand: subcommand.to_string(),
                spec: spec.to_string(),
                options: BTreeMap::new(),
            },
            checks: Vec::new(),
            proofs: Vec::new(),
            tables: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            outcome: Outcome {
                passed: true,
                exit_code: EXIT_PASS,
            },
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Cell>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    /// Sets the outcome from the checks: exit 0 only if every check passed.
    pub fn settle(&mut self) {
        let passed = self.checks.iter().all(|c| c.passed);
        self.outcome = Outcome {
            passed,
            exit_code: if passed { EXIT_PASS } else { EXIT_FAIL },
        };
    }

    /// Drops proof traces, keeping verdicts.
    pub fn truncate(&mut self) {
        self.proofs.clear();
    }

    pub fn to_machine(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn from_machine(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "modcoh {} ({})", self.command.subcommand, self.command.spec);
        if !self.command.options.is_empty() {
            let opts: Vec<String> = self.command.options.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "options: {}", opts.join(" "));
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\nchecks:");
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                let _ = write!(out, "  {mark} {:<width$}  {:<15}", c.name, c.status);
                if let Some(s) = &c.subject {
                    let _ = write!(out, "  {s}");
                }
                let _ = writeln!(out);
                if let Some(e) = &c.evidence {
                    let _ = writeln!(out, "       {:width$}  {e}", "");
                }
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n{}:", t.name);
            render_table(&mut out, t);
        }
        if !self.metrics.is_empty() {
            let _ = writeln!(out, "\nmetrics:");
            let width = self.metrics.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in &self.metrics {
                let _ = writeln!(out, "  {k:<width$}  {v}");
            }
        }
        for p in &self.proofs {
            let _ = writeln!(out, "\nproof of {}", p.goal);
            for (k, b) in p.base.iter().enumerate() {
                let _ = writeln!(out, "  b{k:<3} {b}");
            }
            for (k, s) in p.steps.iter().enumerate() {
                let sel = if s.selection.is_empty() {
                    String::new()
                } else {
                    format!("; {}", s.selection.join(", "))
                };
                let _ = writeln!(out, "  s{k:<3} {}    [{}({}{sel})]", s.output, s.rule, s.premises.join(", "));
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "\nnote: {n}");
        }
        let verdict = if self.outcome.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "\nresult: {verdict} (exit {})", self.outcome.exit_code);
        out
    }
}

fn render_table(out: &mut String, t: &Table) {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::to_string).collect()).collect();
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|k| {
            cells
                .iter()
                .filter_map(|r| r.get(k).map(String::len))
                .chain([t.columns[k].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("  {}", parts.join("  ").trim_end())
    };
    let _ = writeln!(out, "{}", line(&t.columns));
    for r in &cells {
        let _ = writeln!(out, "{}", line(r));
    }
}

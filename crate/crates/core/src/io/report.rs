use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::outranking::AssignmentResult;
use crate::robustness::RobustnessCell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "md" | "markdown" => Ok(Self::Markdown),
            _ => Err(format!("unknown report format {s:?} (json, csv, markdown)")),
        }
    }
}

/// One portfolio line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioLine {
    pub weights: String,
    pub budget: String,
    pub amount: f64,
    pub profile: String,
    pub feasible: bool,
    pub objective: u64,
    pub total_cost: f64,
    pub selected: Vec<String>,
}

impl From<&RobustnessCell> for PortfolioLine {
    fn from(c: &RobustnessCell) -> Self {
        Self {
            weights: c.weights.clone(),
            budget: c.budget.label.clone(),
            amount: c.budget.amount,
            profile: c.budget.profile.clone(),
            feasible: !c.solution.infeasible,
            objective: c.solution.objective,
            total_cost: c.solution.total_cost,
            selected: c.solution.selected.clone(),
        }
    }
}

/// Tabular output of a run. Empty tables still print their header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "table", content = "rows", rename_all = "snake_case")]
pub enum RunReport {
    Assignments(Vec<AssignmentResult>),
    Portfolios(Vec<PortfolioLine>),
}

impl RunReport {
    fn header(&self) -> &'static [&'static str] {
        match self {
            RunReport::Assignments(_) => &["action", "descending", "ascending", "interval"],
            RunReport::Portfolios(_) => &[
                "weights",
                "budget",
                "amount",
                "profile",
                "feasible",
                "objective",
                "total_cost",
                "selected",
            ],
        }
    }

    fn cells(&self) -> Vec<Vec<String>> {
        match self {
            RunReport::Assignments(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.action.clone(),
                        format!("C{}", r.descending),
                        format!("C{}", r.ascending),
                        r.interval.to_string(),
                    ]
                })
                .collect(),
            RunReport::Portfolios(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.weights.clone(),
                        r.budget.clone(),
                        format!("{}", r.amount),
                        r.profile.clone(),
                        r.feasible.to_string(),
                        r.objective.to_string(),
                        format!("{}", r.total_cost),
                        r.selected.join(" "),
                    ]
                })
                .collect(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            ReportFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.header()).expect("in-memory write");
                for row in self.cells() {
                    w.write_record(&row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            ReportFormat::Markdown => self.markdown(),
        }
    }

    fn markdown(&self) -> String {
        let header = self.header();
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
        let feasible_col = header.iter().position(|h| *h == "feasible");
        for mut row in self.cells() {
            if let Some(i) = feasible_col {
                row[i] = if row[i] == "true" { "✓".into() } else { "×".into() };
            }
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }
}

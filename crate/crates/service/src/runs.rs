//! Sorting, selection and robustness runs as pure functions of a snapshot.

use serde::{Deserialize, Serialize};

use priosel_core::domain::Scenario;
use priosel_core::io::{scenario_hash, sha256_hex, AssignmentRun};
use priosel_core::ladder::PriorityLadder;
use priosel_core::outranking::{assign, AssignmentResult};
use priosel_core::robustness::{robustness_matrix, select, BudgetCase, PipelineError, RobustnessMatrix};
use priosel_core::solver::PortfolioSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Sort,
    Select,
    Robustness,
}

/// Everything a run reads. The scenario is copied in so a run can be
/// replayed after the scenario has been edited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunInput {
    Sort {
        scenario: Scenario,
        weights: String,
        lambda: f64,
    },
    Select {
        scenario: Scenario,
        assignments_run: String,
        assignments: Vec<AssignmentResult>,
        budget: BudgetCase,
    },
    Robustness {
        scenario: Scenario,
        weight_sets: Vec<String>,
        budgets: Vec<BudgetCase>,
        lambda: f64,
    },
}

impl RunInput {
    pub fn kind(&self) -> RunKind {
        match self {
            RunInput::Sort { .. } => RunKind::Sort,
            RunInput::Select { .. } => RunKind::Select,
            RunInput::Robustness { .. } => RunKind::Robustness,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        match self {
            RunInput::Sort { scenario, .. }
            | RunInput::Select { scenario, .. }
            | RunInput::Robustness { scenario, .. } => scenario,
        }
    }

    /// SHA-256 of the canonical JSON of the input.
    pub fn snapshot_hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("inputs serialize").as_bytes())
    }

    /// λ, budget and profile, for listing runs without their payload.
    pub fn parameters(&self) -> serde_json::Value {
        match self {
            RunInput::Sort { weights, lambda, .. } => serde_json::json!({ "weights": weights, "lambda": lambda }),
            RunInput::Select {
                assignments_run,
                budget,
                ..
            } => serde_json::json!({
                "assignments_run": assignments_run,
                "budget": budget.amount,
                "budget_label": budget.label,
                "profile": budget.profile,
            }),
            RunInput::Robustness {
                weight_sets,
                budgets,
                lambda,
                ..
            } => serde_json::json!({ "weight_sets": weight_sets, "budgets": budgets, "lambda": lambda }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectPayload {
    pub ladder: PriorityLadder,
    pub solution: PortfolioSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RunPayload {
    Sort(AssignmentRun),
    Select(SelectPayload),
    Robustness(RobustnessMatrix),
}

pub fn execute(input: &RunInput) -> Result<RunPayload, PipelineError> {
    match input {
        RunInput::Sort {
            scenario,
            weights,
            lambda,
        } => Ok(RunPayload::Sort(AssignmentRun {
            scenario: scenario.name.clone(),
            scenario_hash: scenario_hash(scenario),
            weights: weights.clone(),
            lambda: *lambda,
            assignments: assign(scenario, weights, *lambda)?,
        })),
        RunInput::Select {
            scenario,
            assignments,
            budget,
            ..
        } => {
            let (ladder, solution) = select(scenario, assignments, budget.amount, &budget.profile)?;
            Ok(RunPayload::Select(SelectPayload { ladder, solution }))
        }
        RunInput::Robustness {
            scenario,
            weight_sets,
            budgets,
            lambda,
        } => Ok(RunPayload::Robustness(robustness_matrix(
            scenario,
            weight_sets,
            budgets,
            *lambda,
        )?)),
    }
}

/// Immutable once written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub scenario_id: String,
    pub kind: RunKind,
    pub snapshot_hash: String,
    pub parameters: serde_json::Value,
    pub created_at: String,
    pub input: RunInput,
    pub result: RunPayload,
}

impl RunRecord {
    pub fn infeasibility(&self) -> Option<&priosel_core::solver::InfeasibilityReport> {
        match &self.result {
            RunPayload::Select(p) => p.solution.infeasibility.as_ref(),
            _ => None,
        }
    }
}

/// Re-executes the stored input; true when the payload is reproduced byte
/// for byte.
pub fn replay(record: &RunRecord) -> Result<bool, PipelineError> {
    let again = execute(&record.input)?;
    let a = serde_json::to_string(&again).expect("payloads serialize");
    let b = serde_json::to_string(&record.result).expect("payloads serialize");
    Ok(a == b && record.input.snapshot_hash() == record.snapshot_hash)
}

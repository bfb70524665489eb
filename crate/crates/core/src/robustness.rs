//! Re-runs the sort-then-select pipeline over weight sets, budgets and
//! constraint profiles, and summarizes how stable the portfolios are.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{Program, ProgramError};
use crate::domain::Scenario;
use crate::ladder::{build_ladder, LadderError, PriorityLadder};
use crate::outranking::{assign, AssignmentResult, EngineError};
use crate::solver::{solve_exact, PortfolioSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("unknown constraint profile {0:?}")]
    UnknownProfile(String),
    #[error("unknown budget {0:?}")]
    UnknownBudget(String),
}

/// One budget of a robustness run, with the profile it is solved under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetCase {
    pub label: String,
    pub amount: f64,
    pub profile: String,
}

impl BudgetCase {
    /// Resolves `B2` or `45710`, optionally suffixed `:profile`, falling back
    /// to `default_profile`.
    pub fn parse(s: &Scenario, text: &str, default_profile: &str) -> Result<Self, PipelineError> {
        let (budget, profile) = match text.split_once(':') {
            Some((b, p)) => (b.trim(), p.trim()),
            None => (text.trim(), default_profile),
        };
        let amount = s
            .resolve_budget(budget)
            .ok_or_else(|| PipelineError::UnknownBudget(budget.into()))?;
        if s.constraint_profile(profile).is_none() {
            return Err(PipelineError::UnknownProfile(profile.into()));
        }
        Ok(Self {
            label: budget.into(),
            amount,
            profile: profile.into(),
        })
    }
}

/// Selects a portfolio for given sorting results.
pub fn select(
    s: &Scenario,
    assignments: &[AssignmentResult],
    budget: f64,
    profile: &str,
) -> Result<(PriorityLadder, PortfolioSolution), PipelineError> {
    let ladder = build_ladder(assignments)?;
    let rules = s
        .constraint_profile(profile)
        .ok_or_else(|| PipelineError::UnknownProfile(profile.into()))?;
    let program = Program::build(&s.actions, &ladder, &rules.with_budget(budget))?;
    Ok((ladder, solve_exact(&program)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCell {
    pub weights: String,
    pub budget: BudgetCase,
    pub assignments: Vec<AssignmentResult>,
    pub ladder: PriorityLadder,
    pub solution: PortfolioSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionFrequency {
    pub selected: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessMatrix {
    pub lambda: f64,
    pub cells: Vec<RobustnessCell>,
    /// Over feasible cells only.
    pub frequency: BTreeMap<String, ActionFrequency>,
    /// `jaccard[i][j]` compares the portfolios of cells `i` and `j`; two
    /// empty portfolios count as identical.
    pub jaccard: Vec<Vec<f64>>,
}

pub fn jaccard(a: &[String], b: &[String]) -> f64 {
    let a: BTreeSet<&String> = a.iter().collect();
    let b: BTreeSet<&String> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    }
}

/// Every (weight set × budget case) cell, in row-major order. Cells are
/// independent and run in parallel; output order is fixed.
pub fn robustness_matrix(
    s: &Scenario,
    weight_sets: &[String],
    budgets: &[BudgetCase],
    lambda: f64,
) -> Result<RobustnessMatrix, PipelineError> {
    let sorted = weight_sets
        .par_iter()
        .map(|w| assign(s, w, lambda).map(|a| (w.clone(), a)))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(&String, &Vec<AssignmentResult>, &BudgetCase)> = sorted
        .iter()
        .flat_map(|(w, a)| budgets.iter().map(move |b| (w, a, b)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(w, a, b)| {
            select(s, a, b.amount, &b.profile).map(|(ladder, solution)| RobustnessCell {
                weights: w.clone(),
                budget: b.clone(),
                assignments: a.clone(),
                ladder,
                solution,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let feasible: Vec<&RobustnessCell> = cells.iter().filter(|c| !c.solution.infeasible).collect();
    let frequency = s
        .actions
        .iter()
        .map(|a| {
            let selected = feasible.iter().filter(|c| c.solution.selected.contains(&a.id)).count();
            let frequency = if feasible.is_empty() {
                0.0
            } else {
                selected as f64 / feasible.len() as f64
            };
            (a.id.clone(), ActionFrequency { selected, frequency })
        })
        .collect();
    let jaccard = cells
        .iter()
        .map(|x| {
            cells
                .iter()
                .map(|y| jaccard(&x.solution.selected, &y.solution.selected))
                .collect()
        })
        .collect();
    Ok(RobustnessMatrix {
        lambda,
        cells,
        frequency,
        jaccard,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jaccard_examples() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(jaccard(&s(&[]), &s(&[])), 1.0);
        assert_eq!(jaccard(&s(&["a", "b"]), &s(&["b", "c"])), 1.0 / 3.0);
        assert_eq!(jaccard(&s(&["a"]), &s(&["a"])), 1.0);
    }
}

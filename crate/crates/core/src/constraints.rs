//! Selection constraints and their compiled bitmask form.
//!
//! A [`ConstraintProfile`] is the reusable, budget-free part (minimum
//! counts, synergy pairs, function minima, quadrant coverage). Together with
//! a budget and a priority ladder it compiles into a [`Program`] over at
//! most 64 actions, where a selection is a `u64` bitmask.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Action, Function, Provenance, Scenario, Violation};
use crate::ladder::PriorityLadder;

/// At least `minimum` of `actions` must be selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCountRule {
    pub label: String,
    pub actions: Vec<String>,
    pub minimum: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynergyGroup {
    pub insula: String,
    pub pairs: Vec<[String; 2]>,
}

/// At least `minimum` pairs over all groups must have both ends selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynergyRule {
    pub groups: Vec<SynergyGroup>,
    pub minimum: usize,
}

/// At least `minimum` selected actions must deliver `function`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionMinimum {
    pub function: Function,
    pub minimum: usize,
}

/// A quadrant is covered when, for every listed function, some selected
/// action located there delivers it. At least `4 − q` of the four quadrants
/// must be covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRule {
    pub functions: Vec<Function>,
    pub q: u8,
}

impl CoverageRule {
    pub fn required(&self) -> usize {
        4usize.saturating_sub(self.q.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintProfile {
    pub name: String,
    #[serde(default)]
    pub min_counts: Vec<MinCountRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synergy: Option<SynergyRule>,
    #[serde(default)]
    pub function_minima: Vec<FunctionMinimum>,
    #[serde(default)]
    pub coverage: Vec<CoverageRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl ConstraintProfile {
    pub fn empty(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            min_counts: Vec::new(),
            synergy: None,
            function_minima: Vec::new(),
            coverage: Vec::new(),
            provenance: None,
        }
    }

    pub fn with_budget(&self, budget: f64) -> ConstraintSet {
        ConstraintSet {
            budget,
            rules: self.clone(),
        }
    }

    pub fn validate(&self, s: &Scenario) -> Vec<Violation> {
        let path = format!("constraint_profiles.{}", self.name);
        let mut out = Vec::new();
        let check_id = |where_: &str, id: &str, out: &mut Vec<Violation>| {
            if s.action_index(id).is_none() {
                out.push(Violation::new(
                    format!("{path}.{where_}"),
                    format!("unknown action id {id:?}"),
                ));
            }
        };
        for r in &self.min_counts {
            for id in &r.actions {
                check_id(&format!("min_counts.{}", r.label), id, &mut out);
            }
        }
        if let Some(syn) = &self.synergy {
            for g in &syn.groups {
                for [a, b] in &g.pairs {
                    check_id(&format!("synergy.{}", g.insula), a, &mut out);
                    check_id(&format!("synergy.{}", g.insula), b, &mut out);
                }
            }
        }
        for c in &self.coverage {
            if c.q > 3 {
                out.push(Violation::new(
                    format!("{path}.coverage"),
                    format!("q = {} outside 0..=3", c.q),
                ));
            }
            if c.functions.is_empty() {
                out.push(Violation::new(
                    format!("{path}.coverage"),
                    "coverage rule lists no function",
                ));
            }
        }
        out
    }
}

/// A profile bound to a budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub budget: f64,
    pub rules: ConstraintProfile,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProgramError {
    #[error("{0} actions exceed the 64-action limit of the exact solver")]
    TooManyActions(usize),
    #[error("unknown action id {0:?}")]
    UnknownAction(String),
    #[error("action {0:?} is not on the priority ladder")]
    NotOnLadder(String),
    #[error("budget {0} must be a finite value ≥ 0")]
    Budget(f64),
    #[error("costs and coefficients must have one entry per action")]
    Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowKind {
    AtLeast {
        mask: u64,
        minimum: u32,
    },
    Exactly {
        mask: u64,
        count: u32,
    },
    /// Each entry is a two-bit mask; a pair counts when both bits are set.
    Synergy {
        pairs: Vec<u64>,
        minimum: u32,
    },
    /// `quadrants[u][k]` holds the actions in quadrant `u` delivering the
    /// rule's `k`-th function.
    Coverage {
        quadrants: Vec<Vec<u64>>,
        required: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub kind: RowKind,
}

fn ones(mask: u64) -> u32 {
    mask.count_ones()
}

impl RowKind {
    /// Level reached by `sel`: a count, a pair count or a quadrant count.
    pub fn achieved(&self, sel: u64) -> u32 {
        match self {
            RowKind::AtLeast { mask, .. } | RowKind::Exactly { mask, .. } => ones(sel & mask),
            RowKind::Synergy { pairs, .. } => pairs.iter().filter(|&&p| sel & p == p).count() as u32,
            RowKind::Coverage { quadrants, .. } => {
                quadrants.iter().filter(|fs| fs.iter().all(|&m| sel & m != 0)).count() as u32
            }
        }
    }

    pub fn target(&self) -> u32 {
        match self {
            RowKind::AtLeast { minimum, .. } | RowKind::Synergy { minimum, .. } => *minimum,
            RowKind::Exactly { count, .. } => *count,
            RowKind::Coverage { required, .. } => *required,
        }
    }

    pub fn satisfied(&self, sel: u64) -> bool {
        match self {
            RowKind::Exactly { count, .. } => self.achieved(sel) == *count,
            _ => self.achieved(sel) >= self.target(),
        }
    }

    /// Whether some completion of `sel` using only actions in `open` can
    /// satisfy the row.
    pub fn reachable(&self, sel: u64, open: u64) -> bool {
        match self {
            RowKind::Exactly { mask, count } => ones(sel & mask) <= *count && ones((sel | open) & mask) >= *count,
            _ => self.achieved(sel | open) >= self.target(),
        }
    }

    fn relation(&self) -> &'static str {
        match self {
            RowKind::Exactly { .. } => "=",
            _ => "≥",
        }
    }
}

/// A compiled 0-1 program: maximize `Σ coefficients[i]·x_i` subject to the
/// budget and every row.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub ids: Vec<String>,
    pub coefficients: Vec<u64>,
    pub costs: Vec<f64>,
    pub budget: f64,
    pub rows: Vec<Row>,
}

pub const BUDGET_ROW: &str = "budget";

fn mask_of(ids: &[String], subset: &[String]) -> Result<u64, ProgramError> {
    subset.iter().try_fold(0u64, |m, id| {
        let i = ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| ProgramError::UnknownAction(id.clone()))?;
        Ok(m | 1 << i)
    })
}

fn function_label(fs: &[Function]) -> String {
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("+")
}

impl Program {
    pub fn new(
        ids: Vec<String>,
        coefficients: Vec<u64>,
        costs: Vec<f64>,
        budget: f64,
        rows: Vec<Row>,
    ) -> Result<Self, ProgramError> {
        if ids.len() > 64 {
            return Err(ProgramError::TooManyActions(ids.len()));
        }
        if coefficients.len() != ids.len() || costs.len() != ids.len() {
            return Err(ProgramError::Shape);
        }
        if !(budget.is_finite() && budget >= 0.0) && budget != f64::INFINITY {
            return Err(ProgramError::Budget(budget));
        }
        Ok(Self {
            ids,
            coefficients,
            costs,
            budget,
            rows,
        })
    }

    /// Compiles `constraints` over `actions` with objective coefficients from
    /// `ladder`.
    pub fn build(
        actions: &[Action],
        ladder: &PriorityLadder,
        constraints: &ConstraintSet,
    ) -> Result<Self, ProgramError> {
        if actions.len() > 64 {
            return Err(ProgramError::TooManyActions(actions.len()));
        }
        let ids: Vec<String> = actions.iter().map(|a| a.id.clone()).collect();
        let coef_map = ladder.coefficient_map();
        let coefficients = actions
            .iter()
            .map(|a| {
                coef_map
                    .get(a.id.as_str())
                    .copied()
                    .ok_or_else(|| ProgramError::NotOnLadder(a.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let costs = actions.iter().map(|a| a.cost).collect();
        let provides = |pred: &dyn Fn(&Action) -> bool| -> u64 {
            actions
                .iter()
                .enumerate()
                .filter(|(_, a)| pred(a))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        };

        let r = &constraints.rules;
        let mut rows = Vec::new();
        for rule in &r.min_counts {
            rows.push(Row {
                name: format!("min_count:{}", rule.label),
                kind: RowKind::AtLeast {
                    mask: mask_of(&ids, &rule.actions)?,
                    minimum: rule.minimum as u32,
                },
            });
        }
        if let Some(syn) = &r.synergy {
            let mut pairs = Vec::new();
            for g in &syn.groups {
                for [a, b] in &g.pairs {
                    pairs.push(mask_of(&ids, &[a.clone(), b.clone()])?);
                }
            }
            rows.push(Row {
                name: "synergy".into(),
                kind: RowKind::Synergy {
                    pairs,
                    minimum: syn.minimum as u32,
                },
            });
        }
        for fm in &r.function_minima {
            rows.push(Row {
                name: format!("function_minimum:{}", fm.function),
                kind: RowKind::AtLeast {
                    mask: provides(&|a| a.functions.contains(&fm.function)),
                    minimum: fm.minimum as u32,
                },
            });
        }
        for cov in &r.coverage {
            let quadrants = (1..=4u8)
                .map(|u| {
                    cov.functions
                        .iter()
                        .map(|f| provides(&|a| a.quadrant == Some(u) && a.functions.contains(f)))
                        .collect()
                })
                .collect();
            rows.push(Row {
                name: format!("coverage:{}", function_label(&cov.functions)),
                kind: RowKind::Coverage {
                    quadrants,
                    required: cov.required() as u32,
                },
            });
        }
        Self::new(ids, coefficients, costs, constraints.budget, rows)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn full_mask(&self) -> u64 {
        if self.ids.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.ids.len()) - 1
        }
    }

    pub fn objective(&self, sel: u64) -> u64 {
        bits(sel).map(|i| self.coefficients[i]).sum()
    }

    pub fn cost(&self, sel: u64) -> f64 {
        bits(sel).map(|i| self.costs[i]).sum()
    }

    /// Budget comparison with a relative tolerance for rounding in sums.
    pub fn within_budget(&self, cost: f64) -> bool {
        cost <= self.budget + 1e-9 * self.budget.abs().max(1.0)
    }

    pub fn feasible(&self, sel: u64) -> bool {
        self.within_budget(self.cost(sel)) && self.rows.iter().all(|r| r.kind.satisfied(sel))
    }

    pub fn mask(&self, ids: &[String]) -> Result<u64, ProgramError> {
        mask_of(&self.ids, ids)
    }

    pub fn selected_ids(&self, sel: u64) -> Vec<String> {
        bits(sel).map(|i| self.ids[i].clone()).collect()
    }

    /// Copy without the named rows; `budget` drops the budget.
    pub fn without(&self, names: &[&str]) -> Program {
        let mut p = self.clone();
        if names.contains(&BUDGET_ROW) {
            p.budget = f64::INFINITY;
        }
        p.rows.retain(|r| !names.contains(&r.name.as_str()));
        p
    }
}

/// Indices of the set bits, ascending.
pub fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowStatus {
    pub row: String,
    pub satisfied: bool,
    pub achieved: f64,
    pub relation: String,
    pub target: f64,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} {} {}",
            if self.satisfied { "ok  " } else { "FAIL" },
            self.row,
            self.achieved,
            self.relation,
            self.target
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionReport {
    pub rows: Vec<RowStatus>,
}

impl SatisfactionReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.satisfied)
            .map(|r| r.row.as_str())
            .collect()
    }
}

/// Evaluates the budget and every row for `sel`.
pub fn check_feasible(program: &Program, sel: u64) -> SatisfactionReport {
    let cost = program.cost(sel);
    let mut rows = vec![RowStatus {
        row: BUDGET_ROW.into(),
        satisfied: program.within_budget(cost),
        achieved: cost,
        relation: "≤".into(),
        target: program.budget,
    }];
    for r in &program.rows {
        rows.push(RowStatus {
            row: r.name.clone(),
            satisfied: r.kind.satisfied(sel),
            achieved: r.kind.achieved(sel).into(),
            relation: r.kind.relation().into(),
            target: r.kind.target().into(),
        });
    }
    SatisfactionReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(budget: f64, rows: Vec<Row>) -> Program {
        Program::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1, 2, 16],
            vec![1.0, 1.0, 1.0],
            budget,
            rows,
        )
        .unwrap()
    }

    #[test]
    fn empty_selection_with_zero_budget_is_feasible() {
        let p = toy(0.0, vec![]);
        assert!(check_feasible(&p, 0).all_satisfied());
    }

    #[test]
    fn only_the_budget_row_fails() {
        let p = toy(
            2.0,
            vec![Row {
                name: "min_count:x".into(),
                kind: RowKind::AtLeast {
                    mask: 0b011,
                    minimum: 1,
                },
            }],
        );
        let r = check_feasible(&p, 0b111);
        assert_eq!(r.failing(), vec![BUDGET_ROW]);
    }

    #[test]
    fn coverage_needs_every_function_in_a_quadrant() {
        let kind = RowKind::Coverage {
            quadrants: vec![vec![0b001, 0b010], vec![0b100, 0b100], vec![0, 0], vec![0, 0]],
            required: 2,
        };
        assert!(!kind.satisfied(0b101));
        assert!(kind.satisfied(0b111));
        assert!(kind.reachable(0b001, 0b110));
        assert!(!kind.reachable(0b001, 0b100));
    }

    #[test]
    fn synergy_counts_complete_pairs() {
        let kind = RowKind::Synergy {
            pairs: vec![0b011, 0b100 | 0b1000],
            minimum: 1,
        };
        assert!(!kind.satisfied(0b0101));
        assert!(kind.satisfied(0b1100));
        assert_eq!(kind.achieved(0b1111), 2);
    }

    #[test]
    fn exact_counts_bound_both_ways() {
        let kind = RowKind::Exactly { mask: 0b111, count: 2 };
        assert!(kind.reachable(0b001, 0b110));
        assert!(!kind.reachable(0b111, 0));
        assert!(!kind.reachable(0b001, 0));
        assert!(kind.satisfied(0b101));
    }

    #[test]
    fn bits_are_ascending() {
        assert_eq!(bits(0b1010_0001).collect::<Vec<_>>(), vec![0, 5, 7]);
        assert_eq!(bits(0).count(), 0);
        assert_eq!(bits(1 << 63).collect::<Vec<_>>(), vec![63]);
    }
}

//! Exact solvers for a compiled [`Program`].
//!
//! [`solve_exact`] is a depth-first branch-and-bound; [`brute_force_oracle`]
//! enumerates every subset and exists to certify it; and
//! [`sequential_lexicographic`] optimizes level counts from the top level
//! down. All three share one tie-break: among selections with equal
//! objective, the one whose ascending list of action indices is
//! lexicographically smallest wins, a proper prefix counting as smaller.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{check_feasible, Program, Row, RowKind, SatisfactionReport, BUDGET_ROW};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("brute force is limited to {max} actions; got {n}")]
    TooLarge { n: usize, max: usize },
}

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// What blocks feasibility. Row names match [`SatisfactionReport`] rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityReport {
    /// Rows that cannot be met on their own even with unlimited budget.
    pub structural: Vec<String>,
    /// Whether dropping the budget alone restores feasibility.
    pub feasible_without_budget: bool,
    /// Rows that cannot be met on their own within the budget.
    pub budget_conflicts: Vec<String>,
    /// A smallest set of rows whose removal restores feasibility under the
    /// budget.
    pub minimal_relaxation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSolution {
    pub selected: Vec<String>,
    pub objective: u64,
    pub total_cost: f64,
    pub report: SatisfactionReport,
    /// Set once the brute-force oracle reached the same objective.
    pub certified: bool,
    pub infeasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityReport>,
    #[serde(skip)]
    pub mask: u64,
}

impl PortfolioSolution {
    pub fn from_mask(p: &Program, sel: u64) -> Self {
        Self {
            selected: p.selected_ids(sel),
            objective: p.objective(sel),
            total_cost: p.cost(sel),
            report: check_feasible(p, sel),
            certified: false,
            infeasible: false,
            infeasibility: None,
            mask: sel,
        }
    }

    fn infeasible(p: &Program) -> Self {
        Self {
            selected: Vec::new(),
            objective: 0,
            total_cost: 0.0,
            report: check_feasible(p, 0),
            certified: false,
            infeasible: true,
            infeasibility: Some(diagnose(p)),
            mask: 0,
        }
    }
}

/// Tie-break order: `a` precedes `b` when its ascending index list is
/// lexicographically smaller.
pub fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let i = (a ^ b).trailing_zeros();
    let above = if i == 63 { 0 } else { !0u64 << (i + 1) };
    if a >> i & 1 == 1 {
        b & above != 0
    } else {
        a & above == 0
    }
}

fn better(value: u64, sel: u64, best: Option<(u64, u64)>) -> bool {
    match best {
        None => true,
        Some((bv, bs)) => value > bv || (value == bv && lex_less(sel, bs)),
    }
}

struct Search<'a> {
    p: &'a Program,
    order: Vec<usize>,
    rest_coef: Vec<u64>,
    rest_mask: Vec<u64>,
    best: Option<(u64, u64)>,
    first_only: bool,
}

impl<'a> Search<'a> {
    fn new(p: &'a Program, first_only: bool) -> Self {
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| p.coefficients[b].cmp(&p.coefficients[a]).then(a.cmp(&b)));
        let mut rest_coef = vec![0u64; order.len() + 1];
        let mut rest_mask = vec![0u64; order.len() + 1];
        for d in (0..order.len()).rev() {
            rest_coef[d] = rest_coef[d + 1] + p.coefficients[order[d]];
            rest_mask[d] = rest_mask[d + 1] | 1 << order[d];
        }
        Self {
            p,
            order,
            rest_coef,
            rest_mask,
            best: None,
            first_only,
        }
    }

    fn run(&mut self, depth: usize, sel: u64, cost: f64, value: u64) {
        if self.first_only && self.best.is_some() {
            return;
        }
        if let Some((bv, _)) = self.best {
            // Equal bounds stay open: they may still win the tie-break.
            if value + self.rest_coef[depth] < bv {
                return;
            }
        }
        let open = self.rest_mask[depth];
        if !self.p.rows.iter().all(|r| r.kind.reachable(sel, open)) {
            return;
        }
        if depth == self.order.len() {
            if better(value, sel, self.best) {
                self.best = Some((value, sel));
            }
            return;
        }
        let i = self.order[depth];
        let with = cost + self.p.costs[i];
        if self.p.within_budget(with) {
            self.run(depth + 1, sel | 1 << i, with, value + self.p.coefficients[i]);
        }
        self.run(depth + 1, sel, cost, value);
    }
}

fn search(p: &Program, first_only: bool) -> Option<u64> {
    let mut s = Search::new(p, first_only);
    s.run(0, 0, 0.0, 0);
    s.best.map(|(_, sel)| sel)
}

/// Whether any selection satisfies the budget and every row.
pub fn is_feasible(p: &Program) -> bool {
    search(p, true).is_some()
}

/// Maximizes the objective by branch-and-bound. Actions are branched in
/// decreasing coefficient order, "take" before "skip"; a node is cut when
/// its bound (value so far plus every open coefficient) falls below the
/// incumbent or some row can no longer be met.
pub fn solve_exact(p: &Program) -> PortfolioSolution {
    match search(p, false) {
        Some(sel) => PortfolioSolution::from_mask(p, sel),
        None => PortfolioSolution::infeasible(p),
    }
}

/// Exhaustive enumeration of all `2^n` selections.
pub fn brute_force_oracle(p: &Program) -> Result<PortfolioSolution, SolverError> {
    let n = p.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooLarge {
            n,
            max: BRUTE_FORCE_LIMIT,
        });
    }
    let split = n / 2;
    let table = |offset: usize, width: usize| -> (Vec<f64>, Vec<u64>) {
        let mut cost = vec![0.0; 1 << width];
        let mut coef = vec![0u64; 1 << width];
        for m in 1usize..1 << width {
            let j = m.trailing_zeros() as usize;
            let prev = m & (m - 1);
            cost[m] = cost[prev] + p.costs[offset + j];
            coef[m] = coef[prev] + p.coefficients[offset + j];
        }
        (cost, coef)
    };
    let (lo_cost, lo_coef) = table(0, split);
    let (hi_cost, hi_coef) = table(split, n - split);
    let lo_mask = (1u64 << split) - 1;
    let mut best: Option<(u64, u64)> = None;
    for sel in 0..(1u64 << n) {
        let (l, h) = ((sel & lo_mask) as usize, (sel >> split) as usize);
        if !p.within_budget(lo_cost[l] + hi_cost[h]) {
            continue;
        }
        if !p.rows.iter().all(|r| r.kind.satisfied(sel)) {
            continue;
        }
        let value = lo_coef[l] + hi_coef[h];
        if better(value, sel, best) {
            best = Some((value, sel));
        }
    }
    Ok(match best {
        Some((_, sel)) => {
            let mut s = PortfolioSolution::from_mask(p, sel);
            s.certified = true;
            s
        }
        None => PortfolioSolution::infeasible(p),
    })
}

/// Branch-and-bound followed, when small enough, by the oracle; the
/// solution is marked certified when both agree on the objective (or both
/// report infeasibility).
pub fn solve_certified(p: &Program) -> PortfolioSolution {
    let mut s = solve_exact(p);
    if let Ok(o) = brute_force_oracle(p) {
        s.certified = o.infeasible == s.infeasible && o.objective == s.objective;
    }
    s
}

/// Distinct-coefficient groups of a program, highest coefficient first.
pub fn levels(p: &Program) -> Vec<(u64, u64)> {
    let mut coefs: Vec<u64> = p.coefficients.clone();
    coefs.sort_unstable_by(|a, b| b.cmp(a));
    coefs.dedup();
    coefs
        .into_iter()
        .map(|c| {
            let mask = p
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == c)
                .fold(0u64, |m, (i, _)| m | 1 << i);
            (c, mask)
        })
        .collect()
}

/// Maximizes the selected count of each level in turn, from the highest
/// level down, adding each optimal count as an equality before moving on.
pub fn sequential_lexicographic(p: &Program) -> PortfolioSolution {
    let mut work = p.clone();
    let mut last: Option<u64> = if levels(p).is_empty() { search(p, false) } else { None };
    for (coef, mask) in levels(p) {
        work.coefficients = (0..p.len()).map(|i| (mask >> i) & 1).collect();
        let Some(sel) = search(&work, false) else {
            return PortfolioSolution::infeasible(p);
        };
        work.rows.push(Row {
            name: format!("level_count:{coef}"),
            kind: RowKind::Exactly {
                mask,
                count: (sel & mask).count_ones(),
            },
        });
        last = Some(sel);
    }
    match last {
        Some(sel) => PortfolioSolution::from_mask(p, sel),
        None => PortfolioSolution::infeasible(p),
    }
}

/// Selected count per level, highest level first.
pub fn level_counts(p: &Program, sel: u64) -> Vec<u32> {
    levels(p).iter().map(|(_, m)| (sel & m).count_ones()).collect()
}

fn only(p: &Program, row: &str, budget: bool) -> Program {
    let mut q = p.clone();
    q.rows.retain(|r| r.name == row);
    if !budget {
        q.budget = f64::INFINITY;
    }
    q
}

/// Explains an infeasible program. The minimal relaxation is the smallest
/// set of rows whose removal restores feasibility under the budget; among
/// sets of equal size the one listing earlier rows wins.
pub fn diagnose(p: &Program) -> InfeasibilityReport {
    let names: Vec<&str> = p.rows.iter().map(|r| r.name.as_str()).collect();
    let structural = names
        .iter()
        .filter(|n| !is_feasible(&only(p, n, false)))
        .map(|n| n.to_string())
        .collect();
    let budget_conflicts = names
        .iter()
        .filter(|n| !is_feasible(&only(p, n, true)))
        .map(|n| n.to_string())
        .collect();
    let feasible_without_budget = is_feasible(&p.without(&[BUDGET_ROW]));

    let r = names.len().min(20);
    let mut subsets: Vec<u32> = (0..1u32 << r).collect();
    subsets.sort_by_key(|m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
    let minimal_relaxation = subsets
        .into_iter()
        .map(|m| {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, n)| *n)
                .collect::<Vec<_>>()
        })
        .find(|drop| is_feasible(&p.without(drop)))
        .unwrap_or_default()
        .into_iter()
        .map(String::from)
        .collect();

    InfeasibilityReport {
        structural,
        feasible_without_budget,
        budget_conflicts,
        minimal_relaxation,
    }
}

//! Random instances shared by the property and acceptance targets.
#![allow(dead_code)]

use priosel_core::constraints::{Program, Row, RowKind};
use priosel_core::ladder::build_ladder;
use priosel_core::outranking::{AssignmentResult, CategoryInterval};
use rand::Rng;

/// Random sorting output over four categories, one in three imprecise.
pub fn random_assignments(rng: &mut impl Rng, n: usize) -> Vec<AssignmentResult> {
    (0..n)
        .map(|i| {
            let lo = rng.random_range(1..=4);
            let hi = if rng.random_bool(1.0 / 3.0) {
                (lo + rng.random_range(0..=2)).min(4)
            } else {
                lo
            };
            AssignmentResult {
                action: format!("x{i}"),
                descending: hi,
                ascending: lo,
                interval: CategoryInterval::new(lo, hi),
            }
        })
        .collect()
}

fn random_mask(rng: &mut impl Rng, n: usize, density: f64) -> u64 {
    (0..n).filter(|_| rng.random_bool(density)).fold(0, |m, i| m | 1 << i)
}

/// Ladder coefficients, integer costs, a budget between 30% and 80% of the
/// total cost, and one to four random rows of mixed kinds.
pub fn random_program(rng: &mut impl Rng, n: usize) -> Program {
    let assignments = random_assignments(rng, n);
    let ladder = build_ladder(&assignments).unwrap();
    let map = ladder.coefficient_map();
    let ids: Vec<String> = assignments.iter().map(|a| a.action.clone()).collect();
    let coefficients = ids.iter().map(|id| map[id.as_str()]).collect();
    let costs: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(1u32..=50) * 100)).collect();
    let total: f64 = costs.iter().sum();
    let budget = (total * rng.random_range(0.3..0.8)).round();

    let mut rows = Vec::new();
    for r in 0..rng.random_range(1..=4) {
        let kind = match rng.random_range(0..4) {
            0 => {
                let mask = random_mask(rng, n, 0.4);
                let minimum = rng.random_range(0..=mask.count_ones().min(4));
                RowKind::AtLeast { mask, minimum }
            }
            1 => {
                let mask = random_mask(rng, n, 0.3);
                let count = rng.random_range(0..=mask.count_ones().min(3));
                RowKind::Exactly { mask, count }
            }
            2 => {
                let pairs = (0..rng.random_range(1..=3))
                    .map(|_| {
                        let a = rng.random_range(0..n);
                        let b = (a + rng.random_range(1..n)) % n;
                        1u64 << a | 1u64 << b
                    })
                    .collect();
                RowKind::Synergy { pairs, minimum: 1 }
            }
            _ => {
                let functions = rng.random_range(1..=2);
                let quadrants = (0..4)
                    .map(|_| (0..functions).map(|_| random_mask(rng, n, 0.25)).collect())
                    .collect();
                RowKind::Coverage {
                    quadrants,
                    required: rng.random_range(1..=3),
                }
            }
        };
        rows.push(Row {
            name: format!("r{r}"),
            kind,
        });
    }
    Program::new(ids, coefficients, costs, budget, rows).unwrap()
}

//! Priority ladder: sorting intervals become ordered priority levels whose
//! coefficients make one project of a level outweigh every lower level
//! combined.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::outranking::{AssignmentResult, CategoryInterval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("ladder coefficient overflows 64 bits at level {0}")]
    Overflow(CategoryInterval),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderLevel {
    pub interval: CategoryInterval,
    pub members: Vec<String>,
    pub coefficient: u64,
}

/// Levels in ascending priority.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityLadder {
    pub levels: Vec<LadderLevel>,
}

/// Position of an interval on the ladder. Intervals are ordered by their
/// midpoint, so `[C_h,C_{h+1}]` falls strictly between `C_h` and `C_{h+1}`;
/// a wider interval with the same midpoint as a single category ranks below
/// it.
fn rank_key(i: &CategoryInterval) -> (usize, usize) {
    (i.lo + i.hi, i.lo)
}

pub fn build_ladder(assignments: &[AssignmentResult]) -> Result<PriorityLadder, LadderError> {
    let mut groups: BTreeMap<(usize, usize), (CategoryInterval, Vec<String>)> = BTreeMap::new();
    for a in assignments {
        groups
            .entry(rank_key(&a.interval))
            .or_insert_with(|| (a.interval, Vec::new()))
            .1
            .push(a.action.clone());
    }
    let mut levels = Vec::with_capacity(groups.len());
    let mut below: u64 = 0;
    for (_, (interval, members)) in groups {
        let coefficient = below.checked_add(1).ok_or(LadderError::Overflow(interval))?;
        below = coefficient
            .checked_mul(members.len() as u64)
            .and_then(|m| below.checked_add(m))
            .ok_or(LadderError::Overflow(interval))?;
        levels.push(LadderLevel {
            interval,
            members,
            coefficient,
        });
    }
    Ok(PriorityLadder { levels })
}

impl PriorityLadder {
    pub fn coefficients(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.coefficient).collect()
    }

    /// Coefficient keyed by action id.
    pub fn coefficient_map(&self) -> BTreeMap<&str, u64> {
        self.levels
            .iter()
            .flat_map(|l| l.members.iter().map(move |m| (m.as_str(), l.coefficient)))
            .collect()
    }

    /// Index of the level holding `action`, if any.
    pub fn level_of(&self, action: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.members.iter().any(|m| m == action))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(id: &str, lo: usize, hi: usize) -> AssignmentResult {
        AssignmentResult {
            action: id.into(),
            descending: hi,
            ascending: lo,
            interval: CategoryInterval::new(lo, hi),
        }
    }

    #[test]
    fn single_category_gives_unit_coefficients() {
        let rs: Vec<_> = (0..5).map(|i| result(&format!("a{i}"), 2, 2)).collect();
        let l = build_ladder(&rs).unwrap();
        assert_eq!(l.coefficients(), vec![1]);
        assert_eq!(l.levels[0].members.len(), 5);
    }

    #[test]
    fn intervals_sit_between_their_ends() {
        let rs = vec![
            result("a", 2, 2),
            result("b", 1, 2),
            result("c", 1, 1),
            result("d", 2, 4),
            result("e", 3, 3),
        ];
        let l = build_ladder(&rs).unwrap();
        let order: Vec<String> = l.levels.iter().map(|x| x.interval.to_string()).collect();
        assert_eq!(order, ["C1", "[C1,C2]", "C2", "[C2,C4]", "C3"]);
        assert_eq!(l.coefficients(), vec![1, 2, 4, 8, 16]);
        assert_eq!(l.level_of("d"), Some(3));
    }

    #[test]
    fn empty_assignment_gives_empty_ladder() {
        assert!(build_ladder(&[]).unwrap().levels.is_empty());
    }
}

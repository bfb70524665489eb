//! ELECTRE Tri-nC sorting with reference profiles.
//!
//! Each pair `(a, b)` gets a concordance index `c(a,b)` (weighted partial
//! concordances), per-criterion discordances `d_j(a,b)` and the credibility
//! `σ(a,b) = c · Π_{d_j > c} (1−d_j)/(1−c)`. Against a category the
//! credibility is the maximum over its profiles. The descending and
//! ascending rules each pick a category; together they bound the
//! assignment interval.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::domain::{validate_scenario, Criterion, Scenario, ValidationReport, WeightError};
use crate::threshold::{evaluate_threshold, evaluate_veto, ThresholdSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("unknown weight vector {0:?}")]
    UnknownWeights(String),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("{subject} has no performance on {criterion}")]
    MissingPerformance { subject: String, criterion: String },
    #[error("lambda {0} is outside [0.5, 1]")]
    Lambda(f64),
    #[error("{} weights for {} criteria", .weights, .criteria)]
    WeightCount { weights: usize, criteria: usize },
    #[error("scenario is invalid:\n{0}")]
    Invalid(ValidationReport),
}

/// Fuzzy agreement of criterion `j` with "a is at least as good as b".
pub fn partial_concordance(ga: f64, gb: f64, q: f64, p: f64) -> f64 {
    let d = ga - gb;
    if d >= -q {
        1.0
    } else if d < -p {
        0.0
    } else {
        (d + p) / (p - q)
    }
}

/// Opposition of criterion `j` to "a is at least as good as b"; `v` may be
/// `+∞` for no veto.
pub fn discordance(ga: f64, gb: f64, p: f64, v: f64) -> f64 {
    let d = ga - gb;
    if v.is_infinite() || d >= -p {
        0.0
    } else if d < -v {
        1.0
    } else {
        (d + p) / (p - v)
    }
}

/// Combines a concordance index with the discordances.
pub fn credibility_from(c: f64, discordances: &[f64]) -> f64 {
    discordances
        .iter()
        .filter(|&&d| d > c)
        .fold(c, |s, &d| s * (1.0 - d) / (1.0 - c))
}

pub fn selection_rho(outranks: f64, outranked_by: f64) -> f64 {
    outranks.min(outranked_by)
}

#[derive(Debug, Clone)]
struct CriterionModel {
    id: String,
    sign: f64,
    q: ThresholdSpec,
    p: ThresholdSpec,
    v: ThresholdSpec,
}

/// Criteria with normalized weights, ready to compare gain vectors.
#[derive(Debug, Clone)]
pub struct OutrankingModel {
    criteria: Vec<CriterionModel>,
    weights: Vec<f64>,
}

impl OutrankingModel {
    /// `raw_weights` is aligned with `criteria` and normalized here.
    pub fn new(criteria: &[Criterion], raw_weights: &[f64]) -> Result<Self, EngineError> {
        if raw_weights.len() != criteria.len() {
            return Err(EngineError::WeightCount {
                weights: raw_weights.len(),
                criteria: criteria.len(),
            });
        }
        let vector = crate::domain::WeightVector::new(
            "",
            criteria
                .iter()
                .map(|c| c.id.clone())
                .zip(raw_weights.iter().copied())
                .collect(),
        );
        let weights = vector.normalized(criteria)?;
        Ok(Self {
            criteria: criteria
                .iter()
                .map(|c| CriterionModel {
                    id: c.id.clone(),
                    sign: c.direction.sign(),
                    q: c.indifference,
                    p: c.preference,
                    v: c.veto,
                })
                .collect(),
            weights,
        })
    }

    pub fn from_scenario(s: &Scenario, weights: &str) -> Result<Self, EngineError> {
        let w = s
            .weight_vector(weights)
            .ok_or_else(|| EngineError::UnknownWeights(weights.into()))?;
        let normalized = w.normalized(&s.criteria)?;
        Self::new(&s.criteria, &normalized)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Gain vector of a performance map: minimized criteria are negated.
    pub fn gains(&self, subject: &str, performances: &BTreeMap<String, f64>) -> Result<Vec<f64>, EngineError> {
        self.criteria
            .iter()
            .map(|c| {
                performances
                    .get(&c.id)
                    .map(|v| c.sign * v)
                    .ok_or_else(|| EngineError::MissingPerformance {
                        subject: subject.into(),
                        criterion: c.id.clone(),
                    })
            })
            .collect()
    }

    /// `(q, p, v)` of criterion `j` for the pair, evaluated at the worse
    /// performance in the criterion's own units.
    fn thresholds(&self, j: usize, ga: f64, gb: f64) -> (f64, f64, f64) {
        let c = &self.criteria[j];
        let worse = c.sign * ga.min(gb);
        (
            evaluate_threshold(&c.q, worse),
            evaluate_threshold(&c.p, worse),
            evaluate_veto(&c.v, worse),
        )
    }

    pub fn concordance(&self, a: &[f64], b: &[f64]) -> f64 {
        let c: f64 = (0..self.criteria.len())
            .map(|j| {
                let (q, p, _) = self.thresholds(j, a[j], b[j]);
                self.weights[j] * partial_concordance(a[j], b[j], q, p)
            })
            .sum();
        c.clamp(0.0, 1.0)
    }

    pub fn discordances(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.criteria.len())
            .map(|j| {
                let (_, p, v) = self.thresholds(j, a[j], b[j]);
                discordance(a[j], b[j], p, v)
            })
            .collect()
    }

    pub fn credibility(&self, a: &[f64], b: &[f64]) -> f64 {
        credibility_from(self.concordance(a, b), &self.discordances(a, b))
    }

    /// `(σ(a,B_h), σ(B_h,a))`, each the maximum over the profiles of `B_h`.
    pub fn category_credibility(&self, a: &[f64], profiles: &[Vec<f64>]) -> (f64, f64) {
        profiles.iter().fold((0.0_f64, 0.0_f64), |(up, down), b| {
            (up.max(self.credibility(a, b)), down.max(self.credibility(b, a)))
        })
    }

    /// Credibilities of `a` against every category plus the two dummy
    /// profiles `B_0` and `B_{q+1}`.
    pub fn row(&self, a: &[f64], categories: &[Vec<Vec<f64>>]) -> CredibilityRow {
        let q = categories.len();
        let mut outranks = vec![0.0; q + 2];
        let mut outranked_by = vec![0.0; q + 2];
        outranks[0] = 1.0;
        outranked_by[q + 1] = 1.0;
        for (h, profiles) in categories.iter().enumerate() {
            let (up, down) = self.category_credibility(a, profiles);
            outranks[h + 1] = up;
            outranked_by[h + 1] = down;
        }
        CredibilityRow { outranks, outranked_by }
    }

    pub fn criterion_ids(&self) -> impl Iterator<Item = &str> {
        self.criteria.iter().map(|c| c.id.as_str())
    }
}

/// `outranks[h] = σ(a,B_h)` and `outranked_by[h] = σ(B_h,a)` for
/// `h = 0..=q+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredibilityRow {
    pub outranks: Vec<f64>,
    pub outranked_by: Vec<f64>,
}

impl CredibilityRow {
    pub fn categories(&self) -> usize {
        self.outranks.len() - 2
    }

    pub fn rho(&self, h: usize) -> f64 {
        selection_rho(self.outranks[h], self.outranked_by[h])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredibilityMatrix {
    pub actions: Vec<String>,
    pub rows: Vec<CredibilityRow>,
}

/// Category index chosen by the descending rule.
pub fn assign_descending(row: &CredibilityRow, lambda: f64) -> usize {
    let q = row.categories();
    let mut t = q + 1;
    while t > 0 && row.outranks[t] < lambda {
        t -= 1;
    }
    if t >= q {
        q
    } else if t == 0 {
        1
    } else if row.rho(t) > row.rho(t + 1) {
        t
    } else {
        t + 1
    }
}

/// Category index chosen by the ascending rule.
pub fn assign_ascending(row: &CredibilityRow, lambda: f64) -> usize {
    let q = row.categories();
    let mut k = 0;
    while k < q + 1 && row.outranked_by[k] < lambda {
        k += 1;
    }
    if k <= 1 {
        1
    } else if k == q + 1 {
        q
    } else if row.rho(k) > row.rho(k - 1) {
        k
    } else {
        k - 1
    }
}

/// Closed range of categories `[C_lo, C_hi]`; prints as `C3` when both ends
/// coincide and `[C3,C4]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CategoryInterval {
    pub lo: usize,
    pub hi: usize,
}

impl CategoryInterval {
    pub fn new(a: usize, b: usize) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn single(h: usize) -> Self {
        Self { lo: h, hi: h }
    }
}

impl fmt::Display for CategoryInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "C{}", self.lo)
        } else {
            write!(f, "[C{},C{}]", self.lo, self.hi)
        }
    }
}

impl FromStr for CategoryInterval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("not a category interval: {s:?}");
        let cat = |t: &str| -> Result<usize, String> {
            t.trim()
                .strip_prefix('C')
                .and_then(|n| n.parse().ok())
                .filter(|&n: &usize| n >= 1)
                .ok_or_else(bad)
        };
        let s2 = s.trim();
        if let Some(inner) = s2.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let (a, b) = (cat(a)?, cat(b)?);
            if a > b {
                return Err(bad());
            }
            Ok(Self { lo: a, hi: b })
        } else {
            cat(s2).map(Self::single)
        }
    }
}

impl Serialize for CategoryInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CategoryInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult {
    pub action: String,
    pub descending: usize,
    pub ascending: usize,
    pub interval: CategoryInterval,
}

impl AssignmentResult {
    pub fn from_row(action: impl Into<String>, row: &CredibilityRow, lambda: f64) -> Self {
        let descending = assign_descending(row, lambda);
        let ascending = assign_ascending(row, lambda);
        Self {
            action: action.into(),
            descending,
            ascending,
            interval: CategoryInterval::new(descending, ascending),
        }
    }
}

/// Gain vectors of every category's profiles, in category order.
pub fn category_gains(model: &OutrankingModel, s: &Scenario) -> Result<Vec<Vec<Vec<f64>>>, EngineError> {
    s.categories
        .iter()
        .map(|set| {
            set.profiles
                .iter()
                .map(|p| model.gains(&p.id, &p.performances))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect()
}

/// Credibility rows of every action; rows are computed in parallel and
/// returned in action order.
pub fn credibility_matrix(model: &OutrankingModel, s: &Scenario) -> Result<CredibilityMatrix, EngineError> {
    let categories = category_gains(model, s)?;
    let gains = s
        .actions
        .iter()
        .map(|a| model.gains(&a.id, &a.performances))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = gains.par_iter().map(|g| model.row(g, &categories)).collect();
    Ok(CredibilityMatrix {
        actions: s.actions.iter().map(|a| a.id.clone()).collect(),
        rows,
    })
}

/// Sorts every action of a validated scenario with the named weights.
pub fn assign(s: &Scenario, weights: &str, lambda: f64) -> Result<Vec<AssignmentResult>, EngineError> {
    if !(0.5..=1.0).contains(&lambda) {
        return Err(EngineError::Lambda(lambda));
    }
    let report = validate_scenario(s);
    if !report.is_ok() {
        return Err(EngineError::Invalid(report));
    }
    let model = OutrankingModel::from_scenario(s, weights)?;
    let matrix = credibility_matrix(&model, s)?;
    Ok(matrix
        .actions
        .iter()
        .zip(&matrix.rows)
        .map(|(id, row)| AssignmentResult::from_row(id.clone(), row, lambda))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Direction, ScaleKind};

    fn criterion(id: &str, q: f64, p: f64, v: Option<f64>) -> Criterion {
        Criterion {
            id: id.into(),
            label: String::new(),
            unit: String::new(),
            direction: Direction::Maximize,
            scale: ScaleKind::Cardinal,
            indifference: ThresholdSpec::Constant { value: q },
            preference: ThresholdSpec::Constant { value: p },
            veto: v.map_or(ThresholdSpec::None, |value| ThresholdSpec::Constant { value }),
            range: None,
            provenance: None,
        }
    }

    #[test]
    fn partial_concordance_examples() {
        assert_eq!(partial_concordance(5.0, 5.0, 1.0, 3.0), 1.0);
        assert_eq!(partial_concordance(0.0, 3.0 + 1e-9, 1.0, 3.0), 0.0);
        assert_eq!(partial_concordance(0.0, 2.0, 1.0, 3.0), 0.5);
        assert_eq!(partial_concordance(0.0, 1.0, 0.0, 0.0), 0.0);
        assert_eq!(partial_concordance(1.0, 1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn discordance_examples() {
        assert_eq!(discordance(0.0, 2.0, 2.0, 6.0), 0.0);
        assert_eq!(discordance(0.0, 7.0, 2.0, 6.0), 1.0);
        assert_eq!(discordance(0.0, 4.0, 2.0, 6.0), 0.5);
        assert_eq!(discordance(0.0, 6.0, 2.0, 6.0), 1.0);
        assert_eq!(discordance(0.0, 1e9, 2.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn credibility_examples() {
        assert_eq!(credibility_from(0.7, &[0.2, 0.7]), 0.7);
        assert_eq!(credibility_from(0.8, &[1.0, 0.0]), 0.0);
        assert!((credibility_from(0.6, &[0.8]) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn concordance_is_a_weighted_sum() {
        let cs = [criterion("x", 0.0, 0.0, None), criterion("y", 0.0, 0.0, None)];
        let m = OutrankingModel::new(&cs, &[60.0, 40.0]).unwrap();
        assert!((m.concordance(&[1.0, 0.0], &[0.0, 1.0]) - 0.6).abs() < 1e-12);
        assert_eq!(m.concordance(&[3.0, 3.0], &[3.0, 3.0]), 1.0);
    }

    #[test]
    fn rho_is_the_minimum() {
        assert_eq!(selection_rho(0.7, 0.4), 0.4);
        assert_eq!(selection_rho(0.5, 0.5), 0.5);
    }

    #[test]
    fn dominating_action_reaches_top_category() {
        let cs = [criterion("x", 0.0, 1.0, Some(3.0))];
        let m = OutrankingModel::new(&cs, &[1.0]).unwrap();
        let cats = vec![vec![vec![1.0]], vec![vec![5.0]], vec![vec![9.0]]];
        let row = m.row(&[20.0], &cats);
        assert_eq!(assign_descending(&row, 0.7), 3);
        assert_eq!(assign_ascending(&row, 0.7), 3);
        let row = m.row(&[-20.0], &cats);
        assert_eq!(assign_descending(&row, 0.7), 1);
        assert_eq!(assign_ascending(&row, 0.7), 1);
    }

    #[test]
    fn single_category_always_assigns_c1() {
        let cs = [criterion("x", 0.0, 1.0, Some(3.0))];
        let m = OutrankingModel::new(&cs, &[1.0]).unwrap();
        for g in [-50.0, 0.0, 50.0] {
            let row = m.row(&[g], &[vec![vec![0.0]]]);
            let r = AssignmentResult::from_row("a", &row, 0.6);
            assert_eq!(r.interval, CategoryInterval::single(1));
        }
    }

    #[test]
    fn minimized_criteria_are_negated() {
        let mut c = criterion("cost", 0.0, 0.0, None);
        c.direction = Direction::Minimize;
        let m = OutrankingModel::new(&[c], &[1.0]).unwrap();
        let cheap = m.gains("a", &BTreeMap::from([("cost".to_string(), 10.0)])).unwrap();
        let dear = m.gains("b", &BTreeMap::from([("cost".to_string(), 20.0)])).unwrap();
        assert_eq!(m.credibility(&cheap, &dear), 1.0);
        assert_eq!(m.credibility(&dear, &cheap), 0.0);
    }

    #[test]
    fn interval_text_round_trips() {
        for s in ["C3", "[C3,C4]", "[C1,C2]"] {
            assert_eq!(s.parse::<CategoryInterval>().unwrap().to_string(), s);
        }
        assert!("[C4,C3]".parse::<CategoryInterval>().is_err());
        assert!("C0".parse::<CategoryInterval>().is_err());
        assert!("D3".parse::<CategoryInterval>().is_err());
    }
}

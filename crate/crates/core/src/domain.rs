//! Shared domain types: scales, criteria, actions, reference profiles,
//! weight vectors and the [`Scenario`] aggregate with its validator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::ConstraintProfile;
use crate::srf::{validate_deck, DeckSpec};
use crate::threshold::{validate_threshold_order, ThresholdSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaleError {
    #[error("qualitative code {code} outside 1..={max}")]
    CodeOutOfRange { code: i64, max: u8 },
    #[error("unknown qualitative label {0:?}")]
    UnknownLabel(String),
    #[error("label {label:?} does not fit a {scale} scale")]
    WrongScale { label: String, scale: ScaleKind },
    #[error("label {label:?} disagrees with its code suffix {code}")]
    InconsistentSuffix { label: String, code: u8 },
    #[error("value {0} is not a finite number")]
    NotFinite(f64),
    #[error("value {value} is not an integer code on a {scale} scale")]
    NotInteger { value: f64, scale: ScaleKind },
}

/// A level on the four-point scale L < M < H < VH, stored as its code 1..=4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualitativeLevel(u8);

impl QualitativeLevel {
    pub const L: Self = Self(1);
    pub const M: Self = Self(2);
    pub const H: Self = Self(3);
    pub const VH: Self = Self(4);

    pub fn new(code: u8) -> Result<Self, ScaleError> {
        if (1..=4).contains(&code) {
            Ok(Self(code))
        } else {
            Err(ScaleError::CodeOutOfRange {
                code: code.into(),
                max: 4,
            })
        }
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            1 => "L",
            2 => "M",
            3 => "H",
            _ => "VH",
        }
    }
}

impl FromStr for QualitativeLevel {
    type Err = ScaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Ok(Self::L),
            "M" => Ok(Self::M),
            "H" => Ok(Self::H),
            "VH" => Ok(Self::VH),
            _ => Err(ScaleError::UnknownLabel(s.to_string())),
        }
    }
}

impl fmt::Display for QualitativeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Code of the ordered pair `(a, b)` on the 16-level composite scale, where
/// the first component dominates: `4·(a−1) + b`.
pub fn encode_lexicographic(a: u8, b: u8) -> Result<u8, ScaleError> {
    let a = QualitativeLevel::new(a)?;
    let b = QualitativeLevel::new(b)?;
    Ok(4 * (a.code() - 1) + b.code())
}

/// Inverse of [`encode_lexicographic`].
pub fn decode_lexicographic(code: u8) -> Result<(u8, u8), ScaleError> {
    if !(1..=16).contains(&code) {
        return Err(ScaleError::CodeOutOfRange {
            code: code.into(),
            max: 16,
        });
    }
    Ok(((code - 1) / 4 + 1, (code - 1) % 4 + 1))
}

/// Componentwise (Pareto) dominance between two composite-scale pairs.
pub fn pair_dominates(p: (QualitativeLevel, QualitativeLevel), q: (QualitativeLevel, QualitativeLevel)) -> bool {
    p.0 >= q.0 && p.1 >= q.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    Cardinal,
    Qualitative4,
    Qualitative16,
}

impl fmt::Display for ScaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScaleKind::Cardinal => "cardinal",
            ScaleKind::Qualitative4 => "qualitative4",
            ScaleKind::Qualitative16 => "qualitative16",
        })
    }
}

impl ScaleKind {
    fn max_code(self) -> Option<u8> {
        match self {
            ScaleKind::Cardinal => None,
            ScaleKind::Qualitative4 => Some(4),
            ScaleKind::Qualitative16 => Some(16),
        }
    }

    /// Checks a numeric value against the scale and returns it unchanged.
    pub fn check_value(self, value: f64) -> Result<f64, ScaleError> {
        if !value.is_finite() {
            return Err(ScaleError::NotFinite(value));
        }
        if let Some(max) = self.max_code() {
            if value.fract() != 0.0 {
                return Err(ScaleError::NotInteger { value, scale: self });
            }
            if value < 1.0 || value > f64::from(max) {
                return Err(ScaleError::CodeOutOfRange {
                    code: value as i64,
                    max,
                });
            }
        }
        Ok(value)
    }

    /// Parses a cell that is either a number or a qualitative label such as
    /// `VH`, `H-M` or `H-M(10)`.
    pub fn parse_cell(self, cell: &str) -> Result<f64, ScaleError> {
        let text = cell.trim();
        if let Ok(v) = text.parse::<f64>() {
            return self.check_value(v);
        }
        let (label, suffix) = match text.split_once('(') {
            Some((l, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| ScaleError::UnknownLabel(cell.to_string()))?;
                let code: u8 = inner
                    .trim()
                    .parse()
                    .map_err(|_| ScaleError::UnknownLabel(cell.to_string()))?;
                (l.trim(), Some(code))
            }
            None => (text, None),
        };
        let code = match (self, label.split_once('-')) {
            (ScaleKind::Qualitative4, None) => label.parse::<QualitativeLevel>()?.code(),
            (ScaleKind::Qualitative16, Some((a, b))) => {
                let a: QualitativeLevel = a.parse()?;
                let b: QualitativeLevel = b.parse()?;
                encode_lexicographic(a.code(), b.code())?
            }
            _ => {
                return Err(ScaleError::WrongScale {
                    label: cell.to_string(),
                    scale: self,
                })
            }
        };
        if let Some(s) = suffix {
            if s != code {
                return Err(ScaleError::InconsistentSuffix {
                    label: cell.to_string(),
                    code: s,
                });
            }
        }
        Ok(f64::from(code))
    }

    /// Display label for a stored value; cardinal values print as numbers.
    pub fn format_value(self, value: f64) -> String {
        let code = value as u8;
        match self {
            ScaleKind::Qualitative4 if self.check_value(value).is_ok() => QualitativeLevel(code).label().to_string(),
            ScaleKind::Qualitative16 if self.check_value(value).is_ok() => {
                let (a, b) = decode_lexicographic(code).expect("checked range");
                format!("{}-{}", QualitativeLevel(a).label(), QualitativeLevel(b).label())
            }
            _ => format!("{value}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

impl Direction {
    /// Multiplier that turns a raw performance into a gain.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Maximize => 1.0,
            Direction::Minimize => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceKind {
    /// Transcribed from a printed table or constraint listing.
    Table,
    /// Not tabulated at the source; filled in and documented by hand.
    Reconstructed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    pub source: String,
}

/// Functions a project can host once restored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Function {
    /// Tourist facilities.
    U1,
    /// Museum and archaeological sites.
    U2,
    /// Student and elderly housing.
    U3,
    /// Leisure activities.
    U4,
    /// Record office archives.
    U5,
    /// Public services.
    U6,
}

impl Function {
    pub const ALL: [Function; 6] = [
        Function::U1,
        Function::U2,
        Function::U3,
        Function::U4,
        Function::U5,
        Function::U6,
    ];
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Function {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Function::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown function {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub unit: String,
    #[serde(default)]
    pub direction: Direction,
    pub scale: ScaleKind,
    pub indifference: ThresholdSpec,
    pub preference: ThresholdSpec,
    pub veto: ThresholdSpec,
    /// Bounds of the measurement scale, used to check threshold ordering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub id: String,
    #[serde(default)]
    pub label: String,
    pub performances: BTreeMap<String, f64>,
    pub cost: f64,
    #[serde(default)]
    pub on_decumano: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrant: Option<u8>,
    #[serde(default)]
    pub functions: BTreeSet<Function>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub id: String,
    pub performances: BTreeMap<String, f64>,
}

/// Representative profiles `B_h` of one category. Categories are numbered
/// from 1 (lowest priority) upward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub category: usize,
    #[serde(default)]
    pub label: String,
    pub profiles: Vec<ReferenceProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight vector {name:?} has no weight for criterion {criterion:?}")]
    Missing { name: String, criterion: String },
    #[error("weight vector {name:?} has an invalid weight {value} for {criterion:?}")]
    Invalid {
        name: String,
        criterion: String,
        value: f64,
    },
    #[error("weight vector {name:?} sums to zero")]
    ZeroSum { name: String },
}

/// Raw weights keyed by criterion id, conventionally summing to 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub name: String,
    pub weights: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl WeightVector {
    pub fn new(name: impl Into<String>, weights: BTreeMap<String, f64>) -> Self {
        Self {
            name: name.into(),
            weights,
            provenance: None,
        }
    }

    /// Weights aligned with `criteria` and scaled to sum to one.
    pub fn normalized(&self, criteria: &[Criterion]) -> Result<Vec<f64>, WeightError> {
        let raw = criteria
            .iter()
            .map(|c| {
                let w = *self.weights.get(&c.id).ok_or_else(|| WeightError::Missing {
                    name: self.name.clone(),
                    criterion: c.id.clone(),
                })?;
                if !w.is_finite() || w < 0.0 {
                    return Err(WeightError::Invalid {
                        name: self.name.clone(),
                        criterion: c.id.clone(),
                        value: w,
                    });
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>, _>>()?;
        normalize(&raw).ok_or_else(|| WeightError::ZeroSum {
            name: self.name.clone(),
        })
    }
}

/// Divides by the total; `None` when the total is not positive.
pub fn normalize(raw: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = raw.iter().sum();
    if total > 0.0 && total.is_finite() {
        Some(raw.iter().map(|w| w / total).collect())
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBudget {
    pub name: String,
    pub amount: f64,
}

/// Everything one case study needs: data, elicitation results and the
/// constraint profiles used by the selection stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub lambda: f64,
    pub criteria: Vec<Criterion>,
    pub actions: Vec<Action>,
    pub categories: Vec<ReferenceSet>,
    #[serde(default)]
    pub weight_vectors: Vec<WeightVector>,
    #[serde(default)]
    pub decks: Vec<DeckSpec>,
    #[serde(default)]
    pub constraint_profiles: Vec<ConstraintProfile>,
    #[serde(default)]
    pub budgets: Vec<NamedBudget>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl Scenario {
    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn action_index(&self, id: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.id == id)
    }

    pub fn weight_vector(&self, name: &str) -> Option<&WeightVector> {
        self.weight_vectors.iter().find(|w| w.name == name)
    }

    pub fn constraint_profile(&self, name: &str) -> Option<&ConstraintProfile> {
        self.constraint_profiles.iter().find(|p| p.name == name)
    }

    /// Resolves a budget given either by name (`B2`) or as an amount.
    pub fn resolve_budget(&self, text: &str) -> Option<f64> {
        if let Some(b) = self.budgets.iter().find(|b| b.name == text) {
            return Some(b.amount);
        }
        text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }

    /// Number of categories `q`.
    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    /// Observed span of every criterion over actions and profiles, widened by
    /// the declared range when present.
    pub fn performance_range(&self, criterion: &Criterion) -> Option<[f64; 2]> {
        let values = self
            .actions
            .iter()
            .map(|a| &a.performances)
            .chain(
                self.categories
                    .iter()
                    .flat_map(|c| c.profiles.iter().map(|p| &p.performances)),
            )
            .filter_map(|perf| perf.get(&criterion.id).copied());
        let mut span: Option<[f64; 2]> = criterion.range;
        for v in values {
            span = Some(match span {
                None => [v, v],
                Some([lo, hi]) => [lo.min(v), hi.max(v)],
            });
        }
        span
    }
}

/// A single finding; `path` is a dotted field path such as
/// `criteria.g2.preference`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation::new(path, message));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn check_performances(
    report: &mut ValidationReport,
    path: &str,
    performances: &BTreeMap<String, f64>,
    criteria: &[Criterion],
) {
    for c in criteria {
        match performances.get(&c.id) {
            None => report.error(format!("{path}.{}", c.id), "missing performance"),
            Some(&v) => {
                if let Err(e) = c.scale.check_value(v) {
                    report.error(format!("{path}.{}", c.id), e.to_string());
                }
            }
        }
    }
    for key in performances.keys() {
        if !criteria.iter().any(|c| &c.id == key) {
            report.error(format!("{path}.{key}"), "unknown criterion id");
        }
    }
}

fn duplicates<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeSet::new();
    let mut dup = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            dup.insert(id);
        }
    }
    dup.into_iter().collect()
}

/// Lists every invariant violation of `s`; the report is empty iff the
/// scenario is well formed. Negative evaluated thresholds, which are clamped
/// to zero, show up as warnings.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !(0.5..=1.0).contains(&s.lambda) {
        report.error("lambda", format!("{} is outside [0.5, 1]", s.lambda));
    }
    if s.criteria.is_empty() {
        report.error("criteria", "at least one criterion is required");
    }
    for id in duplicates(s.criteria.iter().map(|c| c.id.as_str())) {
        report.error(format!("criteria.{id}"), "duplicate criterion id");
    }
    for id in duplicates(s.actions.iter().map(|a| a.id.as_str())) {
        report.error(format!("actions.{id}"), "duplicate action id");
    }

    for c in &s.criteria {
        if let Some([lo, hi]) = c.range {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                report.error(format!("criteria.{}.range", c.id), "lower bound exceeds upper bound");
            }
        }
        if let Some(range) = s.performance_range(c) {
            let t = validate_threshold_order(c, range);
            for v in t.violations {
                report.error(format!("criteria.{}.{}", c.id, v.field), v.message);
            }
            for w in t.warnings {
                report
                    .warnings
                    .push(Violation::new(format!("criteria.{}.{}", c.id, w.field), w.message));
            }
        }
    }

    for a in &s.actions {
        let path = format!("actions.{}", a.id);
        check_performances(
            &mut report,
            &format!("{path}.performances"),
            &a.performances,
            &s.criteria,
        );
        if !(a.cost.is_finite() && a.cost >= 0.0) {
            report.error(
                format!("{path}.cost"),
                format!("cost {} must be a finite value ≥ 0", a.cost),
            );
        }
        if let Some(q) = a.quadrant {
            if !(1..=4).contains(&q) {
                report.error(format!("{path}.quadrant"), format!("quadrant {q} outside 1..=4"));
            }
        }
    }

    if s.categories.is_empty() {
        report.error("categories", "at least one category is required");
    }
    for (i, set) in s.categories.iter().enumerate() {
        let path = format!("categories.{}", set.category);
        if set.category != i + 1 {
            report.error(
                path.clone(),
                format!(
                    "category indices must be contiguous from 1; found {} at position {}",
                    set.category,
                    i + 1
                ),
            );
        }
        if set.profiles.is_empty() {
            report.error(path.clone(), "category has no reference profile");
        }
        for p in &set.profiles {
            check_performances(&mut report, &format!("{path}.{}", p.id), &p.performances, &s.criteria);
        }
    }

    for id in duplicates(s.weight_vectors.iter().map(|w| w.name.as_str())) {
        report.error(format!("weight_vectors.{id}"), "duplicate weight vector name");
    }
    for w in &s.weight_vectors {
        let path = format!("weight_vectors.{}", w.name);
        for c in &s.criteria {
            match w.weights.get(&c.id) {
                None => report.error(format!("{path}.{}", c.id), "missing weight"),
                Some(&v) if !(v.is_finite() && v > 0.0) => {
                    report.error(format!("{path}.{}", c.id), format!("weight {v} must be > 0"))
                }
                _ => {}
            }
        }
        for key in w.weights.keys() {
            if s.criterion(key).is_none() {
                report.error(format!("{path}.{key}"), format!("unknown criterion id {key:?}"));
            }
        }
    }

    let criterion_ids: Vec<String> = s.criteria.iter().map(|c| c.id.clone()).collect();
    for d in &s.decks {
        let path = format!("decks.{}", d.name);
        match d.canonical() {
            Ok(deck) => {
                for v in validate_deck(&deck, Some(&criterion_ids)) {
                    report.error(path.clone(), v);
                }
            }
            Err(e) => report.error(path, e.to_string()),
        }
    }

    for id in duplicates(s.constraint_profiles.iter().map(|p| p.name.as_str())) {
        report.error(format!("constraint_profiles.{id}"), "duplicate profile name");
    }
    for p in &s.constraint_profiles {
        for v in p.validate(s) {
            report.violations.push(v);
        }
    }
    for b in &s.budgets {
        if !(b.amount.is_finite() && b.amount >= 0.0) {
            report.error(
                format!("budgets.{}", b.name),
                format!("budget {} must be ≥ 0", b.amount),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_codes_match_published_examples() {
        assert_eq!(encode_lexicographic(4, 4).unwrap(), 16);
        assert_eq!(encode_lexicographic(1, 1).unwrap(), 1);
        assert_eq!(encode_lexicographic(3, 4).unwrap(), 12);
        assert!(encode_lexicographic(0, 2).is_err());
        assert!(encode_lexicographic(2, 5).is_err());
    }

    #[test]
    fn dominance_examples() {
        use QualitativeLevel as Q;
        assert!(!pair_dominates((Q::VH, Q::M), (Q::L, Q::VH)));
        assert!(pair_dominates((Q::H, Q::H), (Q::H, Q::H)));
        assert!(pair_dominates((Q::VH, Q::VH), (Q::L, Q::L)));
    }

    #[test]
    fn parses_labels_and_codes() {
        assert_eq!(ScaleKind::Qualitative16.parse_cell("H-M").unwrap(), 10.0);
        assert_eq!(ScaleKind::Qualitative16.parse_cell("VH-L(13)").unwrap(), 13.0);
        assert_eq!(ScaleKind::Qualitative16.parse_cell("7").unwrap(), 7.0);
        assert_eq!(ScaleKind::Qualitative4.parse_cell("vh").unwrap(), 4.0);
        assert_eq!(ScaleKind::Cardinal.parse_cell("5650").unwrap(), 5650.0);
        assert!(matches!(
            ScaleKind::Qualitative16.parse_cell("H-M(11)"),
            Err(ScaleError::InconsistentSuffix { .. })
        ));
        assert!(matches!(
            ScaleKind::Qualitative4.parse_cell("H-M"),
            Err(ScaleError::WrongScale { .. })
        ));
        assert!(ScaleKind::Qualitative4.parse_cell("5").is_err());
        assert!(ScaleKind::Qualitative4.parse_cell("X").is_err());
        assert!(ScaleKind::Cardinal.parse_cell("VH").is_err());
    }

    #[test]
    fn formats_labels() {
        assert_eq!(ScaleKind::Qualitative16.format_value(10.0), "H-M");
        assert_eq!(ScaleKind::Qualitative4.format_value(4.0), "VH");
        assert_eq!(ScaleKind::Cardinal.format_value(5650.0), "5650");
    }

    #[test]
    fn normalization_rejects_zero_total() {
        assert!(normalize(&[0.0, 0.0]).is_none());
        let n = normalize(&[1.0, 3.0]).unwrap();
        assert_eq!(n, vec![0.25, 0.75]);
    }
}

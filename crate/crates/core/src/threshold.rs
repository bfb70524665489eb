//! Discrimination and veto thresholds: direct affine functions of the worse
//! of the two compared performances, their calibration from two anchors and
//! the `0 ≤ q ≤ p ≤ v` ordering check over a performance range.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Criterion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// No threshold: `q = p = 0` when used as a discrimination threshold,
    /// no veto when used as `v`.
    None,
    Constant {
        value: f64,
    },
    Affine {
        alpha: f64,
        beta: f64,
    },
}

impl ThresholdSpec {
    /// Unclamped value at `worse`; `None` for kind none.
    pub fn raw(&self, worse: f64) -> Option<f64> {
        match *self {
            ThresholdSpec::None => None,
            ThresholdSpec::Constant { value } => Some(value),
            ThresholdSpec::Affine { alpha, beta } => Some(alpha * worse + beta),
        }
    }

    /// Value at `worse`, clamped at zero from below.
    pub fn evaluate(&self, worse: f64) -> Option<f64> {
        self.raw(worse).map(|v| v.max(0.0))
    }

    fn zero_crossing(&self) -> Option<f64> {
        match *self {
            ThresholdSpec::Affine { alpha, beta } if alpha != 0.0 => Some(-beta / alpha),
            _ => None,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            ThresholdSpec::None => true,
            ThresholdSpec::Constant { value } => value.is_finite(),
            ThresholdSpec::Affine { alpha, beta } => alpha.is_finite() && beta.is_finite(),
        }
    }
}

impl fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ThresholdSpec::None => f.write_str("none"),
            ThresholdSpec::Constant { value } => write!(f, "{value}"),
            ThresholdSpec::Affine { alpha, beta } => write!(f, "{alpha}·x + {beta}"),
        }
    }
}

/// Indifference or preference threshold at `worse`; kind none reads as 0.
pub fn evaluate_threshold(spec: &ThresholdSpec, worse: f64) -> f64 {
    spec.evaluate(worse).unwrap_or(0.0)
}

/// Veto threshold at `worse`; kind none reads as `+∞`.
pub fn evaluate_veto(spec: &ThresholdSpec, worse: f64) -> f64 {
    spec.evaluate(worse).unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub reference: f64,
    pub threshold: f64,
}

/// Two elicited points `(reference performance, threshold value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub first: Anchor,
    pub second: Anchor,
}

impl AnchorPair {
    pub fn new(first: (f64, f64), second: (f64, f64)) -> Self {
        Self {
            first: Anchor {
                reference: first.0,
                threshold: first.1,
            },
            second: Anchor {
                reference: second.0,
                threshold: second.1,
            },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("anchors share the reference performance {0}; the system is singular")]
    Singular(f64),
    #[error("anchor value {0} is not a finite number")]
    NotFinite(f64),
    #[error("threshold value {0} is negative")]
    Negative(f64),
}

/// Solves `t = α·x + β` through both anchors. Anchors are sorted by
/// reference first so the result does not depend on their order.
pub fn calibrate_affine(pair: &AnchorPair) -> Result<ThresholdSpec, CalibrationError> {
    let mut pts = [pair.first, pair.second];
    for a in &pts {
        for v in [a.reference, a.threshold] {
            if !v.is_finite() {
                return Err(CalibrationError::NotFinite(v));
            }
        }
        if a.threshold < 0.0 {
            return Err(CalibrationError::Negative(a.threshold));
        }
    }
    pts.sort_by(|a, b| a.reference.total_cmp(&b.reference));
    let [a, b] = pts;
    if a.reference == b.reference {
        return Err(CalibrationError::Singular(a.reference));
    }
    let alpha = (b.threshold - a.threshold) / (b.reference - a.reference);
    let beta = a.threshold - alpha * a.reference;
    Ok(ThresholdSpec::Affine { alpha, beta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdIssue {
    /// `indifference`, `preference` or `veto`.
    pub field: &'static str,
    pub from: f64,
    pub to: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdReport {
    pub violations: Vec<ThresholdIssue>,
    pub warnings: Vec<ThresholdIssue>,
}

/// Hull of the sub-interval of `points[0]..=points[last]` where the piecewise
/// linear function `d` (linear between consecutive points) is negative.
fn negative_region(points: &[f64], d: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let scale = points.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale.max(points.iter().map(|&x| d(x).abs()).fold(1.0, f64::max));
    let mut region: Option<(f64, f64)> = None;
    let mut extend = |a: f64, b: f64| {
        region = Some(match region {
            None => (a, b),
            Some((lo, hi)) => (lo.min(a), hi.max(b)),
        });
    };
    if points.len() == 1 {
        if d(points[0]) < -tol {
            extend(points[0], points[0]);
        }
        return region;
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (da, db) = (d(a), d(b));
        let cross = |va: f64, vb: f64| a + (b - a) * va / (va - vb);
        match (da < -tol, db < -tol) {
            (true, true) => extend(a, b),
            (true, false) => extend(a, cross(da, db)),
            (false, true) => extend(cross(da, db), b),
            (false, false) => {}
        }
    }
    region
}

/// Checks `0 ≤ q ≤ p ≤ v` over `range`. Ordering is checked on clamped
/// values at the range ends and at every zero or pairwise crossing inside
/// it; a raw value below zero is reported as a warning because evaluation
/// clamps it.
pub fn validate_threshold_order(criterion: &Criterion, range: [f64; 2]) -> ThresholdReport {
    let mut report = ThresholdReport::default();
    let [lo, hi] = range;
    let specs = [
        ("indifference", criterion.indifference),
        ("preference", criterion.preference),
        ("veto", criterion.veto),
    ];

    for (field, spec) in specs {
        if !spec.is_finite() {
            report.violations.push(ThresholdIssue {
                field,
                from: lo,
                to: hi,
                message: format!("threshold {spec} has a non-finite coefficient"),
            });
            return report;
        }
        if let ThresholdSpec::Constant { value } = spec {
            if value < 0.0 {
                report.violations.push(ThresholdIssue {
                    field,
                    from: lo,
                    to: hi,
                    message: format!("constant threshold {value} is negative"),
                });
            }
        }
    }

    let mut points = vec![lo, hi];
    for (_, s) in specs {
        points.extend(s.zero_crossing());
    }
    for (i, (_, s)) in specs.iter().enumerate() {
        for (_, t) in &specs[i + 1..] {
            if let (ThresholdSpec::Affine { alpha: a1, beta: b1 }, ThresholdSpec::Affine { alpha: a2, beta: b2 }) =
                (s, t)
            {
                if a1 != a2 {
                    points.push((b2 - b1) / (a1 - a2));
                }
            }
        }
    }
    points.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    for (field, spec) in specs {
        if let ThresholdSpec::Affine { .. } = spec {
            if let Some((from, to)) = negative_region(&points, |x| spec.raw(x).unwrap_or(0.0)) {
                report.warnings.push(ThresholdIssue {
                    field,
                    from,
                    to,
                    message: format!("{spec} is negative on [{from}, {to}] and is clamped to 0"),
                });
            }
        }
    }

    let q = |x: f64| evaluate_threshold(&criterion.indifference, x);
    let p = |x: f64| evaluate_threshold(&criterion.preference, x);
    if let Some((from, to)) = negative_region(&points, |x| p(x) - q(x)) {
        report.violations.push(ThresholdIssue {
            field: "preference",
            from,
            to,
            message: format!("indifference exceeds preference on [{from}, {to}]"),
        });
    }
    if !matches!(criterion.veto, ThresholdSpec::None) {
        let v = |x: f64| evaluate_veto(&criterion.veto, x);
        if let Some((from, to)) = negative_region(&points, |x| v(x) - p(x)) {
            report.violations.push(ThresholdIssue {
                field: "veto",
                from,
                to,
                message: format!("preference exceeds veto on [{from}, {to}]"),
            });
        }
    }
    report
}

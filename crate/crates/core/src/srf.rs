//! Deck-of-cards weighting: ranked levels of criterion cards with blank cards
//! between levels and a most/least importance ratio `z`.
//!
//! With `m` levels ordered least to most important and `e_r` blanks between
//! level `r` and `r+1`, the unit is `u = (z−1) / Σ_r (e_r+1)` and level `r`
//! gets the non-normalized value `k(r) = 1 + u·Σ_{s<r}(e_s+1)`. Every
//! criterion takes the value of its level; values are scaled to sum to 100.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Provenance;

/// Canonical deck, least important level first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardDeck {
    pub levels: Vec<Vec<String>>,
    /// `blanks[r]` blank cards sit between `levels[r]` and `levels[r+1]`.
    pub blanks: Vec<u32>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeckOrder {
    #[default]
    LeastFirst,
    MostFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeckLevel {
    pub criteria: Vec<String>,
    /// Blank cards between this level and the one listed before it.
    #[serde(default)]
    pub blanks: u32,
}

/// File form of a deck: levels in the order the expert listed them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeckSpec {
    pub name: String,
    pub ratio: f64,
    #[serde(default)]
    pub order: DeckOrder,
    pub levels: Vec<DeckLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeckError {
    #[error("the first listed level cannot carry blank cards (found {0})")]
    LeadingBlanks(u32),
    #[error("invalid deck: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

impl DeckSpec {
    /// Reorders the listed levels to least-first and moves each blank count
    /// onto the gap it describes.
    pub fn canonical(&self) -> Result<CardDeck, DeckError> {
        if let Some(first) = self.levels.first() {
            if first.blanks != 0 {
                return Err(DeckError::LeadingBlanks(first.blanks));
            }
        }
        let mut levels: Vec<Vec<String>> = self.levels.iter().map(|l| l.criteria.clone()).collect();
        let mut blanks: Vec<u32> = self.levels.iter().skip(1).map(|l| l.blanks).collect();
        if self.order == DeckOrder::MostFirst {
            levels.reverse();
            blanks.reverse();
        }
        Ok(CardDeck {
            levels,
            blanks,
            ratio: self.ratio,
        })
    }

    pub fn from_deck(name: impl Into<String>, deck: &CardDeck) -> Self {
        let levels = deck
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| DeckLevel {
                criteria: l.clone(),
                blanks: if i == 0 {
                    0
                } else {
                    deck.blanks.get(i - 1).copied().unwrap_or(0)
                },
            })
            .collect();
        Self {
            name: name.into(),
            ratio: deck.ratio,
            order: DeckOrder::LeastFirst,
            levels,
            provenance: None,
        }
    }
}

/// Lists violations; empty iff the deck is usable. When `criteria` is given
/// the deck must cover exactly that set.
pub fn validate_deck(deck: &CardDeck, criteria: Option<&[String]>) -> Vec<String> {
    let mut out = Vec::new();
    if deck.levels.is_empty() {
        out.push("deck has no level".to_string());
    }
    if deck.blanks.len() + 1 != deck.levels.len().max(1) {
        out.push(format!(
            "{} blank counts for {} levels; expected one per gap",
            deck.blanks.len(),
            deck.levels.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for (r, level) in deck.levels.iter().enumerate() {
        if level.is_empty() {
            out.push(format!("level {} is empty", r + 1));
        }
        for c in level {
            if !seen.insert(c.as_str()) {
                out.push(format!("criterion {c:?} appears more than once"));
            }
        }
    }
    if !deck.ratio.is_finite() || (deck.levels.len() >= 2 && deck.ratio <= 1.0) {
        out.push(format!("ratio z = {} must be a finite number > 1", deck.ratio));
    }
    if let Some(expected) = criteria {
        for c in expected {
            if !seen.contains(c.as_str()) {
                out.push(format!("criterion {c:?} is missing from the deck"));
            }
        }
        for c in &seen {
            if !expected.iter().any(|e| e == c) {
                out.push(format!("unknown criterion {c:?}"));
            }
        }
    }
    out
}

/// Non-normalized value `k(r)` of every level, least important first. The
/// first level is 1 and the last is `z`.
pub fn level_values(deck: &CardDeck) -> Vec<f64> {
    let gaps: Vec<f64> = deck.blanks.iter().map(|&e| f64::from(e) + 1.0).collect();
    let total: f64 = gaps.iter().sum();
    let unit = if total > 0.0 { (deck.ratio - 1.0) / total } else { 0.0 };
    let mut acc = 0.0;
    let mut values = Vec::with_capacity(deck.levels.len());
    for r in 0..deck.levels.len() {
        values.push(1.0 + unit * acc);
        if r < gaps.len() {
            acc += gaps[r];
        }
    }
    values
}

/// Full-precision weights summing to 100, keyed by criterion id.
pub fn compute_srf_weights(deck: &CardDeck) -> Result<BTreeMap<String, f64>, DeckError> {
    let issues = validate_deck(deck, None);
    if !issues.is_empty() {
        return Err(DeckError::Invalid(issues));
    }
    let values = level_values(deck);
    let total: f64 = deck.levels.iter().zip(&values).map(|(l, k)| l.len() as f64 * k).sum();
    Ok(deck
        .levels
        .iter()
        .zip(&values)
        .flat_map(|(level, k)| level.iter().map(move |c| (c.clone(), 100.0 * k / total)))
        .collect())
}

/// Rounds each weight to `decimals` places for display.
pub fn round_weights(weights: &BTreeMap<String, f64>, decimals: i32) -> BTreeMap<String, f64> {
    let f = 10f64.powi(decimals);
    weights.iter().map(|(k, v)| (k.clone(), (v * f).round() / f)).collect()
}

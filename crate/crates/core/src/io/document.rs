use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{read_file, IoError};
use crate::constraints::ConstraintProfile;
use crate::domain::{
    validate_scenario, Action, Criterion, Function, NamedBudget, Provenance, ReferenceProfile, ReferenceSet, Scenario,
    WeightVector,
};
use crate::outranking::AssignmentResult;
use crate::srf::DeckSpec;
use crate::threshold::{AnchorPair, ThresholdSpec};

pub const SCENARIO_SCHEMA: &str = "priosel.scenario";
pub const OVERLAY_SCHEMA: &str = "priosel.overlay";
pub const ASSIGNMENTS_SCHEMA: &str = "priosel.assignments";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

fn check_header(text: &str, expected: &'static str) -> Result<(), IoError> {
    let h: Header = serde_json::from_str(text).map_err(IoError::from_json)?;
    if h.schema != expected || h.version != SCHEMA_VERSION {
        return Err(IoError::Schema {
            expected,
            version: SCHEMA_VERSION,
            found: h.schema,
            found_version: h.version,
        });
    }
    Ok(())
}

/// A performance cell: a number or a qualitative label such as `H-M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Label(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    id: String,
    #[serde(default)]
    label: String,
    performances: BTreeMap<String, Cell>,
    cost: f64,
    #[serde(default)]
    on_decumano: bool,
    #[serde(default)]
    insula: Option<String>,
    #[serde(default)]
    quadrant: Option<u8>,
    #[serde(default)]
    functions: BTreeSet<Function>,
    #[serde(default)]
    provenance: BTreeMap<String, Provenance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    id: String,
    performances: BTreeMap<String, Cell>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReferenceSet {
    category: usize,
    #[serde(default)]
    label: String,
    profiles: Vec<RawProfile>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    version: u32,
    name: String,
    #[serde(default)]
    description: String,
    lambda: f64,
    criteria: Vec<Criterion>,
    actions: Vec<RawAction>,
    categories: Vec<RawReferenceSet>,
    #[serde(default)]
    weight_vectors: Vec<WeightVector>,
    #[serde(default)]
    decks: Vec<DeckSpec>,
    #[serde(default)]
    constraint_profiles: Vec<ConstraintProfile>,
    #[serde(default)]
    budgets: Vec<NamedBudget>,
    #[serde(default)]
    notes: BTreeMap<String, String>,
}

fn decode_cells(
    path: &str,
    cells: BTreeMap<String, Cell>,
    criteria: &[Criterion],
) -> Result<BTreeMap<String, f64>, IoError> {
    cells
        .into_iter()
        .map(|(key, cell)| {
            let criterion = criteria.iter().find(|c| c.id == key);
            let value = match (cell, criterion) {
                (Cell::Number(v), _) => v,
                (Cell::Label(text), Some(c)) => c
                    .scale
                    .parse_cell(&text)
                    .map_err(|e| IoError::decode(format!("{path}.{key}"), e.to_string()))?,
                (Cell::Label(_), None) => return Err(IoError::decode(format!("{path}.{key}"), "unknown criterion id")),
            };
            Ok((key, value))
        })
        .collect()
}

fn decode_sets(raw: Vec<RawReferenceSet>, criteria: &[Criterion]) -> Result<Vec<ReferenceSet>, IoError> {
    raw.into_iter()
        .map(|set| {
            let profiles = set
                .profiles
                .into_iter()
                .map(|p| {
                    let path = format!("categories.{}.{}", set.category, p.id);
                    Ok(ReferenceProfile {
                        performances: decode_cells(&path, p.performances, criteria)?,
                        id: p.id,
                    })
                })
                .collect::<Result<_, IoError>>()?;
            Ok(ReferenceSet {
                category: set.category,
                label: set.label,
                profiles,
                provenance: set.provenance,
            })
        })
        .collect()
}

/// Parses and decodes a scenario document without validating it.
pub fn parse_scenario_unchecked(text: &str) -> Result<Scenario, IoError> {
    check_header(text, SCENARIO_SCHEMA)?;
    let raw: RawScenario = serde_json::from_str(text).map_err(IoError::from_json)?;
    let criteria = raw.criteria;
    let actions = raw
        .actions
        .into_iter()
        .map(|a| {
            let path = format!("actions.{}.performances", a.id);
            Ok(Action {
                performances: decode_cells(&path, a.performances, &criteria)?,
                id: a.id,
                label: a.label,
                cost: a.cost,
                on_decumano: a.on_decumano,
                insula: a.insula,
                quadrant: a.quadrant,
                functions: a.functions,
                provenance: a.provenance,
            })
        })
        .collect::<Result<_, IoError>>()?;
    let categories = decode_sets(raw.categories, &criteria)?;
    Ok(Scenario {
        name: raw.name,
        description: raw.description,
        lambda: raw.lambda,
        criteria,
        actions,
        categories,
        weight_vectors: raw.weight_vectors,
        decks: raw.decks,
        constraint_profiles: raw.constraint_profiles,
        budgets: raw.budgets,
        notes: raw.notes,
    })
}

/// Parses, decodes qualitative labels and validates.
pub fn parse_scenario(text: &str) -> Result<Scenario, IoError> {
    let s = parse_scenario_unchecked(text)?;
    let report = validate_scenario(&s);
    if report.is_ok() {
        Ok(s)
    } else {
        Err(IoError::Invalid(report))
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, IoError> {
    parse_scenario(&read_file(path.as_ref())?)
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema: &'static str,
    version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn to_pretty<T: Serialize>(schema: &'static str, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Versioned {
        schema,
        version: SCHEMA_VERSION,
        body,
    })
    .expect("documents serialize to JSON");
    s.push('\n');
    s
}

/// Canonical text of a scenario: codes instead of labels, stable key order.
pub fn save_scenario(s: &Scenario) -> String {
    to_pretty(SCENARIO_SCHEMA, s)
}

/// SHA-256 of the canonical text.
pub fn scenario_hash(s: &Scenario) -> String {
    sha256_hex(save_scenario(s).as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indifference: Option<ThresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<ThresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub veto: Option<ThresholdSpec>,
}

/// Alternative parameters layered over a base scenario: replaced
/// thresholds and, optionally, a replacement set of reference profiles.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverlay {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    version: u32,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    criteria: BTreeMap<String, ThresholdOverride>,
    #[serde(default)]
    categories: Option<Vec<RawReferenceSet>>,
}

/// Applies an overlay document to `base` and validates the result.
pub fn apply_overlay(base: &Scenario, overlay_text: &str) -> Result<Scenario, IoError> {
    check_header(overlay_text, OVERLAY_SCHEMA)?;
    let o: RawOverlay = serde_json::from_str(overlay_text).map_err(IoError::from_json)?;
    let mut s = base.clone();
    if let Some(n) = o.name {
        s.name = n;
    }
    if let Some(d) = o.description {
        s.description = d;
    }
    for (id, t) in o.criteria {
        let c = s
            .criteria
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| IoError::decode(format!("criteria.{id}"), "unknown criterion id"))?;
        if let Some(q) = t.indifference {
            c.indifference = q;
        }
        if let Some(p) = t.preference {
            c.preference = p;
        }
        if let Some(v) = t.veto {
            c.veto = v;
        }
    }
    if let Some(sets) = o.categories {
        s.categories = decode_sets(sets, &s.criteria)?;
    }
    let report = validate_scenario(&s);
    if report.is_ok() {
        Ok(s)
    } else {
        Err(IoError::Invalid(report))
    }
}

pub fn parse_deck(text: &str) -> Result<DeckSpec, IoError> {
    serde_json::from_str(text).map_err(IoError::from_json)
}

pub fn load_deck(path: impl AsRef<Path>) -> Result<DeckSpec, IoError> {
    parse_deck(&read_file(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAnchors {
    pub name: String,
    #[serde(flatten)]
    pub anchors: AnchorPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorFile {
    pub pairs: Vec<NamedAnchors>,
}

pub fn parse_anchors(text: &str) -> Result<AnchorFile, IoError> {
    serde_json::from_str(text).map_err(IoError::from_json)
}

/// Output of a sorting run, the input of a selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRun {
    pub scenario: String,
    pub scenario_hash: String,
    pub weights: String,
    pub lambda: f64,
    pub assignments: Vec<AssignmentResult>,
}

pub fn save_assignment_run(run: &AssignmentRun) -> String {
    to_pretty(ASSIGNMENTS_SCHEMA, run)
}

pub fn parse_assignment_run(text: &str) -> Result<AssignmentRun, IoError> {
    check_header(text, ASSIGNMENTS_SCHEMA)?;
    #[derive(Deserialize)]
    struct Doc {
        #[serde(flatten)]
        run: AssignmentRun,
    }
    let d: Doc = serde_json::from_str(text).map_err(IoError::from_json)?;
    Ok(d.run)
}

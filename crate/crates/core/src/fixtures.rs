//! The Naples case study, embedded so that tools and tests run without a
//! data directory.

use crate::domain::Scenario;
use crate::io::{apply_overlay, parse_scenario};

pub const NAPLES_JSON: &str = include_str!("../fixtures/naples.json");
pub const NAPLES_SEVEN_PROFILES_OVERLAY: &str = include_str!("../fixtures/naples_seven_profiles.json");

/// Pins the embedded scenario text so edits to transcribed data are deliberate.
pub struct FixtureNote {
    pub sha256: &'static str,
    pub note: &'static str,
}

pub const NAPLES_FIXTURE_NOTE: FixtureNote = FixtureNote {
    sha256: "20ccd20f1fdc9bd0b8563931cd8bae43bbed10c7c256a0c3b8edd09e93a57965",
    note: "naples.json changed: re-check every transcribed value against its provenance \
           note, then update this checksum",
};

pub const BUILTIN_NAMES: [&str; 2] = ["naples", "naples-seven-profiles"];

pub fn naples() -> Scenario {
    parse_scenario(NAPLES_JSON).expect("embedded scenario is valid")
}

/// The base scenario with seven reference profiles and recalibrated
/// thresholds on g2 and g6.
pub fn naples_seven_profiles() -> Scenario {
    apply_overlay(&naples(), NAPLES_SEVEN_PROFILES_OVERLAY).expect("embedded overlay is valid")
}

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "naples" => Some(naples()),
        "naples-seven-profiles" => Some(naples_seven_profiles()),
        _ => None,
    }
}

//! Prioritizing and selecting restoration projects: SRF weights, affine
//! threshold calibration, ELECTRE Tri-nC sorting and 0-1 portfolio selection.

pub mod constraints;
pub mod domain;
pub mod fixtures;
pub mod io;
pub mod ladder;
pub mod outranking;
pub mod robustness;
pub mod solver;
pub mod srf;
pub mod threshold;

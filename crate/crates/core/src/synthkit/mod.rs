//! Seeded synthetic scenarios and brute-force reference scores.
//!
//! [`generate`] builds scenarios from a compact [`ArchetypeSpec`], e.g. a
//! slow solver that solves almost everything against a fast one that gives
//! up more often. [`oracle::oracle_score`] recomputes every metric directly
//! from the definitions, sharing no code with [`crate::metrics`], so the two
//! can be checked against each other.

mod generate;
pub mod oracle;

pub use generate::{generate, ArchetypeSpec, Dist, SolverSpec, SynthError};
pub use oracle::{oracle_score, OracleError};

//! Desk-scale cryptanalysis lab for a sum/product-based verifiable shuffle.
//!
//! The library implements the three-move shuffle proof in four modes
//! (ORIGINAL, MP2, MSBMT, FIXED), the attacks that separate them, a catalog
//! of range-proof primitives with an exponentiation cost model, and seeded
//! experiment harnesses.

pub mod attacks;
pub mod elgamal;
pub mod group;
pub mod proof;
pub mod range;
pub mod report;
pub mod seed;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("no inverse")]
    NoInverse,
    #[error("empty prime range")]
    EmptyPrimeRange,
    #[error("message not in G_q")]
    MessageNotInSubgroup,
    #[error("length mismatch")]
    LengthMismatch,
    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),
    #[error("attack not applicable: {0}")]
    AttackNotApplicable(String),
    #[error("rho too large for attack window")]
    EmptyAttackWindow,
    #[error("honest input out of range")]
    OutOfRange,
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

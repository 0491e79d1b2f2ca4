//! Exact computations with templicial modules.
//!
//! The crate works at a fixed truncation dimension with exact coefficients
//! (rationals, integers or a prime field). It provides simplicial sets,
//! quivers, templicial modules and their axiom checks, linear nerves,
//! homotopy categories, nonassociative Frobenius structures with horn and
//! wedge fillers, the tensor algebra / kernel equivalence, the augmented
//! Dold-Kan correspondence and linear dg-nerves.
//!
//! See the `examples/` directory of this crate for runnable tours.

pub mod cli;
pub mod dgcat;
pub mod doldkan;
pub mod exactcore;
pub mod fixtures;
pub mod frobenius;
pub mod intervals;
pub mod quiver;
pub mod report;
pub mod simplicial;
pub mod templicial;
pub mod tensorfrob;

pub use exactcore::{Comb, FreeModule, LinearMap, Ring, Scalar};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

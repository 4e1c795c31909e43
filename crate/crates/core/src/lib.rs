//! Exact laboratory for perfect matchings in robust expanders.
//!
//! Everything here is a finite, exactly checkable computation: perfect
//! matching counts and strata, robust expansion sweeps, the switching graph
//! between strata, random-walk matrices and the Poisson comparison of
//! `|M ∩ N|`. Matrix and distribution code is generic over the scalar type;
//! the aliases below fix the concrete types used throughout.

pub mod error;
pub mod exact;
pub mod expansion;
pub mod graph;
pub mod matrix;
pub mod pm;
pub mod stats;
pub mod switching;
pub mod walks;

use num_bigint::BigUint;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use graph::{Bipartition, Digraph, FixedSet, Graph, Matching};
pub use matrix::{Matrix, Scalar};
pub use stats::Pmf;

/// Arbitrary-precision non-negative counts: matchings, strata, walks.
pub type Count = BigUint;
/// Exact probabilities and ratios.
pub type Exact = BigRational;

pub type ExactMatrix = Matrix<Exact>;
pub type CountMatrix = Matrix<Count>;
pub type FloatMatrix = Matrix<f64>;

pub type ExactPmf = Pmf<Exact>;
pub type FloatPmf = Pmf<f64>;

//! Exact computation of Carlitz-type q-Euler numbers and polynomials, the
//! fermionic p-adic q-integral as a limit of truncated partial sums, and
//! verification of the symmetric-group invariance identities those
//! polynomials satisfy for odd weight vectors.
//!
//! Every value on the exact path is a [`Rational`]; verdicts are exact
//! equalities, never floating-point comparisons.

pub mod cli;
pub mod error;
pub mod euler;
pub mod padic;
pub mod qcalc;
pub mod symmetry;

pub use error::{Error, Result};
pub use qcalc::{BracketArg, QSample, Rational};

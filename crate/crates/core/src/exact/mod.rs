//! Exact arithmetic in cyclotomic fields over the rationals.

mod cycq;
mod matrix;
mod phases;

pub use cycq::{cyclotomic_polynomial, int, rat, CycQ, Rational};
pub use matrix::{rational_matrix, Matrix, Subspace};
pub use phases::{alpha_invariant, matrix_order, phase_multiplicities, PhaseMultiplicities};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix power A^{power} is not the identity")]
    NotOfOrder { power: u32 },
    #[error("no finite order up to {bound}")]
    InfiniteOrder { bound: u32 },
    #[error("phase multiplicity for j = {j} is {value}, not a non-negative integer")]
    NonIntegralMultiplicity { j: u32, value: String },
    #[error("singular matrix")]
    Singular,
    #[error("subspace is not invariant under the map")]
    NotInvariant,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// `serialize_with` helper writing a rational as its fraction string.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

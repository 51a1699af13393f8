//! The Weil representation of SL(2, F₃) on the group algebra of a ternary
//! quadratic module, its characters, and special invariant vectors.

mod characters;
mod group;
mod rep;
mod special;

pub use characters::{CharacterTable, CLASS_SIZES};
pub use group::{class_of, class_sizes, elements_with_words, ClassName, Gen, SL2F3};
pub use rep::{
    aggregate, aggregated_dual, build_weil, character_decompose, expected_dual, isotypic_projector, isotypic_v,
    Decomposition, WeilRep, CHI3,
};
pub use special::{
    commutes_with, o_q_character_norm, special_vector, special_vector_from_coeffs, verify_special, IdentityCheck,
    SpecialVector,
};

use thiserror::Error;

use crate::exact::ExactError;
use crate::fqm::FqmError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("the Weil representation is built only for ternary modules")]
    NotTernary,
    #[error("relation {0} fails")]
    Relation(&'static str),
    #[error("aggregated rho*({what}) differs from the expected matrix\nexpected:\n{expected}actual:\n{actual}")]
    Mismatch { what: &'static str, expected: String, actual: String },
    #[error("character table check failed: {0}")]
    CharacterTable(String),
    #[error("multiplicity of chi{index} is {value}, not a non-negative integer")]
    NonIntegralMultiplicity { index: usize, value: String },
    #[error("subspace has dimension {found}, expected {expected}")]
    WrongRank { expected: usize, found: usize },
    #[error("permutation action does not preserve the subspace")]
    NotInvariant,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Fqm(#[from] FqmError),
}

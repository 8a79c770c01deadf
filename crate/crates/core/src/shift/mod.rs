//! The Δ(z) shift: turning σ-twisted modules into σσ_h-twisted ones.

mod delta;
mod states;

use thiserror::Error;

pub use delta::{
    apply_delta, apply_delta_inverse, build_h_sigma, check_delta_conjugation, check_sigma_h, check_shifted_jacobi,
    delta_terms, shifted_field, zero_mode_bilinear, CartanDatum,
};
pub use states::StateFields;

use crate::fields::FieldError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShiftError {
    #[error("not a vertex algebra build: {0}")]
    NotVertexAlgebra(String),
    #[error("h(0) is not diagonal on {0}")]
    NotDiagonal(String),
    #[error("h(0) eigenvalue {0} is not in (1/T)Z")]
    Spectrum(String),
    #[error("the automorphism has no finite order up to {0}")]
    NonFiniteOrder(u32),
    #[error("the automorphism is not diagonalizable over the coefficient field")]
    NotDiagonalizable,
    #[error("bad polarization: {0}")]
    Polarization(String),
    #[error("Cartan datum: {0}")]
    Cartan(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

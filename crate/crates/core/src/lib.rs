//! Exact twisted vertex operators on truncated graded modules.

pub mod algebras;
pub mod exactcalc;
pub mod fields;
pub mod shift;
pub mod statespace;
pub mod verify;

pub use exactcalc::{Cyclotomic, Exponent, Rational};

/// Default scalar field.
pub type Scalar = Cyclotomic;

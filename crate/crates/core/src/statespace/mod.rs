//! Truncated graded modules, sparse operators and quotients.

mod pbw;
mod quotient;
mod space;
mod vector;

pub use pbw::{Bracket, GeneratorInfo, LowestSpace, ModeAlgebra, Mode, ModuleError, Monomial, PbwModule, Role};
pub use quotient::{degree_bounded_modes, quotient_space, Quotient};
pub use space::{BasisEntry, GradedSuperSpace, OperatorError, SparseOperator};
pub use vector::{koszul, BasisId, Parity, Vector};

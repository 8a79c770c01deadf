//! Coefficient-by-coefficient checks of vertex-operator identities.

mod checks;
mod report;

pub use checks::{
    check_commutator_formula, check_commuting_product, check_iterate_associativity, check_nilpotency,
    check_twisted_jacobi, check_twisted_jacobi_with, check_virasoro_element, commutator_strata, pair_order, CheckConfig,
};
pub use report::{CheckReport, ResidualTerm, Status, WindowSpan, MAX_RESIDUALS};

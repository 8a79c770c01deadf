//! Twisted fields on truncated modules, their n-th products and closures.

mod closure;
mod field;

pub use closure::{generate_closure, Closure, ClosureConfig, ProductEntry};
pub use field::{
    default_bound, derivative_field, fields_equal_on, locality_order, nth_product, nth_product_with_bound,
    product_is_stable, sigma_action, supercommutator, untwisted_product_mode, Field, FieldError,
};

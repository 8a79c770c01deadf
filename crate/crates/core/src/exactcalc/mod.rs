//! Exact scalars, exponents and truncated Puiseux series.

mod binomial;
mod coeff;
mod cyclotomic;
mod delta;
mod linalg;
mod literal;
mod series;
mod small;

pub use binomial::{binom, binom_exp, rational_binomial};
pub use coeff::{rational_sqrt, Coeff, Rational};
pub use cyclotomic::{cyclotomic_polynomial, sqrt_rational, totient, Cyclotomic};
pub use delta::{delta_identity_check, derivative_delta_vanishing, substitution_residual};
pub use linalg::{Echelon, Insert, Matrix};
pub use literal::{parse_in, parse_scalar, LiteralError};
pub use series::{Bound, SeriesError, SeriesValue, TruncatedSeries, Var, Window};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

/// Rational exponent of a formal variable.
pub type Exponent = Ratio<i64>;

pub fn ex(n: i64, d: i64) -> Exponent {
    Ratio::new(n, d)
}

pub fn ex_int(n: i64) -> Exponent {
    Ratio::from_integer(n)
}

/// Whether the exponent lies in `(1/2T)Z`.
pub fn on_lattice(e: &Exponent, twist: u32) -> bool {
    (2 * twist as i64) % e.denom() == 0
}

/// Fractional part in `[0, 1)`.
pub fn frac(e: &Exponent) -> Exponent {
    e - e.floor()
}

/// `a - b` as an integer when it is one.
pub fn int_diff(a: &Exponent, b: &Exponent) -> Option<i64> {
    let d = a - b;
    if d.is_integer() {
        Some(d.to_integer())
    } else {
        None
    }
}

/// True when `a ≡ b (mod 1)`.
pub fn same_class(a: &Exponent, b: &Exponent) -> bool {
    (a - b).is_integer()
}

/// Smallest twist order `T` with `e ∈ (1/T)Z`.
pub fn twist_of(e: &Exponent) -> u32 {
    *e.denom() as u32
}

pub fn lcm_twist(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub fn is_zero_exp(e: &Exponent) -> bool {
    e.is_zero()
}

/// Converts an exponent to an exact rational.
pub fn exp_to_rational(e: &Exponent) -> Rational {
    Rational::new((*e.numer()).into(), (*e.denom()).into())
}

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cyclotomic::Cyclotomic;

/// Exact rational numbers backing every coefficient.
pub type Rational = BigRational;

/// Scalar coefficients the engine is generic over.
///
/// Implementors are exact fields of characteristic zero. Roots of unity are
/// only available when the field contains them; rationals carry `±1`.
pub trait Coeff:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn from_rational(q: &Rational) -> Self;

    fn inverse(&self) -> Option<Self>;

    /// `exp(2πi · power / order)` if the field contains it.
    fn root_of_unity(order: u32, power: i64) -> Option<Self>;

    /// The value as a rational, when it is one.
    fn to_rational(&self) -> Option<Rational>;

    fn sqrt(&self) -> Option<Self>;

    /// Embeds a cyclotomic value when this field contains it.
    fn from_cyclotomic(c: &Cyclotomic) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn from_frac(p: i64, q: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.clone() * inv)
    }
}

/// Square root of a non-negative rational when it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

impl Coeff for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn root_of_unity(order: u32, power: i64) -> Option<Self> {
        if order == 0 {
            return None;
        }
        let p = power.rem_euclid(order as i64);
        if p == 0 {
            Some(Rational::one())
        } else if 2 * p == order as i64 {
            Some(-Rational::one())
        } else {
            None
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn from_cyclotomic(c: &Cyclotomic) -> Option<Self> {
        c.to_rational()
    }
}

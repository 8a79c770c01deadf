//! Rationals stored inline while numerator and denominator fit in `i64`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::coeff::Rational;

/// Always normalized: a value that fits is never held as `Big`, and `Small`
/// is reduced with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Q {
    Small(i64, i64),
    Big(Rational),
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Q {
    pub fn zero() -> Self {
        Q::Small(0, 1)
    }

    pub fn one() -> Self {
        Q::Small(1, 1)
    }

    pub fn int(n: i64) -> Self {
        Q::Small(n, 1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }

    fn from_i128(n: i128, d: i128) -> Self {
        let g = gcd(n, d).max(1);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Q::Small(n, d),
            _ => Q::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub fn from_big(r: &Rational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Q::Small(n, d),
            _ => Q::Big(r.clone()),
        }
    }

    pub fn to_big(&self) -> Rational {
        match self {
            Q::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    fn demote(r: Rational) -> Self {
        Self::from_big(&r)
    }

    pub fn add(&self, other: &Q) -> Q {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                if b == d {
                    let n = *a as i128 + *c as i128;
                    if *b == 1 {
                        if let Ok(n) = i64::try_from(n) {
                            return Q::Small(n, 1);
                        }
                    }
                    return Self::from_i128(n, *b as i128);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).zip(c.checked_mul(b)).and_then(|(x, y)| x.checked_add(y)) {
                    Some(n) => Self::from_i128(n, b * d),
                    None => Self::demote(self.to_big() + other.to_big()),
                }
            }
            _ => Self::demote(self.to_big() + other.to_big()),
        }
    }

    pub fn mul(&self, other: &Q) -> Q {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(n) = a.checked_mul(*c) {
                        return Q::Small(n, 1);
                    }
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                let g1 = gcd(a, d).max(1);
                let g2 = gcd(c, b).max(1);
                let n = (a / g1) * (c / g2);
                let m = (b / g2) * (d / g1);
                match (i64::try_from(n), i64::try_from(m)) {
                    (Ok(n), Ok(m)) => Q::Small(n, m),
                    _ => Q::Big(Rational::new(BigInt::from(n), BigInt::from(m))),
                }
            }
            _ => Self::demote(self.to_big() * other.to_big()),
        }
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(n, d) => match n.checked_neg() {
                Some(m) => Q::Small(m, *d),
                None => Self::demote(-self.to_big()),
            },
            Q::Big(r) => Self::demote(-r.clone()),
        }
    }

    pub fn sub(&self, other: &Q) -> Q {
        self.add(&other.neg())
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Q::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Q::Big(r) => Self::demote(r.recip()),
        }
    }
}

impl From<&BigInt> for Q {
    fn from(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Q::int(v),
            None => Q::Big(Rational::from_integer(n.clone())),
        }
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let m = Q::int(i64::MAX);
        let s = m.add(&Q::one());
        assert!(matches!(s, Q::Big(_)));
        assert_eq!(s.sub(&Q::one()), m);
        assert_eq!(Q::int(i64::MIN).neg().to_big(), -big(i64::MIN, 1));
        let p = m.mul(&m);
        assert_eq!(p.mul(&m.recip()).mul(&m.recip()), Q::one());
    }

    proptest! {
        #[test]
        fn agrees_with_big_rationals(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
            let (x, y) = (Q::from_big(&big(a, b)), Q::from_big(&big(c, d)));
            prop_assert_eq!(x.add(&y).to_big(), big(a, b) + big(c, d));
            prop_assert_eq!(x.mul(&y).to_big(), big(a, b) * big(c, d));
            prop_assert_eq!(x.sub(&y).to_big(), big(a, b) - big(c, d));
            prop_assert_eq!(x.add(&y), Q::from_big(&(big(a, b) + big(c, d))));
        }
    }
}

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::coeff::Rational;
use super::{exp_to_rational, Exponent};

/// `alpha (alpha-1) ... (alpha-k+1) / k!`
pub fn rational_binomial(alpha: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut a = alpha.clone();
    for i in 1..=k {
        acc *= &a;
        acc /= Rational::from_integer(BigInt::from(i));
        if acc.is_zero() {
            return acc;
        }
        a -= Rational::one();
    }
    acc
}

/// `C(p/q, k)` as numerator and denominator when both fit in `i128`.
fn small_binomial(p: i64, q: i64, k: u64) -> Option<(i128, i128)> {
    let (p, q) = (p as i128, q as i128);
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..k as i128 {
        let f = p - i * q;
        if f == 0 {
            return Some((0, 1));
        }
        num = num.checked_mul(f)?;
        den = den.checked_mul(q.checked_mul(i + 1)?)?;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    Some((num, den))
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

thread_local! {
    static CACHE: RefCell<HashMap<(i64, i64, u64), Rational>> = RefCell::new(HashMap::new());
}

pub fn binom_exp(alpha: &Exponent, k: u64) -> Rational {
    let key = (*alpha.numer(), *alpha.denom(), k);
    if let Some(r) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return r;
    }
    let r = match small_binomial(key.0, key.1, k) {
        Some((n, d)) => Rational::new(BigInt::from(n), BigInt::from(d)),
        None => rational_binomial(&exp_to_rational(alpha), k),
    };
    CACHE.with(|c| c.borrow_mut().insert(key, r.clone()));
    r
}

pub fn binom(n: i64, k: u64) -> Rational {
    binom_exp(&Exponent::from_integer(n), k)
}

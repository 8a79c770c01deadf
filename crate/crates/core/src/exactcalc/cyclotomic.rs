//! Elements of the cyclotomic field ℚ(ζ_N) in the power basis modulo Φ_N.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::{smallvec, SmallVec};

use super::coeff::{rational_sqrt, Coeff, Rational};
use super::small::Q;

fn poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n > 0, "cyclotomic order must be positive");
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = monic_divide(&num, &div);
        }
    }
    let result = Arc::new(num);
    poly_cache().lock().unwrap().insert(n, result.clone());
    result
}

fn monic_divide(num: &[BigInt], div: &[BigInt]) -> Vec<BigInt> {
    let dn = div.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in div.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An exact element of ℚ(ζ_order).
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: SmallVec<[Q; 1]>,
}

impl Cyclotomic {
    pub fn from_rational_in(order: u32, q: Rational) -> Self {
        let mut coeffs: SmallVec<[Q; 1]> = smallvec![Q::zero(); totient(order)];
        coeffs[0] = Q::from_big(&q);
        Cyclotomic { order, coeffs }
    }

    /// Reduces an arbitrary polynomial in ζ_order.
    pub fn from_poly(order: u32, poly: Vec<Rational>) -> Self {
        Self::reduce(order, poly.iter().map(Q::from_big).collect())
    }

    fn reduce(order: u32, mut p: Vec<Q>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        if p.len() > deg {
            let phi: Vec<Q> = phi.iter().map(Q::from).collect();
            for i in (deg..p.len()).rev() {
                let c = std::mem::take(&mut p[i]);
                if c.is_zero() {
                    continue;
                }
                for (j, pj) in phi.iter().enumerate().take(deg) {
                    if !pj.is_zero() {
                        p[i - deg + j] = p[i - deg + j].sub(&c.mul(pj));
                    }
                }
            }
            p.truncate(deg);
        }
        p.resize(deg, Q::zero());
        Cyclotomic { order, coeffs: SmallVec::from_vec(p) }
    }

    /// ζ_n^power.
    pub fn zeta_pow(n: u32, power: i64) -> Self {
        let e = power.rem_euclid(n as i64) as usize;
        let mut poly = vec![Q::zero(); e + 1];
        poly[e] = Q::one();
        Self::reduce(n, poly)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        self.coeffs.iter().map(Q::to_big).collect()
    }

    /// Re-expresses the element in ℚ(ζ_n) where `order | n`.
    pub fn promote(&self, n: u32) -> Self {
        if n == self.order {
            return self.clone();
        }
        assert!(n % self.order == 0, "cannot embed order {} into {}", self.order, n);
        let step = (n / self.order) as usize;
        let mut poly = vec![Q::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::reduce(n, poly)
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            (a.clone(), b.clone())
        } else {
            let n = a.order.lcm(&b.order);
            (a.promote(n), b.promote(n))
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.order != other.order {
            let (a, b) = Self::aligned(self, other);
            return a.mul_ref(&b);
        }
        if self.coeffs.len() == 1 {
            return Cyclotomic { order: self.order, coeffs: smallvec![self.coeffs[0].mul(&other.coeffs[0])] };
        }
        let mut prod = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = prod[i + j].add(&a.mul(b));
                }
            }
        }
        Self::reduce(self.order, prod)
    }

    fn inverse_impl(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.coeffs.len();
        if d == 1 {
            return Some(Cyclotomic { order: self.order, coeffs: smallvec![self.coeffs[0].recip()] });
        }
        // columns: self * ζ^j, solve for x with (self * x) = 1
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            cols.push(self.mul_ref(&Self::zeta_pow(self.order, j as i64)).coefficients());
        }
        let mut aug: Vec<Vec<Rational>> = (0..d)
            .map(|r| {
                let mut row: Vec<Rational> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !aug[r][col].is_zero())?;
            aug.swap(col, piv);
            let inv = aug[col][col].recip();
            for x in aug[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..d {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    let pivot_row = aug[col].clone();
                    for (x, p) in aug[r].iter_mut().zip(pivot_row.iter()) {
                        *x -= &f * p;
                    }
                }
            }
        }
        Some(Cyclotomic { order: self.order, coeffs: aug.into_iter().map(|r| Q::from_big(&r[d])).collect() })
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = Self::aligned(self, other);
            a.coeffs == b.coeffs
        }
    }
}

impl Eq for Cyclotomic {}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: smallvec![Q::zero()] }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic { order: 1, coeffs: smallvec![Q::one()] }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, other: Cyclotomic) -> Cyclotomic {
        let (mut a, b) = if self.order == other.order { (self, other) } else { Self::aligned(&self, &other) };
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            if !y.is_zero() {
                *x = x.add(y);
            }
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, other: Cyclotomic) -> Cyclotomic {
        self + (-other)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;

    fn neg(mut self) -> Cyclotomic {
        for c in self.coeffs.iter_mut() {
            *c = c.neg();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, other: Cyclotomic) -> Cyclotomic {
        self.mul_ref(&other)
    }
}

impl Coeff for Cyclotomic {
    fn from_rational(q: &Rational) -> Self {
        Cyclotomic { order: 1, coeffs: smallvec![Q::from_big(q)] }
    }

    fn inverse(&self) -> Option<Self> {
        self.inverse_impl()
    }

    fn root_of_unity(order: u32, power: i64) -> Option<Self> {
        if order == 0 {
            None
        } else {
            Some(Self::zeta_pow(order, power))
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].to_big())
        } else {
            None
        }
    }

    fn sqrt(&self) -> Option<Self> {
        let q = self.to_rational()?;
        if let Some(r) = rational_sqrt(&q) {
            return Some(Self::from_rational(&r));
        }
        sqrt_rational(&q)
    }

    fn from_cyclotomic(c: &Cyclotomic) -> Option<Self> {
        Some(c.clone())
    }
}

/// Square root of a rational inside a cyclotomic field, built from quadratic
/// Gauss sums. Gives up on integers with a prime factor above `2^20`.
pub fn sqrt_rational(q: &Rational) -> Option<Cyclotomic> {
    if q.is_zero() {
        return Some(Cyclotomic::zero());
    }
    // sqrt(a/b) = sqrt(a*b)/b
    let prod: BigInt = q.numer() * q.denom();
    let negative = prod.is_negative();
    let mut n: u64 = prod.abs().try_into().ok()?;
    let mut outside: u64 = 1;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if p > (1 << 20) {
            return None;
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            outside *= p;
        }
        if e % 2 == 1 {
            primes.push(p);
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    let mut root = Cyclotomic::from_rational(&Rational::new(BigInt::from(outside), q.denom().clone()));
    if negative {
        root = root * Cyclotomic::zeta_pow(4, 1);
    }
    for p in primes {
        root = root * sqrt_prime(p)?;
    }
    Some(root)
}

fn sqrt_prime(p: u64) -> Option<Cyclotomic> {
    if p == 2 {
        return Some(Cyclotomic::zeta_pow(8, 1) + Cyclotomic::zeta_pow(8, 7));
    }
    let order: u32 = p.try_into().ok()?;
    let mut poly = vec![Rational::zero(); p as usize];
    for k in 1..p {
        // Euler's criterion for the Legendre symbol
        let leg = mod_pow(k, (p - 1) / 2, p);
        poly[k as usize] = if leg == 1 { Rational::one() } else { -Rational::one() };
    }
    let g = Cyclotomic::from_poly(order, poly);
    if p % 4 == 1 {
        Some(g)
    } else {
        Some(-(Cyclotomic::zeta_pow(4, 1) * g))
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Cyclotomic {
    /// Canonical form: nonzero powers of ζ in descending order, e.g. `1/2*z8^3 - 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let c = c.to_big();
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let zeta = match i {
                0 => String::new(),
                1 => format!("z{}", self.order),
                _ => format!("z{}^{}", self.order, i),
            };
            if zeta.is_empty() {
                out.push_str(&fmt_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&zeta);
            } else {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
                out.push_str(&zeta);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Cyclotomic {
        Cyclotomic::from_frac(p, d)
    }

    #[test]
    fn cyclotomic_polynomials() {
        let p = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(*cyclotomic_polynomial(1), p(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), p(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(6), p(&[1, -1, 1]));
        assert_eq!(*cyclotomic_polynomial(12), p(&[1, 0, -1, 0, 1]));
        assert_eq!(totient(8), 4);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclotomic::zeta_pow(4, 1);
        assert_eq!(i.clone() * i, q(-1, 1));
    }

    #[test]
    fn rational_sum() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let z = Cyclotomic::zeta_pow(3, 1);
        let s = Cyclotomic::one() + z.clone() + z.clone() * z;
        assert!(s.is_zero());
    }

    #[test]
    fn mixed_orders_promote() {
        let i = Cyclotomic::zeta_pow(4, 1);
        let w = Cyclotomic::zeta_pow(3, 1);
        let p = i.clone() * w.clone();
        assert_eq!(p.order(), 12);
        assert_eq!(p, Cyclotomic::zeta_pow(12, 3 + 4));
        assert_eq!(Cyclotomic::zeta_pow(8, 2), i);
    }

    #[test]
    fn inverses() {
        let a = Cyclotomic::zeta_pow(5, 1) + q(2, 1);
        let inv = a.inverse().unwrap();
        assert_eq!(a * inv, Cyclotomic::one());
        assert!(Cyclotomic::zero().inverse().is_none());
    }

    #[test]
    fn display_is_canonical() {
        let z = Cyclotomic::zeta_pow(8, 3) * q(1, 2) - q(2, 1);
        assert_eq!(z.to_string(), "1/2*z8^3 - 2");
        assert_eq!(Cyclotomic::zeta_pow(4, 2).to_string(), "-1");
        assert_eq!(Cyclotomic::zero().to_string(), "0");
    }

    #[test]
    fn square_roots() {
        assert_eq!(q(9, 4).sqrt(), Some(q(3, 2)));
        let r = q(-4, 1).sqrt().unwrap();
        assert_eq!(r.clone() * r, q(-4, 1));
        for (p, d) in [(2, 1), (3, 1), (-5, 4), (7, 3), (1, 2), (-6, 1)] {
            let r = q(p, d).sqrt().unwrap();
            assert_eq!(r.clone() * r, q(p, d));
        }
    }
}

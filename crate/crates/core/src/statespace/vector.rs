use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

use crate::exactcalc::{Coeff, SeriesValue};

/// Index of a basis vector inside a module.
pub type BasisId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    /// `(-1)^{|a||b|}` as a sign.
    pub fn koszul(self, other: Parity) -> i64 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_odd(self.is_odd() != rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "odd" } else { "even" })
    }
}

/// Koszul sign as a scalar.
pub fn koszul<C: Coeff>(a: Parity, b: Parity) -> C {
    C::from_int(a.koszul(b))
}

/// A finitely supported combination of basis vectors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<C> {
    entries: BTreeMap<BasisId, C>,
}

impl<C: Coeff> Vector<C> {
    pub fn zero() -> Self {
        Vector { entries: BTreeMap::new() }
    }

    pub fn basis(id: BasisId) -> Self {
        Self::term(id, C::one())
    }

    pub fn term(id: BasisId, c: C) -> Self {
        let mut v = Self::zero();
        v.add_term(id, c);
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisId, C)>) -> Self {
        let mut v = Self::zero();
        for (id, c) in terms {
            v.add_term(id, c);
        }
        v
    }

    pub fn from_map(entries: BTreeMap<BasisId, C>) -> Self {
        Vector { entries: entries.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn add_term(&mut self, id: BasisId, c: C) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&id) {
            Some(e) => {
                let s = e.clone() + c;
                if s.is_zero() {
                    self.entries.remove(&id);
                } else {
                    *e = s;
                }
            }
            None => {
                self.entries.insert(id, c);
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &C, other: &Vector<C>) {
        if c.is_zero() {
            return;
        }
        for (id, v) in &other.entries {
            self.add_term(*id, c.clone() * v.clone());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Vector { entries: self.entries.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-C::one(), other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: BasisId) -> C {
        self.entries.get(&id).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisId, &C)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn entries(&self) -> &BTreeMap<BasisId, C> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<BasisId, C> {
        self.entries
    }

    /// Applies a linear map given on basis vectors.
    pub fn map_linear(&self, mut f: impl FnMut(BasisId) -> Vector<C>) -> Vector<C> {
        let mut out = Vector::zero();
        for (id, c) in &self.entries {
            out.add_scaled(c, &f(*id));
        }
        out
    }
}

impl<C: Coeff> Add for Vector<C> {
    type Output = Vector<C>;

    fn add(mut self, rhs: Vector<C>) -> Vector<C> {
        self.add_scaled(&C::one(), &rhs);
        self
    }
}

impl<C: Coeff> Neg for Vector<C> {
    type Output = Vector<C>;

    fn neg(self) -> Vector<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> SeriesValue<C> for Vector<C> {
    fn zero_value() -> Self {
        Vector::zero()
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }

    fn add_assign_value(&mut self, other: &Self) {
        self.add_scaled(&C::one(), other);
    }

    fn scaled(&self, c: &C) -> Self {
        self.scale(c)
    }
}

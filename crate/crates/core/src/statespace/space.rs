//! Truncated graded super spaces and degree-shifting sparse operators.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::vector::{BasisId, Parity, Vector};
use crate::exactcalc::{Coeff, Exponent};

#[derive(Clone, Debug, PartialEq)]
pub struct BasisEntry {
    pub id: BasisId,
    pub degree: Exponent,
    pub parity: Parity,
    pub label: String,
}

/// A graded super vector space truncated at degree `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSuperSpace {
    cutoff: Exponent,
    twist: u32,
    step: Exponent,
    basis: Vec<BasisEntry>,
    index: HashMap<BasisId, usize>,
}

impl GradedSuperSpace {
    pub fn new(cutoff: Exponent, twist: u32, entries: Vec<(BasisId, Exponent, Parity, String)>) -> Self {
        let mut basis: Vec<BasisEntry> = entries
            .into_iter()
            .filter(|e| e.1 <= cutoff)
            .map(|(id, degree, parity, label)| BasisEntry { id, degree, parity, label })
            .collect();
        basis.sort_by(|a, b| a.degree.cmp(&b.degree).then(a.id.cmp(&b.id)));
        let index = basis.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        let step = Exponent::new(1, 2 * twist as i64);
        GradedSuperSpace { cutoff, twist, step, basis, index }
    }

    /// Sets the spacing of the degree lattice reported by [`Self::dimensions`].
    pub fn with_step(mut self, step: Exponent) -> Self {
        self.step = step;
        self
    }

    pub fn step(&self) -> Exponent {
        self.step
    }

    pub fn cutoff(&self) -> Exponent {
        self.cutoff
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    pub fn basis(&self) -> &[BasisEntry] {
        &self.basis
    }

    pub fn contains(&self, id: BasisId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn entry(&self, id: BasisId) -> Option<&BasisEntry> {
        self.index.get(&id).map(|&i| &self.basis[i])
    }

    pub fn degree(&self, id: BasisId) -> Option<Exponent> {
        self.entry(id).map(|e| e.degree)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors of one degree.
    pub fn stratum(&self, degree: &Exponent) -> Vec<BasisId> {
        self.basis.iter().filter(|e| e.degree == *degree).map(|e| e.id).collect()
    }

    /// Basis vectors of degree at most `cap`.
    pub fn up_to(&self, cap: &Exponent) -> Vec<BasisId> {
        self.basis.iter().filter(|e| e.degree <= *cap).map(|e| e.id).collect()
    }

    pub fn degrees(&self) -> Vec<Exponent> {
        let mut d: Vec<Exponent> = self.basis.iter().map(|e| e.degree).collect();
        d.dedup();
        d
    }

    /// Dimension of every lattice degree up to the cutoff, including empty ones.
    pub fn dimensions(&self) -> BTreeMap<Exponent, usize> {
        let step = self.step;
        let mut out = BTreeMap::new();
        let mut d = Exponent::from_integer(0);
        while d <= self.cutoff {
            out.insert(d, 0);
            d += step;
        }
        for e in &self.basis {
            *out.entry(e.degree).or_insert(0) += 1;
        }
        out
    }

    /// One line per basis vector: `degree | parity | label`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for e in &self.basis {
            writeln!(s, "{} | {} | {}", e.degree, e.parity, e.label).unwrap();
        }
        s
    }

    pub fn label(&self, id: BasisId) -> String {
        self.entry(id).map(|e| e.label.clone()).unwrap_or_else(|| format!("#{}", id))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("cannot add operators with shifts {0} and {1}")]
    ShiftMismatch(Exponent, Exponent),
    #[error("cannot add operators of parities {0} and {1}")]
    ParityMismatch(Parity, Parity),
}

/// A linear map on a truncated space shifting degree by `shift`. Images above
/// the cutoff are dropped; `exact_below` bounds the input degrees on which the
/// stored map is complete.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<C> {
    pub shift: Exponent,
    pub parity: Parity,
    pub exact_upto: Exponent,
    columns: BTreeMap<BasisId, Vector<C>>,
}

impl<C: Coeff> SparseOperator<C> {
    pub fn new(shift: Exponent, parity: Parity, exact_upto: Exponent) -> Self {
        SparseOperator { shift, parity, exact_upto, columns: BTreeMap::new() }
    }

    pub fn identity(space: &GradedSuperSpace) -> Self {
        let mut op = Self::new(Exponent::from_integer(0), Parity::Even, space.cutoff());
        for e in space.basis() {
            op.set_column(e.id, Vector::basis(e.id));
        }
        op
    }

    /// Builds the restriction of a map to `space`, dropping images outside it.
    pub fn from_fn(
        space: &GradedSuperSpace,
        shift: Exponent,
        parity: Parity,
        mut f: impl FnMut(BasisId) -> Vector<C>,
    ) -> Self {
        let mut op = Self::new(shift, parity, space.cutoff() - shift);
        for e in space.basis() {
            if e.degree + shift < Exponent::from_integer(0) || e.degree + shift > space.cutoff() {
                continue;
            }
            let img = f(e.id);
            let kept = Vector::from_terms(img.iter().filter(|(id, _)| space.contains(*id)).map(|(id, c)| (id, c.clone())));
            op.set_column(e.id, kept);
        }
        op
    }

    pub fn set_column(&mut self, id: BasisId, v: Vector<C>) {
        if v.is_zero() {
            self.columns.remove(&id);
        } else {
            self.columns.insert(id, v);
        }
    }

    pub fn column(&self, id: BasisId) -> Vector<C> {
        self.columns.get(&id).cloned().unwrap_or_else(Vector::zero)
    }

    pub fn columns(&self) -> impl Iterator<Item = (BasisId, &Vector<C>)> {
        self.columns.iter().map(|(k, v)| (*k, v))
    }

    pub fn apply(&self, v: &Vector<C>) -> Vector<C> {
        v.map_linear(|id| self.column(id))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let exact = other.exact_upto.min(self.exact_upto - other.shift);
        let mut op = Self::new(self.shift + other.shift, self.parity + other.parity, exact);
        for (id, v) in &other.columns {
            op.set_column(*id, self.apply(v));
        }
        op
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.shift != other.shift {
            return Err(OperatorError::ShiftMismatch(self.shift, other.shift));
        }
        if self.parity != other.parity {
            return Err(OperatorError::ParityMismatch(self.parity, other.parity));
        }
        let mut op = Self::new(self.shift, self.parity, self.exact_upto.min(other.exact_upto));
        let ids: Vec<BasisId> = self.columns.keys().chain(other.columns.keys()).copied().collect();
        for id in ids {
            op.set_column(id, self.column(id) + other.column(id));
        }
        Ok(op)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut op = Self::new(self.shift, self.parity, self.exact_upto);
        for (id, v) in &self.columns {
            op.set_column(*id, v.scale(c));
        }
        op
    }

    /// True iff every entry respects the declared shift and parity.
    pub fn check_grading(&self, space: &GradedSuperSpace) -> bool {
        self.columns.iter().all(|(id, v)| {
            let Some(src) = space.entry(*id) else { return false };
            v.iter().all(|(out, _)| match space.entry(out) {
                Some(dst) => dst.degree == src.degree + self.shift && dst.parity == src.parity + self.parity,
                None => false,
            })
        })
    }

    /// Triples `(in_label, out_label, scalar)`, one per line.
    pub fn dump(&self, space: &GradedSuperSpace) -> String {
        let mut s = String::new();
        for (id, v) in &self.columns {
            for (out, c) in v.iter() {
                writeln!(s, "({}, {}, {})", space.label(*id), space.label(out), c).unwrap();
            }
        }
        s
    }
}

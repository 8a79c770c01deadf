//! Exact linear algebra: dense matrices and an incremental sparse echelon form.

use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Coeff;

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(C::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
            let inv = m.get(r, c).inverse().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, C::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// A basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<C>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![C::zero(); self.cols];
                v[f] = C::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self · x = b`.
    pub fn solve(&self, b: &[C]) -> Option<Vec<C>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![C::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }
}

impl<C: Coeff> fmt::Display for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq)]
pub enum Insert<C> {
    /// New independent vector with the given id.
    Independent(usize),
    /// The vector equals `Σ c_i · v_i` over previously inserted ids.
    Dependent(BTreeMap<usize, C>),
}

#[derive(Clone, Debug)]
struct Row<K, C> {
    entries: BTreeMap<K, C>,
    provenance: BTreeMap<usize, C>,
}

/// Incremental sparse row echelon form that remembers how each row was built
/// from the inserted vectors.
#[derive(Clone, Debug)]
pub struct Echelon<K, C> {
    rows: BTreeMap<K, Row<K, C>>,
    count: usize,
}

impl<K: Ord + Clone, C: Coeff> Default for Echelon<K, C> {
    fn default() -> Self {
        Self::new()
    }
}

fn axpy<K: Ord + Clone, C: Coeff>(target: &mut BTreeMap<K, C>, f: &C, src: &BTreeMap<K, C>) {
    for (k, v) in src {
        let delta = f.clone() * v.clone();
        match target.get_mut(k) {
            Some(t) => {
                let s = t.clone() + delta;
                if s.is_zero() {
                    target.remove(k);
                } else {
                    *t = s;
                }
            }
            None => {
                if !delta.is_zero() {
                    target.insert(k.clone(), delta);
                }
            }
        }
    }
}

impl<K: Ord + Clone, C: Coeff> Echelon<K, C> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), count: 0 }
    }

    /// Number of independent vectors.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rows.contains_key(k)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    fn eliminate(&self, v: &mut BTreeMap<K, C>, prov: &mut BTreeMap<usize, C>) {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let row = &self.rows[&k];
            let f = -v[&k].clone();
            axpy(v, &f, &row.entries);
            axpy(prov, &f, &row.provenance);
            cursor = Some(k);
        }
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &BTreeMap<K, C>) -> BTreeMap<K, C> {
        let mut v = v.clone();
        let mut prov = BTreeMap::new();
        self.eliminate(&mut v, &mut prov);
        v
    }

    /// Expresses `v` in the inserted vectors when it lies in their span.
    pub fn express(&self, v: &BTreeMap<K, C>) -> Option<BTreeMap<usize, C>> {
        let mut v = v.clone();
        let mut prov = BTreeMap::new();
        self.eliminate(&mut v, &mut prov);
        if v.is_empty() {
            Some(prov.into_iter().map(|(i, c)| (i, -c)).collect())
        } else {
            None
        }
    }

    /// Inserts `v`; independent vectors receive consecutive ids from 0.
    pub fn insert(&mut self, v: &BTreeMap<K, C>) -> Insert<C> {
        let mut v = v.clone();
        let mut prov = BTreeMap::new();
        self.eliminate(&mut v, &mut prov);
        if v.is_empty() {
            return Insert::Dependent(prov.into_iter().map(|(i, c)| (i, -c)).collect());
        }
        let id = self.count;
        self.count += 1;
        prov.insert(id, C::one());
        let (k, lead) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())).expect("nonempty");
        let inv = lead.inverse().expect("nonzero lead");
        let entries = v.into_iter().map(|(k, c)| (k, c * inv.clone())).collect();
        let provenance = prov.into_iter().map(|(i, c)| (i, c * inv.clone())).collect();
        self.rows.insert(k, Row { entries, provenance });
        Insert::Independent(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcalc::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn sv(xs: &[(u32, i64)]) -> BTreeMap<u32, Rational> {
        xs.iter().map(|&(k, c)| (k, q(c))).collect()
    }

    #[test]
    fn inverse_and_kernel() {
        let m = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let s = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(s.inverse().is_none());
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(s.apply(&k[0]).iter().all(|c| *c == q(0)));
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn solve_consistent() {
        let m = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(-1)]]);
        assert_eq!(m.solve(&[q(3), q(1)]).unwrap(), vec![q(2), q(1)]);
    }

    #[test]
    fn echelon_provenance() {
        let mut e: Echelon<u32, Rational> = Echelon::new();
        assert_eq!(e.insert(&sv(&[(0, 1), (1, 1)])), Insert::Independent(0));
        assert_eq!(e.insert(&sv(&[(1, 1), (2, 1)])), Insert::Independent(1));
        match e.insert(&sv(&[(0, 2), (1, 3), (2, 1)])) {
            Insert::Dependent(c) => {
                assert_eq!(c[&0], q(2));
                assert_eq!(c[&1], q(1));
            }
            other => panic!("{:?}", other),
        }
        let r = e.reduce(&sv(&[(0, 1)]));
        assert!(r.keys().all(|k| !e.is_pivot(k)));
        assert_eq!(e.rank(), 2);
    }
}

//! Lazily normal-ordered induced modules over mode algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use dashmap::DashMap;
use num_traits::Zero;
use thiserror::Error;

use super::space::GradedSuperSpace;
use super::vector::{koszul, BasisId, Parity, Vector};
use crate::exactcalc::{ex_int, Coeff, Exponent, Matrix};

/// The mode `x_index` of generator `gen`; ordered by index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub index: Exponent,
    pub gen: u16,
}

impl Mode {
    pub fn new(gen: u16, index: Exponent) -> Self {
        Mode { index, gen }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorInfo {
    pub name: String,
    pub parity: Parity,
    /// Mode `m` shifts degree by `weight - m - 1`.
    pub weight: Exponent,
    /// Mode indices lie in `charge + Z`, with `0 <= charge < 1`.
    pub charge: Exponent,
    /// Printed index is `m - label_offset`.
    pub label_offset: Exponent,
}

impl GeneratorInfo {
    pub fn shift(&self, index: &Exponent) -> Exponent {
        self.weight - index - ex_int(1)
    }
}

/// `[x, y] = Σ c · mode + central`, the supercommutator of two modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket<C> {
    pub modes: Vec<(Mode, C)>,
    pub central: C,
}

impl<C: Coeff> Bracket<C> {
    pub fn zero() -> Self {
        Bracket { modes: Vec::new(), central: C::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.central.is_zero() && self.modes.iter().all(|(_, c)| c.is_zero())
    }
}

/// A Lie superalgebra spanned by modes of finitely many generators, with the
/// central element already evaluated.
pub trait ModeAlgebra<C>: Send + Sync {
    fn twist(&self) -> u32;

    fn generators(&self) -> &[GeneratorInfo];

    fn bracket(&self, x: &Mode, y: &Mode) -> Bracket<C>;

    fn mode_label(&self, m: &Mode) -> String {
        let g = &self.generators()[m.gen as usize];
        format!("{}({})", g.name, m.index - g.label_offset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Creation,
    Annihilation,
    Zero,
}

/// The finite-dimensional space the creation modes act on freely.
#[derive(Clone, Debug)]
pub struct LowestSpace<C> {
    pub labels: Vec<String>,
    pub parities: Vec<Parity>,
    /// Modes acting on the lowest space by a matrix (columns are inputs).
    pub zero_modes: BTreeMap<Mode, Matrix<C>>,
}

impl<C: Coeff> LowestSpace<C> {
    pub fn vacuum() -> Self {
        LowestSpace { labels: vec!["vac".into()], parities: vec![Parity::Even], zero_modes: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuleError {
    #[error("zero mode {0} has a matrix of the wrong size")]
    BadMatrix(String),
    #[error("zero modes {0} and {1} violate their bracket on the lowest space")]
    Inconsistent(String, String),
    #[error("generator {0} has infinitely many degree-preserving creation modes")]
    InfiniteDegree(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub modes: Vec<Mode>,
    pub lowest: u16,
}

struct Entry {
    monomial: Arc<Monomial>,
    degree: Exponent,
    parity: Parity,
}

/// Induced module `U(creation) ⊗ lowest`, built lazily. Actions are exact; no
/// degree truncation is applied to computed vectors.
pub struct PbwModule<C> {
    name: String,
    algebra: Arc<dyn ModeAlgebra<C>>,
    creation_below: Vec<Exponent>,
    lowest: LowestSpace<C>,
    interner: DashMap<Arc<Monomial>, BasisId>,
    entries: RwLock<Vec<Entry>>,
    memo: DashMap<(Mode, BasisId), Arc<Vector<C>>>,
}

impl<C: Coeff> fmt::Debug for PbwModule<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PbwModule({}, {} basis vectors interned)", self.name, self.entries.read().unwrap().len())
    }
}

impl<C: Coeff> PbwModule<C> {
    /// Modes of generator `g` with index below `creation_below[g]` create;
    /// modes listed in `lowest.zero_modes` act by matrices; the rest annihilate
    /// the lowest space.
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<dyn ModeAlgebra<C>>,
        creation_below: Vec<Exponent>,
        lowest: LowestSpace<C>,
    ) -> Result<Self, ModuleError> {
        assert_eq!(creation_below.len(), algebra.generators().len());
        let module = PbwModule {
            name: name.into(),
            algebra,
            creation_below,
            lowest,
            interner: DashMap::new(),
            entries: RwLock::new(Vec::new()),
            memo: DashMap::new(),
        };
        module.validate_lowest()?;
        for i in 0..module.lowest.dim() {
            module.intern(Monomial { modes: Vec::new(), lowest: i as u16 });
        }
        Ok(module)
    }

    fn validate_lowest(&self) -> Result<(), ModuleError> {
        let n = self.lowest.dim();
        for (m, mat) in &self.lowest.zero_modes {
            if mat.rows() != n || mat.cols() != n {
                return Err(ModuleError::BadMatrix(self.algebra.mode_label(m)));
            }
        }
        let zero_matrix = |m: &Mode| -> Option<Matrix<C>> {
            match self.classify(m) {
                Role::Zero => Some(self.lowest.zero_modes[m].clone()),
                Role::Annihilation => Some(Matrix::zeros(n, n)),
                Role::Creation => None,
            }
        };
        for (x, mx) in &self.lowest.zero_modes {
            for (y, my) in &self.lowest.zero_modes {
                let px = self.gen(x).parity;
                let py = self.gen(y).parity;
                let lhs = mx.mul(my).add(&my.mul(mx).scale(&-koszul::<C>(px, py)));
                let br = self.algebra.bracket(x, y);
                let mut rhs = Matrix::identity(n).scale(&br.central);
                for (m, c) in &br.modes {
                    match zero_matrix(m) {
                        Some(mm) => rhs = rhs.add(&mm.scale(c)),
                        None => {
                            return Err(ModuleError::Inconsistent(self.algebra.mode_label(x), self.algebra.mode_label(y)))
                        }
                    }
                }
                if lhs != rhs {
                    return Err(ModuleError::Inconsistent(self.algebra.mode_label(x), self.algebra.mode_label(y)));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &Arc<dyn ModeAlgebra<C>> {
        &self.algebra
    }

    pub fn twist(&self) -> u32 {
        self.algebra.twist()
    }

    pub fn lowest(&self) -> &LowestSpace<C> {
        &self.lowest
    }

    pub fn gen(&self, m: &Mode) -> &GeneratorInfo {
        &self.algebra.generators()[m.gen as usize]
    }

    pub fn shift(&self, m: &Mode) -> Exponent {
        self.gen(m).shift(&m.index)
    }

    pub fn classify(&self, m: &Mode) -> Role {
        if m.index < self.creation_below[m.gen as usize] {
            Role::Creation
        } else if self.lowest.zero_modes.contains_key(m) {
            Role::Zero
        } else {
            Role::Annihilation
        }
    }

    pub fn intern(&self, m: Monomial) -> BasisId {
        if let Some(id) = self.interner.get(&m) {
            return *id;
        }
        let degree = m.modes.iter().fold(Exponent::zero(), |acc, x| acc + self.shift(x));
        let parity = m
            .modes
            .iter()
            .fold(self.lowest.parities[m.lowest as usize], |acc, x| acc + self.gen(x).parity);
        let key = Arc::new(m);
        *self.interner.entry(key.clone()).or_insert_with(|| {
            let mut entries = self.entries.write().unwrap();
            entries.push(Entry { monomial: key, degree, parity });
            (entries.len() - 1) as BasisId
        })
    }

    pub fn monomial(&self, id: BasisId) -> Arc<Monomial> {
        self.entries.read().unwrap()[id as usize].monomial.clone()
    }

    pub fn degree(&self, id: BasisId) -> Exponent {
        self.entries.read().unwrap()[id as usize].degree
    }

    pub fn parity(&self, id: BasisId) -> Parity {
        self.entries.read().unwrap()[id as usize].parity
    }

    pub fn label(&self, id: BasisId) -> String {
        let m = self.monomial(id);
        let mut s: String = m.modes.iter().map(|x| self.algebra.mode_label(x)).collect();
        s.push_str(&self.lowest.labels[m.lowest as usize]);
        s
    }

    /// The lowest-space vector `i`.
    pub fn lowest_vector(&self, i: usize) -> BasisId {
        self.intern(Monomial { modes: Vec::new(), lowest: i as u16 })
    }

    /// Highest degree of any vector in a combination.
    pub fn max_degree(&self, v: &Vector<C>) -> Option<Exponent> {
        v.iter().map(|(id, _)| self.degree(id)).max()
    }

    /// `x · basis(id)`.
    pub fn act(&self, x: &Mode, id: BasisId) -> Arc<Vector<C>> {
        let target = self.degree(id) + self.shift(x);
        if target < Exponent::zero() {
            return Arc::new(Vector::zero());
        }
        if let Some(v) = self.memo.get(&(*x, id)) {
            return v.clone();
        }
        let v = Arc::new(self.compute(x, id));
        self.memo.insert((*x, id), v.clone());
        v
    }

    pub fn act_vec(&self, x: &Mode, v: &Vector<C>) -> Vector<C> {
        v.map_linear(|id| (*self.act(x, id)).clone())
    }

    /// Applies `Σ c · mode + central` to a basis vector.
    fn apply_bracket(&self, br: &Bracket<C>, id: BasisId, out: &mut Vector<C>, scale: &C) {
        if !br.central.is_zero() {
            out.add_term(id, br.central.clone() * scale.clone());
        }
        for (m, c) in &br.modes {
            out.add_scaled(&(c.clone() * scale.clone()), &self.act(m, id));
        }
    }

    fn compute(&self, x: &Mode, id: BasisId) -> Vector<C> {
        let mono = self.monomial(id);
        let role = self.classify(x);
        let Some((y1, rest_modes)) = mono.modes.split_first() else {
            return match role {
                Role::Creation => Vector::basis(self.intern(Monomial { modes: vec![*x], lowest: mono.lowest })),
                Role::Annihilation => Vector::zero(),
                Role::Zero => {
                    let mat = &self.lowest.zero_modes[x];
                    let col = mono.lowest as usize;
                    Vector::from_terms(
                        (0..self.lowest.dim()).map(|i| (self.lowest_vector(i), mat.get(i, col).clone())),
                    )
                }
            };
        };
        let px = self.gen(x).parity;
        if role == Role::Creation && (x < y1 || (x == y1 && !px.is_odd())) {
            let mut modes = Vec::with_capacity(mono.modes.len() + 1);
            modes.push(*x);
            modes.extend_from_slice(&mono.modes);
            return Vector::basis(self.intern(Monomial { modes, lowest: mono.lowest }));
        }
        let rest = self.intern(Monomial { modes: rest_modes.to_vec(), lowest: mono.lowest });
        let mut out = Vector::zero();
        if x == y1 && px.is_odd() {
            let half = C::from_frac(1, 2);
            self.apply_bracket(&self.algebra.bracket(x, x), rest, &mut out, &half);
            return out;
        }
        let eps = koszul::<C>(px, self.gen(y1).parity);
        let xr = self.act(x, rest);
        for (b, c) in xr.iter() {
            out.add_scaled(&(c.clone() * eps.clone()), &self.act(y1, b));
        }
        self.apply_bracket(&self.algebra.bracket(x, y1), rest, &mut out, &C::one());
        out
    }

    /// Creation modes raising degree by at most `cutoff`, in PBW order.
    pub fn creation_modes(&self, cutoff: &Exponent) -> Result<Vec<Mode>, ModuleError> {
        let mut out = Vec::new();
        for (g, info) in self.algebra.generators().iter().enumerate() {
            let below = self.creation_below[g];
            // largest index in charge + Z strictly below `below`
            let mut m = (below - info.charge).ceil() - ex_int(1) + info.charge;
            loop {
                let s = info.shift(&m);
                if s > *cutoff {
                    break;
                }
                if s.is_zero() && !info.parity.is_odd() {
                    return Err(ModuleError::InfiniteDegree(info.name.clone()));
                }
                if s >= Exponent::zero() {
                    out.push(Mode::new(g as u16, m));
                }
                m -= ex_int(1);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Enumerates and interns every basis vector of degree at most `cutoff`,
    /// in canonical order.
    pub fn space(&self, cutoff: &Exponent) -> Result<GradedSuperSpace, ModuleError> {
        let modes = self.creation_modes(cutoff)?;
        let mut monos: Vec<(Exponent, Vec<Mode>)> = Vec::new();
        let mut stack: Vec<Mode> = Vec::new();
        self.enumerate(&modes, 0, Exponent::zero(), cutoff, &mut stack, &mut monos);
        monos.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let mut entries = Vec::new();
        for (deg, ms) in monos {
            for l in 0..self.lowest.dim() {
                let id = self.intern(Monomial { modes: ms.clone(), lowest: l as u16 });
                entries.push((id, deg, self.parity(id), self.label(id)));
            }
        }
        Ok(GradedSuperSpace::new(*cutoff, self.twist(), entries).with_step(self.grading_step()))
    }

    fn enumerate(
        &self,
        modes: &[Mode],
        start: usize,
        deg: Exponent,
        cutoff: &Exponent,
        stack: &mut Vec<Mode>,
        out: &mut Vec<(Exponent, Vec<Mode>)>,
    ) {
        out.push((deg, stack.clone()));
        for i in start..modes.len() {
            let m = modes[i];
            let d = deg + self.shift(&m);
            if d > *cutoff {
                continue;
            }
            stack.push(m);
            let next = if self.gen(&m).parity.is_odd() { i + 1 } else { i };
            self.enumerate(modes, next, d, cutoff, stack, out);
            stack.pop();
        }
    }

    /// Spacing of the degrees creation modes can reach.
    pub fn grading_step(&self) -> Exponent {
        let den = self
            .algebra
            .generators()
            .iter()
            .fold(1i64, |acc, g| num_integer::lcm(acc, *(g.weight - g.charge).denom()));
        Exponent::new(1, den)
    }

    /// Number of memoized actions.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

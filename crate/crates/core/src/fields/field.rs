use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use num_traits::Zero;
use thiserror::Error;

use crate::exactcalc::{
    binom, binom_exp, ex_int, exp_to_rational, frac, lcm_twist, Coeff, Exponent, SeriesError, TruncatedSeries, Var,
    Window,
};
use crate::statespace::{koszul, BasisId, GradedSuperSpace, Mode, Parity, PbwModule, SparseOperator, Vector};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("fields live on different modules")]
    ModuleMismatch,
    #[error("combination terms disagree in {0}")]
    Inhomogeneous(&'static str),
    #[error("the coefficient field lacks a primitive root of unity of order {0}")]
    NoRootOfUnity(u32),
    #[error("n-th product did not stabilize for bound {0}")]
    Unstable(usize),
    #[error("fields are not local up to order {0}")]
    NotLocal(u32),
    #[error("window width {width} must exceed {needed}")]
    NarrowWindow { width: String, needed: String },
    #[error("no seed fields")]
    NoSeeds,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub(crate) enum FieldKind<C> {
    Identity,
    Generator(u16),
    Derivative(Field<C>),
    Product { a: Field<C>, b: Field<C>, n: i64, bound: usize },
    /// `Σ c · z^e · f`
    Combination(Vec<(C, Exponent, Field<C>)>),
}

pub(crate) struct FieldData<C> {
    id: u64,
    module: Arc<PbwModule<C>>,
    kind: FieldKind<C>,
    charge: Exponent,
    twist: u32,
    parity: Parity,
    weight: Exponent,
    name: String,
    cache: DashMap<(Exponent, BasisId), Arc<Vector<C>>>,
}

/// A twisted field `a(z) = Σ a_m z^{-m-1}` on a module, with `m ∈ charge + Z`.
///
/// Mode `m` maps degree `d` to degree `d + weight - m - 1`.
pub struct Field<C> {
    inner: Arc<FieldData<C>>,
}

impl<C> Clone for Field<C> {
    fn clone(&self) -> Self {
        Field { inner: self.inner.clone() }
    }
}

impl<C: Coeff> fmt::Debug for Field<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({}, charge {}, {}, weight {})", self.inner.name, self.inner.charge, self.inner.parity, self.inner.weight)
    }
}

impl<C: Coeff> Field<C> {
    fn make(
        module: Arc<PbwModule<C>>,
        kind: FieldKind<C>,
        charge: Exponent,
        twist: u32,
        parity: Parity,
        weight: Exponent,
        name: String,
    ) -> Self {
        Field {
            inner: Arc::new(FieldData {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                module,
                kind,
                charge: frac(&charge),
                twist,
                parity,
                weight,
                name,
                cache: DashMap::new(),
            }),
        }
    }

    /// The identity operator `I(z) = Id`.
    pub fn identity(module: &Arc<PbwModule<C>>) -> Self {
        Self::make(module.clone(), FieldKind::Identity, Exponent::zero(), module.twist(), Parity::Even, Exponent::zero(), "I".into())
    }

    /// The field of generator `g` of the module's mode algebra.
    pub fn generator(module: &Arc<PbwModule<C>>, g: u16) -> Self {
        let info = module.algebra().generators()[g as usize].clone();
        Self::make(module.clone(), FieldKind::Generator(g), info.charge, module.twist(), info.parity, info.weight, info.name)
    }

    /// `Σ c · z^e · f`; all terms must share parity, effective weight and charge.
    pub fn combination(terms: Vec<(C, Exponent, Field<C>)>, name: impl Into<String>) -> Result<Self, FieldError> {
        let terms: Vec<_> = terms.into_iter().filter(|(c, _, _)| !c.is_zero()).collect();
        let Some((_, e0, f0)) = terms.first() else {
            return Err(FieldError::Inhomogeneous("emptiness"));
        };
        let module = f0.inner.module.clone();
        let weight = f0.weight() - e0;
        let charge = frac(&(f0.charge() - e0));
        let parity = f0.parity();
        let mut twist = f0.twist();
        for (_, e, f) in &terms {
            if !Arc::ptr_eq(&f.inner.module, &module) {
                return Err(FieldError::ModuleMismatch);
            }
            if f.weight() - e != weight {
                return Err(FieldError::Inhomogeneous("weight"));
            }
            if frac(&(f.charge() - e)) != charge {
                return Err(FieldError::Inhomogeneous("charge"));
            }
            if f.parity() != parity {
                return Err(FieldError::Inhomogeneous("parity"));
            }
            twist = lcm_twist(twist, lcm_twist(f.twist(), *e.denom() as u32));
        }
        Ok(Self::make(module, FieldKind::Combination(terms), charge, twist, parity, weight, name.into()))
    }

    /// The zero field with the given bookkeeping.
    pub fn zero_like(&self) -> Self {
        Self::make(
            self.inner.module.clone(),
            FieldKind::Combination(Vec::new()),
            self.charge(),
            self.twist(),
            self.parity(),
            self.weight(),
            "0".into(),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        let name = format!("({})*{}", c, self.name());
        Self::combination(vec![(c.clone(), Exponent::zero(), self.clone())], name).unwrap_or_else(|_| self.zero_like())
    }

    pub fn add(&self, other: &Field<C>) -> Result<Self, FieldError> {
        let name = format!("{} + {}", self.name(), other.name());
        Self::combination(
            vec![(C::one(), Exponent::zero(), self.clone()), (C::one(), Exponent::zero(), other.clone())],
            name,
        )
    }

    pub fn sub(&self, other: &Field<C>) -> Result<Self, FieldError> {
        let name = format!("{} - {}", self.name(), other.name());
        Self::combination(
            vec![(C::one(), Exponent::zero(), self.clone()), (-C::one(), Exponent::zero(), other.clone())],
            name,
        )
    }

    /// Renames without changing modes.
    pub fn named(&self, name: impl Into<String>) -> Self {
        Self::combination(vec![(C::one(), Exponent::zero(), self.clone())], name).unwrap_or_else(|_| self.zero_like())
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn module(&self) -> &Arc<PbwModule<C>> {
        &self.inner.module
    }

    /// Fractional part of the mode indices, in `[0, 1)`.
    pub fn charge(&self) -> Exponent {
        self.inner.charge
    }

    /// The σ-charge `k` with `charge = k / T`.
    pub fn charge_index(&self) -> u32 {
        (self.inner.charge * Exponent::from_integer(self.inner.twist as i64)).to_integer() as u32
    }

    pub fn twist(&self) -> u32 {
        self.inner.twist
    }

    pub fn parity(&self) -> Parity {
        self.inner.parity
    }

    pub fn weight(&self) -> Exponent {
        self.inner.weight
    }

    pub fn same_module(&self, other: &Field<C>) -> bool {
        Arc::ptr_eq(&self.inner.module, &other.inner.module)
    }

    /// Whether `m` is an admissible mode index.
    pub fn admits(&self, m: &Exponent) -> bool {
        (m - self.inner.charge).is_integer()
    }

    /// Largest index whose mode can be nonzero on a vector of degree `d`.
    pub fn top_mode(&self, d: &Exponent) -> Exponent {
        d + self.inner.weight - ex_int(1)
    }

    /// Mode indices in `charge + Z` within `[lo, hi]`.
    pub fn indices(&self, lo: &Exponent, hi: &Exponent) -> Vec<Exponent> {
        let c = self.inner.charge;
        let mut m = (lo - c).ceil() + c;
        let mut out = Vec::new();
        while m <= *hi {
            out.push(m);
            m += ex_int(1);
        }
        out
    }

    /// `a_m · basis(id)`.
    pub fn mode(&self, m: &Exponent, id: BasisId) -> Arc<Vector<C>> {
        if !self.admits(m) || *m > self.top_mode(&self.inner.module.degree(id)) {
            return Arc::new(Vector::zero());
        }
        if let FieldKind::Generator(g) = self.inner.kind {
            return self.inner.module.act(&Mode::new(g, *m), id);
        }
        if let Some(v) = self.inner.cache.get(&(*m, id)) {
            return v.clone();
        }
        let v = Arc::new(self.compute(m, id));
        self.inner.cache.insert((*m, id), v.clone());
        v
    }

    /// `a_m · v`.
    pub fn mode_vec(&self, m: &Exponent, v: &Vector<C>) -> Vector<C> {
        v.map_linear(|id| (*self.mode(m, id)).clone())
    }

    fn compute(&self, m: &Exponent, id: BasisId) -> Vector<C> {
        match &self.inner.kind {
            FieldKind::Identity => {
                if *m == ex_int(-1) {
                    Vector::basis(id)
                } else {
                    Vector::zero()
                }
            }
            FieldKind::Generator(_) => unreachable!(),
            FieldKind::Derivative(a) => a.mode(&(m - ex_int(1)), id).scale(&C::from_rational(&exp_to_rational(&-m))),
            FieldKind::Combination(terms) => {
                let mut out = Vector::zero();
                for (c, e, f) in terms {
                    out.add_scaled(c, &f.mode(&(m + e), id));
                }
                out
            }
            FieldKind::Product { a, b, n, bound } => product_mode(a, b, *n, *bound, m, id),
        }
    }

    /// The operator `a_m` restricted to a truncated space.
    pub fn mode_operator(&self, m: &Exponent, space: &GradedSuperSpace) -> SparseOperator<C> {
        let shift = self.weight() - m - ex_int(1);
        SparseOperator::from_fn(space, shift, self.parity(), |id| (*self.mode(m, id)).clone())
    }

    /// `a(z) u` for exponents of `z` in `window`, as a series with vector
    /// coefficients. The window must be bounded above.
    pub fn apply(&self, u: BasisId, window: &Window) -> Result<TruncatedSeries<C, Vector<C>>, FieldError> {
        let Some(hi) = window.hi.finite().copied() else {
            return Err(FieldError::Series(SeriesError::Soundness {
                var: Var::Z,
                exponent: Exponent::zero(),
                window: window.clone(),
            }));
        };
        // exponent e = -m-1; a_m u = 0 for m > top, i.e. e < -top-1
        let lowest = -self.top_mode(&self.inner.module.degree(u)) - ex_int(1);
        let lo = match window.lo.finite() {
            Some(l) => (*l).max(lowest),
            None => lowest,
        };
        let mut terms = Vec::new();
        let w = Window::new(lo, hi);
        for e in w.lattice_points(&-self.charge()) {
            let m = -e - ex_int(1);
            terms.push((vec![e], (*self.mode(&m, u)).clone()));
        }
        let twist = lcm_twist(self.twist(), self.inner.module.twist());
        Ok(TruncatedSeries::from_parts(&[Var::Z], twist, terms, vec![window.clone()], vec![Window::at_least(lowest)])?)
    }

    /// Text dump: header `charge k/T | parity | weight`, then `m : operator`.
    pub fn dump(&self, space: &GradedSuperSpace, lo: &Exponent, hi: &Exponent) -> String {
        let mut s = String::new();
        writeln!(s, "charge {}/{} | {} | {}", self.charge_index(), self.twist(), self.parity(), self.weight()).unwrap();
        for m in self.indices(lo, hi) {
            let op = self.mode_operator(&m, space);
            let body = op.dump(space);
            let body = body.trim_end().replace('\n', " ");
            writeln!(s, "{} : {}", m, body).unwrap();
        }
        s
    }
}

/// `a'(z)`: mode `m` is `-m · a_{m-1}`.
pub fn derivative_field<C: Coeff>(a: &Field<C>) -> Field<C> {
    Field::make(
        a.inner.module.clone(),
        FieldKind::Derivative(a.clone()),
        a.charge(),
        a.twist(),
        a.parity(),
        a.weight() + ex_int(1),
        format!("{}'", a.name()),
    )
}

/// `σ a`: multiplies a charge-`k` field by `ε^k`.
pub fn sigma_action<C: Coeff>(a: &Field<C>) -> Result<Field<C>, FieldError> {
    let t = a.twist();
    let eps = C::root_of_unity(t, a.charge_index() as i64).ok_or(FieldError::NoRootOfUnity(t))?;
    Field::combination(vec![(eps, Exponent::zero(), a.clone())], format!("sigma({})", a.name()))
}

/// Expansion bound used when none is given: an upper estimate of the
/// locality order plus `|min(n,0)| + 2`.
pub fn default_bound<C: Coeff>(a: &Field<C>, b: &Field<C>, n: i64) -> usize {
    let w = (a.weight() + b.weight()).ceil().to_integer().max(0) as usize;
    w + (-n).max(0) as usize + 2
}

/// The n-th product `a(z)_n b(z)`.
pub fn nth_product<C: Coeff>(a: &Field<C>, b: &Field<C>, n: i64) -> Result<Field<C>, FieldError> {
    nth_product_with_bound(a, b, n, default_bound(a, b, n))
}

/// The n-th product with an explicit bound on the binomial expansion of
/// `((z1 - z0)/z)^{k/T}`.
pub fn nth_product_with_bound<C: Coeff>(a: &Field<C>, b: &Field<C>, n: i64, bound: usize) -> Result<Field<C>, FieldError> {
    if !a.same_module(b) {
        return Err(FieldError::ModuleMismatch);
    }
    let weight = a.weight() + b.weight() - ex_int(n + 1);
    let name = format!("({})_{}({})", a.name(), n, b.name());
    Ok(Field::make(
        a.inner.module.clone(),
        FieldKind::Product { a: a.clone(), b: b.clone(), n, bound },
        a.charge() + b.charge(),
        lcm_twist(a.twist(), b.twist()),
        a.parity() + b.parity(),
        weight,
        name,
    ))
}

/// `(a_n b)_m u` from the finite residue formula.
fn product_mode<C: Coeff>(a: &Field<C>, b: &Field<C>, n: i64, bound: usize, m: &Exponent, u: BasisId) -> Vector<C> {
    let module = a.module();
    let alpha = a.charge();
    let du = module.degree(u);
    let eps = koszul::<C>(a.parity(), b.parity());
    let top_a = a.top_mode(&du);
    let top_b = b.top_mode(&du);
    let mut out = Vector::zero();
    let last_i = if alpha.is_zero() { 0 } else { bound };
    for i in 0..=last_i {
        let ci = C::from_rational(&binom_exp(&alpha, i as u64));
        if ci.is_zero() {
            continue;
        }
        let ci = if i % 2 == 1 { -ci } else { ci };
        let p = n + i as i64;
        // first term: Σ_l (-1)^l C(p,l) a_{α+n-l} b_{m+l-α} u
        let l_max = if p >= 0 { p } else { (top_b - m + alpha).floor().to_integer() };
        let mut first = Vector::zero();
        for l in 0..=l_max.max(-1) {
            let c = binom(p, l as u64);
            if c.is_zero() {
                continue;
            }
            let bu = b.mode(&(m + ex_int(l) - alpha), u);
            if bu.is_zero() {
                continue;
            }
            let ab = a.mode_vec(&(alpha + ex_int(n - l)), &bu);
            let sign = if l % 2 == 1 { -C::one() } else { C::one() };
            first.add_scaled(&(sign * C::from_rational(&c)), &ab);
        }
        // second term: Σ_l (-1)^{p-l} C(p,l) b_{m+p-l-α} a_{α-i+l} u
        let l_max = if p >= 0 { p } else { (top_a - alpha + ex_int(i as i64)).floor().to_integer() };
        let mut second = Vector::zero();
        for l in 0..=l_max.max(-1) {
            let c = binom(p, l as u64);
            if c.is_zero() {
                continue;
            }
            let au = a.mode(&(alpha - ex_int(i as i64 - l)), u);
            if au.is_zero() {
                continue;
            }
            let ba = b.mode_vec(&(m + ex_int(p - l) - alpha), &au);
            let sign = if (p - l).rem_euclid(2) == 1 { -C::one() } else { C::one() };
            second.add_scaled(&(sign * C::from_rational(&c)), &ba);
        }
        out.add_scaled(&ci, &first);
        out.add_scaled(&-(ci * eps.clone()), &second);
    }
    out
}

/// Whether two fields agree on every mode in `[lo, hi]` applied to `probes`.
pub fn fields_equal_on<C: Coeff>(a: &Field<C>, b: &Field<C>, probes: &[BasisId], lo: &Exponent, hi: &Exponent) -> bool {
    if a.charge() != b.charge() && !(a.is_zero_on(probes, lo, hi) && b.is_zero_on(probes, lo, hi)) {
        return false;
    }
    a.indices(lo, hi).iter().all(|m| probes.iter().all(|&u| a.mode(m, u) == b.mode(m, u)))
}

impl<C: Coeff> Field<C> {
    /// Whether every mode in `[lo, hi]` kills every probe.
    pub fn is_zero_on(&self, probes: &[BasisId], lo: &Exponent, hi: &Exponent) -> bool {
        self.indices(lo, hi).iter().all(|m| probes.iter().all(|&u| self.mode(m, u).is_zero()))
    }
}

/// Supercommutator `[a_p, b_q] u`.
pub fn supercommutator<C: Coeff>(a: &Field<C>, b: &Field<C>, p: &Exponent, q: &Exponent, u: BasisId) -> Vector<C> {
    let ab = a.mode_vec(p, &b.mode(q, u));
    let ba = b.mode_vec(q, &a.mode(p, u));
    let mut out = ab;
    out.add_scaled(&-koszul::<C>(a.parity(), b.parity()), &ba);
    out
}

/// Least `n <= max_n` such that `(z1 - z2)^n [a(z1), b(z2)]` vanishes on the
/// probes for all coefficient indices in `[lo, hi]`.
pub fn locality_order<C: Coeff>(
    a: &Field<C>,
    b: &Field<C>,
    max_n: u32,
    probes: &[BasisId],
    lo: &Exponent,
    hi: &Exponent,
) -> Option<u32> {
    let mut cache: std::collections::HashMap<(Exponent, Exponent, BasisId), Vector<C>> = std::collections::HashMap::new();
    let ps = a.indices(lo, hi);
    let qs = b.indices(lo, hi);
    'orders: for n in 0..=max_n {
        for pp in &ps {
            for qq in &qs {
                for &u in probes {
                    let mut acc = Vector::zero();
                    for l in 0..=n as i64 {
                        let p = pp + ex_int(n as i64 - l);
                        let q = qq + ex_int(l);
                        let v = cache.entry((p, q, u)).or_insert_with(|| supercommutator(a, b, &p, &q, u));
                        let c = binom(n as i64, l as u64);
                        let c = if l % 2 == 1 { -c } else { c };
                        acc.add_scaled(&C::from_rational(&c), v);
                    }
                    if !acc.is_zero() {
                        continue 'orders;
                    }
                }
            }
        }
        return Some(n);
    }
    None
}

/// Checks that raising the expansion bound by `extra` leaves every mode of a
/// product in `[lo, hi]` unchanged on the probes.
pub fn product_is_stable<C: Coeff>(
    a: &Field<C>,
    b: &Field<C>,
    n: i64,
    extra: usize,
    probes: &[BasisId],
    lo: &Exponent,
    hi: &Exponent,
) -> Result<bool, FieldError> {
    let base = nth_product(a, b, n)?;
    let wider = nth_product_with_bound(a, b, n, default_bound(a, b, n) + extra)?;
    Ok(fields_equal_on(&base, &wider, probes, lo, hi))
}

/// Mode-convolution form of the untwisted product, used as a cross-check:
/// `(a_n b)_m = Σ_i (-1)^i C(n,i) (a_{n-i} b_{m+i} - ε (-1)^n b_{m+n-i} a_i)`.
pub fn untwisted_product_mode<C: Coeff>(a: &Field<C>, b: &Field<C>, n: i64, m: &Exponent, u: BasisId) -> Vector<C> {
    assert!(a.charge().is_zero());
    let du = a.module().degree(u);
    let eps = koszul::<C>(a.parity(), b.parity());
    let mut out = Vector::zero();
    let top_b = (b.top_mode(&du) - m).floor().to_integer();
    let top_a = a.top_mode(&du).floor().to_integer();
    let i_first = if n >= 0 { n } else { top_b };
    for i in 0..=i_first.max(-1) {
        let c = C::from_rational(&binom(n, i as u64));
        let c = if i % 2 == 1 { -c } else { c };
        let v = a.mode_vec(&ex_int(n - i), &b.mode(&(m + ex_int(i)), u));
        out.add_scaled(&c, &v);
    }
    let i_second = if n >= 0 { n } else { top_a };
    for i in 0..=i_second.max(-1) {
        let c = C::from_rational(&binom(n, i as u64));
        let sign = if (i + n).rem_euclid(2) == 1 { -C::one() } else { C::one() };
        let v = b.mode_vec(&(m + ex_int(n - i)), &a.mode(&ex_int(i), u));
        out.add_scaled(&-(c * sign * eps.clone()), &v);
    }
    out
}

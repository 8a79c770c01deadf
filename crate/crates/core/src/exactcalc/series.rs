//! Truncated Puiseux series in up to three formal variables.
//!
//! Every series carries, per variable, a validity window (where stored
//! coefficients are guaranteed to equal those of the untruncated object) and
//! known support bounds (outside of which the true coefficients vanish).

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Zero};
use thiserror::Error;

use super::binomial::binom_exp;
use super::coeff::Coeff;
use super::{ex_int, on_lattice, Exponent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Z,
    Z0,
    Z1,
    Z2,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Z => "z",
            Var::Z0 => "z0",
            Var::Z1 => "z1",
            Var::Z2 => "z2",
        })
    }
}

/// An extended exponent, `-∞ < finite < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(Exponent),
    PosInf,
}

impl Bound {
    fn plus(&self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
            (Bound::NegInf, Bound::PosInf) | (Bound::PosInf, Bound::NegInf) => {
                panic!("indeterminate bound sum")
            }
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
            _ => Bound::PosInf,
        }
    }

    fn shift(&self, d: &Exponent) -> Bound {
        match self {
            Bound::Finite(a) => Bound::Finite(a + d),
            b => b.clone(),
        }
    }

    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Bound::Finite(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("inf"),
            Bound::Finite(e) => write!(f, "{}", e),
        }
    }
}

/// A closed interval of exponents; empty when `lo > hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Bound,
    pub hi: Bound,
}

impl Window {
    pub fn all() -> Self {
        Window { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    pub fn empty() -> Self {
        Window { lo: Bound::PosInf, hi: Bound::NegInf }
    }

    pub fn new(lo: Exponent, hi: Exponent) -> Self {
        Window { lo: Bound::Finite(lo), hi: Bound::Finite(hi) }
    }

    pub fn ints(lo: i64, hi: i64) -> Self {
        Self::new(ex_int(lo), ex_int(hi))
    }

    pub fn at_least(lo: Exponent) -> Self {
        Window { lo: Bound::Finite(lo), hi: Bound::PosInf }
    }

    pub fn at_most(hi: Exponent) -> Self {
        Window { lo: Bound::NegInf, hi: Bound::Finite(hi) }
    }

    pub fn point(e: Exponent) -> Self {
        Self::new(e, e)
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        let b = Bound::Finite(*e);
        self.lo <= b && b <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn hull(&self, other: &Window) -> Window {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        Window {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn shift(&self, d: &Exponent) -> Window {
        Window { lo: self.lo.shift(d), hi: self.hi.shift(d) }
    }

    /// Width `hi - lo` for finite windows.
    pub fn width(&self) -> Option<Exponent> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(b - a),
            _ => None,
        }
    }

    /// The exponents `e ≡ offset (mod 1)` inside a finite window.
    pub fn lattice_points(&self, offset: &Exponent) -> Vec<Exponent> {
        let (lo, hi) = match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => (*a, *b),
            _ => return Vec::new(),
        };
        let start = (lo - offset).ceil() + offset;
        let mut out = Vec::new();
        let mut e = start;
        while e <= hi {
            out.push(e);
            e += ex_int(1);
        }
        out
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("exponent {exponent} is not in (1/{denominator})Z")]
    OffLattice { exponent: Exponent, denominator: u32 },
    #[error("coefficient of {var}^{exponent} lies outside the validity window {window}")]
    Soundness { var: Var, exponent: Exponent, window: Window },
    #[error("variable {0} is not present")]
    MissingVar(Var),
    #[error("n_terms must be at least 1")]
    NoTerms,
}

/// Values a series may carry: scalars, or vectors over them.
pub trait SeriesValue<C>: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_assign_value(&mut self, other: &Self);
    fn scaled(&self, c: &C) -> Self;
}

impl<C: Coeff> SeriesValue<C> for C {
    fn zero_value() -> Self {
        C::zero()
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }

    fn add_assign_value(&mut self, other: &Self) {
        let v = std::mem::replace(self, C::zero());
        *self = v + other.clone();
    }

    fn scaled(&self, c: &C) -> Self {
        self.clone() * c.clone()
    }
}

type Key = Vec<Exponent>;

/// A finitely supported map from exponent tuples to values, with validity
/// windows and support bounds per variable.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<C, V = C> {
    vars: Vec<Var>,
    terms: BTreeMap<Key, V>,
    window: Vec<Window>,
    support: Vec<Window>,
    twist: u32,
    _scalar: PhantomData<C>,
}

impl<C: Coeff, V: SeriesValue<C>> TruncatedSeries<C, V> {
    /// Empty series known to be zero everywhere.
    pub fn zero(vars: &[Var], twist: u32) -> Self {
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        let n = vars.len();
        TruncatedSeries {
            vars,
            terms: BTreeMap::new(),
            window: vec![Window::all(); n],
            support: vec![Window::empty(); n],
            twist,
            _scalar: PhantomData,
        }
    }

    /// Builds a series from explicit parts. Terms outside the window are
    /// dropped; exponents off the `(1/2T)Z` lattice are rejected.
    pub fn from_parts(
        vars: &[Var],
        twist: u32,
        terms: impl IntoIterator<Item = (Vec<Exponent>, V)>,
        window: Vec<Window>,
        support: Vec<Window>,
    ) -> Result<Self, SeriesError> {
        assert_eq!(vars.len(), window.len());
        assert_eq!(vars.len(), support.len());
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&i| vars[i]);
        let svars: Vec<Var> = order.iter().map(|&i| vars[i]).collect();
        let mut out = TruncatedSeries {
            vars: svars,
            terms: BTreeMap::new(),
            window: order.iter().map(|&i| window[i].clone()).collect(),
            support: order.iter().map(|&i| support[i].clone()).collect(),
            twist,
            _scalar: PhantomData,
        };
        for (key, v) in terms {
            for e in &key {
                if !on_lattice(e, twist) {
                    return Err(SeriesError::OffLattice { exponent: *e, denominator: 2 * twist });
                }
            }
            let key: Key = order.iter().map(|&i| key[i]).collect();
            out.add_term(key, v);
        }
        Ok(out)
    }

    /// A single term `value · Π var^e` with full window.
    pub fn monomial(vars: &[Var], exps: &[Exponent], value: V, twist: u32) -> Result<Self, SeriesError> {
        let support = exps.iter().map(|e| Window::point(*e)).collect();
        Self::from_parts(vars, twist, vec![(exps.to_vec(), value)], vec![Window::all(); vars.len()], support)
    }

    fn add_term(&mut self, key: Key, v: V) {
        if v.is_zero_value() {
            return;
        }
        if !key.iter().zip(&self.window).all(|(e, w)| w.contains(e)) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                existing.add_assign_value(&v);
                if existing.is_zero_value() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, v);
            }
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    fn pos(&self, var: Var) -> Result<usize, SeriesError> {
        self.vars.iter().position(|v| *v == var).ok_or(SeriesError::MissingVar(var))
    }

    pub fn window(&self, var: Var) -> Result<&Window, SeriesError> {
        Ok(&self.window[self.pos(var)?])
    }

    pub fn support(&self, var: Var) -> Result<&Window, SeriesError> {
        Ok(&self.support[self.pos(var)?])
    }

    pub fn windows(&self) -> &[Window] {
        &self.window
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Exponent], &V)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no stored coefficient is nonzero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some variable's window is empty.
    pub fn window_collapsed(&self) -> bool {
        self.window.iter().any(|w| w.is_empty())
    }

    /// The coefficient at an exponent tuple (in sorted variable order).
    pub fn coefficient(&self, exps: &[Exponent]) -> Result<V, SeriesError> {
        for (i, e) in exps.iter().enumerate() {
            let known_zero = !self.support[i].contains(e);
            if !self.window[i].contains(e) && !known_zero {
                return Err(SeriesError::Soundness { var: self.vars[i], exponent: *e, window: self.window[i].clone() });
            }
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(V::zero_value))
    }

    /// Adds missing variables with exponent zero.
    fn extend_to(&self, vars: &[Var]) -> Self {
        if self.vars == vars {
            return self.clone();
        }
        let map: Vec<Option<usize>> = vars.iter().map(|v| self.vars.iter().position(|w| w == v)).collect();
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| {
                let key: Key = map.iter().map(|m| m.map(|i| k[i]).unwrap_or_else(Exponent::zero)).collect();
                (key, v.clone())
            })
            .collect();
        let window = map.iter().map(|m| m.map(|i| self.window[i].clone()).unwrap_or_else(Window::all)).collect();
        let support = map
            .iter()
            .map(|m| m.map(|i| self.support[i].clone()).unwrap_or_else(|| Window::point(Exponent::zero())))
            .collect();
        TruncatedSeries { vars: vars.to_vec(), terms, window, support, twist: self.twist, _scalar: PhantomData }
    }

    fn union_vars(&self, other: &[Var]) -> Vec<Var> {
        let mut vars: Vec<Var> = self.vars.iter().chain(other.iter()).copied().collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn add(&self, other: &Self) -> Self {
        let vars = self.union_vars(&other.vars);
        let a = self.extend_to(&vars);
        let b = other.extend_to(&vars);
        let window: Vec<Window> = a.window.iter().zip(&b.window).map(|(x, y)| x.intersect(y)).collect();
        let support = a.support.iter().zip(&b.support).map(|(x, y)| x.hull(y)).collect();
        let mut out = TruncatedSeries {
            vars,
            terms: BTreeMap::new(),
            window,
            support,
            twist: super::lcm_twist(a.twist, b.twist),
            _scalar: PhantomData,
        };
        for (k, v) in a.terms.into_iter().chain(b.terms) {
            out.add_term(k, v);
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v.scaled(c)))
            .filter(|(_, v)| !v.is_zero_value())
            .collect();
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Intersects one variable's window with `w`, dropping terms outside it.
    pub fn restrict(&self, var: Var, w: &Window) -> Result<Self, SeriesError> {
        let i = self.pos(var)?;
        let mut out = self.clone();
        out.window[i] = out.window[i].intersect(w);
        let wi = out.window[i].clone();
        out.terms.retain(|k, _| wi.contains(&k[i]));
        Ok(out)
    }

    /// Term-wise `d/d var`.
    pub fn derivative(&self, var: Var) -> Result<Self, SeriesError> {
        let i = self.pos(var)?;
        let one = ex_int(1);
        let mut out = TruncatedSeries {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            window: self.window.clone(),
            support: self.support.clone(),
            twist: self.twist,
            _scalar: PhantomData,
        };
        out.window[i] = self.window[i].shift(&-one);
        out.support[i] = self.support[i].shift(&-one);
        for (k, v) in &self.terms {
            let c = C::from_rational(&super::exp_to_rational(&k[i]));
            let mut key = k.clone();
            key[i] -= one;
            out.add_term(key, v.scaled(&c));
        }
        Ok(out)
    }

    /// The coefficient of `var^{-1}` as a series in the remaining variables.
    pub fn residue(&self, var: Var) -> Result<Self, SeriesError> {
        let i = self.pos(var)?;
        let m1 = ex_int(-1);
        if !self.window[i].contains(&m1) && self.support[i].contains(&m1) {
            return Err(SeriesError::Soundness { var, exponent: m1, window: self.window[i].clone() });
        }
        let vars: Vec<Var> = self.vars.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        let drop_i = |xs: &[Window]| -> Vec<Window> {
            xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| w.clone()).collect()
        };
        let mut out = TruncatedSeries {
            vars,
            terms: BTreeMap::new(),
            window: drop_i(&self.window),
            support: drop_i(&self.support),
            twist: self.twist,
            _scalar: PhantomData,
        };
        for (k, v) in &self.terms {
            if k[i] == m1 {
                let key: Key = k.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| *e).collect();
                out.add_term(key, v.clone());
            }
        }
        Ok(out)
    }

    /// Multiplies a scalar series into this series.
    pub fn mul_scalar_series(&self, f: &TruncatedSeries<C, C>) -> Self {
        let vars = self.union_vars(&f.vars);
        let g = self.extend_to(&vars);
        let f = f.extend_to(&vars);
        let n = vars.len();
        let mut window = Vec::with_capacity(n);
        let mut support = Vec::with_capacity(n);
        for i in 0..n {
            let (wf, sf, wg, sg) = (&f.window[i], &f.support[i], &g.window[i], &g.support[i]);
            let lo = lower_requirement(wf, sf, sg).max(lower_requirement(wg, sg, sf));
            let hi = upper_requirement(wf, sf, sg).min(upper_requirement(wg, sg, sf));
            window.push(Window { lo, hi });
            support.push(if sf.is_empty() || sg.is_empty() {
                Window::empty()
            } else {
                Window { lo: sf.lo.plus(&sg.lo), hi: sf.hi.plus(&sg.hi) }
            });
        }
        let mut out = TruncatedSeries {
            vars,
            terms: BTreeMap::new(),
            window,
            support,
            twist: super::lcm_twist(f.twist, g.twist),
            _scalar: PhantomData,
        };
        for (kf, cf) in &f.terms {
            for (kg, vg) in &g.terms {
                let key: Key = kf.iter().zip(kg).map(|(a, b)| a + b).collect();
                out.add_term(key, vg.scaled(cf));
            }
        }
        out
    }

    /// Applies `f` to every value.
    pub fn map_values<W: SeriesValue<C>>(&self, f: impl Fn(&V) -> W) -> TruncatedSeries<C, W> {
        let mut out = TruncatedSeries {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            window: self.window.clone(),
            support: self.support.clone(),
            twist: self.twist,
            _scalar: PhantomData,
        };
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }
}

/// Lower end of the exact region of a product with respect to one factor.
fn lower_requirement(w: &Window, s: &Window, other_support: &Window) -> Bound {
    if s.is_empty() || other_support.is_empty() || s.lo >= w.lo {
        Bound::NegInf
    } else {
        w.lo.plus(&other_support.hi)
    }
}

fn upper_requirement(w: &Window, s: &Window, other_support: &Window) -> Bound {
    if s.is_empty() || other_support.is_empty() || s.hi <= w.hi {
        Bound::PosInf
    } else {
        w.hi.plus(&other_support.lo)
    }
}

impl<C: Coeff> TruncatedSeries<C, C> {
    /// `(first ± second)^alpha = Σ_k C(alpha,k) first^{alpha-k} (±second)^k`
    /// for `k < n_terms`.
    pub fn binomial_expand(
        alpha: &Exponent,
        first: Var,
        second: Var,
        negative: bool,
        n_terms: usize,
        twist: u32,
    ) -> Result<Self, SeriesError> {
        if n_terms == 0 {
            return Err(SeriesError::NoTerms);
        }
        let mut terms = Vec::new();
        for k in 0..n_terms {
            let mut c = C::from_rational(&binom_exp(alpha, k as u64));
            if negative && k % 2 == 1 {
                c = -c;
            }
            terms.push((vec![alpha - ex_int(k as i64), ex_int(k as i64)], c));
        }
        let terminating = alpha.is_integer() && alpha.to_integer() >= 0;
        let second_support = if terminating { Window::new(ex_int(0), *alpha) } else { Window::at_least(ex_int(0)) };
        let first_support = if terminating { Window::new(ex_int(0), *alpha) } else { Window::at_most(*alpha) };
        let last = ex_int(n_terms as i64 - 1);
        Self::from_parts(
            &[first, second],
            twist,
            terms,
            vec![Window::at_least(alpha - last), Window::at_most(last)],
            vec![first_support, second_support],
        )
    }

    /// Exact polynomial `Σ c · Π var^e` with full windows.
    pub fn polynomial(vars: &[Var], terms: Vec<(Vec<Exponent>, C)>, twist: u32) -> Result<Self, SeriesError> {
        let mut support = vec![Window::empty(); vars.len()];
        for (k, _) in &terms {
            for (i, e) in k.iter().enumerate() {
                support[i] = support[i].hull(&Window::point(*e));
            }
        }
        Self::from_parts(vars, twist, terms, vec![Window::all(); vars.len()], support)
    }
}

impl<C: Coeff> fmt::Display for TruncatedSeries<C, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono: Vec<String> = self
                .vars
                .iter()
                .zip(k)
                .filter(|(_, e)| !e.is_zero())
                .map(|(v, e)| if e.is_one() { v.to_string() } else { format!("{}^({})", v, e) })
                .collect();
            if mono.is_empty() {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*{}", c, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

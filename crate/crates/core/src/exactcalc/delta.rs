//! Delta-function identities checked coefficient-wise inside finite windows.

use num_traits::One;

use super::binomial::{binom, binom_exp};
use super::coeff::{Coeff, Rational};
use super::series::{SeriesError, TruncatedSeries, Var, Window};
use super::{ex_int, twist_of, Exponent};

fn finite_ends(w: &Window) -> (i64, i64) {
    let lo = w.lo.finite().expect("finite window").floor().to_integer();
    let hi = w.hi.finite().expect("finite window").ceil().to_integer();
    (lo, hi)
}

/// Number of second-variable terms needed to cover exponents up to `hi`.
fn terms_for(hi: i64) -> usize {
    (hi.max(0) + 1) as usize
}

/// `Σ_n outer^{-n-1∓α} (first ± z2)^{n±α}` restricted to outer exponents in
/// `window`, with `first` carrying `α - k` and `z2` carrying `k`.
fn delta_side<C: Coeff>(
    outer: Var,
    first: Var,
    alpha: &Exponent,
    negative: bool,
    window: &Window,
    twist: u32,
) -> Result<TruncatedSeries<C>, SeriesError> {
    let (_, hi) = finite_ends(window);
    let n_terms = terms_for(hi);
    let mut terms = Vec::new();
    for e in window.lattice_points(&(-alpha)) {
        // e = -n-1-alpha
        let power = -e - ex_int(1);
        for k in 0..n_terms {
            let mut c = C::from_rational(&binom_exp(&power, k as u64));
            if negative && k % 2 == 1 {
                c = -c;
            }
            terms.push((vec![e, power - ex_int(k as i64), ex_int(k as i64)], c));
        }
    }
    TruncatedSeries::from_parts(
        &[outer, first, Var::Z2],
        twist,
        terms,
        vec![window.clone(), Window::all(), Window::at_most(ex_int(n_terms as i64 - 1))],
        vec![Window::all(), Window::all(), Window::at_least(ex_int(0))],
    )
}

fn restrict_all<C: Coeff>(s: TruncatedSeries<C>, window: &Window) -> Result<TruncatedSeries<C>, SeriesError> {
    let mut s = s;
    for v in s.vars().to_vec() {
        s = s.restrict(v, window)?;
    }
    Ok(s)
}

/// `z0^{-1} δ((z1-z2)/z0) ((z1-z2)/z0)^α - z1^{-1} δ((z0+z2)/z1) ((z0+z2)/z1)^{-α}`
/// expanded in `window` for all three variables.
pub fn delta_identity_check<C: Coeff>(alpha: &Exponent, window: &Window) -> Result<TruncatedSeries<C>, SeriesError> {
    let twist = twist_of(alpha);
    let lhs = delta_side::<C>(Var::Z0, Var::Z1, alpha, true, window, twist)?;
    let rhs = delta_side::<C>(Var::Z1, Var::Z0, &(-alpha), false, window, twist)?;
    restrict_all(lhs.sub(&rhs), window)
}

/// `(z1 - z2)^m δ^{(n)}(z1/z2)` inside `window`; vanishes when `m > n`.
pub fn derivative_delta_vanishing<C: Coeff>(m: u32, n: u32, window: &Window) -> Result<TruncatedSeries<C>, SeriesError> {
    let (lo, hi) = finite_ends(window);
    let mut terms = Vec::new();
    for e in (lo - m as i64)..=hi {
        // coefficient of x^e in δ^{(n)}(x) is (e+n)(e+n-1)...(e+1)
        let mut c = Rational::one();
        for t in 1..=n as i64 {
            c *= Rational::from_integer((e + t).into());
        }
        terms.push((vec![ex_int(e), ex_int(-e)], C::from_rational(&c)));
    }
    let delta = TruncatedSeries::from_parts(
        &[Var::Z1, Var::Z2],
        1,
        terms,
        vec![Window::ints(lo - m as i64, hi), Window::all()],
        vec![Window::all(), Window::all()],
    )?;
    let poly = TruncatedSeries::binomial_expand(&ex_int(m as i64), Var::Z1, Var::Z2, true, m as usize + 1, 1)?;
    restrict_all(delta.mul_scalar_series(&poly), window)
}

/// `Σ_n z1^{-n} (z0+z2)^n` for z1 exponents in `[lo, hi]`.
fn substitution_delta<C: Coeff>(lo: i64, hi: i64, n_terms: usize) -> Result<TruncatedSeries<C>, SeriesError> {
    let mut terms = Vec::new();
    for e in lo..=hi {
        let n = -e;
        for k in 0..n_terms {
            terms.push((vec![ex_int(n - k as i64), ex_int(e), ex_int(k as i64)], C::from_rational(&binom(n, k as u64))));
        }
    }
    TruncatedSeries::from_parts(
        &[Var::Z0, Var::Z1, Var::Z2],
        1,
        terms,
        vec![Window::all(), Window::ints(lo, hi), Window::at_most(ex_int(n_terms as i64 - 1))],
        vec![Window::all(), Window::all(), Window::at_least(ex_int(0))],
    )
}

/// `δ((z0+z2)/z1) f(z1,z2) - δ((z0+z2)/z1) f(z0+z2,z2)` inside `window`, for a
/// polynomial `f` in `z1, z2`.
pub fn substitution_residual<C: Coeff>(f: &TruncatedSeries<C>, window: &Window) -> Result<TruncatedSeries<C>, SeriesError> {
    let (lo, hi) = finite_ends(window);
    let top = f
        .support(Var::Z1)?
        .hi
        .finite()
        .map(|e| e.ceil().to_integer())
        .unwrap_or(0)
        .max(0);
    let delta = substitution_delta::<C>(lo - top, hi, terms_for(hi))?;
    let lhs = delta.mul_scalar_series(f);
    let mut g = TruncatedSeries::<C>::zero(&[Var::Z0, Var::Z2], 1);
    for (k, c) in f.terms() {
        let a = k[0];
        let b = k[1];
        let a_int = a.to_integer() as usize;
        let expand = TruncatedSeries::binomial_expand(&a, Var::Z0, Var::Z2, false, a_int + 1, 1)?;
        let z2b = TruncatedSeries::monomial(&[Var::Z2], &[b], c.clone(), 1)?;
        g = g.add(&expand.mul_scalar_series(&z2b));
    }
    let rhs = delta.mul_scalar_series(&g);
    restrict_all(lhs.sub(&rhs), window)
}

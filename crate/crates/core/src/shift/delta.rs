use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::{ShiftError, StateFields};
use crate::algebras::ModuleBuild;
use crate::exactcalc::{binom_exp, ex_int, frac, lcm_twist, Coeff, Exponent, Matrix, Rational, TruncatedSeries, Var, Window};
use crate::fields::{Field, FieldError};
use crate::statespace::{BasisId, Mode, Vector};
use crate::verify::{check_twisted_jacobi_with, CheckConfig, CheckReport};

/// Largest automorphism order searched for.
const MAX_ORDER: u32 = 120;

/// A weight-one state `h` whose zero mode is diagonal with spectrum in
/// `(1/T)Z`, together with the eigen-data it was built from.
#[derive(Clone)]
pub struct CartanDatum<C> {
    pub state: Vector<C>,
    pub field: Field<C>,
    pub twist: u32,
    /// `n_j` with `σ a_j = ε^{n_j} a_j`.
    pub exponents: Vec<i64>,
    /// Eigenvectors `a_j` of σ on the plus half, as states.
    pub plus: Vec<Vector<C>>,
    /// The dual vectors `a*_j`, as states.
    pub minus: Vec<Vector<C>>,
    pub sigma_plus: Matrix<C>,
    /// Original plus generators, as states.
    pub plus_generators: Vec<Vector<C>>,
    eigvecs: Matrix<C>,
}

fn to_exponent(q: &Rational) -> Option<Exponent> {
    Some(Exponent::new(q.numer().to_i64()?, q.denom().to_i64()?))
}

impl<C: Coeff> CartanDatum<C> {
    /// `h(0)` eigenvalue of a basis vector.
    pub fn eigenvalue(&self, id: BasisId, label: &str) -> Result<Exponent, ShiftError> {
        self.eigenvalue_of(&Vector::basis(id), label)
    }

    /// `λ` with `h(0) v = λ v`.
    pub fn eigenvalue_of(&self, v: &Vector<C>, label: &str) -> Result<Exponent, ShiftError> {
        let w = self.field.mode_vec(&Exponent::zero(), v);
        let Some((id, c)) = v.iter().next() else {
            return Ok(Exponent::zero());
        };
        let lambda = w.get(id) * c.inverse().expect("nonzero coefficient");
        if w != v.scale(&lambda) {
            return Err(ShiftError::NotDiagonal(label.to_string()));
        }
        let q = lambda.to_rational().ok_or_else(|| ShiftError::Spectrum(lambda.to_string()))?;
        let e = to_exponent(&q).ok_or_else(|| ShiftError::Spectrum(q.to_string()))?;
        if (e * Exponent::from_integer(self.twist as i64)).is_integer() {
            Ok(e)
        } else {
            Err(ShiftError::Spectrum(e.to_string()))
        }
    }

    /// `h(n) v`.
    pub fn mode(&self, n: i64, v: &Vector<C>) -> Vector<C> {
        self.field.mode_vec(&ex_int(n), v)
    }
}

/// `h_σ = (1/T) Σ n_j (a_j)_{-1} a*_j` on a free-fermion build, where the
/// `a_j` diagonalize `sigma_plus` on the span of the `plus` generators and
/// the `a*_j` are the dual basis of the remaining generators.
pub fn build_h_sigma<C: Coeff>(
    build: &ModuleBuild<C>,
    fields: &StateFields<C>,
    plus: &[&str],
    sigma_plus: &Matrix<C>,
) -> Result<CartanDatum<C>, ShiftError> {
    let n = plus.len();
    let gp: Vec<usize> = plus
        .iter()
        .map(|l| build.generator_index(l).ok_or_else(|| ShiftError::Polarization(format!("unknown generator {}", l))))
        .collect::<Result<_, _>>()?;
    let gm: Vec<usize> = (0..build.generators().len()).filter(|g| !gp.contains(g)).collect();
    if gm.len() != n || sigma_plus.rows() != n || sigma_plus.cols() != n {
        return Err(ShiftError::Polarization("plus and minus halves differ in size".into()));
    }
    let twist = (1..=MAX_ORDER).find(|&t| sigma_plus.pow(t).is_identity()).ok_or(ShiftError::NonFiniteOrder(MAX_ORDER))?;

    let mut exponents = Vec::new();
    let mut columns: Vec<Vec<C>> = Vec::new();
    for j in 0..twist {
        let eps = C::root_of_unity(twist, j as i64).ok_or(ShiftError::NotDiagonalizable)?;
        let shifted = sigma_plus.add(&Matrix::identity(n).scale(&-eps));
        for v in shifted.kernel() {
            exponents.push(j as i64);
            columns.push(v);
        }
    }
    if columns.len() != n {
        return Err(ShiftError::NotDiagonalizable);
    }
    let mut eigvecs = Matrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col.iter().enumerate() {
            eigvecs.set(i, j, c.clone());
        }
    }
    let mut pairing = Matrix::zeros(n, n);
    for (i, &a) in gp.iter().enumerate() {
        for (k, &b) in gm.iter().enumerate() {
            pairing.set(i, k, build.form[a][b].clone() * build.central.clone());
        }
    }
    let dual = eigvecs
        .transpose()
        .mul(&pairing)
        .inverse()
        .ok_or_else(|| ShiftError::Polarization("the halves are not paired".into()))?;

    let combine = |gens: &[usize], m: &Matrix<C>, j: usize| {
        let mut v = Vector::zero();
        for (i, &g) in gens.iter().enumerate() {
            v.add_scaled(m.get(i, j), &fields.generator_state(g));
        }
        v
    };
    let plus_states: Vec<Vector<C>> = (0..n).map(|j| combine(&gp, &eigvecs, j)).collect();
    let minus_states: Vec<Vector<C>> = (0..n).map(|j| combine(&gm, &dual, j)).collect();
    let module = fields.module();
    let mut state = Vector::zero();
    for j in 0..n {
        if exponents[j] == 0 {
            continue;
        }
        let coeff = C::from_frac(exponents[j], twist as i64);
        for (i, &g) in gp.iter().enumerate() {
            let c = eigvecs.get(i, j).clone() * coeff.clone();
            state.add_scaled(&c, &module.act_vec(&Mode::new(g as u16, ex_int(-1)), &minus_states[j]));
        }
    }
    let field = fields.field_of_state(&state, "h")?;
    Ok(CartanDatum {
        state,
        field,
        twist,
        exponents,
        plus: plus_states,
        minus: minus_states,
        sigma_plus: sigma_plus.clone(),
        plus_generators: gp.iter().map(|&g| fields.generator_state(g)).collect(),
        eigvecs,
    })
}

type Poly<C> = BTreeMap<Exponent, Vector<C>>;

fn push<C: Coeff>(p: &mut Poly<C>, e: Exponent, c: &C, v: &Vector<C>) {
    let slot = p.entry(e).or_insert_with(Vector::zero);
    slot.add_scaled(c, v);
    if slot.is_zero() {
        p.remove(&e);
    }
}

/// `exp(±Σ_{n≥1} h(n)/(-n) (-z)^{-n})` applied to a finite series.
fn exp_part<C: Coeff>(h: &CartanDatum<C>, p: Poly<C>, sign: i64) -> Poly<C> {
    let module = h.field.module().clone();
    let mut total = p.clone();
    let mut term = p;
    let mut k = 1i64;
    while !term.is_empty() {
        let mut next = Poly::new();
        for (e, v) in &term {
            let top = module.max_degree(v).map(|d| d.floor().to_integer()).unwrap_or(0);
            for n in 1..=top {
                let w = h.mode(n, v);
                if w.is_zero() {
                    continue;
                }
                // (-1)^{n+1} / n, divided by k for the exponential
                let c = C::from_frac(if n % 2 == 1 { sign } else { -sign }, n * k);
                push(&mut next, e - ex_int(n), &c, &w);
            }
        }
        for (e, v) in &next {
            push(&mut total, *e, &C::one(), v);
        }
        term = next;
        k += 1;
    }
    total
}

/// `z^{± h(0)}` on a finite series.
fn power_part<C: Coeff>(h: &CartanDatum<C>, p: &Poly<C>, sign: i64) -> Result<Poly<C>, ShiftError> {
    let module = h.field.module().clone();
    let mut out = Poly::new();
    for (e, v) in p {
        for (id, c) in v.iter() {
            let lambda = h.eigenvalue(id, &module.label(id))?;
            push(&mut out, e + lambda * Exponent::from_integer(sign), c, &Vector::basis(id));
        }
    }
    Ok(out)
}

/// The terms of `Δ(z) v` (or `Δ(z)^{-1} v`) keyed by exponent of `z`.
pub fn delta_terms<C: Coeff>(h: &CartanDatum<C>, v: &Vector<C>, inverse: bool) -> Result<Poly<C>, ShiftError> {
    let mut p = Poly::new();
    if !v.is_zero() {
        p.insert(Exponent::zero(), v.clone());
    }
    if inverse {
        let p = power_part(h, &p, -1)?;
        Ok(exp_part(h, p, -1))
    } else {
        let p = exp_part(h, p, 1);
        power_part(h, &p, 1)
    }
}

fn as_series<C: Coeff>(h: &CartanDatum<C>, p: Poly<C>, window: &Window) -> Result<TruncatedSeries<C, Vector<C>>, ShiftError> {
    let support = match (p.keys().next(), p.keys().last()) {
        (Some(lo), Some(hi)) => Window::new(*lo, *hi),
        _ => Window::empty(),
    };
    let twist = p.keys().fold(h.twist, |t, e| lcm_twist(t, *e.denom() as u32));
    let terms = p.into_iter().map(|(e, v)| (vec![e], v));
    TruncatedSeries::from_parts(&[Var::Z], twist, terms, vec![window.clone()], vec![support])
        .map_err(|e| ShiftError::Field(FieldError::Series(e)))
}

/// `Δ(z) v = z^{h(0)} exp(Σ_{n≥1} h(n)/(-n) (-z)^{-n}) v`.
pub fn apply_delta<C: Coeff>(h: &CartanDatum<C>, v: &Vector<C>, window: &Window) -> Result<TruncatedSeries<C, Vector<C>>, ShiftError> {
    as_series(h, delta_terms(h, v, false)?, window)
}

/// `Δ(z)^{-1} v = exp(-Σ_{n≥1} h(n)/(-n) (-z)^{-n}) z^{-h(0)} v`.
pub fn apply_delta_inverse<C: Coeff>(
    h: &CartanDatum<C>,
    v: &Vector<C>,
    window: &Window,
) -> Result<TruncatedSeries<C, Vector<C>>, ShiftError> {
    as_series(h, delta_terms(h, v, true)?, window)
}

/// `Ȳ(v, z) = Y(Δ(z) v, z)` for an `h(0)`-homogeneous state `v`. The charge
/// of the result is `-λ` mod 1 for the eigenvalue `λ` of `v`.
pub fn shifted_field<C: Coeff>(
    fields: &StateFields<C>,
    h: &CartanDatum<C>,
    v: &Vector<C>,
    name: &str,
) -> Result<Field<C>, ShiftError> {
    let lambda = h.eigenvalue_of(v, name)?;
    let mut terms = Vec::new();
    for (e, w) in delta_terms(h, v, false)? {
        terms.push((C::one(), e, fields.field_of_state(&w, name)?));
    }
    let label = format!("bar({})", name);
    if terms.is_empty() {
        return Ok(fields.field_of_state(v, name)?.zero_like().named(label));
    }
    let f = Field::combination(terms, label)?;
    if f.charge() != frac(&-lambda) {
        return Err(ShiftError::Cartan(format!("charge {} disagrees with eigenvalue {}", f.charge(), lambda)));
    }
    Ok(f)
}

/// `Δ(z2) Y(a, z0) Δ(z2)^{-1} u = Y(Δ(z2 + z0) a, z0) u` coefficient by
/// coefficient on the probes.
pub fn check_delta_conjugation<C: Coeff>(
    fields: &StateFields<C>,
    h: &CartanDatum<C>,
    a: &Vector<C>,
    cfg: &CheckConfig,
) -> Result<CheckReport, ShiftError> {
    let module = fields.module().clone();
    let mut report = cfg.report("delta-conjugation", &["z0", "z2"]);
    let ya = fields.field_of_state(a, "a")?;
    let da = delta_terms(h, a, false)?;
    let da_fields: Vec<(Exponent, Field<C>)> =
        da.iter().map(|(e, w)| Ok((*e, fields.field_of_state(w, "a")?))).collect::<Result<_, ShiftError>>()?;
    let in_window = |e: &Exponent| *e >= cfg.lo && *e <= cfg.hi;
    for &u in &cfg.probes {
        let mut lhs: BTreeMap<(Exponent, Exponent), Vector<C>> = BTreeMap::new();
        let dinv = delta_terms(h, &Vector::basis(u), true)?;
        for e0 in cfg.points(&ya.charge()) {
            let m = -e0 - ex_int(1);
            for (e, w) in &dinv {
                let x = ya.mode_vec(&m, w);
                if x.is_zero() {
                    continue;
                }
                for (f, y) in delta_terms(h, &x, false)? {
                    let e2 = e + f;
                    if in_window(&e2) {
                        lhs.entry((e0, e2)).or_insert_with(Vector::zero).add_scaled(&C::one(), &y);
                    }
                }
            }
        }
        let mut offsets: Vec<Exponent> = da.keys().map(frac).collect();
        offsets.extend(lhs.keys().map(|(_, e2)| frac(e2)));
        offsets.sort();
        offsets.dedup();
        for e0 in cfg.points(&ya.charge()) {
            for off in &offsets {
                for e2 in cfg.points(off) {
                    let mut res = lhs.remove(&(e0, e2)).unwrap_or_else(Vector::zero);
                    for (mu, f) in &da_fields {
                        // (z2 + z0)^mu = Σ_i C(mu, i) z2^{mu-i} z0^i
                        let i = mu - e2;
                        if !i.is_integer() || i < Exponent::zero() {
                            continue;
                        }
                        let i = i.to_integer();
                        let c = C::from_rational(&binom_exp(mu, i as u64));
                        res.add_scaled(&-c, &f.mode(&(ex_int(i - 1) - e0), u));
                    }
                    report.record(&[e0, e2], &res, &module);
                }
            }
        }
    }
    Ok(report.finish(&cfg.width(), &cfg.min_width))
}

/// `(a_{-1} b)_0 c` for states `a`, `b`, `c`.
pub fn zero_mode_bilinear<C: Coeff>(
    fields: &StateFields<C>,
    a: &Vector<C>,
    b: &Vector<C>,
    c: &Vector<C>,
) -> Result<Vector<C>, ShiftError> {
    let s = fields.state_product(a, -1, b)?;
    let f = fields.field_of_state(&s, "a(-1)b")?;
    Ok(f.mode_vec(&Exponent::zero(), c))
}

/// `exp(2πi h(0))` against σ: on the eigenvectors `a_j`, `a*_j` and on the
/// original plus generators.
pub fn check_sigma_h<C: Coeff>(h: &CartanDatum<C>) -> Result<CheckReport, ShiftError> {
    let module = h.field.module().clone();
    let t = h.twist;
    let mut report = CheckReport::new("exp(2 pi i h(0)) = sigma");
    let exp_of = |lambda: &Exponent| -> Result<C, ShiftError> {
        let k = (lambda * Exponent::from_integer(t as i64)).to_integer();
        C::root_of_unity(t, k).ok_or(ShiftError::NotDiagonalizable)
    };
    let eps = |k: i64| C::root_of_unity(t, k).ok_or(ShiftError::NotDiagonalizable);
    let mut phases = Vec::new();
    for (j, (p, m)) in h.plus.iter().zip(&h.minus).enumerate() {
        let lp = h.eigenvalue_of(p, "a_j")?;
        let lm = h.eigenvalue_of(m, "a*_j")?;
        let zp = exp_of(&lp)?;
        phases.push(zp.clone());
        report.record(&[lp], &p.scale(&(zp - eps(h.exponents[j])?)), &module);
        report.record(&[lm], &m.scale(&(exp_of(&lm)? - eps(-h.exponents[j])?)), &module);
    }
    let inv = h.eigvecs.inverse().ok_or(ShiftError::NotDiagonalizable)?;
    for i in 0..h.plus_generators.len() {
        let mut lhs = Vector::zero();
        for (j, p) in h.plus.iter().enumerate() {
            lhs.add_scaled(&(inv.get(j, i).clone() * phases[j].clone()), p);
        }
        let mut rhs = Vector::zero();
        for (k, gk) in h.plus_generators.iter().enumerate() {
            rhs.add_scaled(h.sigma_plus.get(k, i), gk);
        }
        report.record(&[Exponent::zero()], &lhs.sub(&rhs), &module);
    }
    Ok(report)
}

/// Twisted Jacobi for `Ȳ(a)`, `Ȳ(b)` with `Ȳ(a_j b)` on the right.
pub fn check_shifted_jacobi<C: Coeff>(
    fields: &StateFields<C>,
    h: &CartanDatum<C>,
    a: &Vector<C>,
    b: &Vector<C>,
    cfg: &CheckConfig,
) -> Result<CheckReport, ShiftError> {
    let module = fields.module().clone();
    let fa = shifted_field(fields, h, a, &label_of(&module, a))?;
    let fb = shifted_field(fields, h, b, &label_of(&module, b))?;
    let deg = |v: &Vector<C>| module.max_degree(v).unwrap_or_else(Exponent::zero);
    let order = ((deg(a) + deg(b) - ex_int(1)).floor().to_integer() + 1).max(0) as u32;
    let rhs = |j: i64| -> Result<Field<C>, String> {
        let s = fields.state_product(a, j, b).map_err(|e| e.to_string())?;
        shifted_field(fields, h, &s, &format!("{}_{}{}", fa.name(), j, fb.name())).map_err(|e| e.to_string())
    };
    Ok(check_twisted_jacobi_with(&fa, &fb, &rhs, order, cfg))
}

fn label_of<C: Coeff>(module: &crate::statespace::PbwModule<C>, v: &Vector<C>) -> String {
    match v.iter().next() {
        Some((id, _)) if v.len() == 1 => module.label(id),
        _ => "v".into(),
    }
}

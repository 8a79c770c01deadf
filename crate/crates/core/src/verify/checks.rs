use std::collections::HashMap;

use num_traits::Zero;

use crate::exactcalc::{binom, binom_exp, ex_int, exp_to_rational, Coeff, Exponent, Window};
use crate::fields::{derivative_field, locality_order, nth_product, supercommutator, Field};
use crate::statespace::{koszul, BasisId, Quotient, Vector};

use super::report::CheckReport;

/// Exponent window shared by every variable of a check, plus the probes.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub lo: Exponent,
    pub hi: Exponent,
    pub min_width: Exponent,
    pub probes: Vec<BasisId>,
}

impl CheckConfig {
    pub fn new(lo: i64, hi: i64, probes: Vec<BasisId>) -> Self {
        CheckConfig { lo: ex_int(lo), hi: ex_int(hi), min_width: ex_int(8), probes }
    }

    pub(crate) fn width(&self) -> Exponent {
        self.hi - self.lo
    }

    pub(crate) fn points(&self, offset: &Exponent) -> Vec<Exponent> {
        Window::new(self.lo, self.hi).lattice_points(offset)
    }

    pub(crate) fn report(&self, name: &str, vars: &[&str]) -> CheckReport {
        let mut r = CheckReport::new(name);
        for v in vars {
            r = r.with_window(v, &self.lo, &self.hi);
        }
        r
    }
}

fn sign<C: Coeff>(k: i64) -> C {
    if k.rem_euclid(2) == 1 {
        -C::one()
    } else {
        C::one()
    }
}

fn int(e: &Exponent) -> i64 {
    e.floor().to_integer()
}

/// Caches `a_j b` for the right-hand sides of the Jacobi-type identities.
struct Products<'a, C> {
    provider: &'a dyn Fn(i64) -> Result<Field<C>, String>,
    cache: HashMap<i64, Field<C>>,
}

impl<'a, C: Coeff> Products<'a, C> {
    fn new(provider: &'a dyn Fn(i64) -> Result<Field<C>, String>) -> Self {
        Products { provider, cache: HashMap::new() }
    }

    fn get(&mut self, j: i64) -> Result<&Field<C>, String> {
        if !self.cache.contains_key(&j) {
            let f = (self.provider)(j)?;
            self.cache.insert(j, f);
        }
        Ok(&self.cache[&j])
    }
}

/// Locality order of `a` and `b` over the configured window, searched up to
/// twice the total weight plus four.
pub fn pair_order<C: Coeff>(a: &Field<C>, b: &Field<C>, cfg: &CheckConfig) -> Option<u32> {
    let cap = (2 * (a.weight() + b.weight()).ceil().to_integer().max(0) + 4) as u32;
    locality_order(a, b, cap, &cfg.probes, &cfg.lo, &cfg.hi)
}

/// The twisted Jacobi identity coefficient by coefficient: for every
/// `z0^{e0} z1^{e1} z2^{e2}` in the window and every probe `u`,
///
/// `Σ_l (-1)^l C(n,l) a_{n-l-e1-1} b_{l-e2-1} u
///  - ε Σ_l (-1)^{n+l} C(n,l) b_{n-l-e2-1} a_{l-e1-1} u
///  = Σ_l (-1)^l C(e1+l,l) (a_{l-e0-1} b)_{-e1-e2-l-2} u`, `n = -e0-1`.
///
/// `rhs(j)` supplies the field of `a_j b`; it must vanish for `j >= order`.
pub fn check_twisted_jacobi_with<C: Coeff>(
    a: &Field<C>,
    b: &Field<C>,
    rhs: &dyn Fn(i64) -> Result<Field<C>, String>,
    order: u32,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut report = cfg.report(&format!("twisted-jacobi({}, {})", a.name(), b.name()), &["z0", "z1", "z2"]);
    let module = a.module().clone();
    let eps = koszul::<C>(a.parity(), b.parity());
    let mut products = Products::new(rhs);
    let (wa, wb) = (a.weight(), b.weight());
    for &u in &cfg.probes {
        let du = module.degree(u);
        let (top_a, top_b) = (a.top_mode(&du), b.top_mode(&du));
        let mut ab_memo: HashMap<(Exponent, Exponent), Vector<C>> = HashMap::new();
        let mut ba_memo: HashMap<(Exponent, Exponent), Vector<C>> = HashMap::new();
        for e0 in cfg.points(&Exponent::from_integer(0)) {
            let e0i = e0.to_integer();
            let n = -e0i - 1;
            for e1 in cfg.points(&-a.charge()) {
                for e2 in cfg.points(&-b.charge()) {
                    if du + wa + wb + e0 + e1 + e2 + ex_int(1) < Exponent::from_integer(0) {
                        continue;
                    }
                    let mut res = Vector::zero();
                    let l1 = if n >= 0 { n } else { int(&(top_b + e2 + ex_int(1))) };
                    for l in 0..=l1.max(-1) {
                        let c = C::from_rational(&binom(n, l as u64)) * sign::<C>(l);
                        if c.is_zero() {
                            continue;
                        }
                        let (p, q) = (ex_int(n - l - 1) - e1, ex_int(l - 1) - e2);
                        let ab = ab_memo.entry((p, q)).or_insert_with(|| {
                            let bu = b.mode(&q, u);
                            if bu.is_zero() {
                                Vector::zero()
                            } else {
                                a.mode_vec(&p, &bu)
                            }
                        });
                        res.add_scaled(&c, ab);
                    }
                    let l2 = if n >= 0 { n } else { int(&(top_a + e1 + ex_int(1))) };
                    for l in 0..=l2.max(-1) {
                        let c = C::from_rational(&binom(n, l as u64)) * sign::<C>(n + l);
                        if c.is_zero() {
                            continue;
                        }
                        let (p, q) = (ex_int(l - 1) - e1, ex_int(n - l - 1) - e2);
                        let ba = ba_memo.entry((q, p)).or_insert_with(|| {
                            let au = a.mode(&p, u);
                            if au.is_zero() {
                                Vector::zero()
                            } else {
                                b.mode_vec(&q, &au)
                            }
                        });
                        res.add_scaled(&-(c * eps.clone()), ba);
                    }
                    for l in 0..=(order as i64 + e0i) {
                        let c = C::from_rational(&binom_exp(&(e1 + ex_int(l)), l as u64)) * sign::<C>(l);
                        let f = match products.get(l - e0i - 1) {
                            Ok(f) => f,
                            Err(e) => {
                                report.fail(format!("product unavailable: {}", e));
                                return report;
                            }
                        };
                        let m = ex_int(-l - 2) - e1 - e2;
                        res.add_scaled(&-c, &f.mode(&m, u));
                    }
                    report.record(&[e0, e1, e2], &res, &module);
                }
            }
        }
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// Twisted Jacobi with the computed n-th products on the right.
pub fn check_twisted_jacobi<C: Coeff>(a: &Field<C>, b: &Field<C>, cfg: &CheckConfig) -> CheckReport {
    let Some(order) = pair_order(a, b, cfg) else {
        let mut r = cfg.report(&format!("twisted-jacobi({}, {})", a.name(), b.name()), &["z0", "z1", "z2"]);
        r.fail("fields are not local within the search range");
        return r;
    };
    let (a2, b2) = (a.clone(), b.clone());
    let rhs = move |j: i64| nth_product(&a2, &b2, j).map_err(|e| e.to_string());
    check_twisted_jacobi_with(a, b, &rhs, order, cfg)
}

/// `[a_p, b_q] = Σ_j C(p,j) (u^j)_{p+q-j}` on the probes, where
/// `expected[j]` plays the part of `a_j b`. On failure the residual is
/// localized to the strata `j` where the supplied field is wrong.
pub fn check_commutator_formula<C: Coeff>(a: &Field<C>, b: &Field<C>, expected: &[Field<C>], cfg: &CheckConfig) -> CheckReport {
    let mut report = cfg.report(&format!("commutator({}, {})", a.name(), b.name()), &["z1", "z2"]);
    let module = a.module().clone();
    for p in a.indices(&cfg.lo, &cfg.hi) {
        for q in b.indices(&cfg.lo, &cfg.hi) {
            for &u in &cfg.probes {
                let mut res = supercommutator(a, b, &p, &q, u);
                for (j, f) in expected.iter().enumerate() {
                    let c = C::from_rational(&binom_exp(&p, j as u64));
                    res.add_scaled(&-c, &f.mode(&(p + q - ex_int(j as i64)), u));
                }
                report.record(&[p, q], &res, &module);
            }
        }
    }
    if !report.passed() {
        for j in commutator_strata(a, b, expected, cfg) {
            report.note(format!("residual in stratum {}", j));
        }
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// Strata `j` where `Σ_l (-1)^l C(j,l) [a_{α+j-l}, b_{m+l-α}]` differs from
/// `expected[j]`.
pub fn commutator_strata<C: Coeff>(a: &Field<C>, b: &Field<C>, expected: &[Field<C>], cfg: &CheckConfig) -> Vec<usize> {
    let alpha = a.charge();
    let depth = pair_order(a, b, cfg).map(|r| r as usize).unwrap_or(0).max(expected.len());
    let mut out = Vec::new();
    let charge = alpha + b.charge();
    for j in 0..depth {
        let bad = cfg.points(&charge).iter().any(|m| {
            cfg.probes.iter().any(|&u| {
                let mut v = Vector::zero();
                for l in 0..=j as i64 {
                    let c = C::from_rational(&binom(j as i64, l as u64)) * sign::<C>(l);
                    let pa = alpha + ex_int(j as i64 - l);
                    let qb = m + ex_int(l) - alpha;
                    v.add_scaled(&c, &supercommutator(a, b, &pa, &qb, u));
                }
                if let Some(f) = expected.get(j) {
                    v.add_scaled(&-C::one(), &f.mode(m, u));
                }
                !v.is_zero()
            })
        });
        if bad {
            out.push(j);
        }
    }
    out
}

/// `(z0+z2)^K (z2+z0)^α Y(Y(a,z0)b, z2) u = (z0+z2)^K Y°(a, z0+z2) Y(b,z2) u`
/// with `Y°(a,z) = z^α Y(a,z)` and `K` the least exponent making
/// `z^K Y°(a,z) u` regular.
pub fn check_iterate_associativity<C: Coeff>(a: &Field<C>, b: &Field<C>, cfg: &CheckConfig) -> CheckReport {
    let name = format!("iterate({}, {})", a.name(), b.name());
    let Some(order) = pair_order(a, b, cfg) else {
        let mut r = cfg.report(&name, &["z0", "z2"]);
        r.fail("fields are not local within the search range");
        return r;
    };
    let mut report = iterate_report(a, b, order, cfg, &name);
    report.note(format!("locality order {}", order));
    report
}

fn iterate_report<C: Coeff>(
    a: &Field<C>,
    b: &Field<C>,
    order: u32,
    cfg: &CheckConfig,
    name: &str,
) -> CheckReport {
    let mut report = cfg.report(name, &["z0", "z2"]);
    let module = a.module().clone();
    let alpha = a.charge();
    let alpha_q = exp_to_rational(&alpha);
    let mut products = HashMap::new();
    let i_last = if alpha.is_zero() { 0 } else { i64::MAX };
    for &u in &cfg.probes {
        let du = module.degree(u);
        let k = (du + a.weight() - alpha).ceil().to_integer().max(0);
        let top_b = b.top_mode(&du);
        {
            for e0 in cfg.points(&Exponent::from_integer(0)) {
                for e2 in cfg.points(&-b.charge()) {
                    let mut res = Vector::zero();
                    // iterate side
                    for kk in 0..=k {
                        let ck = C::from_rational(&binom(k, kk as u64));
                        for i in 0..=i_last {
                            let j = k - kk + i - 1 - e0.to_integer();
                            let m = ex_int(kk - i - 1) + alpha - e2;
                            if j >= order as i64 {
                                break;
                            }
                            let ci = C::from_rational(&crate::exactcalc::rational_binomial(&alpha_q, i as u64));
                            let f = products
                                .entry(j)
                                .or_insert_with(|| nth_product(a, b, j).expect("same module"))
                                .clone();
                            res.add_scaled(&(ck.clone() * ci), &f.mode(&m, u));
                        }
                    }
                    // product side: p with i = K + α - p - 1 - e0 >= 0, q = i - 1 - e2
                    {
                        let p_hi = ex_int(k - 1) + alpha - e0;
                        let p_lo = ex_int(k - 2) + alpha - e0 - e2 - top_b;
                        let mut p = p_hi;
                        while p >= p_lo {
                            let np = int(&(ex_int(k - 1) + alpha - p));
                            let i = np - e0.to_integer();
                            let q = ex_int(i - 1) - e2;
                            let bu = b.mode(&q, u);
                            if !bu.is_zero() {
                                let c = C::from_rational(&binom(np, i as u64));
                                res.add_scaled(&-c, &a.mode_vec(&p, &bu));
                            }
                            p -= ex_int(1);
                        }
                    }
                    report.record(&[e0, e2], &res, &module);
                }
            }
        }
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// For a commuting pair, `Y(a_{-1} b, z) = Y(a, z) Y(b, z)` mode by mode.
pub fn check_commuting_product<C: Coeff>(a: &Field<C>, b: &Field<C>, cfg: &CheckConfig) -> CheckReport {
    let mut report = cfg.report(&format!("commuting-product({}, {})", a.name(), b.name()), &["z"]);
    if locality_order(a, b, 0, &cfg.probes, &cfg.lo, &cfg.hi).is_none() {
        report.fail("fields do not commute");
        return report;
    }
    let module = a.module().clone();
    let prod = match nth_product(a, b, -1) {
        Ok(f) => f,
        Err(e) => {
            report.fail(e.to_string());
            return report;
        }
    };
    for m in prod.indices(&cfg.lo, &cfg.hi) {
        for &u in &cfg.probes {
            let du = module.degree(u);
            let mut res = (*prod.mode(&m, u)).clone();
            // q <= top_b and p <= top_a since the modes commute
            let top_a = a.top_mode(&du);
            let top_b = b.top_mode(&du);
            let mut p = a.indices(&(m - ex_int(1) - top_b), &top_a);
            for p in p.drain(..) {
                let q = m - p - ex_int(1);
                let bu = b.mode(&q, u);
                if !bu.is_zero() {
                    res.add_scaled(&-C::one(), &a.mode_vec(&p, &bu));
                }
            }
            report.record(&[-m - ex_int(1)], &res, &module);
        }
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// Virasoro relations for `L(n) = l_{n+1}` with central charge `c`, and
/// `L(-1)` acting as the derivative on `sample`.
pub fn check_virasoro_element<C: Coeff>(l: &Field<C>, c: &C, sample: &[Field<C>], cfg: &CheckConfig) -> CheckReport {
    let mut report = cfg.report(&format!("virasoro({})", l.name()), &["m", "n"]);
    if l.weight() != ex_int(2) || !l.charge().is_zero() || l.parity().is_odd() {
        report.fail("not an even charge-zero field of weight 2");
        return report;
    }
    let module = l.module().clone();
    let twelfth = C::from_rational(&crate::Rational::new(1.into(), 12.into()));
    for m in cfg.points(&Exponent::from_integer(0)) {
        for n in cfg.points(&Exponent::from_integer(0)) {
            let (mi, ni) = (m.to_integer(), n.to_integer());
            for &u in &cfg.probes {
                let mut res = supercommutator(l, l, &(m + ex_int(1)), &(n + ex_int(1)), u);
                res.add_scaled(&-C::from_int(mi - ni), &l.mode(&(m + n + ex_int(1)), u));
                if mi + ni == 0 {
                    let k = C::from_int(mi * mi * mi - mi) * twelfth.clone() * c.clone();
                    res.add_term(u, -k);
                }
                report.record(&[m, n], &res, &module);
            }
        }
    }
    for f in sample {
        let lf = match nth_product(l, f, 0) {
            Ok(x) => x,
            Err(e) => {
                report.fail(e.to_string());
                continue;
            }
        };
        let df = derivative_field(f);
        for m in f.indices(&cfg.lo, &cfg.hi) {
            for &u in &cfg.probes {
                let res = lf.mode(&m, u).sub(&df.mode(&m, u));
                if !res.is_zero() {
                    report.note(format!("L(-1) differs from the derivative on {}", f.name()));
                }
                report.record(&[m], &res, &module);
            }
        }
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// `Y(a, z)^power u = 0` coefficient by coefficient, modulo `quotient` when
/// given. Requires `[a(z1), a(z2)] = 0`. With a quotient only coefficients
/// landing at degree `<= cutoff` are compared.
pub fn check_nilpotency<C: Coeff>(
    a: &Field<C>,
    power: usize,
    quotient: Option<&Quotient<C>>,
    cutoff: &Exponent,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut report = cfg.report(&format!("nilpotency({}^{})", a.name(), power), &["z"]);
    if locality_order(a, a, 0, &cfg.probes, &cfg.lo, &cfg.hi).is_none() {
        report.fail("the field does not commute with itself");
        return report;
    }
    let module = a.module().clone();
    let n = ex_int(power as i64);
    for &u in &cfg.probes {
        let du = module.degree(u);
        for e in cfg.points(&-(n * a.charge())) {
            let out = du + n * a.weight() + e;
            if out < Exponent::from_integer(0) || (quotient.is_some() && out > *cutoff) {
                continue;
            }
            let top = a.indices(&(a.top_mode(&du) - ex_int(1)), &a.top_mode(&du));
            let top = *top.last().unwrap_or(&a.top_mode(&du));
            // Σ (-p_i - 1) = e
            let total = -e - n;
            let mut v = power_term(a, power, &total, &top, &Vector::basis(u));
            if let Some(q) = quotient {
                v = q.project(&v, &module);
            }
            report.record(&[e], &v, &module);
        }
    }
    if report.passed() && quotient.is_some() {
        report.note(format!("compared coefficients up to degree {}", cutoff));
    }
    report.finish(&cfg.width(), &cfg.min_width)
}

/// `Σ a_{p_1} ... a_{p_k} v` over `p_1 + ... + p_k = total`, each `p_i <= top`.
fn power_term<C: Coeff>(a: &Field<C>, k: usize, total: &Exponent, top: &Exponent, v: &Vector<C>) -> Vector<C> {
    if k == 0 {
        return if total.is_zero() { v.clone() } else { Vector::zero() };
    }
    if k == 1 {
        return if total <= top { a.mode_vec(total, v) } else { Vector::zero() };
    }
    let lo = total - ex_int(k as i64 - 1) * top;
    let mut out = Vector::zero();
    for p in a.indices(&lo, top) {
        let w = a.mode_vec(&p, v);
        if w.is_zero() {
            continue;
        }
        out.add_scaled(&C::one(), &power_term(a, k - 1, &(total - p), top, &w));
    }
    out
}

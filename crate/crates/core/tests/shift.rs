use proptest::prelude::*;
use twistcalc::algebras::{build_from_spec, embedded_fixture, parse_spec_file, AlgebraSpec, BuildOptions, ModuleBuild};
use twistcalc::exactcalc::{ex, ex_int, Coeff, Exponent, Matrix, Window};
use twistcalc::fields::{derivative_field, fields_equal_on};
use twistcalc::shift::{
    apply_delta, build_h_sigma, check_delta_conjugation, check_shifted_jacobi, check_sigma_h, delta_terms, shifted_field,
    zero_mode_bilinear, CartanDatum, ShiftError, StateFields,
};
use twistcalc::statespace::{Mode, Vector};
use twistcalc::verify::{CheckConfig, Status};
use twistcalc::Cyclotomic as K;

fn fermions(cutoff: i64) -> ModuleBuild<K> {
    let spec = AlgebraSpec::from_file(&parse_spec_file(embedded_fixture("free-fermion").unwrap()).unwrap()).unwrap();
    build_from_spec(&spec, &ex_int(cutoff), &BuildOptions::default()).unwrap().remove(0)
}

fn minus_one() -> Matrix<K> {
    Matrix::from_rows(vec![vec![K::from_int(-1)]])
}

fn setup(cutoff: i64, sigma: Matrix<K>) -> (ModuleBuild<K>, StateFields<K>, CartanDatum<K>) {
    let b = fermions(cutoff);
    let sf = StateFields::new(&b).unwrap();
    let h = build_h_sigma(&b, &sf, &["a"], &sigma).unwrap();
    (b, sf, h)
}

fn gen_state(b: &ModuleBuild<K>, sf: &StateFields<K>, name: &str) -> Vector<K> {
    sf.generator_state(b.generator_index(name).unwrap())
}

#[test]
fn h_sigma_for_minus_one() {
    let (b, sf, h) = setup(3, minus_one());
    assert_eq!(h.twist, 2);
    assert_eq!(h.exponents, vec![1]);
    let a = gen_state(&b, &sf, "a");
    let astar = gen_state(&b, &sf, "a*");
    let ga = b.generator_index("a").unwrap() as u16;
    let expected = b.module.act_vec(&Mode::new(ga, ex_int(-1)), &astar).scale(&K::from_frac(1, 2));
    assert_eq!(h.state, expected);
    assert_eq!(h.eigenvalue_of(&a, "a").unwrap(), ex(1, 2));
    assert_eq!(h.eigenvalue_of(&astar, "a*").unwrap(), ex(-1, 2));
    assert_eq!(check_sigma_h(&h).unwrap().status, Status::Pass);
}

#[test]
fn h_sigma_for_identity_is_zero() {
    let (_, _, h) = setup(2, Matrix::identity(1));
    assert_eq!(h.twist, 1);
    assert!(h.state.is_zero());
}

#[test]
fn h_sigma_for_an_order_four_rotation() {
    let text = r#"{"name": "ff2", "basis": [
        {"label": "a1", "parity": 1}, {"label": "a2", "parity": 1},
        {"label": "b1", "parity": 1}, {"label": "b2", "parity": 1}],
        "form": [{"x": "a1", "y": "b1", "value": "1"}, {"x": "a2", "y": "b2", "value": "1"}]}"#;
    let spec: AlgebraSpec<K> = AlgebraSpec::from_file(&parse_spec_file(text).unwrap()).unwrap();
    let b = build_from_spec(&spec, &ex_int(2), &BuildOptions::default()).unwrap().remove(0);
    let sf = StateFields::new(&b).unwrap();
    let rot = Matrix::from_rows(vec![vec![K::from_int(0), K::from_int(-1)], vec![K::from_int(1), K::from_int(0)]]);
    let h = build_h_sigma(&b, &sf, &["a1", "a2"], &rot).unwrap();
    assert_eq!(h.twist, 4);
    let mut ns = h.exponents.clone();
    ns.sort();
    assert_eq!(ns, vec![1, 3]);
    for (p, n) in h.plus.iter().zip(&h.exponents) {
        assert_eq!(h.eigenvalue_of(p, "a_j").unwrap(), ex(*n, 4));
    }
    assert_eq!(check_sigma_h(&h).unwrap().status, Status::Pass);
}

#[test]
fn delta_on_states() {
    let (b, sf, h) = setup(3, minus_one());
    let w = Window::ints(-6, 6);
    let vac = Vector::basis(sf.vacuum());
    let s = apply_delta(&h, &vac, &w).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.coefficient(&[ex_int(0)]).unwrap(), vac);

    let a = gen_state(&b, &sf, "a");
    let s = apply_delta(&h, &a, &w).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.coefficient(&[ex(1, 2)]).unwrap(), a);

    let ga = b.generator_index("a").unwrap() as u16;
    let pair = b.module.act_vec(&Mode::new(ga, ex_int(-1)), &gen_state(&b, &sf, "a*"));
    let s = apply_delta(&h, &pair, &w).unwrap();
    assert!(s.len() <= 2 && s.len() >= 1);
    assert_eq!(s.coefficient(&[ex_int(0)]).unwrap(), pair);
    // h(1) a(-1)a*(-1) vac = (1/2) vac, so Δ adds (1/2) z^{-1} vac
    assert_eq!(s.coefficient(&[ex_int(-1)]).unwrap(), vac.scale(&K::from_frac(1, 2)));
}

#[test]
fn shifted_fields_move_exponents() {
    let (b, sf, h) = setup(3, minus_one());
    let a = gen_state(&b, &sf, "a");
    let astar = gen_state(&b, &sf, "a*");
    let fa = shifted_field(&sf, &h, &a, "a").unwrap();
    let fs = shifted_field(&sf, &h, &astar, "a*").unwrap();
    assert_eq!(fa.charge(), ex(1, 2));
    assert_eq!(fs.charge(), ex(1, 2));
    let orig = b.field("a").unwrap();
    let vac = sf.vacuum();
    let w = Window::new(ex(-4, 1), ex(4, 1));
    let plain = orig.apply(vac, &w).unwrap();
    let shifted = fa.apply(vac, &w).unwrap();
    for (e, v) in plain.terms() {
        let e2 = e[0] + ex(1, 2);
        if e2 <= ex_int(4) {
            assert_eq!(shifted.coefficient(&[e2]).unwrap(), *v);
        }
    }
    let plain = b.field("a*").unwrap().apply(vac, &w).unwrap();
    let shifted = fs.apply(vac, &w).unwrap();
    for (e, v) in plain.terms() {
        let e2 = e[0] - ex(1, 2);
        if e2 >= ex_int(-4) {
            assert_eq!(shifted.coefficient(&[e2]).unwrap(), *v);
        }
    }

    let (_, sf0, h0) = setup(3, Matrix::identity(1));
    let fa0 = shifted_field(&sf0, &h0, &a, "a").unwrap();
    let probes = b.probes(&ex_int(2));
    assert!(fields_equal_on(&fa0, sf0.field_of_state(&a, "a").as_ref().unwrap(), &probes, &ex_int(-4), &ex_int(4)));
}

#[test]
fn shifted_fields_satisfy_twisted_jacobi() {
    let (b, sf, h) = setup(4, minus_one());
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(2)));
    let gens = [gen_state(&b, &sf, "a"), gen_state(&b, &sf, "a*")];
    for x in &gens {
        for y in &gens {
            let r = check_shifted_jacobi(&sf, &h, x, y, &cfg).unwrap();
            assert_eq!(r.status, Status::Pass, "{}", r.to_json());
        }
    }
}

#[test]
fn delta_conjugation() {
    let (b, sf, h) = setup(4, minus_one());
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(2)));
    for a in [gen_state(&b, &sf, "a"), gen_state(&b, &sf, "a*"), Vector::basis(sf.vacuum())] {
        let r = check_delta_conjugation(&sf, &h, &a, &cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.to_json());
        assert!(r.checked > 0);
    }
    let (_, sf0, h0) = setup(4, Matrix::identity(1));
    let r = check_delta_conjugation(&sf0, &h0, &gen_state(&b, &sf0, "a"), &cfg).unwrap();
    assert_eq!(r.status, Status::Pass);
}

#[test]
fn delta_is_invertible() {
    let (b, _, h) = setup(4, minus_one());
    for u in b.probes(&ex_int(3)) {
        let v = Vector::basis(u);
        let mut back: std::collections::BTreeMap<Exponent, Vector<K>> = Default::default();
        for (e, w) in delta_terms(&h, &v, true).unwrap() {
            for (f, x) in delta_terms(&h, &w, false).unwrap() {
                back.entry(e + f).or_insert_with(Vector::zero).add_scaled(&K::from_int(1), &x);
            }
        }
        back.retain(|_, x| !x.is_zero());
        assert_eq!(back.len(), 1, "{}", b.space.label(u));
        assert_eq!(back[&ex_int(0)], v);
    }
}

#[test]
fn derivative_survives_shifting() {
    let (b, sf, h) = setup(4, minus_one());
    let probes = b.probes(&ex_int(2));
    for name in ["a", "a*"] {
        let a = gen_state(&b, &sf, name);
        let lhs = derivative_field(&shifted_field(&sf, &h, &a, name).unwrap());
        let rhs = shifted_field(&sf, &h, &sf.translate(&a).unwrap(), "Da").unwrap();
        assert!(fields_equal_on(&lhs, &rhs, &probes, &ex_int(-4), &ex_int(4)), "{}", name);
    }
}

#[test]
fn non_eigenvectors_are_rejected() {
    let (b, sf, h) = setup(3, minus_one());
    let mut v = gen_state(&b, &sf, "a");
    v.add_scaled(&K::from_int(1), &gen_state(&b, &sf, "a*"));
    assert!(matches!(shifted_field(&sf, &h, &v, "v"), Err(ShiftError::NotDiagonal(_))));
}

#[test]
fn bilinear_examples() {
    let (b, sf, _) = setup(3, minus_one());
    let a = gen_state(&b, &sf, "a");
    let s = gen_state(&b, &sf, "a*");
    assert!(zero_mode_bilinear(&sf, &a, &a, &s).unwrap().is_zero());
    assert_eq!(zero_mode_bilinear(&sf, &a, &s, &a).unwrap(), a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn bilinear_matches_pairing(x in proptest::array::uniform6(-3i64..=3)) {
        let (b, sf, _) = setup(2, minus_one());
        let ea = gen_state(&b, &sf, "a");
        let es = gen_state(&b, &sf, "a*");
        let mk = |p: i64, q: i64| {
            let mut v = ea.scale(&K::from_int(p));
            v.add_scaled(&K::from_int(q), &es);
            v
        };
        let (u, v, w) = (mk(x[0], x[1]), mk(x[2], x[3]), mk(x[4], x[5]));
        // <p a + q a*, r a + s a*> = p s + q r
        let pair = |i: usize, j: usize| K::from_int(x[i] * x[j + 1] + x[i + 1] * x[j]);
        let mut expected = u.scale(&pair(2, 4));
        expected.add_scaled(&-pair(0, 4), &v);
        prop_assert_eq!(zero_mode_bilinear(&sf, &u, &v, &w).unwrap(), expected);
    }
}

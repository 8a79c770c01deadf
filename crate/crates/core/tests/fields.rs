use twistcalc::algebras::{build_from_spec, build_ns_vacuum, build_virasoro, embedded_fixture, parse_spec_file, AlgebraSpec, BuildOptions, ModuleBuild};
use twistcalc::exactcalc::{ex, ex_int, Coeff, Exponent, Rational, Window};
use twistcalc::fields::{
    derivative_field, fields_equal_on, generate_closure, locality_order, nth_product, product_is_stable, sigma_action,
    untwisted_product_mode, ClosureConfig, Field,
};
use twistcalc::statespace::Vector;
use twistcalc::Cyclotomic;

fn q(p: i64, d: i64) -> Rational {
    Rational::from_frac(p, d)
}

fn virasoro() -> ModuleBuild<Rational> {
    build_virasoro(q(1, 2), q(0, 1), &ex_int(6)).unwrap()
}

fn fixture(name: &str, cutoff: i64) -> Vec<ModuleBuild<Cyclotomic>> {
    let spec = AlgebraSpec::from_file(&parse_spec_file(embedded_fixture(name).unwrap()).unwrap()).unwrap();
    build_from_spec(&spec, &ex_int(cutoff), &BuildOptions::default()).unwrap()
}

fn window() -> (Exponent, Exponent) {
    (ex_int(-5), ex_int(5))
}

/// `(L_n L)_m u` from the Virasoro relations: `L_0 L = L'`, `L_1 L = 2L`,
/// `L_3 L = (c/2) I`, otherwise zero for `n >= 0`.
fn expected_product(b: &ModuleBuild<Rational>, n: i64, m: &Exponent, u: u32) -> Vector<Rational> {
    let l = b.field("L").unwrap();
    match n {
        0 => l.mode(&(m - ex_int(1)), u).scale(&-Rational::from_rational(&twistcalc::exactcalc::exp_to_rational(m))),
        1 => l.mode(m, u).scale(&q(2, 1)),
        3 if *m == ex_int(-1) => Vector::term(u, q(1, 4)),
        _ => Vector::zero(),
    }
}

#[test]
fn virasoro_product_table() {
    let b = virasoro();
    let l = b.field("L").unwrap();
    let probes = b.probes(&ex_int(3));
    let (lo, hi) = window();
    for n in 0..6 {
        let p = nth_product(l, l, n).unwrap();
        assert_eq!(p.weight(), ex_int(3 - n));
        for m in p.indices(&lo, &hi) {
            for &u in &probes {
                assert_eq!(*p.mode(&m, u), expected_product(&b, n, &m, u), "n={} m={} u={}", n, m, b.space.label(u));
            }
        }
    }
}

#[test]
fn identity_products() {
    let b = virasoro();
    let l = b.field("L").unwrap();
    let id = b.field("I").unwrap();
    let probes = b.probes(&ex_int(3));
    let (lo, hi) = window();
    assert!(fields_equal_on(&nth_product(id, l, -1).unwrap(), l, &probes, &lo, &hi));
    for n in 0..3 {
        assert!(nth_product(id, l, n).unwrap().is_zero_on(&probes, &lo, &hi));
    }
    assert!(fields_equal_on(&nth_product(l, id, -2).unwrap(), &derivative_field(l), &probes, &lo, &hi));
    assert!(derivative_field(id).is_zero_on(&probes, &lo, &hi));
}

#[test]
fn locality_orders() {
    let b = virasoro();
    let l = b.field("L").unwrap();
    let id = b.field("I").unwrap();
    let probes = b.probes(&ex_int(3));
    let (lo, hi) = window();
    assert_eq!(locality_order(l, l, 6, &probes, &lo, &hi), Some(4));
    assert_eq!(locality_order(id, l, 6, &probes, &lo, &hi), Some(0));
    let dl = derivative_field(l);
    assert_eq!(locality_order(l, &dl, 6, &probes, &lo, &hi), Some(5));

    let ns = build_ns_vacuum(q(7, 10), &ex_int(5)).unwrap();
    let (l, g) = (ns.field("L").unwrap(), ns.field("G").unwrap());
    let probes = ns.probes(&ex_int(3));
    assert_eq!(locality_order(l, g, 6, &probes, &lo, &hi), Some(2));
    assert_eq!(locality_order(g, g, 6, &probes, &lo, &hi), Some(3));

    let ff = fixture("clifford-rank2", 4).remove(0);
    let probes = ff.probes(&ex_int(2));
    let (a, bb) = (ff.field("a").unwrap(), ff.field("b").unwrap());
    assert_eq!(locality_order(a, bb, 4, &probes, &lo, &hi), Some(1));
}

#[test]
fn derivative_compatibility_and_untwisted_cross_check() {
    let b = virasoro();
    let l = b.field("L").unwrap();
    let dl = derivative_field(l);
    let probes = b.probes(&ex_int(3));
    let (lo, hi) = window();
    for n in -2..4 {
        let lhs = nth_product(&dl, l, n).unwrap();
        let rhs = nth_product(l, l, n - 1).unwrap().scale(&q(-n, 1));
        assert!(fields_equal_on(&lhs, &rhs, &probes, &lo, &hi), "n = {}", n);
        let p = nth_product(l, l, n).unwrap();
        for m in p.indices(&lo, &hi) {
            for &u in &probes {
                assert_eq!(*p.mode(&m, u), untwisted_product_mode(l, l, n, &m, u));
            }
        }
    }
}

#[test]
fn stability_and_charges_on_twisted_fields() {
    let b = fixture("chevalley-sl2", 4).remove(0);
    let probes = b.probes(&ex_int(2));
    let (lo, hi) = window();
    let gens = b.generators();
    for x in &gens {
        for y in &gens {
            for n in -2..2 {
                let p = nth_product(x, y, n).unwrap();
                assert_eq!(p.charge_index(), (x.charge_index() + y.charge_index()) % 2);
                assert!(product_is_stable(x, y, n, 3, &probes, &lo, &hi).unwrap());
            }
        }
    }
}

#[test]
fn sigma_action_examples() {
    let b = fixture("chevalley-sl2", 3).remove(0);
    let probes = b.probes(&ex_int(2));
    let (lo, hi) = window();
    let x = b.field("x").unwrap();
    let h = b.field("h").unwrap();
    assert!(fields_equal_on(&sigma_action(x).unwrap(), x, &probes, &lo, &hi));
    let minus_h = h.scale(&Cyclotomic::from_int(-1));
    assert!(fields_equal_on(&sigma_action(h).unwrap(), &minus_h, &probes, &lo, &hi));
    let twice = sigma_action(&sigma_action(h).unwrap()).unwrap();
    assert!(fields_equal_on(&twice, h, &probes, &lo, &hi));
}

#[test]
fn apply_field_supports() {
    let b = virasoro();
    let id = b.field("I").unwrap();
    let u = b.probes(&ex_int(2))[2];
    let s = id.apply(u, &Window::ints(-4, 4)).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.coefficient(&[ex_int(0)]).unwrap(), Vector::basis(u));

    let ff = fixture("clifford-rank2", 3).remove(0);
    let a = ff.field("a").unwrap();
    let vac = ff.module.lowest_vector(0);
    let s = a.apply(vac, &Window::new(ex(-4, 1), ex(4, 1))).unwrap();
    for (e, _) in s.terms() {
        // z^{-m-1} with m in 1/2 + Z and m <= -1/2
        let m = -e[0] - ex_int(1);
        assert!((m - ex(1, 2)).is_integer() && m <= ex(-1, 2), "{}", m);
    }
    assert!(!s.is_zero());
}

#[test]
fn closure_examples() {
    let b = build_virasoro(q(1, 2), q(1, 3), &ex_int(5)).unwrap();
    let l = b.field("L").unwrap().clone();
    let cfg = ClosureConfig {
        weight_cap: ex_int(4),
        lo: ex_int(-5),
        hi: ex_int(5),
        probes: b.probes(&ex_int(2)),
        max_locality: 8,
    };
    let only_id = generate_closure(&[Field::identity(&b.module)], &cfg).unwrap();
    assert_eq!(only_id.basis.len(), 1);
    let c = generate_closure(&[l], &cfg).unwrap();
    let counts = c.weight_counts();
    assert_eq!(counts.get(&ex_int(4)), Some(&2));
    assert_eq!(counts.get(&ex_int(3)), Some(&1));
    assert_eq!(counts.get(&ex_int(1)), None);
    assert!(c.table_json().starts_with('['));
}

use twistcalc::algebras::{build_from_spec, build_ns_vacuum, build_virasoro_vacuum, embedded_fixture, parse_spec_file, AlgebraSpec, BuildOptions, ModuleBuild};
use twistcalc::exactcalc::{ex_int, Coeff, Rational};
use twistcalc::fields::{derivative_field, nth_product, Field};
use twistcalc::verify::{
    check_commutator_formula, check_commuting_product, check_iterate_associativity, check_nilpotency, check_twisted_jacobi,
    check_twisted_jacobi_with, check_virasoro_element, commutator_strata, CheckConfig, Status,
};
use twistcalc::Cyclotomic;

fn q(p: i64, d: i64) -> Rational {
    Rational::from_frac(p, d)
}

fn fixture(name: &str, cutoff: i64) -> ModuleBuild<Cyclotomic> {
    let spec = AlgebraSpec::from_file(&parse_spec_file(embedded_fixture(name).unwrap()).unwrap()).unwrap();
    build_from_spec(&spec, &ex_int(cutoff), &BuildOptions::default()).unwrap().remove(0)
}

#[test]
fn twisted_jacobi_on_ramond_and_chevalley() {
    for name in ["ramond", "chevalley-sl2"] {
        let b = fixture(name, 3);
        let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(1)));
        for x in b.generators() {
            for y in b.generators() {
                let r = check_twisted_jacobi(&x, &y, &cfg);
                assert_eq!(r.status, Status::Pass, "{}: {}", name, r.to_json());
                assert!(r.checked > 0);
            }
        }
    }
}

#[test]
fn twisted_jacobi_detects_a_wrong_right_hand_side() {
    let b = fixture("chevalley-sl2", 3);
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(1)));
    let (x, y) = (b.field("x").unwrap().clone(), b.field("y").unwrap().clone());
    let (x2, y2) = (x.clone(), y.clone());
    let wrong = move |j: i64| {
        nth_product(&x2, &y2, j).map(|f| if j == 0 { f.scale(&Cyclotomic::from_int(2)) } else { f }).map_err(|e| e.to_string())
    };
    let r = check_twisted_jacobi_with(&x, &y, &wrong, 2, &cfg);
    assert_eq!(r.status, Status::Fail);
    assert!(!r.residuals.is_empty());
}

#[test]
fn commutator_formula_and_strata() {
    let b = build_virasoro_vacuum(q(1, 2), &ex_int(5)).unwrap();
    let l = b.field("L").unwrap();
    let id = b.field("I").unwrap();
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(2)));
    let good = vec![derivative_field(l), l.scale(&q(2, 1)), l.zero_like(), id.scale(&q(1, 4))];
    let r = check_commutator_formula(l, l, &good, &cfg);
    assert_eq!(r.status, Status::Pass, "{}", r.to_json());

    let mut bad = good.clone();
    bad[1] = l.clone();
    let r = check_commutator_formula(l, l, &bad, &cfg);
    assert_eq!(r.status, Status::Fail);
    assert_eq!(commutator_strata(l, l, &bad, &cfg), vec![1]);
    assert!(r.notes.iter().any(|n| n == "residual in stratum 1"));
}

#[test]
fn iterate_associativity() {
    let ns = build_ns_vacuum(q(7, 10), &ex_int(4)).unwrap();
    let cfg = CheckConfig::new(-4, 4, ns.probes(&ex_int(2)));
    for x in ns.generators() {
        for y in ns.generators() {
            let r = check_iterate_associativity(&x, &y, &cfg);
            assert_eq!(r.status, Status::Pass, "{}", r.to_json());
        }
    }
    let b = fixture("chevalley-sl2", 3);
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(1)));
    for x in b.generators() {
        for y in b.generators() {
            let r = check_iterate_associativity(&x, &y, &cfg);
            assert_eq!(r.status, Status::Pass, "{}", r.to_json());
        }
    }
}

#[test]
fn commuting_pair_normal_product() {
    let b = fixture("clifford-rank2", 4);
    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(2)));
    let a = b.field("a").unwrap();
    let r = check_commuting_product(a, a, &cfg);
    assert_eq!(r.status, Status::Pass, "{}", r.to_json());
    let bb = b.field("b").unwrap();
    assert_eq!(check_commuting_product(a, bb, &cfg).status, Status::Fail);
}

#[test]
fn virasoro_elements() {
    let vir = build_virasoro_vacuum(q(1, 2), &ex_int(5)).unwrap();
    let l = vir.field("L").unwrap();
    let cfg = CheckConfig::new(-4, 4, vir.probes(&ex_int(2)));
    let r = check_virasoro_element(l, &q(1, 2), &[l.clone()], &cfg);
    assert_eq!(r.status, Status::Pass, "{}", r.to_json());
    let r = check_virasoro_element(&l.scale(&q(2, 1)), &q(1, 2), &[], &cfg);
    assert_eq!(r.status, Status::Fail);

    let ns = build_ns_vacuum(q(7, 10), &ex_int(4)).unwrap();
    let cfg = CheckConfig::new(-4, 4, ns.probes(&ex_int(2)));
    let sample: Vec<Field<Rational>> = ns.generators();
    let r = check_virasoro_element(ns.field("L").unwrap(), &q(7, 10), &sample, &cfg);
    assert_eq!(r.status, Status::Pass, "{}", r.to_json());
}

#[test]
fn nilpotency_on_the_level_one_quotient() {
    let b = fixture("sl2-level1-irreducible", 4);
    let quot = b.quotient.as_ref().unwrap();
    let cfg = CheckConfig::new(-4, 4, quot.space.up_to(&ex_int(2)));
    let e = b.field("e").unwrap();
    let r = check_nilpotency(e, 2, Some(quot), &ex_int(4), &cfg);
    assert_eq!(r.status, Status::Pass, "{}", r.to_json());

    let weyl = fixture("sl2-level1", 4);
    let cfg = CheckConfig::new(-4, 4, weyl.probes(&ex_int(2)));
    let r = check_nilpotency(weyl.field("e").unwrap(), 2, None, &ex_int(4), &cfg);
    assert_eq!(r.status, Status::Fail);
    // e(z)^2 vac has z^0 coefficient e(-1)^2 vac
    assert!(r.residuals.iter().any(|t| t.exps == vec!["0".to_string()] && t.scalar == "1"), "{}", r.to_json());
}

#[test]
fn narrow_windows_are_inconclusive() {
    let b = build_virasoro_vacuum(q(1, 2), &ex_int(4)).unwrap();
    let l = b.field("L").unwrap();
    let cfg = CheckConfig::new(-2, 2, b.probes(&ex_int(1)));
    assert_eq!(check_twisted_jacobi(l, l, &cfg).status, Status::Inconclusive);
    let r = check_twisted_jacobi(l, l, &cfg);
    assert!(r.to_json().contains("\"status\":\"inconclusive\""));
}

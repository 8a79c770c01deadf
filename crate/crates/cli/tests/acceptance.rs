use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use twistcalc::algebras::{
    build_clifford_twisted, build_from_spec, build_ns_vacuum, build_virasoro, embedded_fixture, parse_spec_file, AlgebraSpec,
    BuildOptions, ModuleBuild,
};
use twistcalc::exactcalc::{
    delta_identity_check, derivative_delta_vanishing, ex, ex_int, rational_binomial, Coeff, Exponent, Matrix, Rational, Window,
};
use twistcalc::fields::{locality_order, nth_product, product_is_stable, Field};
use twistcalc::shift::{build_h_sigma, check_delta_conjugation, check_shifted_jacobi, check_sigma_h, shifted_field, StateFields};
use twistcalc::statespace::{BasisId, Mode, Vector};
use twistcalc::verify::{check_commutator_formula, check_nilpotency, check_twisted_jacobi, pair_order, CheckConfig, Status};
use twistcalc::Cyclotomic as K;

/// Criteria whose expected values disagree with the computed ones and are
/// reported red without stopping the run.
const KNOWN_RED: &[u32] = &[3];

type Outcome = Result<String, String>;

fn q(p: i64, d: i64) -> Rational {
    Rational::from_frac(p, d)
}

fn spec(name: &str) -> AlgebraSpec<K> {
    AlgebraSpec::from_file(&parse_spec_file(embedded_fixture(name).unwrap()).unwrap()).unwrap()
}

fn fixture(name: &str, cutoff: i64) -> Vec<ModuleBuild<K>> {
    build_from_spec(&spec(name), &ex_int(cutoff), &BuildOptions::default()).unwrap()
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 1 {
        q(-1, 1)
    } else {
        q(1, 1)
    }
}

// 1

/// Coefficient of `z0^a z1^b z2^c` in the difference of the two delta
/// expansions, computed term by term.
fn delta_oracle(a: &Exponent, b: &Exponent, c: i64) -> Rational {
    if c < 0 || *a + *b + ex_int(c) != ex_int(-1) {
        return q(0, 1);
    }
    let to_q = |e: Exponent| Rational::new((*e.numer()).into(), (*e.denom()).into());
    let left = sign(c) * rational_binomial(&to_q(-a - ex_int(1)), c as u64);
    let right = rational_binomial(&to_q(-b - ex_int(1)), c as u64);
    left - right
}

fn delta_calculus() -> Outcome {
    let w = Window::ints(-4, 4);
    let mut compared = 0;
    for alpha in [ex_int(0), ex(1, 2), ex(-3, 4), ex(2, 3)] {
        let r = delta_identity_check::<K>(&alpha, &w).map_err(|e| e.to_string())?;
        ensure(r.is_zero(), || format!("alpha = {}: {} nonzero residual terms", alpha, r.len()))?;
        for a in w.lattice_points(&-alpha) {
            for b in w.lattice_points(&alpha) {
                for c in -4..=4 {
                    ensure(delta_oracle(&a, &b, c) == q(0, 1), || format!("oracle residual at ({}, {}, {})", a, b, c))?;
                    compared += 1;
                }
            }
        }
    }
    let mut pairs = 0;
    for m in 1..=4u32 {
        for n in 0..m {
            let r = derivative_delta_vanishing::<K>(m, n, &w).map_err(|e| e.to_string())?;
            ensure(r.is_zero(), || format!("(z1-z2)^{} d^{} delta: {} nonzero terms", m, n, r.len()))?;
            pairs += 1;
        }
    }
    let control = derivative_delta_vanishing::<K>(2, 2, &w).map_err(|e| e.to_string())?;
    ensure(!control.is_zero(), || "m = n control vanished".into())?;
    Ok(format!("4 exponents on [-4,4]^3 ({} oracle coefficients), {} (m, n) pairs", compared, pairs))
}

// 2

/// `(L_n L)_m u` for `n >= 0` from the mode convolution, applied with the
/// module's own mode action.
fn brute_product(b: &ModuleBuild<Rational>, n: i64, m: i64, u: BasisId) -> Vector<Rational> {
    let act = |k: i64, v: &Vector<Rational>| b.module.act_vec(&Mode::new(0, ex_int(k)), v);
    let v = Vector::basis(u);
    let mut out = Vector::zero();
    for i in 0..=n {
        let c = sign(i) * rational_binomial(&q(n, 1), i as u64);
        out.add_scaled(&c, &act(n - i, &act(m + i, &v)));
        out.add_scaled(&-(c * sign(n)), &act(m + n - i, &act(i, &v)));
    }
    out
}

fn closed_form(b: &ModuleBuild<Rational>, c: &Rational, n: i64, m: i64, u: BasisId) -> Vector<Rational> {
    let act = |k: i64| b.module.act_vec(&Mode::new(0, ex_int(k)), &Vector::basis(u));
    match n {
        0 => act(m - 1).scale(&q(-m, 1)),
        1 => act(m).scale(&q(2, 1)),
        3 if m == -1 => Vector::term(u, c * q(1, 2)),
        _ => Vector::zero(),
    }
}

fn virasoro_table() -> Outcome {
    let c = q(1, 2);
    let b = build_virasoro(c.clone(), q(0, 1), &ex_int(6)).map_err(|e| e.to_string())?;
    let l = b.field("L").unwrap();
    let probes = b.probes(&ex_int(4));
    let mut compared = 0;
    for n in 0..=7 {
        let p = nth_product(l, l, n).map_err(|e| e.to_string())?;
        for m in -6..=6 {
            for &u in &probes {
                let got = p.mode(&ex_int(m), u);
                let brute = brute_product(&b, n, m, u);
                ensure(*got == brute, || format!("n={} m={} u={}: product differs from the mode convolution", n, m, b.space.label(u)))?;
                ensure(brute == closed_form(&b, &c, n, m, u), || format!("n={} m={} u={}: relation table", n, m, b.space.label(u)))?;
                compared += 1;
            }
        }
    }
    Ok(format!("L_n L for n = 0..7, {} coefficients", compared))
}

// 3

fn locality_orders() -> Outcome {
    let (lo, hi) = (ex_int(-5), ex_int(5));
    let ns = build_ns_vacuum(K::from_frac(7, 10), &ex_int(5)).map_err(|e| e.to_string())?;
    let probes = ns.probes(&ex_int(3));
    let order = |a: &Field<K>, b: &Field<K>, p: &[BasisId]| locality_order(a, b, 8, p, &lo, &hi);
    let (id, l, g) = (ns.field("I").unwrap(), ns.field("L").unwrap(), ns.field("G").unwrap());
    let ff = fixture("clifford-rank2", 4).remove(0);
    let ffp = ff.probes(&ex_int(2));
    let (a, b) = (ff.field("a").unwrap(), ff.field("b").unwrap());

    // expected: listed values; oracle: one more than the top power of the
    // mode index in each bracket
    let rows: Vec<(&str, Option<u32>, u32, u32)> = vec![
        ("(I, L)", order(id, l, &probes), 0, 0),
        ("(I, G)", order(id, g, &probes), 0, 0),
        ("(G, I)", order(g, id, &probes), 0, 0),
        ("(a, b)", order(a, b, &ffp), 1, 1),
        ("(L, G)", order(l, g, &probes), 3, 2),
        ("(L, L)", order(l, l, &probes), 4, 4),
        ("(G, G)", order(g, g, &probes), 2, 3),
    ];
    let mut bad_oracle = Vec::new();
    let mut bad_listed = Vec::new();
    let mut summary = Vec::new();
    for (name, got, listed, oracle) in &rows {
        let got_s = got.map(|o| o.to_string()).unwrap_or_else(|| "none".into());
        summary.push(format!("{}={}", name, got_s));
        if *got != Some(*oracle) {
            bad_oracle.push(format!("{} = {} but the bracket gives {}", name, got_s, oracle));
        }
        if *got != Some(*listed) {
            bad_listed.push(format!("{} = {}, listed {}", name, got_s, listed));
        }
    }
    ensure(bad_oracle.is_empty(), || bad_oracle.join("; "))?;
    ensure(bad_listed.is_empty(), || {
        format!(
            "{} (computed values match the bracket-degree oracle: [L_m,G_r] is linear in m, {{G_r,G_s}} quadratic)",
            bad_listed.join("; ")
        )
    })?;
    Ok(summary.join(" "))
}

// 4 and 5

fn jacobi_builds(cutoff: i64) -> Vec<(String, ModuleBuild<K>)> {
    let mut out = Vec::new();
    for name in ["ramond", "chevalley-sl2", "clifford-rank1", "clifford-rank2"] {
        for b in fixture(name, cutoff) {
            out.push((b.name.clone(), b));
        }
    }
    out
}

fn twisted_jacobi(builds: &[(String, ModuleBuild<K>)]) -> Outcome {
    let mut parts = Vec::new();
    for (name, b) in builds {
        if b.twist != 2 {
            return Err(format!("{} has twist {}", name, b.twist));
        }
        let cfg = CheckConfig::new(-6, 6, b.probes(&ex_int(4)));
        let mut checked = 0;
        for x in b.generators() {
            for y in b.generators() {
                let r = check_twisted_jacobi(&x, &y, &cfg);
                ensure(r.status == Status::Pass, || format!("{}: {}", name, r.to_json()))?;
                checked += r.checked;
            }
        }
        parts.push(format!("{} {} probes {} coefficients", name, cfg.probes.len(), checked));
    }
    Ok(parts.join(", "))
}

fn stability(builds: &[(String, ModuleBuild<K>)]) -> Outcome {
    let mut count = 0;
    let vir = build_virasoro(q(1, 2), q(0, 1), &ex_int(6)).map_err(|e| e.to_string())?;
    let l = vir.field("L").unwrap();
    let probes = vir.probes(&ex_int(4));
    for n in 0..=7 {
        let ok = product_is_stable(l, l, n, 3, &probes, &ex_int(-6), &ex_int(6)).map_err(|e| e.to_string())?;
        ensure(ok, || format!("virasoro L_{} L", n))?;
        count += 1;
    }
    for (name, b) in builds {
        let cfg = CheckConfig::new(-6, 6, b.probes(&ex_int(4)));
        for x in b.generators() {
            for y in b.generators() {
                let order = pair_order(&x, &y, &cfg).ok_or_else(|| format!("{}: nonlocal pair", name))? as i64;
                for n in -7..order {
                    let ok = product_is_stable(&x, &y, n, 3, &cfg.probes, &cfg.lo, &cfg.hi).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("{}: ({})_{}({})", name, x.name(), n, y.name()))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{} products unchanged with N + 3", count))
}

// 6

fn shift_round_trip() -> Outcome {
    let b = fixture("free-fermion", 4).remove(0);
    let sf = StateFields::new(&b).map_err(|e| e.to_string())?;
    let sigma = Matrix::from_rows(vec![vec![K::from_int(-1)]]);
    let h = build_h_sigma(&b, &sf, &["a"], &sigma).map_err(|e| e.to_string())?;

    let ga = b.generator_index("a").unwrap();
    let gs = b.generator_index("a*").unwrap();
    let expected = b.module.act_vec(&Mode::new(ga as u16, ex_int(-1)), &sf.generator_state(gs)).scale(&K::from_frac(1, 2));
    ensure(h.state == expected, || "h_sigma differs from (1/2) a(-1) a*".into())?;

    let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(2)));
    let w = Window::ints(-4, 4);
    let states = [(sf.generator_state(ga), "a"), (sf.generator_state(gs), "a*")];
    let mut terms = 0;
    for (v, name) in &states {
        let f = shifted_field(&sf, &h, v, name).map_err(|e| e.to_string())?;
        for &u in &cfg.probes {
            let s = f.apply(u, &w).map_err(|e| e.to_string())?;
            for (e, _) in s.terms() {
                ensure(*e[0].denom() == 2, || format!("shifted {} has exponent {}", name, e[0]))?;
                terms += 1;
            }
        }
    }
    ensure(terms > 0, || "shifted fields vanish on the probes".into())?;

    for (x, _) in &states {
        for (y, _) in &states {
            let r = check_shifted_jacobi(&sf, &h, x, y, &cfg).map_err(|e| e.to_string())?;
            ensure(r.status == Status::Pass, || r.to_json())?;
        }
    }
    for (v, _) in &states {
        let r = check_delta_conjugation(&sf, &h, v, &cfg).map_err(|e| e.to_string())?;
        ensure(r.status == Status::Pass && r.checked > 0, || r.to_json())?;
    }
    let r = check_sigma_h(&h).map_err(|e| e.to_string())?;
    ensure(r.status == Status::Pass, || r.to_json())?;
    Ok(format!("{} half-integer terms; Jacobi, conjugation and exp(2 pi i h(0)) = sigma pass", terms))
}

// 7

fn nilpotency() -> Outcome {
    let quot = fixture("sl2-level1-irreducible", 4).remove(0);
    let qs = quot.quotient.as_ref().ok_or("no quotient attached")?;
    let cfg = CheckConfig::new(-4, 4, qs.space.up_to(&ex_int(2)));
    let r = check_nilpotency(quot.field("e").unwrap(), 2, Some(qs), &ex_int(4), &cfg);
    ensure(r.status == Status::Pass && r.checked > 0, || r.to_json())?;

    let weyl = fixture("sl2-level1", 4).remove(0);
    let cfg = CheckConfig::new(-4, 4, weyl.probes(&ex_int(2)));
    let w = check_nilpotency(weyl.field("e").unwrap(), 2, None, &ex_int(4), &cfg);
    ensure(w.status == Status::Fail, || "Weyl module passed".into())?;
    let t = w.residuals.first().ok_or("no witness")?;
    ensure(t.scalar != "0", || "zero witness".into())?;
    Ok(format!(
        "quotient: {} coefficients vanish; Weyl witness z^{} {} {}",
        r.checked,
        t.exps.join(","),
        t.scalar,
        t.label
    ))
}

// 8

/// Per-degree counts in half units from bosonic and fermionic parts (also in
/// half units), starting from a lowest space of the given dimension.
fn character(lowest: u64, bosons: &[i64], fermions: &[i64], max: i64) -> Vec<u64> {
    let mut c = vec![0u64; max as usize + 1];
    c[0] = lowest;
    for &p in bosons {
        for i in p..=max {
            c[i as usize] += c[(i - p) as usize];
        }
    }
    for &p in fermions {
        if p == 0 {
            c.iter_mut().for_each(|x| *x *= 2);
            continue;
        }
        for i in (p..=max).rev() {
            c[i as usize] += c[(i - p) as usize];
        }
    }
    c
}

fn parts(first: i64, step: i64, max: i64, copies: usize) -> Vec<i64> {
    let one: Vec<i64> = (0..).map(|k| first + k * step).take_while(|p| *p <= max).collect();
    one.iter().cycle().take(one.len() * copies).copied().collect()
}

/// `Σ_n q^{n^2} / Π (1 - q^k)` in half units.
fn sl2_level_one(max: i64) -> Vec<u64> {
    let mut c = vec![0u64; max as usize + 1];
    for n in -10i64..=10 {
        let d = 2 * n * n;
        if d <= max {
            c[d as usize] += 1;
        }
    }
    for p in parts(2, 2, max, 1) {
        for i in p..=max {
            c[i as usize] += c[(i - p) as usize];
        }
    }
    c
}

fn half_units(dims: &BTreeMap<Exponent, usize>, max: i64) -> Vec<u64> {
    let mut out = vec![0u64; max as usize + 1];
    for (d, n) in dims {
        let h = *d * ex_int(2);
        if h.is_integer() && h.to_integer() <= max {
            out[h.to_integer() as usize] += *n as u64;
        }
    }
    out
}

fn graded_dimensions() -> Outcome {
    let cutoff = 6;
    let max = 2 * cutoff;
    let mut cases: Vec<(String, BTreeMap<Exponent, usize>, Vec<u64>)> = Vec::new();
    let verma = build_virasoro(q(1, 2), q(0, 1), &ex_int(cutoff)).map_err(|e| e.to_string())?;
    cases.push(("virasoro verma".into(), verma.dimensions(), character(1, &parts(2, 2, max, 1), &[], max)));
    let expect: Vec<(&str, Vec<u64>)> = vec![
        ("virasoro", character(1, &parts(4, 2, max, 1), &[], max)),
        ("ns", character(1, &parts(4, 2, max, 1), &parts(3, 2, max, 1), max)),
        ("ramond", character(2, &parts(2, 2, max, 1), &parts(2, 2, max, 1), max)),
        ("sl2", character(1, &parts(2, 2, max, 3), &[], max)),
        ("sl2-level1", character(1, &parts(2, 2, max, 3), &[], max)),
        ("sl2-level1-irreducible", sl2_level_one(max)),
        ("chevalley-sl2", character(1, &[parts(2, 2, max, 1), parts(1, 2, max, 2)].concat(), &[], max)),
        ("clifford-rank2", character(1, &[], &[vec![0], parts(2, 2, max, 2)].concat(), max)),
        ("free-fermion", character(1, &[], &parts(1, 2, max, 2), max)),
    ];
    for (name, series) in expect {
        for b in fixture(name, cutoff) {
            cases.push((b.name.clone(), b.dimensions(), series.clone()));
        }
    }
    for b in build_clifford_twisted(&spec("clifford-rank1"), &ex_int(cutoff)).map_err(|e| e.to_string())? {
        cases.push((b.name.clone(), b.dimensions(), character(1, &[], &parts(2, 2, max, 1), max)));
    }
    for (name, dims, expected) in &cases {
        let got = half_units(dims, max);
        ensure(got == *expected, || format!("{}: {:?} expected {:?}", name, got, expected))?;
    }
    Ok(format!("{} builds through degree {}", cases.len(), cutoff))
}

// 9

fn clifford_dichotomy() -> Outcome {
    let builds = build_clifford_twisted(&spec("clifford-rank1"), &ex_int(5)).map_err(|e| e.to_string())?;
    ensure(builds.len() == 2, || format!("{} builds", builds.len()))?;
    let mut signs = Vec::new();
    for b in &builds {
        let e = b.field("e").unwrap();
        let zero = ex(-1, 2);
        ensure(e.admits(&zero), || "no degree-zero mode".into())?;
        let vac = b.module.lowest_vector(0);
        let lambda = e.mode(&zero, vac).get(vac);
        let lam = lambda.to_rational().ok_or("irrational action")?;
        ensure(lam == q(1, 1) || lam == q(-1, 1), || format!("e acts by {}", lam))?;
        for u in b.probes(&ex_int(5)) {
            let k = b.module.monomial(u).modes.len() as i64;
            let expected = Vector::term(u, lambda.clone() * K::from_rational(&sign(k)));
            ensure(*e.mode(&zero, u) == expected, || format!("{}: e on {}", b.name, b.space.label(u)))?;
        }
        let cfg = CheckConfig::new(-4, 4, b.probes(&ex_int(3)));
        let id = b.field("I").unwrap();
        let r = check_commutator_formula(e, e, &[id.scale(&K::from_int(2))], &cfg);
        ensure(r.status == Status::Pass, || r.to_json())?;
        for p in e.indices(&cfg.lo, &cfg.hi) {
            for r in e.indices(&cfg.lo, &cfg.hi) {
                for &u in &cfg.probes {
                    let anti = twistcalc::fields::supercommutator(e, e, &p, &r, u);
                    let expected = if p + r == ex_int(-1) { Vector::term(u, K::from_int(2)) } else { Vector::zero() };
                    ensure(anti == expected, || format!("{{e_{}, e_{}}} on {}", p, r, b.space.label(u)))?;
                }
            }
        }
        signs.push(lam.to_string());
    }
    signs.sort();
    ensure(signs == ["-1", "1"], || format!("leftover actions {:?}", signs))?;
    Ok("two builds, e = +-(-1)^k on exterior degree k, Clifford relations hold".into())
}

// 10

fn cli(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_twistcalc")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn determinism() -> Outcome {
    let runs: Vec<(Vec<&str>, i32)> = vec![
        (vec!["verify", "--fixture", "ramond", "--cutoff", "6", "--suite", "jacobi", "--json"], 0),
        (vec!["build", "--fixture", "virasoro", "--cutoff", "4", "--json"], 0),
        (vec!["verify", "--fixture", "sl2-level1", "--suite", "nilpotency", "--json"], 1),
        (vec!["locality", "--fixture", "ns", "--json"], 0),
        (vec!["shift", "--fixture", "free-fermion", "--json"], 0),
        (vec!["verify", "--fixture", "chevalley-sl2", "--cutoff", "3", "--suite", "jacobi,commutator", "--json"], 0),
    ];
    for (args, code) in &runs {
        let (first, c1) = cli(args)?;
        let (second, c2) = cli(args)?;
        ensure(c1 == *code && c2 == *code, || format!("{}: exit {} and {}, expected {}", args.join(" "), c1, c2, code))?;
        ensure(!first.is_empty() && first == second, || format!("{}: outputs differ", args.join(" ")))?;
    }
    let (dims, _) = cli(&["build", "--fixture", "virasoro", "--cutoff", "4", "--json"])?;
    let v: serde_json::Value = serde_json::from_slice(&dims).map_err(|e| e.to_string())?;
    ensure(v["builds"][0]["dimensions"] == serde_json::json!([1, 0, 1, 1, 2]), || format!("dimensions {}", v["builds"][0]["dimensions"]))?;
    let (_, bad) = cli(&["build", "--fixture", "no-such-fixture"])?;
    ensure(bad == 3, || format!("unknown fixture exits {}", bad))?;

    let weyl = fixture("sl2-level1", 4).remove(0);
    let cfg = CheckConfig::new(-4, 4, weyl.probes(&ex_int(2)));
    let e = weyl.field("e").unwrap();
    let a = check_nilpotency(e, 2, None, &ex_int(4), &cfg).to_json();
    let b = check_nilpotency(&fixture("sl2-level1", 4).remove(0).field("e").unwrap().clone(), 2, None, &ex_int(4), &cfg).to_json();
    ensure(a == b, || "library reports differ between builds".into())?;
    Ok(format!("{} CLI runs repeated byte for byte", runs.len()))
}

fn main() {
    let started = Instant::now();
    let builds = jacobi_builds(4);
    let criteria: Vec<(u32, &str, Box<dyn FnMut() -> Outcome>)> = vec![
        (1, "delta calculus", Box::new(delta_calculus)),
        (2, "virasoro product table", Box::new(virasoro_table)),
        (3, "locality orders", Box::new(locality_orders)),
        (4, "twisted jacobi", Box::new(|| twisted_jacobi(&builds))),
        (5, "n-stability", Box::new(|| stability(&builds))),
        (6, "delta shift", Box::new(shift_round_trip)),
        (7, "nilpotency", Box::new(nilpotency)),
        (8, "graded dimensions", Box::new(graded_dimensions)),
        (9, "clifford dichotomy", Box::new(clifford_dichotomy)),
        (10, "determinism", Box::new(determinism)),
    ];
    let mut unexpected = Vec::new();
    for (id, title, mut run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {}: {} [{:.1}s]", id, title, detail, secs),
            Err(why) => {
                println!("FAIL {:>2} {}: {} [{:.1}s]", id, title, why, secs);
                if !KNOWN_RED.contains(&id) {
                    unexpected.push(id);
                }
            }
        }
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {:?}", unexpected);
        std::process::exit(1);
    }
}

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use twistcalc::algebras::{build_from_spec, validate_spec, AlgebraSpec, BuildOptions, ModuleBuild};
use twistcalc::exactcalc::{ex_int, Coeff, Exponent, Matrix};
use twistcalc::fields::{generate_closure, nth_product, product_is_stable, ClosureConfig, Field};
use twistcalc::shift::{
    build_h_sigma, check_delta_conjugation, check_shifted_jacobi, check_sigma_h, shifted_field, ShiftError, StateFields,
};
use twistcalc::statespace::Vector;
use twistcalc::verify::{
    check_commutator_formula, check_iterate_associativity, check_nilpotency, check_twisted_jacobi, check_virasoro_element,
    pair_order, CheckConfig, CheckReport, Status,
};
use twistcalc::{Exponent as Exp, Scalar};

use crate::input;
use crate::{Command, Common, Suite};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

/// Extra expansion terms used by the stability suite.
const STABILITY_EXTRA: usize = 3;

type Outcome = Result<(Value, u8)>;

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Validate(c) => validate(c),
        Command::Build(c) => build(c),
        Command::Locality(c) => locality(c),
        Command::Product { common, a, b, n } => product(common, a, b, *n),
        Command::Closure { common, weight_cap } => closure(common, weight_cap),
        Command::Shift { common, sigma, plus } => shift(common, sigma.as_deref(), plus.as_deref()),
        Command::Verify { common, suite } => verify(common, suite),
    }
}

struct Loaded {
    name: String,
    spec: AlgebraSpec<Scalar>,
    builds: Vec<ModuleBuild<Scalar>>,
    cutoff: Exponent,
    lo: Exponent,
    hi: Exponent,
    probe_degree: Exponent,
}

impl Loaded {
    fn config(&self, b: &ModuleBuild<Scalar>) -> CheckConfig {
        let probes = match &b.quotient {
            Some(q) => q.space.up_to(&self.probe_degree),
            None => b.probes(&self.probe_degree),
        };
        CheckConfig { lo: self.lo, hi: self.hi, min_width: ex_int(8), probes }
    }
}

fn load(c: &Common) -> Result<Loaded> {
    let (name, text) = input::load_text(c.spec.as_deref(), c.fixture.as_deref())?;
    let file = input::parse_file(&text)?;
    let spec = input::load_spec(&file)?;
    let problems = validate_spec(&spec);
    if !problems.is_empty() {
        bail!("invalid spec: {}", problems.join("; "));
    }
    let cutoff = input::exponent(&c.cutoff, "cutoff")?;
    if cutoff < Exp::from_integer(0) {
        bail!("cutoff must be non-negative");
    }
    let (lo, hi) = input::window(&c.window)?;
    let probe_degree = input::exponent(&c.probe_degree, "probe degree")?;
    let opts = BuildOptions {
        central_charge: c.charge.as_deref().map(|t| input::scalar(t, "central charge")).transpose()?,
        level: c.level.as_deref().map(|t| input::scalar(t, "level")).transpose()?,
        ..BuildOptions::default()
    };
    let builds = build_from_spec(&spec, &cutoff, &opts).with_context(|| format!("building {}", name))?;
    Ok(Loaded { name, spec, builds, cutoff, lo, hi, probe_degree })
}

fn aggregate(reports: &[CheckReport]) -> u8 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAIL
    } else if reports.iter().any(|r| r.status == Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    }
}

fn reports_json(reports: &[CheckReport]) -> Value {
    serde_json::to_value(reports).expect("reports serialize")
}

fn validate(c: &Common) -> Outcome {
    let (name, text) = input::load_text(c.spec.as_deref(), c.fixture.as_deref())?;
    let file = input::parse_file(&text)?;
    let spec = input::load_spec(&file)?;
    let problems = validate_spec(&spec);
    let value = json!({
        "command": "validate",
        "spec": name,
        "name": spec.name,
        "family": format!("{:?}", spec.family).to_lowercase(),
        "twist_order": spec.twist,
        "dimension": spec.dim(),
        "labels": spec.labels,
        "problems": problems,
    });
    let code = if problems.is_empty() { EXIT_PASS } else { EXIT_INPUT };
    Ok((value, code))
}

fn build_json(b: &ModuleBuild<Scalar>) -> Value {
    let dims = b.dimensions();
    let metadata: BTreeMap<&String, &String> = b.metadata.iter().collect();
    json!({
        "name": b.name,
        "twist": b.twist,
        "cutoff": b.cutoff().to_string(),
        "central": b.central.to_string(),
        "fields": b.fields.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "degrees": dims.keys().map(|d| d.to_string()).collect::<Vec<_>>(),
        "dimensions": dims.values().copied().collect::<Vec<_>>(),
        "metadata": metadata,
    })
}

fn build(c: &Common) -> Outcome {
    let l = load(c)?;
    let value = json!({
        "command": "build",
        "spec": l.name,
        "builds": l.builds.iter().map(build_json).collect::<Vec<_>>(),
    });
    Ok((value, EXIT_PASS))
}

fn locality(c: &Common) -> Outcome {
    let l = load(c)?;
    let mut out = Vec::new();
    for b in &l.builds {
        let cfg = l.config(b);
        let pairs: Vec<(&str, &Field<Scalar>, &str, &Field<Scalar>)> = b
            .fields
            .iter()
            .flat_map(|(na, fa)| b.fields.iter().map(move |(nb, fb)| (na.as_str(), fa, nb.as_str(), fb)))
            .collect();
        let orders: Vec<Value> = pairs
            .par_iter()
            .map(|(na, fa, nb, fb)| json!({"a": na, "b": nb, "order": pair_order(fa, fb, &cfg)}))
            .collect();
        out.push(json!({"build": b.name, "pairs": orders}));
    }
    let code = if out.iter().any(|b| b["pairs"].as_array().unwrap().iter().any(|p| p["order"].is_null())) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    };
    Ok((json!({"command": "locality", "spec": l.name, "builds": out}), code))
}

fn field<'a>(b: &'a ModuleBuild<Scalar>, name: &str) -> Result<&'a Field<Scalar>> {
    b.field(name).ok_or_else(|| {
        let known: Vec<&str> = b.fields.iter().map(|(n, _)| n.as_str()).collect();
        anyhow!("unknown field {} (known: {})", name, known.join(", "))
    })
}

fn product(c: &Common, a: &str, bname: &str, n: i64) -> Outcome {
    let l = load(c)?;
    let mut out = Vec::new();
    for b in &l.builds {
        let p = nth_product(field(b, a)?, field(b, bname)?, n)?;
        let dump = p.dump(&b.space, &l.lo, &l.hi);
        out.push(json!({
            "build": b.name,
            "field": p.name(),
            "weight": p.weight().to_string(),
            "charge": p.charge().to_string(),
            "modes": dump.lines().collect::<Vec<_>>(),
        }));
    }
    Ok((json!({"command": "product", "spec": l.name, "builds": out}), EXIT_PASS))
}

fn closure(c: &Common, weight_cap: &str) -> Outcome {
    let l = load(c)?;
    let weight_cap = input::exponent(weight_cap, "weight cap")?;
    let mut out = Vec::new();
    for b in &l.builds {
        let cfg = l.config(b);
        let ccfg = ClosureConfig { weight_cap, lo: l.lo, hi: l.hi, probes: cfg.probes, max_locality: 16 };
        let cl = generate_closure(&b.generators(), &ccfg)?;
        let basis: Vec<Value> = cl
            .basis
            .iter()
            .zip(&cl.origins)
            .map(|(f, o)| json!({"origin": o, "weight": f.weight().to_string(), "charge": f.charge().to_string()}))
            .collect();
        let counts = cl.weight_counts();
        out.push(json!({
            "build": b.name,
            "basis": basis,
            "weights": counts.keys().map(|w| w.to_string()).collect::<Vec<_>>(),
            "counts": counts.values().copied().collect::<Vec<_>>(),
            "table": serde_json::to_value(&cl.table)?,
        }));
    }
    Ok((json!({"command": "closure", "spec": l.name, "builds": out}), EXIT_PASS))
}

fn shift(c: &Common, sigma: Option<&std::path::Path>, plus: Option<&str>) -> Outcome {
    let l = load(c)?;
    let b = l.builds.first().ok_or_else(|| anyhow!("the spec produced no module"))?;
    let plus: Vec<String> = match plus {
        Some(p) => p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => l
            .spec
            .distinguished
            .get("plus")
            .map(|p| p.split(',').map(|s| s.trim().to_string()).collect())
            .ok_or_else(|| anyhow!("no --plus given and the spec has no distinguished \"plus\""))?,
    };
    let sigma = match sigma {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            input::matrix(&text)?
        }
        None => Matrix::identity(plus.len()).scale(&Scalar::from_int(-1)),
    };
    if sigma.rows() != plus.len() {
        bail!("sigma is {}x{} but {} labels were given", sigma.rows(), sigma.rows(), plus.len());
    }
    let sf = StateFields::new(b)?;
    let plus_refs: Vec<&str> = plus.iter().map(|s| s.as_str()).collect();
    let h = build_h_sigma(b, &sf, &plus_refs, &sigma)?;
    let cfg = l.config(b);

    let mut states: Vec<(String, Vector<Scalar>)> = Vec::new();
    for (g, (name, _)) in b.fields.iter().skip(1).enumerate() {
        states.push((name.clone(), sf.generator_state(g)));
    }
    let mut dumps = Vec::new();
    let mut eigen = Vec::new();
    let mut skipped = Vec::new();
    for (name, v) in &states {
        match shifted_field(&sf, &h, v, name) {
            Ok(f) => {
                dumps.push(json!({
                    "field": f.name(),
                    "charge": f.charge().to_string(),
                    "modes": f.dump(&b.space, &l.lo, &l.hi).lines().collect::<Vec<_>>(),
                }));
                eigen.push((name.clone(), v.clone()));
            }
            Err(ShiftError::NotDiagonal(_)) => skipped.push(name.clone()),
            Err(e) => return Err(e.into()),
        }
    }
    let mut reports = vec![check_sigma_h(&h)?];
    let conj: Vec<Result<CheckReport, ShiftError>> =
        eigen.par_iter().map(|(_, v)| check_delta_conjugation(&sf, &h, v, &cfg)).collect();
    let pairs: Vec<(&Vector<Scalar>, &Vector<Scalar>)> =
        eigen.iter().flat_map(|(_, x)| eigen.iter().map(move |(_, y)| (x, y))).collect();
    let jac: Vec<Result<CheckReport, ShiftError>> =
        pairs.par_iter().map(|(x, y)| check_shifted_jacobi(&sf, &h, x, y, &cfg)).collect();
    for r in conj.into_iter().chain(jac) {
        reports.push(r?);
    }
    let code = aggregate(&reports);
    let value = json!({
        "command": "shift",
        "spec": l.name,
        "build": b.name,
        "plus": plus,
        "twist": h.twist,
        "exponents": h.exponents,
        "h_sigma": h.state.iter().map(|(id, c)| json!({"label": b.module.label(id), "scalar": c.to_string()}))
            .collect::<Vec<_>>(),
        "shifted": dumps,
        "skipped": skipped,
        "reports": reports_json(&reports),
    });
    Ok((value, code))
}

fn generator_pairs(b: &ModuleBuild<Scalar>) -> Vec<(Field<Scalar>, Field<Scalar>)> {
    let gens = b.generators();
    gens.iter().flat_map(|x| gens.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

fn pair_suite(b: &ModuleBuild<Scalar>, f: impl Fn(&Field<Scalar>, &Field<Scalar>) -> CheckReport + Sync) -> Vec<CheckReport> {
    generator_pairs(b).par_iter().map(|(x, y)| f(x, y)).collect()
}

fn commutator_report(a: &Field<Scalar>, b: &Field<Scalar>, cfg: &CheckConfig) -> CheckReport {
    let Some(order) = pair_order(a, b, cfg) else {
        let mut r = CheckReport::new(format!("commutator({}, {})", a.name(), b.name()));
        r.fail("fields are not local within the search range");
        return r;
    };
    let expected: Result<Vec<Field<Scalar>>, _> = (0..order as i64).map(|j| nth_product(a, b, j)).collect();
    match expected {
        Ok(e) => check_commutator_formula(a, b, &e, cfg),
        Err(e) => {
            let mut r = CheckReport::new(format!("commutator({}, {})", a.name(), b.name()));
            r.fail(e.to_string());
            r
        }
    }
}

fn stability_report(a: &Field<Scalar>, b: &Field<Scalar>, cfg: &CheckConfig) -> CheckReport {
    let mut r = CheckReport::new(format!("stability({}, {})", a.name(), b.name()));
    r = r.with_window("z", &cfg.lo, &cfg.hi);
    let Some(order) = pair_order(a, b, cfg) else {
        r.fail("fields are not local within the search range");
        return r;
    };
    for n in -2..order as i64 {
        match product_is_stable(a, b, n, STABILITY_EXTRA, &cfg.probes, &cfg.lo, &cfg.hi) {
            Ok(true) => r.checked += 1,
            Ok(false) => {
                r.checked += 1;
                r.fail(format!("product {} changes when the expansion bound grows by {}", n, STABILITY_EXTRA));
            }
            Err(e) => r.fail(e.to_string()),
        }
    }
    r.finish(&(cfg.hi - cfg.lo), &cfg.min_width)
}

fn nilpotency_reports(l: &Loaded, b: &ModuleBuild<Scalar>, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let theta = l
        .spec
        .distinguished
        .get("theta")
        .ok_or_else(|| anyhow!("the nilpotency suite needs a distinguished \"theta\""))?;
    let f = field(b, theta)?;
    let power: usize = b
        .central
        .to_rational()
        .filter(|q| q.is_integer())
        .and_then(|q| q.to_integer().try_into().ok())
        .ok_or_else(|| anyhow!("the nilpotency suite needs a non-negative integer level"))?;
    Ok(vec![check_nilpotency(f, power + 1, b.quotient.as_ref(), &l.cutoff, cfg)])
}

fn verify(c: &Common, suites: &[Suite]) -> Outcome {
    let l = load(c)?;
    let mut out = Vec::new();
    let mut all = Vec::new();
    for b in &l.builds {
        let cfg = l.config(b);
        let mut reports = Vec::new();
        for suite in suites {
            match suite {
                Suite::Jacobi => reports.extend(pair_suite(b, |x, y| check_twisted_jacobi(x, y, &cfg))),
                Suite::Iterate => reports.extend(pair_suite(b, |x, y| check_iterate_associativity(x, y, &cfg))),
                Suite::Commutator => reports.extend(pair_suite(b, |x, y| commutator_report(x, y, &cfg))),
                Suite::Stability => reports.extend(pair_suite(b, |x, y| stability_report(x, y, &cfg))),
                Suite::Virasoro => {
                    let lf = b.field("L").ok_or_else(|| anyhow!("the virasoro suite needs a field L"))?;
                    reports.push(check_virasoro_element(lf, &b.central, &b.generators(), &cfg));
                }
                Suite::Nilpotency => reports.extend(nilpotency_reports(&l, b, &cfg)?),
            }
        }
        out.push(json!({"build": b.name, "reports": reports_json(&reports)}));
        all.extend(reports);
    }
    let code = aggregate(&all);
    let status = ["pass", "fail", "inconclusive"][code as usize];
    let value = json!({
        "command": "verify",
        "spec": l.name,
        "status": status,
        "builds": out,
    });
    Ok((value, code))
}

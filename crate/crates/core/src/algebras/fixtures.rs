use std::collections::BTreeMap;

use super::affine::{build_clifford_twisted, build_induced};
use super::spec::{AlgebraSpec, Family};
use super::superconformal::{build_ns_vacuum, build_ramond, build_virasoro, build_virasoro_vacuum, RamondLowest};
use super::{BuildError, ModuleBuild};
use crate::exactcalc::{ex_int, parse_in, Coeff, Exponent, Matrix};
use crate::statespace::{quotient_space, Mode, Vector};

const FIXTURES: &[(&str, &str)] = &[
    ("chevalley-sl2", include_str!("../../fixtures/chevalley-sl2.json")),
    ("clifford-rank1", include_str!("../../fixtures/clifford-rank1.json")),
    ("clifford-rank2", include_str!("../../fixtures/clifford-rank2.json")),
    ("free-fermion", include_str!("../../fixtures/free-fermion.json")),
    ("ns", include_str!("../../fixtures/ns.json")),
    ("ramond", include_str!("../../fixtures/ramond.json")),
    ("sl2", include_str!("../../fixtures/sl2.json")),
    ("sl2-level1", include_str!("../../fixtures/sl2-level1.json")),
    ("sl2-level1-irreducible", include_str!("../../fixtures/sl2-level1-irreducible.json")),
    ("virasoro", include_str!("../../fixtures/virasoro.json")),
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

pub fn embedded_fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Overrides for the parameters stored in a spec.
#[derive(Clone, Debug)]
pub struct BuildOptions<C> {
    pub central_charge: Option<C>,
    pub level: Option<C>,
    pub lowest_weight: Option<C>,
    pub lowest_rep: Option<BTreeMap<String, Matrix<C>>>,
}

impl<C> Default for BuildOptions<C> {
    fn default() -> Self {
        BuildOptions { central_charge: None, level: None, lowest_weight: None, lowest_rep: None }
    }
}

fn param<C: Coeff>(spec: &AlgebraSpec<C>, over: &Option<C>, key: &str, default: C) -> Result<C, BuildError> {
    if let Some(v) = over {
        return Ok(v.clone());
    }
    match spec.parameters.get(key) {
        Some(t) => parse_in(t).map_err(|source| BuildError::Spec(super::SpecError::Literal { context: key.into(), source })),
        None => Ok(default),
    }
}

/// Builds every module a spec describes.
pub fn build_from_spec<C: Coeff>(
    spec: &AlgebraSpec<C>,
    cutoff: &Exponent,
    opts: &BuildOptions<C>,
) -> Result<Vec<ModuleBuild<C>>, BuildError> {
    let c = param(spec, &opts.central_charge, "central_charge", C::zero())?;
    let h = param(spec, &opts.lowest_weight, "lowest_weight", C::zero())?;
    match spec.family {
        Family::Virasoro => match spec.parameters.get("module").map(|s| s.as_str()) {
            Some("vacuum") => Ok(vec![build_virasoro_vacuum(c, cutoff)?]),
            _ => Ok(vec![build_virasoro(c, h, cutoff)?]),
        },
        Family::NeveuSchwarz => Ok(vec![build_ns_vacuum(c, cutoff)?]),
        Family::Ramond => {
            let lowest = match spec.parameters.get("f0").map(|s| s.as_str()) {
                None | Some("pair") => RamondLowest::Pair,
                Some(t) => RamondLowest::Eigen(
                    parse_in(t).map_err(|source| super::SpecError::Literal { context: "f0".into(), source })?,
                ),
            };
            Ok(vec![build_ramond(c, h, lowest, cutoff)?])
        }
        Family::Affine => {
            if spec.parities.iter().all(|p| p.is_odd()) {
                let mut s = spec.clone();
                if let Some(l) = &opts.level {
                    s.parameters.insert("level".into(), l.to_string());
                }
                return build_clifford_twisted(&s, cutoff);
            }
            let level = param(spec, &opts.level, "level", C::one())?;
            let mut builds = build_induced(spec, level.clone(), opts.lowest_rep.as_ref(), cutoff)?;
            if spec.parameters.get("quotient").map(|s| s.as_str()) == Some("theta") {
                for b in &mut builds {
                    attach_theta_quotient(spec, b, &level)?;
                }
            }
            Ok(builds)
        }
    }
}

/// Quotients by `θ(-1)^{ℓ+1} vac` for a non-negative integer level `ℓ`.
fn attach_theta_quotient<C: Coeff>(spec: &AlgebraSpec<C>, b: &mut ModuleBuild<C>, level: &C) -> Result<(), BuildError> {
    let theta = spec.distinguished.get("theta").ok_or_else(|| BuildError::Unsupported("no distinguished theta".into()))?;
    let g = b.generator_index(theta).ok_or_else(|| BuildError::Unsupported(format!("{} is not a generator", theta)))?;
    let l = level
        .to_rational()
        .filter(|q| q.is_integer() && *q >= num_rational::BigRational::from_integer(0.into()))
        .ok_or_else(|| BuildError::Unsupported("quotient needs a non-negative integer level".into()))?;
    let power: usize = l.to_integer().try_into().map_err(|_| BuildError::Unsupported("level too large".into()))?;
    let mode = Mode::new(g as u16, ex_int(-1));
    let mut v = Vector::basis(b.module.lowest_vector(0));
    for _ in 0..=power {
        v = b.module.act_vec(&mode, &v);
    }
    let q = quotient_space(&b.module, &b.space, &[v.clone()]);
    b.metadata.insert("quotient".into(), format!("{}(-1)^{} vac", theta, power + 1));
    b.quotient = Some(q);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::spec::{parse_spec_file, validate_spec};
    use super::*;
    use crate::exactcalc::Cyclotomic;

    fn load(name: &str) -> AlgebraSpec<Cyclotomic> {
        AlgebraSpec::from_file(&parse_spec_file(embedded_fixture(name).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn every_fixture_is_valid_and_builds() {
        for name in fixture_names() {
            let s = load(name);
            assert!(validate_spec(&s).is_empty(), "{}: {:?}", name, validate_spec(&s));
            let builds = build_from_spec(&s, &ex_int(2), &BuildOptions::default()).unwrap();
            let expect = if name == "clifford-rank1" { 2 } else { 1 };
            assert_eq!(builds.len(), expect, "{}", name);
        }
    }

    #[test]
    fn theta_quotient_removes_singular_vector() {
        let s = load("sl2-level1-irreducible");
        let b = build_from_spec(&s, &ex_int(2), &BuildOptions::default()).unwrap().remove(0);
        let q = b.quotient.as_ref().unwrap();
        // e(-1)^2 vac spans a five-dimensional sl2 module under the zero modes
        assert_eq!(q.subspace_dims[&ex_int(2)], 5);
        assert_eq!(b.dimensions()[&ex_int(2)], 4);
        assert_eq!(b.space.dimensions()[&ex_int(2)], 9);
    }
}

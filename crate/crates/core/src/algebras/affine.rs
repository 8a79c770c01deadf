use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::spec::{validate_spec, AlgebraSpec, Family};
use super::{BuildError, ModuleBuild};
use crate::exactcalc::{ex, ex_int, Coeff, Echelon, Exponent, Insert, Matrix};
use crate::statespace::{Bracket, GeneratorInfo, LowestSpace, Mode, ModeAlgebra, Parity, PbwModule};

/// Modes `t^m ⊗ x` of a twisted affine Lie superalgebra at level `ℓ`, in a
/// σ-eigenbasis. Even elements have weight 1; odd elements weight 1/2 with
/// `[u_p, v_q] = δ_{p+q+1,0} B(u,v) ℓ`.
pub struct TwistedAffine<C> {
    twist: u32,
    level: C,
    gens: Vec<GeneratorInfo>,
    structure: Vec<Vec<Vec<(u16, C)>>>,
    form: Vec<Vec<C>>,
}

impl<C: Coeff> ModeAlgebra<C> for TwistedAffine<C> {
    fn twist(&self) -> u32 {
        self.twist
    }

    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }

    fn bracket(&self, x: &Mode, y: &Mode) -> Bracket<C> {
        let (a, b) = (x.gen as usize, y.gen as usize);
        let (p, q) = (x.index, y.index);
        let odd_a = self.gens[a].parity.is_odd();
        let odd_b = self.gens[b].parity.is_odd();
        if odd_a && odd_b {
            let central =
                if p + q + ex_int(1) == ex_int(0) { self.form[a][b].clone() * self.level.clone() } else { C::zero() };
            return Bracket { modes: Vec::new(), central };
        }
        let modes = self.structure[a][b].iter().map(|(k, c)| (Mode::new(*k, p + q), c.clone())).collect();
        let central = if !odd_a && !odd_b && (p + q).is_zero() {
            C::from_rational(&crate::exactcalc::exp_to_rational(&p)) * self.form[a][b].clone() * self.level.clone()
        } else {
            C::zero()
        };
        Bracket { modes, central }
    }
}

/// Eigenvectors of σ grouped by charge `j` (eigenvalue `ε^j`), sorted by
/// leading coordinate within each parity.
pub fn sigma_eigenbasis<C: Coeff>(spec: &AlgebraSpec<C>) -> Result<Vec<(u32, Vec<C>)>, BuildError> {
    let n = spec.dim();
    let t = spec.twist;
    let mut out = Vec::new();
    for j in 0..t {
        let eps = C::root_of_unity(t, j as i64).ok_or(BuildError::NoRoot(t))?;
        let shifted = spec.sigma.add(&Matrix::identity(n).scale(&-eps));
        for v in shifted.kernel() {
            out.push((j, v));
        }
    }
    if out.len() != n {
        return Err(BuildError::NotDiagonalizable);
    }
    let lead = |v: &Vec<C>| v.iter().position(|c| !c.is_zero()).unwrap_or(n);
    out.sort_by_key(|(_, v)| lead(v));
    Ok(out)
}

fn vec_name<C: Coeff>(spec: &AlgebraSpec<C>, v: &[C]) -> String {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    if nz.len() == 1 && v[nz[0]].is_one() {
        return spec.labels[nz[0]].clone();
    }
    let parts: Vec<String> = nz
        .iter()
        .map(|&i| if v[i].is_one() { spec.labels[i].clone() } else { format!("({})*{}", v[i], spec.labels[i]) })
        .collect();
    format!("({})", parts.join(" + "))
}

fn axpy<C: Coeff>(y: &[C], a: &C, x: &[C]) -> Vec<C> {
    y.iter().zip(x).map(|(yi, xi)| yi.clone() + a.clone() * xi.clone()).collect()
}

fn scale<C: Coeff>(a: &C, x: &[C]) -> Vec<C> {
    x.iter().map(|xi| a.clone() * xi.clone()).collect()
}

fn independent<C: Coeff>(vs: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let mut ech: Echelon<usize, C> = Echelon::new();
    let mut out = Vec::new();
    for v in vs {
        let m: BTreeMap<usize, C> = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
        if let Insert::Independent(_) = ech.insert(&m) {
            out.push(v);
        }
    }
    out
}

/// A split of a nondegenerate orthogonal space into isotropic halves.
#[derive(Clone, Debug)]
pub struct IsotropicSplit<C> {
    /// Pairs `(e+, e-)` with `B(e+, e-) = 1` and isotropic spans.
    pub pairs: Vec<(Vec<C>, Vec<C>)>,
    /// The leftover vector when the dimension is odd.
    pub leftover: Option<Vec<C>>,
}

/// Greedy hyperbolic pairing in the given vector order.
pub fn isotropic_split<C: Coeff>(spec: &AlgebraSpec<C>, vectors: &[Vec<C>]) -> Result<IsotropicSplit<C>, BuildError> {
    let b = |u: &[C], v: &[C]| spec.form_vec(u, v);
    let mut rest = independent(vectors.to_vec());
    let mut pairs = Vec::new();
    while rest.len() >= 2 {
        let pair = if let Some(i) = rest.iter().position(|v| b(v, v).is_zero()) {
            hyperbolic(&b, &rest[i], &rest)?
        } else {
            let f1 = rest[0].clone();
            let b11 = b(&f1, &f1);
            let inv = b11.inverse().ok_or(BuildError::Degenerate)?;
            let perp: Vec<Vec<C>> = rest[1..]
                .iter()
                .map(|w| axpy(w, &-(b(w, &f1) * inv.clone()), &f1))
                .filter(|w| w.iter().any(|c| !c.is_zero()))
                .collect();
            if let Some(v) = perp.iter().find(|v| b(v, v).is_zero()) {
                hyperbolic(&b, v, &perp)?
            } else {
                let f2 = perp.first().ok_or(BuildError::Degenerate)?.clone();
                let b22 = b(&f2, &f2);
                let ratio = -(b11.clone() * b22.inverse().ok_or(BuildError::Degenerate)?);
                let t = ratio.sqrt().ok_or_else(|| BuildError::Sqrt(ratio.to_string()))?;
                let plus = axpy(&f1, &t, &f2);
                let minus = scale(&(C::from_int(2) * b11).inverse().expect("nonzero"), &axpy(&f1, &-t, &f2));
                (plus, minus)
            }
        };
        let (ep, em) = pair.clone();
        let projected: Vec<Vec<C>> = rest
            .iter()
            .map(|w| {
                let w1 = axpy(w, &-b(w, &em), &ep);
                axpy(&w1, &-b(w, &ep), &em)
            })
            .filter(|w| w.iter().any(|c| !c.is_zero()))
            .collect();
        rest = independent(projected);
        pairs.push(pair);
    }
    let leftover = rest.pop();
    if let Some(e) = &leftover {
        if b(e, e).is_zero() {
            return Err(BuildError::Degenerate);
        }
    }
    Ok(IsotropicSplit { pairs, leftover })
}

fn hyperbolic<C: Coeff>(
    b: &impl Fn(&[C], &[C]) -> C,
    v: &[C],
    pool: &[Vec<C>],
) -> Result<(Vec<C>, Vec<C>), BuildError> {
    let w = pool.iter().find(|w| !b(v, w).is_zero()).ok_or(BuildError::Degenerate)?;
    let bvw = b(v, w);
    let inv = bvw.inverse().expect("nonzero");
    let adj = b(w, w) * (C::from_int(2) * bvw).inverse().expect("nonzero");
    let minus = scale(&inv, &axpy(w, &-adj, v));
    Ok((v.to_vec(), minus))
}

struct Gen<C> {
    name: String,
    vector: Vec<C>,
    parity: Parity,
    charge: Exponent,
    creation_below: Exponent,
}

/// Induced module of the twisted affinization of `spec` at `level`.
///
/// The lowest space is the trivial representation unless `lowest_rep` gives
/// matrices for the charge-0 even basis labels. When odd elements have zero
/// degree modes their span is split into isotropic halves; an odd-dimensional
/// span yields two modules.
pub fn build_induced<C: Coeff>(
    spec: &AlgebraSpec<C>,
    level: C,
    lowest_rep: Option<&BTreeMap<String, Matrix<C>>>,
    cutoff: &Exponent,
) -> Result<Vec<ModuleBuild<C>>, BuildError> {
    if spec.family != Family::Affine {
        return Err(BuildError::Unsupported(format!("{} is not an affine spec", spec.name)));
    }
    let report = validate_spec(spec);
    if !report.is_empty() {
        return Err(BuildError::Invalid(report));
    }
    let t = spec.twist;
    let eig = sigma_eigenbasis(spec)?;
    let mut gens: Vec<Gen<C>> = Vec::new();
    let mut half: Vec<Vec<C>> = Vec::new();
    for (j, v) in &eig {
        let parity = if v.iter().enumerate().any(|(i, c)| !c.is_zero() && spec.parities[i].is_odd()) {
            Parity::Odd
        } else {
            Parity::Even
        };
        let charge = Exponent::new(*j as i64, t as i64);
        if parity.is_odd() && charge == ex(1, 2) {
            half.push(v.clone());
            continue;
        }
        let creation_below = if parity.is_odd() { ex(-1, 2) } else { ex_int(0) };
        gens.push(Gen { name: vec_name(spec, v), vector: v.clone(), parity, charge, creation_below });
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("twist".into(), t.to_string());
    metadata.insert("level".into(), level.to_string());
    let mut leftover = None;
    if !half.is_empty() {
        if gens.iter().any(|g| g.parity == Parity::Even) && lowest_rep.is_some() {
            return Err(BuildError::Unsupported("lowest representation together with zero-degree fermions".into()));
        }
        let split = isotropic_split(spec, &half)?;
        let mut desc = Vec::new();
        for (k, (p, m)) in split.pairs.iter().enumerate() {
            let (np, nm) = (vec_name(spec, p), vec_name(spec, m));
            let np = if np.starts_with('(') { format!("psi{}+", k + 1) } else { np };
            let nm = if nm.starts_with('(') { format!("psi{}-", k + 1) } else { nm };
            desc.push(format!("{} = {}; {} = {}", np, vec_name(spec, p), nm, vec_name(spec, m)));
            gens.push(Gen { name: np, vector: p.clone(), parity: Parity::Odd, charge: ex(1, 2), creation_below: ex_int(0) });
            gens.push(Gen { name: nm, vector: m.clone(), parity: Parity::Odd, charge: ex(1, 2), creation_below: ex(-1, 2) });
        }
        if let Some(e) = &split.leftover {
            let name = vec_name(spec, e);
            desc.push(format!("leftover {}", name));
            gens.push(Gen { name, vector: e.clone(), parity: Parity::Odd, charge: ex(1, 2), creation_below: ex(-1, 2) });
            leftover = Some(gens.len() - 1);
        }
        metadata.insert("split".into(), desc.join(" | "));
    }
    // structure constants in the generator basis
    let n = spec.dim();
    let mut p = Matrix::zeros(n, n);
    for (k, g) in gens.iter().enumerate() {
        for i in 0..n {
            p.set(i, k, g.vector[i].clone());
        }
    }
    let pinv = p.inverse().ok_or(BuildError::NotDiagonalizable)?;
    let structure: Vec<Vec<Vec<(u16, C)>>> = gens
        .iter()
        .map(|a| {
            gens.iter()
                .map(|b| {
                    let coords = pinv.apply(&spec.bracket_vec(&a.vector, &b.vector));
                    coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as u16, c)).collect()
                })
                .collect()
        })
        .collect();
    let form: Vec<Vec<C>> = gens.iter().map(|a| gens.iter().map(|b| spec.form_vec(&a.vector, &b.vector)).collect()).collect();
    let infos: Vec<GeneratorInfo> = gens
        .iter()
        .map(|g| GeneratorInfo {
            name: g.name.clone(),
            parity: g.parity,
            weight: if g.parity.is_odd() { ex(1, 2) } else { ex_int(1) },
            charge: g.charge,
            label_offset: ex_int(0),
        })
        .collect();
    for (g, info) in gens.iter().zip(&infos) {
        metadata.insert(format!("generator {}", info.name), format!("charge {} vector {}", g.charge, vec_name(spec, &g.vector)));
    }
    let alg: Arc<dyn ModeAlgebra<C>> =
        Arc::new(TwistedAffine { twist: t, level: level.clone(), gens: infos, structure, form: form.clone() });
    let creation_below: Vec<Exponent> = gens.iter().map(|g| g.creation_below).collect();
    let mut zero_modes = BTreeMap::new();
    let mut dim = 1;
    if let Some(rep) = lowest_rep {
        dim = rep.values().next().map(|m| m.rows()).unwrap_or(1);
        for (k, g) in gens.iter().enumerate() {
            if g.parity.is_odd() || !g.charge.is_zero() {
                continue;
            }
            let mut mat = Matrix::zeros(dim, dim);
            for (i, c) in g.vector.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if let Some(mi) = rep.get(&spec.labels[i]) {
                    if mi.rows() != dim || mi.cols() != dim {
                        return Err(BuildError::Lowest(format!("matrix for {} has the wrong size", spec.labels[i])));
                    }
                    mat = mat.add(&mi.scale(c));
                }
            }
            zero_modes.insert(Mode::new(k as u16, ex_int(0)), mat);
        }
        metadata.insert("lowest_dimension".into(), dim.to_string());
    }
    let labels: Vec<String> = if dim == 1 { vec!["vac".into()] } else { (0..dim).map(|i| format!("v{}", i)).collect() };
    let base = LowestSpace { labels, parities: vec![Parity::Even; dim], zero_modes };
    let variants: Vec<(String, LowestSpace<C>)> = match leftover {
        None => vec![(spec.name.clone(), base)],
        Some(k) => {
            let e = &gens[k].vector;
            let target = spec.form_vec(e, e) * level.clone() * C::from_frac(1, 2);
            let lambda = target.sqrt().ok_or_else(|| BuildError::Sqrt(target.to_string()))?;
            [("+", lambda.clone()), ("-", -lambda)]
                .into_iter()
                .map(|(tag, l)| {
                    let mut s = base.clone();
                    s.zero_modes.insert(Mode::new(k as u16, ex(-1, 2)), Matrix::from_rows(vec![vec![l]]));
                    (format!("{}{}", spec.name, tag), s)
                })
                .collect()
        }
    };
    let mut out = Vec::new();
    for (name, lowest) in variants {
        let mut meta = metadata.clone();
        if let Some(k) = leftover {
            meta.insert("leftover_action".into(), lowest.zero_modes[&Mode::new(k as u16, ex(-1, 2))].get(0, 0).to_string());
        }
        let module = PbwModule::new(name.clone(), alg.clone(), creation_below.clone(), lowest)
            .map_err(|e| BuildError::Lowest(e.to_string()))?;
        let mut build = ModuleBuild::assemble(&name, Arc::new(module), cutoff, level.clone(), meta)?;
        build.coordinates = gens.iter().map(|g| g.vector.clone()).collect();
        build.spec_labels = spec.labels.clone();
        build.form = form.clone();
        out.push(build);
    }
    Ok(out)
}

/// Induced module for the σ-twisted affinization; a single module.
pub fn build_affine_twisted<C: Coeff>(
    spec: &AlgebraSpec<C>,
    level: C,
    lowest_rep: Option<&BTreeMap<String, Matrix<C>>>,
    cutoff: &Exponent,
) -> Result<ModuleBuild<C>, BuildError> {
    let mut builds = build_induced(spec, level, lowest_rep, cutoff)?;
    if builds.len() != 1 {
        return Err(BuildError::Unsupported("odd number of zero-degree fermions; use build_clifford_twisted".into()));
    }
    Ok(builds.remove(0))
}

/// The exterior-algebra modules of a twisted Clifford algebra: one module, or
/// two when `T` is even and the `-1` eigenspace of σ is odd-dimensional.
pub fn build_clifford_twisted<C: Coeff>(spec: &AlgebraSpec<C>, cutoff: &Exponent) -> Result<Vec<ModuleBuild<C>>, BuildError> {
    if spec.parities.iter().any(|p| !p.is_odd()) {
        return Err(BuildError::Unsupported("Clifford specs have odd elements only".into()));
    }
    if spec.form.rank() != spec.dim() {
        return Err(BuildError::Degenerate);
    }
    let level = spec.parameter("level").unwrap_or_else(C::one);
    build_induced(spec, level, None, cutoff)
}

#[cfg(test)]
mod tests {
    use super::super::spec::parse_spec_file;
    use super::*;
    use crate::exactcalc::{Cyclotomic, Rational};

    fn clifford(dim: usize, form: &str, twist: u32, sigma: &str) -> String {
        let basis: Vec<String> = (1..=dim).map(|i| format!(r#"{{"label": "a{}", "parity": 1}}"#, i)).collect();
        format!(
            r#"{{"name": "cl", "twist_order": {}, "basis": [{}], "form": {}, "automorphism": {}}}"#,
            twist,
            basis.join(","),
            form,
            sigma
        )
    }

    #[test]
    fn rank_two_split_pairs_isotropic_halves() {
        let text = clifford(
            2,
            r#"[{"x": "a1", "y": "a1", "value": "1"}, {"x": "a2", "y": "a2", "value": "1"}]"#,
            2,
            r#"{"a1": {"a1": "-1"}, "a2": {"a2": "-1"}}"#,
        );
        let spec: AlgebraSpec<Cyclotomic> = AlgebraSpec::from_file(&parse_spec_file(&text).unwrap()).unwrap();
        let builds = build_clifford_twisted(&spec, &ex_int(3)).unwrap();
        assert_eq!(builds.len(), 1);
        let b = &builds[0];
        assert!(b.metadata["split"].contains("psi1+"));
        let dims: Vec<usize> = b.space.dimensions().values().copied().collect();
        assert_eq!(dims, vec![2, 4, 6, 12]);
    }

    #[test]
    fn rank_one_gives_two_modules() {
        let text = clifford(1, r#"[{"x": "a1", "y": "a1", "value": "2"}]"#, 2, r#"{"a1": {"a1": "-1"}}"#);
        let spec: AlgebraSpec<Rational> = AlgebraSpec::from_file(&parse_spec_file(&text).unwrap()).unwrap();
        let builds = build_clifford_twisted(&spec, &ex_int(2)).unwrap();
        assert_eq!(builds.len(), 2);
        assert_eq!(builds[0].metadata["leftover_action"], "1");
        assert_eq!(builds[1].metadata["leftover_action"], "-1");
    }

    #[test]
    fn degenerate_form_rejected() {
        let text = clifford(2, r#"[{"x": "a1", "y": "a1", "value": "1"}]"#, 1, "{}");
        let spec: AlgebraSpec<Rational> = AlgebraSpec::from_file(&parse_spec_file(&text).unwrap()).unwrap();
        assert!(matches!(build_clifford_twisted(&spec, &ex_int(2)), Err(BuildError::Degenerate)));
    }
}

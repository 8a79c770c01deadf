use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactcalc::{parse_in, Coeff, Exponent, LiteralError, Matrix};
use crate::statespace::Parity;

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    Affine,
    Virasoro,
    NeveuSchwarz,
    Ramond,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct BasisDecl {
    pub label: String,
    pub parity: u8,
    /// Conformal weight of the field; `1` for even and `1/2` for odd
    /// affine elements when absent.
    #[serde(default)]
    pub degree: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct BracketDecl {
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub result: BTreeMap<String, String>,
    #[serde(default)]
    pub is_anticommutator: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct FormDecl {
    pub x: String,
    pub y: String,
    pub value: String,
}

/// The JSON description of a Lie superalgebra with form and automorphism.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct SpecFile {
    pub name: String,
    #[serde(default = "one")]
    pub twist_order: u32,
    #[serde(default)]
    pub family: Family,
    #[serde(default)]
    pub basis: Vec<BasisDecl>,
    #[serde(default)]
    pub brackets: Vec<BracketDecl>,
    #[serde(default)]
    pub form: Vec<FormDecl>,
    #[serde(default)]
    pub automorphism: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub distinguished: BTreeMap<String, String>,
    /// Default parameters: `central_charge`, `level`, `lowest_weight`, `f0`.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("empty algebra")]
    Empty,
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
    #[error("in '{context}': {source}")]
    Literal { context: String, source: LiteralError },
    #[error("bad parity {1} for '{0}'")]
    BadParity(String, u8),
    #[error("twist order must be positive")]
    BadTwist,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// A parsed algebra with dense structure constants.
#[derive(Clone, Debug)]
pub struct AlgebraSpec<C> {
    pub name: String,
    pub family: Family,
    pub twist: u32,
    pub labels: Vec<String>,
    pub parities: Vec<Parity>,
    pub weights: Vec<Exponent>,
    /// `bracket[i][j]` is the coordinate vector of `[x_i, x_j]`.
    pub bracket: Vec<Vec<Vec<C>>>,
    pub form: Matrix<C>,
    /// Columns are the images of basis vectors.
    pub sigma: Matrix<C>,
    pub distinguished: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, String>,
}

fn lit<C: Coeff>(text: &str, context: impl Into<String>) -> Result<C, SpecError> {
    parse_in(text).map_err(|source| SpecError::Literal { context: context.into(), source })
}

fn parse_weight(text: &str, context: &str) -> Result<Exponent, SpecError> {
    let bad = |m: &str| SpecError::Literal {
        context: context.into(),
        source: LiteralError { column: 1, message: m.into() },
    };
    let (n, d) = match text.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad("weight must be a rational"))?;
    let d: i64 = d.parse().map_err(|_| bad("weight must be a rational"))?;
    if d == 0 {
        return Err(bad("zero denominator"));
    }
    Ok(Exponent::new(n, d))
}

/// Parses JSON text into a spec file, reporting syntax errors by position.
pub fn parse_spec_file(text: &str) -> Result<SpecFile, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })
}

impl<C: Coeff> AlgebraSpec<C> {
    /// Resolves labels and literals. Structural invariants are checked by
    /// [`validate_spec`].
    pub fn from_file(file: &SpecFile) -> Result<Self, SpecError> {
        if file.twist_order == 0 {
            return Err(SpecError::BadTwist);
        }
        if file.basis.is_empty() {
            return Err(SpecError::Empty);
        }
        let mut index = BTreeMap::new();
        let mut labels = Vec::new();
        let mut parities = Vec::new();
        let mut weights = Vec::new();
        for b in &file.basis {
            if index.insert(b.label.clone(), labels.len()).is_some() {
                return Err(SpecError::DuplicateLabel(b.label.clone()));
            }
            let parity = match b.parity {
                0 => Parity::Even,
                1 => Parity::Odd,
                p => return Err(SpecError::BadParity(b.label.clone(), p)),
            };
            let weight = match &b.degree {
                Some(t) => parse_weight(t, &b.label)?,
                None if parity.is_odd() => Exponent::new(1, 2),
                None => Exponent::from_integer(1),
            };
            labels.push(b.label.clone());
            parities.push(parity);
            weights.push(weight);
        }
        let n = labels.len();
        let idx = |l: &str| index.get(l).copied().ok_or_else(|| SpecError::UnknownLabel(l.to_string()));
        let terms = |t: &BTreeMap<String, String>, ctx: &str| -> Result<Vec<C>, SpecError> {
            let mut v = vec![C::zero(); n];
            for (l, s) in t {
                v[idx(l)?] = lit(s, ctx)?;
            }
            Ok(v)
        };
        let mut bracket = vec![vec![vec![C::zero(); n]; n]; n];
        let mut declared: BTreeMap<(usize, usize), Vec<C>> = BTreeMap::new();
        for b in &file.brackets {
            let (i, j) = (idx(&b.x)?, idx(&b.y)?);
            let both_odd = parities[i].is_odd() && parities[j].is_odd();
            if b.is_anticommutator != both_odd {
                return Err(SpecError::Invariant(format!(
                    "bracket [{}, {}] is_anticommutator should be {}",
                    b.x, b.y, both_odd
                )));
            }
            let v = terms(&b.result, &format!("[{}, {}]", b.x, b.y))?;
            declared.insert((i, j), v);
        }
        for (&(i, j), v) in &declared {
            let sign = -crate::statespace::koszul::<C>(parities[i], parities[j]);
            let mirrored: Vec<C> = v.iter().map(|c| c.clone() * sign.clone()).collect();
            if let Some(w) = declared.get(&(j, i)) {
                if *w != mirrored {
                    return Err(SpecError::Invariant(format!(
                        "antisymmetry violated by [{}, {}] and [{}, {}]",
                        labels[i], labels[j], labels[j], labels[i]
                    )));
                }
            }
            if i == j && mirrored != *v {
                return Err(SpecError::Invariant(format!("antisymmetry violated by [{}, {}]", labels[i], labels[i])));
            }
            bracket[i][j] = v.clone();
            bracket[j][i] = mirrored;
        }
        let mut form = Matrix::zeros(n, n);
        let mut form_set: BTreeMap<(usize, usize), C> = BTreeMap::new();
        for f in &file.form {
            let (i, j) = (idx(&f.x)?, idx(&f.y)?);
            let v: C = lit(&f.value, &format!("B({}, {})", f.x, f.y))?;
            if let Some(w) = form_set.get(&(j, i)) {
                if *w != v {
                    return Err(SpecError::Invariant(format!("form is not symmetric on ({}, {})", f.x, f.y)));
                }
            }
            form_set.insert((i, j), v.clone());
            form.set(i, j, v.clone());
            form.set(j, i, v);
        }
        let mut sigma = Matrix::identity(n);
        for (l, t) in &file.automorphism {
            let j = idx(l)?;
            let col = terms(t, &format!("sigma({})", l))?;
            for (i, c) in col.into_iter().enumerate() {
                sigma.set(i, j, c);
            }
        }
        Ok(AlgebraSpec {
            name: file.name.clone(),
            family: file.family.clone(),
            twist: file.twist_order,
            labels,
            parities,
            weights,
            bracket,
            form,
            sigma,
            distinguished: file.distinguished.clone(),
            parameters: file.parameters.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[u, v]` for coordinate vectors.
    pub fn bracket_vec(&self, u: &[C], v: &[C]) -> Vec<C> {
        let n = self.dim();
        let mut out = vec![C::zero(); n];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let s = ui.clone() * vj.clone();
                for (k, c) in self.bracket[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].clone() + s.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// `B(u, v)` for coordinate vectors.
    pub fn form_vec(&self, u: &[C], v: &[C]) -> C {
        let bv = self.form.apply(v);
        u.iter().zip(bv).fold(C::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    pub fn unit(&self, i: usize) -> Vec<C> {
        let mut v = vec![C::zero(); self.dim()];
        v[i] = C::one();
        v
    }

    pub fn parameter(&self, key: &str) -> Option<C> {
        self.parameters.get(key).and_then(|t| parse_in(t).ok())
    }
}

fn vec_label<C: Coeff>(labels: &[String], v: &[C]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| if c.is_one() { labels[i].clone() } else { format!("({})*{}", c, labels[i]) })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Lists every violated structural invariant; empty means valid.
pub fn validate_spec<C: Coeff>(s: &AlgebraSpec<C>) -> Vec<String> {
    let mut out = Vec::new();
    let n = s.dim();
    if n == 0 {
        out.push("empty algebra".into());
        return out;
    }
    if s.family != Family::Affine {
        return out;
    }
    let odd = |i: usize| s.parities[i].is_odd();
    for i in 0..n {
        let expect = if odd(i) { Exponent::new(1, 2) } else { Exponent::from_integer(1) };
        if s.weights[i] != expect {
            out.push(format!("weight of {} should be {}", s.labels[i], expect));
        }
        for j in 0..n {
            let b = s.form.get(i, j);
            if odd(i) != odd(j) && !b.is_zero() {
                out.push(format!("B({}, {}) pairs even with odd", s.labels[i], s.labels[j]));
            }
            let br = &s.bracket[i][j];
            if odd(i) && odd(j) && br.iter().any(|c| !c.is_zero()) {
                out.push(format!("[{}, {}] must vanish for odd elements", s.labels[i], s.labels[j]));
            }
            for (k, c) in br.iter().enumerate() {
                if !c.is_zero() && s.parities[k] != s.parities[i] + s.parities[j] {
                    out.push(format!("[{}, {}] has a component of wrong parity", s.labels[i], s.labels[j]));
                    break;
                }
            }
        }
    }
    for a in 0..n {
        for u in 0..n {
            for v in 0..n {
                // B([a,u],v) = -(-1)^{|a||u|} B(u,[a,v])
                let lhs = s.form_vec(&s.bracket[a][u], &s.unit(v));
                let sign = crate::statespace::koszul::<C>(s.parities[a], s.parities[u]);
                let rhs = -(sign * s.form_vec(&s.unit(u), &s.bracket[a][v]));
                if lhs != rhs {
                    out.push(format!(
                        "invariance violated on ({}, {}, {})",
                        s.labels[a], s.labels[u], s.labels[v]
                    ));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                // [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
                let lhs = s.bracket_vec(&s.unit(a), &s.bracket[b][c]);
                let r1 = s.bracket_vec(&s.bracket[a][b], &s.unit(c));
                let r2 = s.bracket_vec(&s.unit(b), &s.bracket[a][c]);
                let sign = crate::statespace::koszul::<C>(s.parities[a], s.parities[b]);
                let ok = lhs.iter().zip(r1.iter().zip(r2.iter())).all(|(l, (x, y))| *l == x.clone() + sign.clone() * y.clone());
                if !ok {
                    out.push(format!("Jacobi identity violated on ({}, {}, {})", s.labels[a], s.labels[b], s.labels[c]));
                }
            }
        }
    }
    let t = s.twist;
    if !s.sigma.pow(t).is_identity() {
        for i in 0..n {
            let col = s.sigma.pow(t).column(i);
            if col != s.unit(i) {
                out.push(format!("sigma^{} maps {} to {}", t, s.labels[i], vec_label(&s.labels, &col)));
            }
        }
    }
    for i in 0..n {
        let col = s.sigma.column(i);
        if col.iter().enumerate().any(|(k, c)| !c.is_zero() && s.parities[k] != s.parities[i]) {
            out.push(format!("sigma does not preserve the parity of {}", s.labels[i]));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let si = s.sigma.column(i);
            let sj = s.sigma.column(j);
            let lhs = s.bracket_vec(&si, &sj);
            let rhs = s.sigma.apply(&s.bracket[i][j]);
            if lhs != rhs {
                out.push(format!("sigma does not preserve [{}, {}]", s.labels[i], s.labels[j]));
            }
            if s.form_vec(&si, &sj) != *s.form.get(i, j) {
                out.push(format!("sigma does not preserve B({}, {})", s.labels[i], s.labels[j]));
            }
        }
    }
    out
}

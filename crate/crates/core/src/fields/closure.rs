use std::collections::BTreeMap;

use serde::Serialize;

use super::field::{derivative_field, locality_order, nth_product, Field, FieldError};
use crate::exactcalc::{ex_int, Coeff, Echelon, Exponent, Insert};
use crate::statespace::{BasisId, Parity};

/// Fingerprint coordinate: mode index, probe vector, output basis vector.
type Key = (Exponent, BasisId, BasisId);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Sector {
    weight: Exponent,
    charge: Exponent,
    parity: Parity,
}

/// One row of a product table: `basis[i]_n basis[j] = Σ coefficients[k] basis[k]`.
#[derive(Clone, Debug, Serialize)]
pub struct ProductEntry {
    pub i: usize,
    pub j: usize,
    pub n: i64,
    pub coefficients: Vec<(usize, String)>,
}

pub struct Closure<C> {
    pub basis: Vec<Field<C>>,
    /// How each basis field arose.
    pub origins: Vec<String>,
    pub table: Vec<ProductEntry>,
}

impl<C: Coeff> Closure<C> {
    /// Number of basis fields of each weight.
    pub fn weight_counts(&self) -> BTreeMap<Exponent, usize> {
        let mut out = BTreeMap::new();
        for f in &self.basis {
            *out.entry(f.weight()).or_insert(0) += 1;
        }
        out
    }

    pub fn table_json(&self) -> String {
        serde_json::to_string(&self.table).expect("table serializes")
    }
}

#[derive(Clone, Debug)]
pub struct ClosureConfig {
    pub weight_cap: Exponent,
    pub lo: Exponent,
    pub hi: Exponent,
    pub probes: Vec<BasisId>,
    pub max_locality: u32,
}

struct Span<C> {
    sectors: BTreeMap<Sector, (Echelon<Key, C>, Vec<usize>)>,
}

impl<C: Coeff> Span<C> {
    fn fingerprint(f: &Field<C>, cfg: &ClosureConfig) -> BTreeMap<Key, C> {
        let mut out = BTreeMap::new();
        for m in f.indices(&cfg.lo, &cfg.hi) {
            for &u in &cfg.probes {
                for (id, c) in f.mode(&m, u).iter() {
                    out.insert((m, u, id), c.clone());
                }
            }
        }
        out
    }

    fn sector(f: &Field<C>) -> Sector {
        Sector { weight: f.weight(), charge: f.charge(), parity: f.parity() }
    }

    /// Basis expansion of `f` if it lies in the span, otherwise inserts it
    /// and returns `None`.
    fn absorb(&mut self, f: &Field<C>, cfg: &ClosureConfig, next_index: usize) -> Result<Vec<(usize, C)>, ()> {
        let fp = Self::fingerprint(f, cfg);
        if fp.is_empty() {
            return Ok(Vec::new());
        }
        let (ech, ids) = self.sectors.entry(Self::sector(f)).or_insert_with(|| (Echelon::new(), Vec::new()));
        match ech.insert(&fp) {
            Insert::Dependent(coeffs) => Ok(coeffs.into_iter().map(|(k, c)| (ids[k], c)).collect()),
            Insert::Independent(_) => {
                ids.push(next_index);
                Err(())
            }
        }
    }
}

/// Basis of the fields generated by `seeds` and `I` under n-th products and
/// derivatives, up to weight `weight_cap`, with independence decided on the
/// mode window and probes.
pub fn generate_closure<C: Coeff>(seeds: &[Field<C>], cfg: &ClosureConfig) -> Result<Closure<C>, FieldError> {
    if cfg.hi - cfg.lo <= ex_int(2) * cfg.weight_cap {
        return Err(FieldError::NarrowWindow {
            width: (cfg.hi - cfg.lo).to_string(),
            needed: (ex_int(2) * cfg.weight_cap).to_string(),
        });
    }
    let Some(first) = seeds.first() else {
        return Err(FieldError::NoSeeds);
    };
    for a in seeds {
        for b in seeds {
            if locality_order(a, b, cfg.max_locality, &cfg.probes, &cfg.lo, &cfg.hi).is_none() {
                return Err(FieldError::NotLocal(cfg.max_locality));
            }
        }
    }
    let mut span = Span { sectors: BTreeMap::new() };
    let mut basis: Vec<Field<C>> = Vec::new();
    let mut origins: Vec<String> = Vec::new();
    let mut table = Vec::new();
    let mut orders: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut candidates: Vec<(Field<C>, String)> = vec![(Field::identity(first.module()), "I".into())];
    candidates.extend(seeds.iter().map(|s| (s.clone(), s.name().to_string())));
    let mut done_pairs = 0usize;
    loop {
        for (f, origin) in candidates.drain(..) {
            if f.weight() > cfg.weight_cap {
                continue;
            }
            if span.absorb(&f, cfg, basis.len()).is_err() {
                basis.push(f);
                origins.push(origin);
            }
        }
        // products over pairs involving at least one new field
        let n_basis = basis.len();
        let mut fresh = Vec::new();
        for i in 0..n_basis {
            for j in 0..n_basis {
                if i.max(j) < done_pairs {
                    continue;
                }
                let (a, b) = (&basis[i], &basis[j]);
                let order = match orders.get(&(i, j)) {
                    Some(o) => *o,
                    None => {
                        let o = locality_order(a, b, cfg.max_locality, &cfg.probes, &cfg.lo, &cfg.hi)
                            .ok_or(FieldError::NotLocal(cfg.max_locality))?;
                        orders.insert((i, j), o);
                        o
                    }
                };
                let n_min = (a.weight() + b.weight() - ex_int(1) - cfg.weight_cap).ceil().to_integer();
                for n in n_min..order as i64 {
                    let p = nth_product(a, b, n)?;
                    fresh.push((p, format!("{}_{}{}", i, n, j), i, j, n));
                }
            }
            if i >= done_pairs {
                let d = derivative_field(&basis[i]);
                fresh.push((d, format!("D{}", i), i, usize::MAX, 0));
            }
        }
        done_pairs = n_basis;
        let mut grew = false;
        for (p, origin, i, j, n) in fresh {
            if p.weight() > cfg.weight_cap {
                continue;
            }
            let idx = basis.len();
            match span.absorb(&p, cfg, idx) {
                Ok(coeffs) => {
                    if j != usize::MAX {
                        table.push(entry(i, j, n, coeffs));
                    }
                }
                Err(()) => {
                    if j != usize::MAX {
                        table.push(entry(i, j, n, vec![(idx, C::one())]));
                    }
                    basis.push(p);
                    origins.push(origin);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(Closure { basis, origins, table })
}

fn entry<C: Coeff>(i: usize, j: usize, n: i64, coeffs: Vec<(usize, C)>) -> ProductEntry {
    let mut coefficients: Vec<(usize, String)> = coeffs.into_iter().map(|(k, c)| (k, c.to_string())).collect();
    coefficients.sort();
    ProductEntry { i, j, n, coefficients }
}

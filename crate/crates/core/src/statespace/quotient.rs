//! Quotients of truncated modules by the submodule a set of vectors generates.

use std::collections::{BTreeMap, VecDeque};

use super::pbw::{Mode, PbwModule};
use super::space::GradedSuperSpace;
use super::vector::{BasisId, Vector};
use crate::exactcalc::{ex_int, Coeff, Echelon, Exponent, Insert};

/// `M / W` through the cutoff, where `W` is the submodule generated by the
/// given vectors.
#[derive(Clone, Debug)]
pub struct Quotient<C> {
    pub space: GradedSuperSpace,
    pub subspace_dims: BTreeMap<Exponent, usize>,
    echelons: BTreeMap<Exponent, Echelon<BasisId, C>>,
}

impl<C: Coeff> Quotient<C> {
    /// Projection onto the span of the surviving basis vectors.
    pub fn project(&self, v: &Vector<C>, module: &PbwModule<C>) -> Vector<C> {
        let mut by_degree: BTreeMap<Exponent, BTreeMap<BasisId, C>> = BTreeMap::new();
        for (id, c) in v.iter() {
            by_degree.entry(module.degree(id)).or_default().insert(id, c.clone());
        }
        let mut out = Vector::zero();
        for (d, part) in by_degree {
            let reduced = match self.echelons.get(&d) {
                Some(e) => e.reduce(&part),
                None => part,
            };
            for (id, c) in reduced {
                out.add_term(id, c);
            }
        }
        out
    }

    /// True when `v` lies in the quotiented submodule.
    pub fn is_null(&self, v: &Vector<C>, module: &PbwModule<C>) -> bool {
        self.project(v, module).is_zero()
    }
}

/// All modes mapping some degree in `[0, cutoff]` into `[0, cutoff]`.
pub fn degree_bounded_modes<C: Coeff>(module: &PbwModule<C>, cutoff: &Exponent) -> Vec<Mode> {
    let mut out = Vec::new();
    for (g, info) in module.algebra().generators().iter().enumerate() {
        // shift = weight - m - 1 within [-cutoff, cutoff]
        let lo = info.weight - ex_int(1) - cutoff;
        let hi = info.weight - ex_int(1) + cutoff;
        let mut m = (lo - info.charge).ceil() + info.charge;
        while m <= hi {
            out.push(Mode::new(g as u16, m));
            m += ex_int(1);
        }
    }
    out
}

/// Breadth-first closure of `generators` under all degree-bounded modes,
/// then the quotient basis and projection.
pub fn quotient_space<C: Coeff>(module: &PbwModule<C>, space: &GradedSuperSpace, generators: &[Vector<C>]) -> Quotient<C> {
    let cutoff = space.cutoff();
    let modes = degree_bounded_modes(module, &cutoff);
    let mut echelons: BTreeMap<Exponent, Echelon<BasisId, C>> = BTreeMap::new();
    let mut queue: VecDeque<Vector<C>> = VecDeque::new();
    let push = |v: Vector<C>, echelons: &mut BTreeMap<Exponent, Echelon<BasisId, C>>, queue: &mut VecDeque<Vector<C>>| {
        let mut by_degree: BTreeMap<Exponent, BTreeMap<BasisId, C>> = BTreeMap::new();
        for (id, c) in v.iter() {
            let d = module.degree(id);
            if d <= cutoff {
                by_degree.entry(d).or_default().insert(id, c.clone());
            }
        }
        for (d, part) in by_degree {
            let e = echelons.entry(d).or_default();
            if let Insert::Independent(_) = e.insert(&part) {
                queue.push_back(Vector::from_map(part));
            }
        }
    };
    for g in generators {
        push(g.clone(), &mut echelons, &mut queue);
    }
    while let Some(v) = queue.pop_front() {
        let Some(d) = module.max_degree(&v) else { continue };
        for m in &modes {
            let target = d + module.shift(m);
            if target < ex_int(0) || target > cutoff {
                continue;
            }
            let w = module.act_vec(m, &v);
            if !w.is_zero() {
                push(w, &mut echelons, &mut queue);
            }
        }
    }
    let kept: Vec<(BasisId, Exponent, _, String)> = space
        .basis()
        .iter()
        .filter(|e| !echelons.get(&e.degree).is_some_and(|ech| ech.is_pivot(&e.id)))
        .map(|e| (e.id, e.degree, e.parity, e.label.clone()))
        .collect();
    let subspace_dims = echelons.iter().map(|(d, e)| (*d, e.rank())).collect();
    Quotient { space: GradedSuperSpace::new(cutoff, space.twist(), kept).with_step(space.step()), subspace_dims, echelons }
}

use std::sync::Arc;

use dashmap::DashMap;

use super::ShiftError;
use crate::algebras::ModuleBuild;
use crate::exactcalc::{ex_int, Coeff, Exponent};
use crate::fields::{nth_product, Field};
use crate::statespace::{BasisId, Mode, PbwModule, Vector};

/// State-field correspondence on an untwisted vacuum module: the field of
/// `x_m w` is `Y(x, z)_m Y(w, z)`.
pub struct StateFields<C> {
    module: Arc<PbwModule<C>>,
    gens: Vec<Field<C>>,
    identity: Field<C>,
    cache: DashMap<BasisId, Field<C>>,
}

impl<C: Coeff> StateFields<C> {
    pub fn new(build: &ModuleBuild<C>) -> Result<Self, ShiftError> {
        let module = build.module.clone();
        if module.lowest().dim() != 1 {
            return Err(ShiftError::NotVertexAlgebra("the lowest space is not one-dimensional".into()));
        }
        let gens = build.generators();
        if let Some(g) = gens.iter().find(|g| !g.charge().is_integer() || g.charge() != Exponent::from_integer(0)) {
            return Err(ShiftError::NotVertexAlgebra(format!("{} is twisted", g.name())));
        }
        let identity = build.field("I").cloned().unwrap_or_else(|| Field::identity(&module));
        Ok(StateFields { module, gens, identity, cache: DashMap::new() })
    }

    pub fn module(&self) -> &Arc<PbwModule<C>> {
        &self.module
    }

    pub fn vacuum(&self) -> BasisId {
        self.module.lowest_vector(0)
    }

    /// `x_{-1} vac` for generator `g`.
    pub fn generator_state(&self, g: usize) -> Vector<C> {
        (*self.module.act(&Mode::new(g as u16, ex_int(-1)), self.vacuum())).clone()
    }

    pub fn field_of_basis(&self, id: BasisId) -> Result<Field<C>, ShiftError> {
        if let Some(f) = self.cache.get(&id) {
            return Ok(f.clone());
        }
        let mono = self.module.monomial(id);
        let mut f = self.identity.clone();
        for m in mono.modes.iter().rev() {
            f = nth_product(&self.gens[m.gen as usize], &f, m.index.to_integer())?;
        }
        let f = f.named(self.module.label(id));
        self.cache.insert(id, f.clone());
        Ok(f)
    }

    /// `Y(v, z)` for a homogeneous vector `v`.
    pub fn field_of_state(&self, v: &Vector<C>, name: &str) -> Result<Field<C>, ShiftError> {
        let mut terms = Vec::new();
        for (id, c) in v.iter() {
            terms.push((c.clone(), Exponent::from_integer(0), self.field_of_basis(id)?));
        }
        if terms.is_empty() {
            return Ok(self.identity.zero_like());
        }
        Ok(Field::combination(terms, name)?)
    }

    /// `D v = v_{-2} vac`, the translation operator.
    pub fn translate(&self, v: &Vector<C>) -> Result<Vector<C>, ShiftError> {
        let mut out = Vector::zero();
        for (id, c) in v.iter() {
            let f = self.field_of_basis(id)?;
            out.add_scaled(c, &f.mode(&ex_int(-2), self.vacuum()));
        }
        Ok(out)
    }

    /// `a_n b` for states `a`, `b`.
    pub fn state_product(&self, a: &Vector<C>, n: i64, b: &Vector<C>) -> Result<Vector<C>, ShiftError> {
        let mut out = Vector::zero();
        for (id, c) in a.iter() {
            let f = self.field_of_basis(id)?;
            out.add_scaled(c, &f.mode_vec(&ex_int(n), b));
        }
        Ok(out)
    }
}

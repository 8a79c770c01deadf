//! Input specs and module builders for concrete Lie superalgebras.

mod affine;
mod fixtures;
mod spec;
mod superconformal;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

pub use affine::{
    build_affine_twisted, build_clifford_twisted, build_induced, isotropic_split, sigma_eigenbasis, IsotropicSplit,
    TwistedAffine,
};
pub use fixtures::{build_from_spec, embedded_fixture, fixture_names, BuildOptions};
pub use spec::{parse_spec_file, validate_spec, AlgebraSpec, BasisDecl, BracketDecl, Family, FormDecl, SpecError, SpecFile};
pub use superconformal::{
    build_ns_vacuum, build_ramond, build_virasoro, build_virasoro_vacuum, RamondLowest, SuperVirasoro,
};

use crate::exactcalc::{Coeff, Exponent};
use crate::fields::Field;
use crate::statespace::{BasisId, GradedSuperSpace, ModuleError, PbwModule, Quotient};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid spec: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("the coefficient field has no primitive root of unity of order {0}")]
    NoRoot(u32),
    #[error("the automorphism is not diagonalizable over the coefficient field")]
    NotDiagonalizable,
    #[error("degenerate bilinear form")]
    Degenerate,
    #[error("no square root of {0} in the coefficient field")]
    Sqrt(String),
    #[error("inconsistent lowest-weight data: {0}")]
    Lowest(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// A truncated module together with its generating fields.
#[derive(Clone)]
pub struct ModuleBuild<C> {
    pub name: String,
    pub module: Arc<PbwModule<C>>,
    pub space: GradedSuperSpace,
    /// `I` first, then one field per generator.
    pub fields: Vec<(String, Field<C>)>,
    pub twist: u32,
    /// Central charge or level.
    pub central: C,
    pub metadata: BTreeMap<String, String>,
    /// Generator coordinates in the spec basis (affine builds only).
    pub coordinates: Vec<Vec<C>>,
    pub spec_labels: Vec<String>,
    /// `B` between generators (affine builds only).
    pub form: Vec<Vec<C>>,
    pub quotient: Option<Quotient<C>>,
}

impl<C: Coeff> ModuleBuild<C> {
    pub(crate) fn assemble(
        name: &str,
        module: Arc<PbwModule<C>>,
        cutoff: &Exponent,
        central: C,
        mut metadata: BTreeMap<String, String>,
    ) -> Result<Self, BuildError> {
        let space = module.space(cutoff)?;
        let mut fields = vec![("I".to_string(), Field::identity(&module))];
        for (g, info) in module.algebra().generators().iter().enumerate() {
            fields.push((info.name.clone(), Field::generator(&module, g as u16)));
        }
        let twist = module.twist();
        metadata.insert("cutoff".into(), cutoff.to_string());
        Ok(ModuleBuild {
            name: name.to_string(),
            module,
            space,
            fields,
            twist,
            central,
            metadata,
            coordinates: Vec::new(),
            spec_labels: Vec::new(),
            form: Vec::new(),
            quotient: None,
        })
    }

    pub fn field(&self, name: &str) -> Option<&Field<C>> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Generator fields, without `I`.
    pub fn generators(&self) -> Vec<Field<C>> {
        self.fields.iter().skip(1).map(|(_, f)| f.clone()).collect()
    }

    pub fn cutoff(&self) -> Exponent {
        self.space.cutoff()
    }

    /// Basis vectors of degree at most `cap`.
    pub fn probes(&self, cap: &Exponent) -> Vec<BasisId> {
        self.space.up_to(cap)
    }

    /// Per-degree dimensions of the module, or of the quotient when present.
    pub fn dimensions(&self) -> BTreeMap<Exponent, usize> {
        match &self.quotient {
            Some(q) => q.space.dimensions(),
            None => self.space.dimensions(),
        }
    }

    /// The generator index of a named field.
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().skip(1).position(|(n, _)| n == name)
    }
}

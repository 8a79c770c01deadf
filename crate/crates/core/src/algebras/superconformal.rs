use std::collections::BTreeMap;
use std::sync::Arc;

use super::{BuildError, ModuleBuild};
use crate::exactcalc::{ex, ex_int, exp_to_rational, Coeff, Exponent, Matrix};
use crate::statespace::{Bracket, GeneratorInfo, LowestSpace, Mode, ModeAlgebra, Parity, PbwModule};

/// Virasoro, Neveu-Schwarz or Ramond modes with central charge evaluated.
///
/// `L(p)` is stored as mode `p + 1`; the odd generator `G(r)` as `r + 1/2`.
pub struct SuperVirasoro<C> {
    c: C,
    twist: u32,
    gens: Vec<GeneratorInfo>,
}

const L: u16 = 0;
const G: u16 = 1;

impl<C: Coeff> SuperVirasoro<C> {
    pub fn virasoro(c: C) -> Self {
        SuperVirasoro {
            c,
            twist: 1,
            gens: vec![GeneratorInfo {
                name: "L".into(),
                parity: Parity::Even,
                weight: ex_int(2),
                charge: ex_int(0),
                label_offset: ex_int(1),
            }],
        }
    }

    /// Neveu-Schwarz when `ramond` is false, otherwise Ramond.
    pub fn super_virasoro(c: C, ramond: bool) -> Self {
        let mut s = Self::virasoro(c);
        s.twist = if ramond { 2 } else { 1 };
        s.gens.push(GeneratorInfo {
            name: if ramond { "F".into() } else { "G".into() },
            parity: Parity::Odd,
            weight: ex(3, 2),
            charge: if ramond { ex(1, 2) } else { ex_int(0) },
            label_offset: ex(1, 2),
        });
        s
    }

    fn label(&self, m: &Mode) -> Exponent {
        m.index - self.gens[m.gen as usize].label_offset
    }

    fn q(e: &Exponent) -> C {
        C::from_rational(&exp_to_rational(e))
    }
}

impl<C: Coeff> ModeAlgebra<C> for SuperVirasoro<C> {
    fn twist(&self) -> u32 {
        self.twist
    }

    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }

    fn bracket(&self, x: &Mode, y: &Mode) -> Bracket<C> {
        let (p, q) = (self.label(x), self.label(y));
        let sum = p + q;
        match (x.gen, y.gen) {
            (L, L) => {
                let central = if sum == ex_int(0) { Self::q(&((p * p * p - p) / ex_int(12))) * self.c.clone() } else { C::zero() };
                Bracket { modes: vec![(Mode::new(L, sum + ex_int(1)), Self::q(&(p - q)))], central }
            }
            (L, G) => Bracket { modes: vec![(Mode::new(G, sum + ex(1, 2)), Self::q(&(p / ex_int(2) - q)))], central: C::zero() },
            (G, L) => Bracket { modes: vec![(Mode::new(G, sum + ex(1, 2)), -Self::q(&(q / ex_int(2) - p)))], central: C::zero() },
            _ => {
                let central = if sum == ex_int(0) {
                    Self::q(&((p * p - ex(1, 4)) / ex_int(3))) * self.c.clone()
                } else {
                    C::zero()
                };
                Bracket { modes: vec![(Mode::new(L, sum + ex_int(1)), C::from_int(2))], central }
            }
        }
    }
}

fn finish<C: Coeff>(
    name: &str,
    module: PbwModule<C>,
    cutoff: &Exponent,
    central: C,
    mut metadata: BTreeMap<String, String>,
) -> Result<ModuleBuild<C>, BuildError> {
    let module = Arc::new(module);
    metadata.insert("central_charge".into(), central.to_string());
    ModuleBuild::assemble(name, module, cutoff, central, metadata)
}

/// Verma module of lowest weight `h`: basis `L(-n1)...L(-nk) v`.
pub fn build_virasoro<C: Coeff>(c: C, h: C, cutoff: &Exponent) -> Result<ModuleBuild<C>, BuildError> {
    let alg = Arc::new(SuperVirasoro::virasoro(c.clone()));
    let mut zero_modes = BTreeMap::new();
    zero_modes.insert(Mode::new(L, ex_int(1)), Matrix::from_rows(vec![vec![h.clone()]]));
    let lowest = LowestSpace { labels: vec!["v".into()], parities: vec![Parity::Even], zero_modes };
    let module = PbwModule::new("virasoro", alg, vec![ex_int(1)], lowest)?;
    let mut meta = BTreeMap::new();
    meta.insert("lowest_weight".into(), h.to_string());
    finish("virasoro", module, cutoff, c, meta)
}

/// Vacuum module with `L(-1) vac = 0`.
pub fn build_virasoro_vacuum<C: Coeff>(c: C, cutoff: &Exponent) -> Result<ModuleBuild<C>, BuildError> {
    let alg = Arc::new(SuperVirasoro::virasoro(c.clone()));
    let module = PbwModule::new("virasoro-vacuum", alg, vec![ex_int(0)], LowestSpace::vacuum())?;
    finish("virasoro-vacuum", module, cutoff, c, BTreeMap::new())
}

/// Neveu-Schwarz vacuum module with `L(-1) vac = G(-1/2) vac = 0`.
pub fn build_ns_vacuum<C: Coeff>(c: C, cutoff: &Exponent) -> Result<ModuleBuild<C>, BuildError> {
    let alg = Arc::new(SuperVirasoro::super_virasoro(c.clone(), false));
    let module = PbwModule::new("ns", alg, vec![ex_int(0), ex_int(0)], LowestSpace::vacuum())?;
    finish("ns", module, cutoff, c, BTreeMap::new())
}

/// How `F(0)` acts on the lowest space of a Ramond module.
#[derive(Clone, Debug)]
pub enum RamondLowest<C> {
    /// Two-dimensional: `F(0) v+ = v-`, `F(0) v- = (h - c/24) v+`.
    Pair,
    /// One-dimensional: `F(0) v = s v` with `s^2 = h - c/24`.
    Eigen(C),
}

/// Verma module for the Ramond algebra on lowest weight `h`.
pub fn build_ramond<C: Coeff>(c: C, h: C, lowest: RamondLowest<C>, cutoff: &Exponent) -> Result<ModuleBuild<C>, BuildError> {
    let alg = Arc::new(SuperVirasoro::super_virasoro(c.clone(), true));
    let shift = h.clone() - c.clone() * C::from_frac(1, 24);
    let l0 = Mode::new(L, ex_int(1));
    let f0 = Mode::new(G, ex(1, 2));
    let mut meta = BTreeMap::new();
    meta.insert("lowest_weight".into(), h.to_string());
    let space = match &lowest {
        RamondLowest::Pair => {
            let mut zero_modes = BTreeMap::new();
            zero_modes.insert(l0, Matrix::identity(2).scale(&h));
            zero_modes.insert(f0, Matrix::from_rows(vec![vec![C::zero(), shift.clone()], vec![C::one(), C::zero()]]));
            meta.insert("f0".into(), "pair".into());
            LowestSpace { labels: vec!["v+".into(), "v-".into()], parities: vec![Parity::Even, Parity::Odd], zero_modes }
        }
        RamondLowest::Eigen(s) => {
            if s.clone() * s.clone() != shift {
                return Err(BuildError::Lowest(format!("F(0)^2 = {} but h - c/24 = {}", s.clone() * s.clone(), shift)));
            }
            let mut zero_modes = BTreeMap::new();
            zero_modes.insert(l0, Matrix::from_rows(vec![vec![h.clone()]]));
            zero_modes.insert(f0, Matrix::from_rows(vec![vec![s.clone()]]));
            meta.insert("f0".into(), s.to_string());
            LowestSpace { labels: vec!["v".into()], parities: vec![Parity::Even], zero_modes }
        }
    };
    let module = PbwModule::new("ramond", alg, vec![ex_int(1), ex(1, 2)], space)?;
    finish("ramond", module, cutoff, c, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcalc::Rational;
    use crate::statespace::Vector;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_frac(p, d)
    }

    #[test]
    fn virasoro_dimensions_and_l0() {
        let b = build_virasoro(q(1, 2), q(1, 3), &ex_int(4)).unwrap();
        let dims: Vec<usize> = b.space.dimensions().values().copied().collect();
        assert_eq!(dims, vec![1, 1, 2, 3, 5]);
        let l = b.field("L").unwrap();
        for e in b.space.basis() {
            let v = l.mode(&ex_int(1), e.id);
            let expect = Vector::term(e.id, q(1, 3) + exp_to_rational(&e.degree));
            assert_eq!(*v, expect);
        }
    }

    #[test]
    fn l2_lm2_on_lowest() {
        let c = q(7, 5);
        let h = q(2, 3);
        let b = build_virasoro(c.clone(), h.clone(), &ex_int(4)).unwrap();
        let l = b.field("L").unwrap();
        let v = b.module.lowest_vector(0);
        let lm2v = l.mode_vec(&ex_int(-1), &Vector::basis(v));
        let lhs = l.mode_vec(&ex_int(3), &lm2v);
        assert_eq!(lhs, Vector::term(v, q(4, 1) * h + c / q(2, 1)));
    }

    #[test]
    fn ns_vacuum_dimensions() {
        let b = build_ns_vacuum(q(1, 1), &ex_int(2)).unwrap();
        let dims: Vec<usize> = b.space.dimensions().values().copied().collect();
        assert_eq!(dims, vec![1, 0, 0, 1, 1]);
        let g = b.field("G").unwrap();
        let vac = b.module.lowest_vector(0);
        let gg = g.mode_vec(&ex_int(1), &g.mode(&ex_int(0), vac));
        let gg2 = g.mode_vec(&ex_int(0), &g.mode(&ex_int(1), vac));
        assert!((gg + gg2).is_zero());
    }

    #[test]
    fn ramond_f0_squared() {
        let c = q(3, 2);
        let h = q(5, 7);
        for lowest in [RamondLowest::Pair, RamondLowest::Eigen(q(1, 2))] {
            let h = if matches!(lowest, RamondLowest::Eigen(_)) { q(1, 4) + c.clone() / q(24, 1) } else { h.clone() };
            let b = build_ramond(c.clone(), h.clone(), lowest, &ex_int(3)).unwrap();
            let f = b.field("F").unwrap();
            assert_eq!(f.charge_index(), 1);
            let v = b.module.lowest_vector(0);
            let f0f0 = f.mode_vec(&ex(1, 2), &f.mode(&ex(1, 2), v));
            assert_eq!(f0f0, Vector::term(v, h - c.clone() / q(24, 1)));
        }
        assert!(build_ramond(c, h, RamondLowest::Eigen(q(1, 1)), &ex_int(2)).is_err());
    }
}

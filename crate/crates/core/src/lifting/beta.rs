//! Lift for the barycenter map by induction on the number of atoms.
//!
//! `ν = ν₁ ⊕ λ_k ⊙ δ_{x_k}` has `β(ν) = s(β(ν₁), x_k, (0, λ_k))`, so an
//! `s`-lift of the target gives a new barycenter for `ν₁` (lifted
//! recursively) and a new last atom.

use serde::Serialize;

use crate::barycenter::{barycenter, barycenter_of_finite_measures};
use crate::error::{Error, Result};
use crate::measure::IdemMeasure;
use crate::params::ConvexParams;
use crate::scalar::{Rational, TropScalar};
use crate::space::{to_dense, FiniteMeasure, PointMeasure};
use crate::vector::TropVector;

use super::finite::lift_s_finite;
use super::interval::lift_s_box;
use super::{Branch, CaseTag, LiftWitness};

/// A compactum with a barycenter map and an `s`-lift oracle.
pub trait Host {
    type Point: Ord + Clone + std::fmt::Debug;

    fn barycenter(&self, nu: &IdemMeasure<Self::Point>) -> Result<Self::Point>;

    fn lift_s(
        &self,
        x: &Self::Point,
        y: &Self::Point,
        params: &ConvexParams,
        target: &Self::Point,
    ) -> Result<LiftWitness<Self::Point>>;

    /// Checks that a point belongs to the host.
    fn contains(&self, x: &Self::Point) -> Result<bool>;
}

/// The box `∏ [lo_j, hi_j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxHost {
    pub lo: TropVector,
    pub hi: TropVector,
}

impl BoxHost {
    pub fn new(lo: TropVector, hi: TropVector) -> Result<Self> {
        lo.check_dim(&hi)?;
        lo.ensure_finite()?;
        hi.ensure_finite()?;
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| a > b) {
            return Err(Error::Invalid("box lower corner exceeds upper corner".into()));
        }
        Ok(BoxHost { lo, hi })
    }

    /// `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Result<Self> {
        BoxHost::new(
            TropVector::from_rationals(std::iter::repeat_n(lo, dim)),
            TropVector::from_rationals(std::iter::repeat_n(hi, dim)),
        )
    }
}

impl Host for BoxHost {
    type Point = TropVector;

    fn barycenter(&self, nu: &PointMeasure) -> Result<TropVector> {
        barycenter(nu)
    }

    fn lift_s(&self, x: &TropVector, y: &TropVector, params: &ConvexParams, target: &TropVector) -> Result<LiftWitness<TropVector>> {
        lift_s_box(x, y, params, target, &self.lo, &self.hi)
    }

    fn contains(&self, x: &TropVector) -> Result<bool> {
        self.lo.check_dim(x)?;
        Ok(x.is_finite() && (0..x.dim()).all(|j| self.lo.coord(j) <= x.coord(j) && x.coord(j) <= self.hi.coord(j)))
    }
}

/// `IX` for a finite space of `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureHost {
    pub n: usize,
}

impl Host for MeasureHost {
    type Point = FiniteMeasure;

    fn barycenter(&self, nu: &IdemMeasure<FiniteMeasure>) -> Result<FiniteMeasure> {
        barycenter_of_finite_measures(nu, self.n)
    }

    fn lift_s(
        &self,
        x: &FiniteMeasure,
        y: &FiniteMeasure,
        params: &ConvexParams,
        target: &FiniteMeasure,
    ) -> Result<LiftWitness<FiniteMeasure>> {
        lift_s_finite(x, y, params, target, self.n)
    }

    fn contains(&self, x: &FiniteMeasure) -> Result<bool> {
        Ok(to_dense(x, self.n).is_ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaLift<P: Ord> {
    pub measure: IdemMeasure<P>,
    /// Case tags of each inductive step, outermost first.
    pub cases: Vec<CaseTag>,
}

/// Finds `ν'` with `β(ν') = target`.
pub fn lift_beta<H: Host>(host: &H, nu: &IdemMeasure<H::Point>, target: &H::Point) -> Result<BetaLift<H::Point>> {
    if !host.contains(target)? {
        return Err(Error::Invalid(format!("target {target:?} lies outside the host")));
    }
    let atoms: Vec<(H::Point, Rational)> = nu.atoms().map(|(x, w)| (x.clone(), w.clone())).collect();
    let lifted = lift_atoms(host, atoms, target)?;
    debug_assert_eq!(host.barycenter(&lifted.measure).ok().as_ref(), Some(target));
    Ok(lifted)
}

/// Stable reordering so that a zero-weight atom is among the first `k − 1`.
fn reorder<P>(mut atoms: Vec<(P, Rational)>) -> Result<Vec<(P, Rational)>> {
    let k = atoms.len();
    if atoms[..k - 1].iter().any(|(_, w)| num_traits::Zero::is_zero(w)) {
        return Ok(atoms);
    }
    let pos = atoms.iter().position(|(_, w)| num_traits::Zero::is_zero(w)).ok_or(Error::NoZeroWeightPrefix)?;
    let zero = atoms.remove(pos);
    atoms.insert(0, zero);
    Ok(atoms)
}

fn lift_atoms<H: Host>(host: &H, atoms: Vec<(H::Point, Rational)>, target: &H::Point) -> Result<BetaLift<H::Point>> {
    if atoms.len() == 1 {
        return Ok(BetaLift { measure: IdemMeasure::dirac(target.clone()), cases: vec![CaseTag::new(Branch::BetaBase)] });
    }
    let mut atoms = reorder(atoms)?;
    let (x_k, lambda_k) = atoms.pop().expect("k >= 2");
    let nu1 = IdemMeasure::from_weights(atoms.iter().map(|(x, w)| (x.clone(), TropScalar::Finite(w.clone()))))?;
    let b1 = host.barycenter(&nu1)?;
    let params = ConvexParams::new(TropScalar::zero(), TropScalar::Finite(lambda_k))?;
    let w = host.lift_s(&b1, &x_k, &params, target)?;
    let inner = lift_atoms(host, atoms, &w.first)?;
    let last = IdemMeasure::dirac(w.second);
    let measure = IdemMeasure::combine(&inner.measure, &last, &w.params);
    let mut cases = w.cases;
    cases.extend(inner.cases);
    Ok(BetaLift { measure, cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, rat};
    use crate::space::from_dense;
    use crate::vector::tv;

    fn square() -> BoxHost {
        BoxHost::cube(2, rat("-2"), rat("0")).unwrap()
    }

    fn y_nu() -> PointMeasure {
        PointMeasure::from_weights([(tv(&["-2", "-1"]), q("0")), (tv(&["-1", "-2"]), q("0"))]).unwrap()
    }

    #[test]
    fn single_atom_moves_to_target() {
        let nu = PointMeasure::dirac(tv(&["-1", "-1"]));
        let lifted = lift_beta(&square(), &nu, &tv(&["-1/3", "-2"])).unwrap();
        assert_eq!(lifted.measure, PointMeasure::dirac(tv(&["-1/3", "-2"])));
    }

    #[test]
    fn identity_on_y_measure() {
        let lifted = lift_beta(&square(), &y_nu(), &tv(&["-1", "-1"])).unwrap();
        assert_eq!(lifted.measure, y_nu());
    }

    #[test]
    fn nearby_target_on_y_measure() {
        let target = tv(&["-1", "-9/10"]);
        let lifted = lift_beta(&square(), &y_nu(), &target).unwrap();
        assert_eq!(barycenter(&lifted.measure).unwrap(), target);
        assert!(crate::space::default_point_dist(&lifted.measure, &y_nu()).unwrap() < 0.1);
    }

    #[test]
    fn zero_weight_atom_is_moved_forward() {
        let atoms = vec![(1, rat("-1")), (2, rat("-2")), (3, rat("0"))];
        let out = reorder(atoms).unwrap();
        assert_eq!(out.iter().map(|a| a.0).collect::<Vec<_>>(), vec![3, 1, 2]);
    }

    #[test]
    fn measures_of_measures() {
        let host = MeasureHost { n: 2 };
        let d0 = from_dense(&[q("0"), TropScalar::NegInf]).unwrap();
        let d1 = from_dense(&[TropScalar::NegInf, q("0")]).unwrap();
        let big = IdemMeasure::from_weights([(d0, q("0")), (d1, q("-1/2"))]).unwrap();
        let target = from_dense(&[q("0"), q("-3/8")]).unwrap();
        let lifted = lift_beta(&host, &big, &target).unwrap();
        assert_eq!(host.barycenter(&lifted.measure).unwrap(), target);
    }
}

//! The idempotent barycenter map.
//!
//! For a finite-support measure on points of ℝ^d, coordinate `j` of the
//! barycenter is the measure evaluated on the projection `x ↦ x_j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::TropPolytope;
use crate::measure::IdemMeasure;
use crate::scalar::TropScalar;
use crate::space::PointMeasure;
use crate::vector::TropVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarycenterResult {
    pub point: TropVector,
    /// Whether membership in a host polytope was checked.
    pub membership_checked: bool,
    /// Outcome of the check; `true` when unchecked.
    pub in_host: bool,
}

/// `β(μ)`: coordinatewise `max_x (d_μ(x) + x_j)`.
pub fn barycenter(mu: &PointMeasure) -> Result<TropVector> {
    let mut atoms = mu.atoms();
    let (first, _) = atoms.next().expect("canonical measures have nonempty support");
    let dim = first.dim();
    for x in mu.support() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.dim() });
        }
        if !x.is_finite() {
            return Err(Error::UnembeddedAtom(format!("atom {x} has a non-finite coordinate")));
        }
    }
    let coords = (0..dim)
        .map(|j| TropScalar::Finite(mu.eval_with(|x| x.coord(j).as_rational().cloned().expect("checked finite"))))
        .collect();
    Ok(TropVector::new(coords))
}

/// Barycenter plus a membership check against the host polytope.
pub fn barycenter_in(mu: &PointMeasure, host: &TropPolytope) -> Result<BarycenterResult> {
    let point = barycenter(mu)?;
    let in_host = host.contains(&point)?;
    Ok(BarycenterResult { point, membership_checked: true, in_host })
}

/// `β_{IX}(⊕ s_i ⊙ δ_{μ_i}) = ⊕ s_i ⊙ μ_i`.
pub fn barycenter_of_measures<A: Ord + Clone>(m: &IdemMeasure<IdemMeasure<A>>) -> IdemMeasure<A> {
    let weights: Vec<TropScalar> = m.atoms().map(|(_, w)| TropScalar::Finite(w.clone())).collect();
    IdemMeasure::join(weights.iter().zip(m.support())).expect("outer measure is normalized")
}

/// [`barycenter_of_measures`] for measures on a finite space of `n` points.
pub fn barycenter_of_finite_measures(m: &IdemMeasure<IdemMeasure<usize>>, n: usize) -> Result<IdemMeasure<usize>> {
    for inner in m.support() {
        if let Some(x) = inner.support().find(|&&x| x >= n) {
            return Err(Error::SpaceMismatch(format!("inner measure has atom {x} outside {n} points")));
        }
    }
    Ok(barycenter_of_measures(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{s_point, ConvexParams};
    use crate::scalar::q;
    use crate::space::from_dense;
    use crate::vector::tv;

    #[test]
    fn y_measure_has_barycenter_c() {
        let nu = PointMeasure::from_weights([(tv(&["-2", "-1"]), q("0")), (tv(&["-1", "-2"]), q("0"))]).unwrap();
        assert_eq!(barycenter(&nu).unwrap(), tv(&["-1", "-1"]));
    }

    #[test]
    fn dirac_is_fixed() {
        let x = tv(&["-3/7", "5"]);
        assert_eq!(barycenter(&PointMeasure::dirac(x.clone())).unwrap(), x);
    }

    #[test]
    fn mixed_weights() {
        let mu = PointMeasure::from_weights([(tv(&["1", "0"]), q("-1/2")), (tv(&["2/10", "3/10"]), q("0"))]).unwrap();
        let b = barycenter(&mu).unwrap();
        assert_eq!(b, tv(&["1/2", "3/10"]));
        // cross-check: same value as evaluating on each projection
        for j in 0..2 {
            let direct = mu.eval_with(|x| x.coord(j).as_rational().unwrap().clone());
            assert_eq!(b.coord(j), &TropScalar::Finite(direct));
        }
    }

    #[test]
    fn rejects_mixed_dimensions_and_infinite_atoms() {
        let mu = PointMeasure::from_weights([(tv(&["0"]), q("0")), (tv(&["0", "1"]), q("-1"))]).unwrap();
        assert!(barycenter(&mu).is_err());
        let mu = PointMeasure::dirac(tv(&["-inf", "0"]));
        assert!(matches!(barycenter(&mu), Err(Error::UnembeddedAtom(_))));
    }

    #[test]
    fn barycenter_of_measures_examples() {
        let d0 = from_dense(&[q("0"), TropScalar::NegInf]).unwrap();
        let d1 = from_dense(&[TropScalar::NegInf, q("0")]).unwrap();
        let single = IdemMeasure::dirac(d0.clone());
        assert_eq!(barycenter_of_measures(&single), d0);
        let m = IdemMeasure::from_weights([(d0.clone(), q("0")), (d1.clone(), q("-1"))]).unwrap();
        assert_eq!(barycenter_of_finite_measures(&m, 2).unwrap(), from_dense(&[q("0"), q("-1")]).unwrap());
        assert!(barycenter_of_finite_measures(&m, 1).is_err());
    }

    #[test]
    fn affinity_on_two_measures() {
        let mu = PointMeasure::from_weights([(tv(&["-1", "0"]), q("0")), (tv(&["0", "-3"]), q("-1/4"))]).unwrap();
        let nu = PointMeasure::from_weights([(tv(&["-2", "-2"]), q("0")), (tv(&["-1/2", "-1"]), q("-2"))]).unwrap();
        let params = ConvexParams::with_t(q("-1/3")).unwrap();
        let lhs = barycenter(&IdemMeasure::combine(&mu, &nu, &params)).unwrap();
        let rhs = s_point(&barycenter(&mu).unwrap(), &barycenter(&nu).unwrap(), &params).unwrap();
        assert_eq!(lhs, rhs);
    }
}

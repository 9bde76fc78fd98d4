//! Lifts for `s` on a closed interval and on a box `∏ [lo_j, hi_j]`.
//!
//! The interval construction never changes the parameters, which is what
//! lets the box lift share them across coordinates.

use crate::error::{Error, Result};
use crate::params::{s_point, ConvexParams};
use crate::scalar::TropScalar;
use crate::vector::TropVector;

use super::{Branch, CaseTag, LiftWitness};

fn in_bounds(v: &TropScalar, lo: &TropScalar, hi: &TropScalar) -> bool {
    lo <= v && v <= hi
}

fn require(ok: bool, branch: Branch, constraint: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::outside(branch.label(), constraint()))
    }
}

/// Finds `(x', y')` in `[lo, hi]` with `s(x', y', params) = target`.
/// The returned params are always the input params.
pub fn lift_s_interval(
    x: &TropScalar,
    y: &TropScalar,
    params: &ConvexParams,
    target: &TropScalar,
    bounds: (&TropScalar, &TropScalar),
) -> Result<LiftWitness<TropScalar>> {
    let (lo, hi) = bounds;
    for (name, v) in [("x", x), ("y", y), ("target", target), ("lo", lo), ("hi", hi)] {
        if !v.is_finite() {
            return Err(Error::Invalid(format!("{name} = {v} must be finite")));
        }
    }
    if lo > hi {
        return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
    }
    for (name, v) in [("x", x), ("y", y), ("target", target)] {
        if !in_bounds(v, lo, hi) {
            return Err(Error::Invalid(format!("{name} = {v} outside [{lo}, {hi}]")));
        }
    }
    if !params.p().is_zero() {
        return Ok(lift_p_zero(y, x, &params.swapped(), target, lo, hi)?.swapped());
    }
    lift_p_zero(x, y, params, target, lo, hi)
}

fn lift_p_zero(
    x: &TropScalar,
    y: &TropScalar,
    params: &ConvexParams,
    target: &TropScalar,
    lo: &TropScalar,
    hi: &TropScalar,
) -> Result<LiftWitness<TropScalar>> {
    let alpha = params.t();
    let ax = alpha.odot(x);
    let witness = |first: TropScalar, second: TropScalar, branch| LiftWitness {
        first,
        second,
        params: params.clone(),
        cases: vec![CaseTag::new(branch)],
    };
    if ax < *y {
        let br = Branch::IntervalBelow;
        require(*target > ax, br, || format!("target = {target} <= α ⊙ x = {ax}"))?;
        return Ok(witness(x.clone(), target.clone(), br));
    }
    let shifted = target.residual(alpha);
    if ax > *y {
        let br = Branch::IntervalAbove;
        require(target > y, br, || format!("target = {target} <= y = {y}"))?;
        require(in_bounds(&shifted, lo, hi), br, || format!("target ⊖ α = {shifted} outside [{lo}, {hi}]"))?;
        return Ok(witness(shifted, y.clone(), br));
    }
    let br = Branch::IntervalTie;
    require(in_bounds(&shifted, lo, hi), br, || format!("target ⊖ α = {shifted} outside [{lo}, {hi}]"))?;
    Ok(witness(shifted, target.clone(), br))
}

/// Coordinatewise interval lift on the box `[lo, hi]` with shared params.
pub fn lift_s_box(
    x: &TropVector,
    y: &TropVector,
    params: &ConvexParams,
    target: &TropVector,
    lo: &TropVector,
    hi: &TropVector,
) -> Result<LiftWitness<TropVector>> {
    for v in [y, target, lo, hi] {
        x.check_dim(v)?;
    }
    let mut first = Vec::with_capacity(x.dim());
    let mut second = Vec::with_capacity(x.dim());
    let mut cases = Vec::with_capacity(x.dim());
    for j in 0..x.dim() {
        let w = lift_s_interval(x.coord(j), y.coord(j), params, target.coord(j), (lo.coord(j), hi.coord(j)))
            .map_err(|e| match e {
                Error::OutsideValidityRegion { case, constraint } => {
                    Error::OutsideValidityRegion { case: format!("coordinate {j} / {case}"), constraint }
                }
                other => other,
            })?;
        assert_eq!(w.params, *params, "interval lifts keep their params");
        first.push(w.first);
        second.push(w.second);
        cases.extend(w.cases);
    }
    let witness = LiftWitness { first: TropVector::new(first), second: TropVector::new(second), params: params.clone(), cases };
    debug_assert_eq!(s_point(&witness.first, &witness.second, &witness.params).ok().as_ref(), Some(target));
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::vector::tv;

    fn interval(x: &str, y: &str, p: &ConvexParams, target: &str) -> Result<LiftWitness<TropScalar>> {
        lift_s_interval(&q(x), &q(y), p, &q(target), (&q("-2"), &q("0")))
    }

    #[test]
    fn below_case_example() {
        let p = ConvexParams::with_t(q("-3/10")).unwrap();
        let w = interval("-1", "-1/2", &p, "-9/20").unwrap();
        assert_eq!((w.first.clone(), w.second.clone()), (q("-1"), q("-9/20")));
        assert_eq!(w.params, p);
        assert_eq!(p.apply(&w.first, &w.second), q("-9/20"));
    }

    #[test]
    fn above_and_tie_cases() {
        let p = ConvexParams::with_t(q("-1/4")).unwrap();
        let w = interval("-1/2", "-3/2", &p, "-5/8").unwrap();
        assert_eq!(w.cases[0].branch, Branch::IntervalAbove);
        assert_eq!((w.first.clone(), w.second.clone()), (q("-3/8"), q("-3/2")));
        let w = interval("-1", "-5/4", &p, "-9/8").unwrap();
        assert_eq!(w.cases[0].branch, Branch::IntervalTie);
        assert_eq!(p.apply(&w.first, &w.second), q("-9/8"));
    }

    #[test]
    fn absorbing_and_mirrored() {
        let w = interval("-1", "-1/2", &ConvexParams::second(), "-2").unwrap();
        assert_eq!((w.first, w.second), (q("-1"), q("-2")));
        let p = ConvexParams::with_p(q("-3/10")).unwrap();
        let w = interval("-1/2", "-1", &p, "-9/20").unwrap();
        assert_eq!((w.first.clone(), w.second.clone()), (q("-9/20"), q("-1")));
        assert!(w.cases[0].mirrored);
        assert_eq!(w.params, p);
    }

    #[test]
    fn boundary_refusal() {
        // x sits at the upper end, so target ⊖ α leaves the interval
        let p = ConvexParams::with_t(q("-1/4")).unwrap();
        let err = interval("0", "-1", &p, "-1/8").unwrap_err();
        assert!(err.is_validity_refusal());
    }

    #[test]
    fn box_shares_params() {
        let p = ConvexParams::with_t(q("-3/10")).unwrap();
        let (lo, hi) = (tv(&["-2", "-2"]), tv(&["0", "0"]));
        let x = tv(&["-1", "-1/2"]);
        let y = tv(&["-1/2", "-3/2"]);
        let target = tv(&["-9/20", "-3/4"]);
        let w = lift_s_box(&x, &y, &p, &target, &lo, &hi).unwrap();
        assert_eq!(w.params, p);
        assert_eq!(s_point(&w.first, &w.second, &w.params).unwrap(), target);
        let image = s_point(&x, &y, &p).unwrap();
        let id = lift_s_box(&x, &y, &p, &image, &lo, &hi).unwrap();
        assert_eq!((id.first, id.second), (x, y));
    }
}

//! Lift for `s_IX` on a finite space `X = {0, …, n−1}`.
//!
//! Works on dense weight vectors. After mirroring we may assume `p = 0`.

use crate::error::{Error, Result};
use crate::measure::IdemMeasure;
use crate::params::ConvexParams;
use crate::scalar::TropScalar;
use crate::space::{from_dense, to_dense, FiniteMeasure};

use super::{Branch, CaseTag, LiftWitness};

type Dense = Vec<TropScalar>;

struct DenseLift {
    first: Dense,
    second: Dense,
    params: ConvexParams,
    tag: CaseTag,
}

/// Finds `(λ', β', params')` with `t' ⊙ λ' ⊕ p' ⊙ β' = target`.
///
/// When `target = combine(λ, β, params)` the inputs are returned unchanged.
pub fn lift_s_finite(
    lambda: &FiniteMeasure,
    beta: &FiniteMeasure,
    params: &ConvexParams,
    target: &FiniteMeasure,
    n: usize,
) -> Result<LiftWitness<FiniteMeasure>> {
    let l = to_dense(lambda, n)?;
    let b = to_dense(beta, n)?;
    let a = to_dense(target, n)?;
    let lift = lift_dense(&l, &b, params, &a)?;
    let first = from_dense(&lift.first)?;
    let second = from_dense(&lift.second)?;
    debug_assert_eq!(IdemMeasure::combine(&first, &second, &lift.params), *target);
    Ok(LiftWitness { first, second, params: lift.params, cases: vec![lift.tag] })
}

fn lift_dense(l: &Dense, b: &Dense, params: &ConvexParams, a: &Dense) -> Result<DenseLift> {
    if !params.p().is_zero() {
        let lift = lift_dense(b, l, &params.swapped(), a)?;
        return Ok(DenseLift {
            first: lift.second,
            second: lift.first,
            params: lift.params.swapped(),
            tag: lift.tag.mirror(),
        });
    }
    match params.t() {
        TropScalar::NegInf => Ok(DenseLift {
            first: l.clone(),
            second: a.clone(),
            params: ConvexParams::second(),
            tag: CaseTag::new(Branch::Absorbing),
        }),
        t if t.is_zero() => balanced(l, b, a),
        t => unbalanced(l, b, t, a),
    }
}

fn zero_in(a: &Dense, part: impl Fn(usize) -> bool) -> Option<usize> {
    (0..a.len()).find(|&i| part(i) && a[i].is_zero())
}

fn require(ok: bool, branch: Branch, constraint: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::outside(branch.label(), constraint()))
    }
}

fn balanced(l: &Dense, b: &Dense, a: &Dense) -> Result<DenseLift> {
    let n = a.len();
    let in_a = |i: usize| l[i] < b[i];
    let in_b = |i: usize| l[i] > b[i];
    let in_c = |i: usize| l[i] == b[i];
    if zero_in(a, in_c).is_some() {
        let br = Branch::BalancedC;
        for i in 0..n {
            if in_a(i) {
                require(a[i] >= l[i], br, || format!("target[{i}] = {} < λ[{i}] = {} on A", a[i], l[i]))?;
            }
            if in_b(i) {
                require(a[i] >= b[i], br, || format!("target[{i}] = {} < β[{i}] = {} on B", a[i], b[i]))?;
            }
        }
        let first = (0..n).map(|i| if in_a(i) { l[i].clone() } else { a[i].clone() }).collect();
        let second = (0..n).map(|i| if in_b(i) { b[i].clone() } else { a[i].clone() }).collect();
        return Ok(DenseLift { first, second, params: ConvexParams::balanced(), tag: CaseTag::new(br) });
    }
    if zero_in(a, in_a).is_some() {
        return balanced_a(l, b, a);
    }
    if zero_in(a, in_b).is_some() {
        let lift = balanced_a(b, l, a)?;
        return Ok(DenseLift {
            first: lift.second,
            second: lift.first,
            params: lift.params.swapped(),
            tag: CaseTag::new(Branch::BalancedB),
        });
    }
    Err(Error::outside("t=p=0", "target has no zero weight"))
}

/// `i0 ∈ A`: shrink the first parameter to `c = max{target_i | i ∉ A}`.
fn balanced_a(l: &Dense, b: &Dense, a: &Dense) -> Result<DenseLift> {
    let br = Branch::BalancedA;
    let n = a.len();
    let in_a = |i: usize| l[i] < b[i];
    let in_b = |i: usize| l[i] > b[i];
    let c = (0..n).filter(|&i| !in_a(i)).map(|i| a[i].clone()).max().unwrap_or(TropScalar::NegInf);
    require(c.is_finite(), br, || "c = max{target_i | i ∉ A} is -inf".into())?;
    for i in 0..n {
        if in_a(i) {
            let bound = c.odot(&l[i]);
            require(a[i] >= bound, br, || format!("target[{i}] = {} < c ⊙ λ[{i}] = {bound} on A", a[i]))?;
        }
        if in_b(i) {
            require(a[i] >= b[i], br, || format!("target[{i}] = {} < β[{i}] = {} on B", a[i], b[i]))?;
        }
    }
    let first = (0..n).map(|i| if in_a(i) { l[i].clone() } else { a[i].residual(&c) }).collect();
    let second = (0..n).map(|i| if in_b(i) { b[i].clone() } else { a[i].clone() }).collect();
    let params = ConvexParams::new(c, TropScalar::zero())?;
    Ok(DenseLift { first, second, params, tag: CaseTag::new(br) })
}

/// `t < p = 0` with `t` finite.
fn unbalanced(l: &Dense, b: &Dense, t: &TropScalar, a: &Dense) -> Result<DenseLift> {
    let n = a.len();
    let in_a = |i: usize| t.odot(&l[i]) < b[i];
    let in_b = |i: usize| t.odot(&l[i]) > b[i];
    require(zero_in(a, in_a).is_some(), Branch::UnbalancedDEmpty, || "target has no zero weight on A".into())?;
    let d: Vec<usize> = (0..n).filter(|&i| !in_a(i) && l[i].is_finite()).collect();
    let (c, br) = if d.is_empty() {
        (TropScalar::zero(), Branch::UnbalancedDEmpty)
    } else if (0..n).any(|s| in_a(s) && l[s].is_zero()) {
        let c = d.iter().map(|&i| a[i].residual(t).residual(&l[i])).max().expect("D nonempty");
        (c, Branch::UnbalancedZeroInA)
    } else {
        let c = d.iter().map(|&i| a[i].residual(t)).max().expect("D nonempty");
        (c, Branch::UnbalancedZeroOutsideA)
    };
    require(c.is_finite(), br, || "c is -inf".into())?;
    let t_new = t.odot(&c);
    require(t_new <= TropScalar::zero(), br, || format!("t ⊙ c = {t_new} > 0"))?;
    for i in 0..n {
        if in_a(i) {
            let bound = t_new.odot(&l[i]);
            require(a[i] >= bound, br, || format!("target[{i}] = {} < t' ⊙ λ[{i}] = {bound} on A", a[i]))?;
        } else {
            require(a[i] <= t_new, br, || format!("target[{i}] = {} > t ⊙ c = {t_new} off A", a[i]))?;
        }
        if in_b(i) {
            require(a[i] >= b[i], br, || format!("target[{i}] = {} < β[{i}] = {} on B", a[i], b[i]))?;
        }
    }
    let first = (0..n).map(|i| if in_a(i) { l[i].clone() } else { a[i].residual(&t_new) }).collect();
    let second = (0..n).map(|i| if in_b(i) { b[i].clone() } else { a[i].clone() }).collect();
    let params = ConvexParams::new(t_new, TropScalar::zero())?;
    Ok(DenseLift { first, second, params, tag: CaseTag::new(br) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn m(w: &[&str]) -> FiniteMeasure {
        from_dense(&w.iter().map(|s| q(s)).collect::<Vec<_>>()).unwrap()
    }

    fn check(l: &FiniteMeasure, b: &FiniteMeasure, p: &ConvexParams, target: &FiniteMeasure, n: usize) -> LiftWitness<FiniteMeasure> {
        let w = lift_s_finite(l, b, p, target, n).unwrap();
        assert_eq!(IdemMeasure::combine(&w.first, &w.second, &w.params), *target);
        w
    }

    #[test]
    fn two_diracs_balanced() {
        let (l, b) = (m(&["0", "-inf"]), m(&["-inf", "0"]));
        let w = check(&l, &b, &ConvexParams::balanced(), &m(&["-1/10", "0"]), 2);
        assert_eq!(w.first, l);
        assert_eq!(w.second, b);
        assert_eq!(w.params, ConvexParams::with_t(q("-1/10")).unwrap());
        assert_eq!(w.cases[0].branch, Branch::BalancedA);
    }

    #[test]
    fn absorbing_case_returns_target() {
        let (l, b) = (m(&["0", "-inf"]), m(&["-inf", "0"]));
        let target = m(&["-3", "0"]);
        let w = check(&l, &b, &ConvexParams::second(), &target, 2);
        assert_eq!((w.first, w.second), (l, target));
        assert_eq!(w.params, ConvexParams::second());
    }

    #[test]
    fn identity_in_every_branch() {
        let cases = [
            (m(&["0", "-1", "-inf"]), m(&["0", "-2", "-1/2"]), ConvexParams::balanced()),
            (m(&["-1", "0", "-3"]), m(&["0", "-2", "-1/2"]), ConvexParams::balanced()),
            (m(&["-1", "0", "-3"]), m(&["0", "-2", "-1/2"]), ConvexParams::with_t(q("-1/4")).unwrap()),
            (m(&["0", "-1/8", "-3"]), m(&["-2", "0", "-1/2"]), ConvexParams::with_t(q("-1/4")).unwrap()),
            (m(&["0", "-1", "-inf"]), m(&["0", "-2", "-1/2"]), ConvexParams::with_t(q("-1/4")).unwrap()),
            (m(&["0", "-1/8", "-3"]), m(&["-2", "0", "-1/2"]), ConvexParams::with_p(q("-5/4")).unwrap()),
        ];
        for (l, b, p) in cases {
            let image = IdemMeasure::combine(&l, &b, &p);
            let w = check(&l, &b, &p, &image, 3);
            assert_eq!((&w.first, &w.second, &w.params), (&l, &b, &p), "{}", w.cases[0]);
        }
    }

    #[test]
    fn unbalanced_small_perturbation() {
        let l = m(&["-1", "0", "-3"]);
        let b = m(&["0", "-2", "-1/2"]);
        let p = ConvexParams::with_t(q("-1/4")).unwrap();
        // image = (0, -1/4, -1/2)
        let w = check(&l, &b, &p, &m(&["0", "-3/8", "-1/2"]), 3);
        assert_eq!(w.cases[0].branch, Branch::UnbalancedZeroOutsideA);
        assert_eq!(w.params, ConvexParams::with_t(q("-3/8")).unwrap());
    }

    #[test]
    fn far_target_is_refused() {
        let l = m(&["-1", "0", "-3"]);
        let b = m(&["0", "-2", "-1/2"]);
        let p = ConvexParams::with_t(q("-1/4")).unwrap();
        let err = lift_s_finite(&l, &b, &p, &m(&["-1", "0", "-1/2"]), 3).unwrap_err();
        assert!(err.is_validity_refusal(), "{err}");
    }
}

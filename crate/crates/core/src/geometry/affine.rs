use serde::Serialize;

use crate::error::Result;
use crate::scalar::TropScalar;
use crate::vector::TropVector;

use super::polytope::TropPolytope;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineCounterexample {
    pub a: TropVector,
    pub b: TropVector,
    pub alpha: TropScalar,
    pub lhs: TropVector,
    pub rhs: TropVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineVerdict {
    pub affine: bool,
    pub checked: usize,
    pub counterexample: Option<AffineCounterexample>,
}

/// Checks `f(α ⊙ a ⊕ b) = α ⊙ f(a) ⊕ f(b)` on every pair of `samples` and
/// every `α` in `alphas`; stops at the first failure.
pub fn affine_check(
    f: impl Fn(&TropVector) -> TropVector,
    samples: &[TropVector],
    alphas: &[TropScalar],
) -> Result<AffineVerdict> {
    let mut checked = 0;
    for a in samples {
        let fa = f(a);
        for b in samples {
            let fb = f(b);
            for alpha in alphas {
                let lhs = f(&a.shift(alpha).oplus(b)?);
                let rhs = fa.shift(alpha).oplus(&fb)?;
                checked += 1;
                if lhs != rhs {
                    return Ok(AffineVerdict {
                        affine: false,
                        checked,
                        counterexample: Some(AffineCounterexample {
                            a: a.clone(),
                            b: b.clone(),
                            alpha: alpha.clone(),
                            lhs,
                            rhs,
                        }),
                    });
                }
            }
        }
    }
    Ok(AffineVerdict { affine: true, checked, counterexample: None })
}

/// [`affine_check`] on the grid points of a polytope.
pub fn affine_check_on(
    f: impl Fn(&TropVector) -> TropVector,
    domain: &TropPolytope,
    levels: &[TropScalar],
) -> Result<AffineVerdict> {
    affine_check(f, &domain.grid_points(levels), levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::coefficient_levels;
    use crate::scalar::{q, rat};
    use crate::vector::tv;

    fn y() -> TropPolytope {
        TropPolytope::new(vec![tv(&["-2", "-1"]), tv(&["-1", "-2"]), tv(&["0", "0"])]).unwrap()
    }

    #[test]
    fn projection_is_affine() {
        let v = affine_check_on(|x| TropVector::new(vec![x.coord(0).clone()]), &y(), &coefficient_levels(&rat("1/2"), 4))
            .unwrap();
        assert!(v.affine, "{v:?}");
        assert!(v.checked > 100);
    }

    #[test]
    fn join_with_constant_is_affine() {
        let c = tv(&["-3/2", "-1/4"]);
        let v = affine_check_on(|x| x.oplus(&c).unwrap(), &y(), &coefficient_levels(&rat("1/2"), 4)).unwrap();
        assert!(v.affine, "{v:?}");
    }

    #[test]
    fn doubling_is_not_affine() {
        let double = |x: &TropVector| {
            TropVector::new(x.coords().iter().map(|c| c.odot(c)).collect())
        };
        let v = affine_check_on(double, &y(), &coefficient_levels(&rat("1/2"), 4)).unwrap();
        assert!(!v.affine);
        let cx = v.counterexample.unwrap();
        assert_ne!(cx.lhs, cx.rhs);
        assert!(cx.alpha < q("0"));
    }
}

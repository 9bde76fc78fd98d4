use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, TropScalar};
use crate::vector::TropVector;

/// Normalized max-plus hull `{⊕ λ_i ⊙ v_i | max λ_i = 0}` of finitely many
/// generators with finite coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope", into = "RawPolytope")]
pub struct TropPolytope {
    dim: usize,
    generators: Vec<TropVector>,
}

#[derive(Serialize, Deserialize)]
struct RawPolytope {
    generators: Vec<TropVector>,
}

impl TryFrom<RawPolytope> for TropPolytope {
    type Error = Error;

    fn try_from(raw: RawPolytope) -> Result<Self> {
        TropPolytope::new(raw.generators)
    }
}

impl From<TropPolytope> for RawPolytope {
    fn from(p: TropPolytope) -> Self {
        RawPolytope { generators: p.generators }
    }
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Greatest solution `λ*_i = min_j (x_j − v_{i,j})` of `⊕ λ_i ⊙ v_i ≤ x`.
    pub residual: Vec<TropScalar>,
    /// `min(λ*_i, 0)`; reproduces `x` with maximum `0` exactly when `member`.
    pub coefficients: Vec<TropScalar>,
}

impl TropPolytope {
    /// Deduplicates generators, keeping first occurrences in order.
    pub fn new(generators: Vec<TropVector>) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::Invalid("a polytope needs a generator".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::Invalid("generators must have positive dimension".into()));
        }
        let mut seen = BTreeSet::new();
        let mut unique = Vec::with_capacity(generators.len());
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.dim() });
            }
            g.ensure_finite()?;
            if seen.insert(g.clone()) {
                unique.push(g);
            }
        }
        Ok(TropPolytope { dim, generators: unique })
    }

    /// The box `∏ [lo_j, hi_j]` as the hull of its lower corner and the
    /// `d` corners raised along one axis.
    pub fn boxed(lo: &TropVector, hi: &TropVector) -> Result<Self> {
        lo.check_dim(hi)?;
        lo.ensure_finite()?;
        hi.ensure_finite()?;
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| a > b) {
            return Err(Error::Invalid("box lower corner exceeds upper corner".into()));
        }
        let mut gens = vec![lo.clone()];
        for j in 0..lo.dim() {
            let mut c = lo.coords().to_vec();
            c[j] = hi.coord(j).clone();
            gens.push(TropVector::new(c));
        }
        TropPolytope::new(gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[TropVector] {
        &self.generators
    }

    /// `⊕ λ_i ⊙ v_i`.
    pub fn combination(&self, lambdas: &[TropScalar]) -> Result<TropVector> {
        if lambdas.len() != self.generators.len() {
            return Err(Error::DimensionMismatch { expected: self.generators.len(), got: lambdas.len() });
        }
        let mut acc = TropVector::new(vec![TropScalar::NegInf; self.dim]);
        for (l, v) in lambdas.iter().zip(&self.generators) {
            acc = acc.oplus(&v.shift(l))?;
        }
        Ok(acc)
    }

    pub fn membership(&self, x: &TropVector) -> Result<Membership> {
        hull_membership(self, x)
    }

    pub fn contains(&self, x: &TropVector) -> Result<bool> {
        Ok(hull_membership(self, x)?.member)
    }

    /// The polytope spanned by all generators except `skip`.
    pub fn without(&self, skip: usize) -> Option<TropPolytope> {
        let rest: Vec<TropVector> =
            self.generators.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, g)| g.clone()).collect();
        if rest.is_empty() {
            None
        } else {
            TropPolytope::new(rest).ok()
        }
    }

    /// Points `⊕ λ_i ⊙ v_i` for every coefficient vector drawn from
    /// `levels` with maximum `0`, deduplicated and sorted.
    pub fn grid_points(&self, levels: &[TropScalar]) -> Vec<TropVector> {
        let k = self.generators.len();
        let mut out = BTreeSet::new();
        let mut idx = vec![0usize; k];
        loop {
            let lambdas: Vec<TropScalar> = idx.iter().map(|&i| levels[i].clone()).collect();
            if lambdas.iter().max().is_some_and(TropScalar::is_zero) {
                out.insert(self.combination(&lambdas).expect("matching lengths"));
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return out.into_iter().collect();
                }
                idx[pos] += 1;
                if idx[pos] < levels.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Residuation-based membership in the normalized hull.
///
/// `x ∈ P` iff the clipped residual coefficients `min(λ*_i, 0)` reproduce
/// `x` and reach `0`.
pub fn hull_membership(p: &TropPolytope, x: &TropVector) -> Result<Membership> {
    if x.dim() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: x.dim() });
    }
    x.ensure_finite()?;
    let residual: Vec<TropScalar> = p
        .generators
        .iter()
        .map(|v| {
            x.coords()
                .iter()
                .zip(v.coords())
                .map(|(xj, vj)| xj.residual(vj))
                .min()
                .expect("positive dimension")
        })
        .collect();
    let zero = TropScalar::zero();
    let coefficients: Vec<TropScalar> = residual.iter().map(|l| l.min_with(&zero)).collect();
    let reaches_zero = coefficients.iter().any(TropScalar::is_zero);
    let member = reaches_zero && p.combination(&coefficients)? == *x;
    Ok(Membership { member, residual, coefficients })
}

/// Uniform rational levels `{0, −step, …, −depth·step, −∞}`.
pub fn coefficient_levels(step: &Rational, depth: usize) -> Vec<TropScalar> {
    let mut levels: Vec<TropScalar> =
        (0..=depth).map(|k| TropScalar::Finite(-step * Rational::from_integer(k.into()))).collect();
    levels.push(TropScalar::NegInf);
    debug_assert!(levels[0] == TropScalar::Finite(Rational::zero()));
    levels
}

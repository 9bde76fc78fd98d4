//! Lifts through the pullback square of a surjection `f : X → Y`.
//!
//! Given `ν` on `X` and `(μ, a, params)` on `Y` with
//! `If(ν) = s(μ, a, params)`, find `(λ, η)` on `X` with `If(λ) = μ`,
//! `If(η) = a` and `s(λ, η, params) = ν`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::IdemMeasure;
use crate::params::ConvexParams;
use crate::scalar::TropScalar;
use crate::space::{from_dense, pushforward, to_dense, FiniteMap, FiniteMeasure};

/// The surjection `{0..n} → {0..n−1}` identifying `drop` with `keep` and
/// shifting later points down by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeMap {
    pub source_len: usize,
    pub keep: usize,
    pub drop: usize,
}

impl MergeMap {
    pub fn new(source_len: usize, keep: usize, drop: usize) -> Result<Self> {
        if source_len < 2 || keep >= drop || drop >= source_len {
            return Err(Error::Invalid(format!("invalid merge {keep} <- {drop} on {source_len} points")));
        }
        Ok(MergeMap { source_len, keep, drop })
    }

    /// Merges the last point into the one before it.
    pub fn normal(target_len: usize) -> Result<Self> {
        MergeMap::new(target_len + 1, target_len.wrapping_sub(1), target_len)
    }

    pub fn target_len(&self) -> usize {
        self.source_len - 1
    }

    pub fn apply(&self, x: usize) -> usize {
        if x < self.drop {
            x
        } else if x == self.drop {
            self.keep
        } else {
            x - 1
        }
    }

    pub fn as_map(&self) -> FiniteMap {
        FiniteMap::new((0..self.source_len).map(|x| self.apply(x)).collect(), self.target_len())
            .expect("merge images are in range")
    }
}

/// Checks `If(ν) = s(μ, a, params)` and reports the first bad coordinate.
fn check_consistency(nu: &FiniteMeasure, mu: &FiniteMeasure, a: &FiniteMeasure, params: &ConvexParams, f: &FiniteMap) -> Result<()> {
    let k = f.codomain();
    let pushed = to_dense(&pushforward(f, nu)?, k)?;
    let combined = to_dense(&IdemMeasure::combine(mu, a, params), k)?;
    match (0..k).find(|&y| pushed[y] != combined[y]) {
        None => Ok(()),
        Some(y) => Err(Error::InconsistentFiber {
            coordinate: y,
            detail: format!("If(ν) has weight {} but s(μ, a) has {}", pushed[y], combined[y]),
        }),
    }
}

/// Single-merge lift.
pub fn lift_merge_fiber(
    nu: &FiniteMeasure,
    mu: &FiniteMeasure,
    a: &FiniteMeasure,
    params: &ConvexParams,
    f: &MergeMap,
) -> Result<(FiniteMeasure, FiniteMeasure)> {
    check_consistency(nu, mu, a, params, &f.as_map())?;
    if !params.p().is_zero() {
        let (eta, lambda) = merge_p_zero(nu, a, mu, &params.swapped(), f)?;
        return Ok((lambda, eta));
    }
    merge_p_zero(nu, mu, a, params, f)
}

fn merge_p_zero(
    nu: &FiniteMeasure,
    mu: &FiniteMeasure,
    a: &FiniteMeasure,
    params: &ConvexParams,
    f: &MergeMap,
) -> Result<(FiniteMeasure, FiniteMeasure)> {
    let t = params.t();
    let n_src = f.source_len;
    let nu_w = to_dense(nu, n_src)?;
    let mu_w = to_dense(mu, f.target_len())?;
    let a_w = to_dense(a, f.target_len())?;
    let mut lambda = Vec::with_capacity(n_src);
    let mut eta = Vec::with_capacity(n_src);
    for x in 0..n_src {
        let y = f.apply(x);
        if x == f.keep || x == f.drop {
            // ν_x ⊖ t may be +∞ when t = −∞; the min absorbs it.
            lambda.push(mu_w[y].min_with(&nu_w[x].residual(t)));
            eta.push(a_w[y].min_with(&nu_w[x]));
        } else {
            lambda.push(mu_w[y].clone());
            eta.push(a_w[y].clone());
        }
    }
    let lambda = from_dense(&lambda)?;
    let eta = from_dense(&eta)?;
    debug_assert_eq!(IdemMeasure::combine(&lambda, &eta, params), *nu);
    Ok((lambda, eta))
}

/// Factors a surjection into single merges, highest-indexed pair first,
/// followed by a bijection. Returns the merges and the final bijection.
pub fn factor_surjection(f: &FiniteMap) -> Result<(Vec<MergeMap>, Vec<usize>)> {
    if !f.is_surjective() {
        return Err(Error::Invalid("map is not surjective".into()));
    }
    let mut current: Vec<usize> = f.targets().to_vec();
    let mut merges = Vec::new();
    loop {
        // Largest j with an earlier i sharing its image; i is the largest such.
        let pair = (0..current.len()).rev().find_map(|j| (0..j).rev().find(|&i| current[i] == current[j]).map(|i| (i, j)));
        let Some((keep, drop)) = pair else { break };
        let m = MergeMap::new(current.len(), keep, drop)?;
        current.remove(drop);
        merges.push(m);
    }
    Ok((merges, current))
}

/// Lift through an arbitrary surjection by composing single-merge lifts.
pub fn lift_surjection_fiber(
    nu: &FiniteMeasure,
    mu: &FiniteMeasure,
    a: &FiniteMeasure,
    params: &ConvexParams,
    f: &FiniteMap,
) -> Result<(FiniteMeasure, FiniteMeasure)> {
    check_consistency(nu, mu, a, params, f)?;
    let (merges, bijection) = factor_surjection(f)?;
    // Push ν down the chain of merges.
    let mut levels = vec![nu.clone()];
    for m in &merges {
        let next = pushforward(&m.as_map(), levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    // Pull μ and a back along the bijection.
    let mut lambda = mu.pushforward(|&y| bijection.iter().position(|&b| b == y).expect("bijection"));
    let mut eta = a.pushforward(|&y| bijection.iter().position(|&b| b == y).expect("bijection"));
    for (m, level) in merges.iter().zip(&levels).rev() {
        (lambda, eta) = lift_merge_fiber(level, &lambda, &eta, params, m)?;
    }
    Ok((lambda, eta))
}

/// The grid `{0, −step, …, −1} ∪ {−∞}` used by the exhaustive fiber sweep.
pub fn sweep_levels(den: i64) -> Vec<TropScalar> {
    let mut v: Vec<TropScalar> = (0..=den).map(|k| TropScalar::ratio(-k, den)).collect();
    v.push(TropScalar::NegInf);
    v
}

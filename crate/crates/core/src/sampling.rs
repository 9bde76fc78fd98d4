//! Seeded random instances on rational grids.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::ConvexParams;
use crate::scalar::{Rational, TropScalar};
use crate::space::{from_dense, FiniteMap, FiniteMeasure, FunctionTable, PointMeasure};
use crate::vector::TropVector;

/// Independent stream for item `index` of a named family under `seed`.
pub fn stream(seed: u64, family: &str, index: u64) -> ChaCha8Rng {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in family.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    rng.set_stream(index);
    rng
}

/// `k / den` with `k` uniform in `[lo·den, hi·den]`.
pub fn grid(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(lo * den..=hi * den).into(), den.into())
}

/// Weight in `[−2, 0]` on the `1/16` grid, or `−∞` with probability `1/4`.
pub fn weight(rng: &mut impl Rng) -> TropScalar {
    if rng.gen_bool(0.25) {
        TropScalar::NegInf
    } else {
        TropScalar::Finite(grid(rng, -2, 0, 16))
    }
}

/// Dense normalized weight vector of length `n`.
pub fn dense_weights(rng: &mut impl Rng, n: usize) -> Vec<TropScalar> {
    let mut w: Vec<TropScalar> = (0..n).map(|_| weight(rng)).collect();
    w[rng.gen_range(0..n)] = TropScalar::zero();
    w
}

pub fn finite_measure(rng: &mut impl Rng, n: usize) -> FiniteMeasure {
    from_dense(&dense_weights(rng, n)).expect("normalized by construction")
}

/// Values in `[−4, 4]` on the `1/16` grid.
pub fn function_table(rng: &mut impl Rng, n: usize) -> FunctionTable {
    FunctionTable::new((0..n).map(|_| grid(rng, -4, 4, 16)).collect())
}

/// Any map `{0..n−1} → {0..m−1}`.
pub fn finite_map(rng: &mut impl Rng, n: usize, m: usize) -> FiniteMap {
    FiniteMap::new((0..n).map(|_| rng.gen_range(0..m)).collect(), m).expect("images in range")
}

/// A surjection `{0..n−1} → {0..m−1}` for `m ≤ n`.
pub fn surjection(rng: &mut impl Rng, n: usize, m: usize) -> FiniteMap {
    assert!(m <= n && m > 0);
    let mut targets: Vec<usize> = (0..m).collect();
    targets.extend((m..n).map(|_| rng.gen_range(0..m)));
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        targets.swap(i, j);
    }
    FiniteMap::new(targets, m).expect("images in range")
}

/// Params covering `(0, 0)`, the two absorbing pairs, and finite `t` or `p`.
pub fn params(rng: &mut impl Rng) -> ConvexParams {
    match rng.gen_range(0..8) {
        0 => ConvexParams::balanced(),
        1 => ConvexParams::second(),
        2 => ConvexParams::first(),
        3..=5 => ConvexParams::with_t(TropScalar::Finite(grid(rng, -2, 0, 16))).expect("t <= 0"),
        _ => ConvexParams::with_p(TropScalar::Finite(grid(rng, -2, 0, 16))).expect("p <= 0"),
    }
}

/// Params with finite entries only, on the `1/den` grid in `[−2, 0]`.
pub fn finite_params(rng: &mut impl Rng, den: i64) -> ConvexParams {
    let v = TropScalar::Finite(grid(rng, -2, 0, den));
    if rng.gen_bool(0.5) {
        ConvexParams::with_t(v).expect("t <= 0")
    } else {
        ConvexParams::with_p(v).expect("p <= 0")
    }
}

/// A point of `[lo, hi]^d` on the `1/den` grid, at least one grid step
/// away from the boundary.
pub fn interior_point(rng: &mut impl Rng, dim: usize, lo: i64, hi: i64, den: i64) -> TropVector {
    TropVector::from_rationals(
        (0..dim).map(|_| Rational::new(rng.gen_range(lo * den + 1..=hi * den - 1).into(), den.into())),
    )
}

/// A point of `[lo, hi]^d` on the `1/den` grid.
pub fn point(rng: &mut impl Rng, dim: usize, lo: i64, hi: i64, den: i64) -> TropVector {
    TropVector::from_rationals((0..dim).map(|_| grid(rng, lo, hi, den)))
}

/// A measure with `1..=max_atoms` distinct atoms of `[lo, hi]^d` and
/// finite weights in `[−2, 0]` on the `1/den` grid.
pub fn point_measure(rng: &mut impl Rng, max_atoms: usize, dim: usize, lo: i64, hi: i64, den: i64, interior: bool) -> PointMeasure {
    let k = rng.gen_range(1..=max_atoms);
    let mut atoms: Vec<(TropVector, TropScalar)> = Vec::with_capacity(k);
    while atoms.len() < k {
        let x = if interior { interior_point(rng, dim, lo, hi, den) } else { point(rng, dim, lo, hi, den) };
        if atoms.iter().any(|(y, _)| *y == x) {
            continue;
        }
        atoms.push((x, TropScalar::Finite(grid(rng, -2, 0, den))));
    }
    let z = rng.gen_range(0..k);
    atoms[z].1 = TropScalar::zero();
    PointMeasure::from_weights(atoms).expect("normalized by construction")
}

/// Direction in `[−1, 1]` on the `1/64` grid.
pub fn direction(rng: &mut impl Rng) -> Rational {
    grid(rng, -1, 1, 64)
}

/// `ε_j = 2^{−j}`.
pub fn eps(j: u32) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u8) << j)
}

/// Moves each finite weight by `u_i · ε` in log scale, flipping the sign
/// when the move would make it positive. Index `keep` stays put, so the
/// result stays normalized when `w[keep] = 0`. `−∞` entries are kept.
pub fn perturb_weights(w: &[TropScalar], u: &[Rational], eps: &Rational, keep: usize) -> Vec<TropScalar> {
    w.iter()
        .zip(u)
        .enumerate()
        .map(|(i, (wi, ui))| match wi {
            TropScalar::Finite(v) if i != keep => {
                let up = v + ui * eps;
                if up > Rational::from_integer(0.into()) {
                    TropScalar::Finite(v - (ui * eps).abs())
                } else {
                    TropScalar::Finite(up)
                }
            }
            other => other.clone(),
        })
        .collect()
}

/// Moves each coordinate by `u_j · ε`, reflecting back into `[lo, hi]`
/// and clamping when the reflection also leaves it.
pub fn perturb_point(x: &TropVector, u: &[Rational], eps: &Rational, lo: &Rational, hi: &Rational) -> TropVector {
    TropVector::from_rationals(x.coords().iter().zip(u).map(|(c, uj)| {
        let v = c.as_rational().expect("finite point");
        let inside = |w: &Rational| lo <= w && w <= hi;
        let moved = v + uj * eps;
        let reflected = v - uj * eps;
        if inside(&moved) {
            moved
        } else if inside(&reflected) {
            reflected
        } else {
            moved.max(lo.clone()).min(hi.clone())
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: u64 = stream(7, "x", 3).gen();
        let b: u64 = stream(7, "x", 3).gen();
        let c: u64 = stream(7, "x", 4).gen();
        let d: u64 = stream(7, "y", 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn surjection_hits_everything() {
        let mut rng = stream(1, "s", 0);
        for _ in 0..50 {
            assert!(surjection(&mut rng, 5, 3).is_surjective());
        }
    }

    #[test]
    fn perturbation_stays_normalized() {
        let w = vec![TropScalar::zero(), TropScalar::zero(), TropScalar::ratio(-1, 2), TropScalar::NegInf];
        let u = vec![Rational::new(1.into(), 2.into()); 4];
        let p = perturb_weights(&w, &u, &eps(3), 0);
        assert_eq!(p[0], TropScalar::zero());
        assert_eq!(p[1], TropScalar::ratio(-1, 16));
        assert_eq!(p[2], TropScalar::ratio(-7, 16));
        assert_eq!(p[3], TropScalar::NegInf);
    }
}

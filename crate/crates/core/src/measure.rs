//! Finite-support idempotent measures `⊕ λ_i ⊙ δ_{x_i}` with `max λ_i = 0`.
//!
//! Measures are generic over the atom type: indices into a finite space,
//! points of ℝ^d, or measures themselves (for measures on `IX`). They are
//! kept in canonical form at all times, so structural equality is equality
//! of the induced functionals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::ConvexParams;
use crate::scalar::{Rational, TropScalar};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdemMeasure<A: Ord> {
    // No −∞ weights, all weights ≤ 0, at least one weight equal to 0.
    atoms: BTreeMap<A, Rational>,
}

impl<A: Ord + Clone> IdemMeasure<A> {
    /// `δ_x`.
    pub fn dirac(x: A) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(x, Rational::zero());
        IdemMeasure { atoms }
    }

    /// Builds `⊕ w_i ⊙ δ_{x_i}`. Duplicate atoms are merged with `⊕`,
    /// `−∞` weights dropped. The result must be normalized.
    pub fn from_weights(pairs: impl IntoIterator<Item = (A, TropScalar)>) -> Result<Self> {
        let atoms = merge(pairs)?;
        let max = atoms.values().max().cloned();
        match max {
            Some(m) if m.is_zero() => {}
            Some(m) if m.is_positive() => return Err(Error::PositiveWeight { weight: TropScalar::Finite(m) }),
            Some(m) => return Err(Error::NotNormalized { max: TropScalar::Finite(m) }),
            None => return Err(Error::NotNormalized { max: TropScalar::NegInf }),
        }
        Ok(IdemMeasure { atoms })
    }

    /// Like [`from_weights`](Self::from_weights) but subtracts the maximal
    /// weight first.
    pub fn from_weights_renormalized(pairs: impl IntoIterator<Item = (A, TropScalar)>) -> Result<Self> {
        let mut atoms = merge(pairs)?;
        let max = atoms
            .values()
            .max()
            .cloned()
            .ok_or(Error::NotNormalized { max: TropScalar::NegInf })?;
        for w in atoms.values_mut() {
            *w -= &max;
        }
        Ok(IdemMeasure { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms with their (finite) weights, in atom order.
    pub fn atoms(&self) -> impl Iterator<Item = (&A, &Rational)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.atoms.keys()
    }

    /// Density value at `x`; `−∞` off the support.
    pub fn weight(&self, x: &A) -> TropScalar {
        self.atoms.get(x).cloned().map(TropScalar::Finite).unwrap_or(TropScalar::NegInf)
    }

    /// `μ(φ) = max_x (d_μ(x) + φ(x))`.
    pub fn eval_with(&self, mut phi: impl FnMut(&A) -> Rational) -> Rational {
        self.atoms
            .iter()
            .map(|(x, w)| w + phi(x))
            .max()
            .expect("canonical measures have nonempty support")
    }

    /// `⊕ λ_i ⊙ μ_i` for weights with `max λ_i = 0`.
    pub fn join<'a>(terms: impl IntoIterator<Item = (&'a TropScalar, &'a IdemMeasure<A>)>) -> Result<Self>
    where
        A: 'a,
    {
        let mut pairs = Vec::new();
        for (lambda, mu) in terms {
            lambda.ensure_storable()?;
            if let TropScalar::Finite(l) = lambda {
                pairs.extend(mu.atoms.iter().map(|(x, w)| (x.clone(), TropScalar::Finite(w + l))));
            }
        }
        Self::from_weights(pairs)
    }

    /// `t ⊙ λ ⊕ p ⊙ β`. Always canonical since `(t, p) ∈ J`.
    pub fn combine(lambda: &Self, beta: &Self, params: &ConvexParams) -> Self {
        Self::join([(params.t(), lambda), (params.p(), beta)])
            .expect("a J-combination of normalized measures is normalized")
    }

    /// `If(μ)`: the weight of `x` is added with `⊕` to the atom `f(x)`.
    pub fn pushforward<B: Ord + Clone>(&self, mut f: impl FnMut(&A) -> B) -> IdemMeasure<B> {
        let mut atoms: BTreeMap<B, Rational> = BTreeMap::new();
        for (x, w) in &self.atoms {
            let y = f(x);
            match atoms.get_mut(&y) {
                Some(existing) if *existing >= *w => {}
                Some(existing) => *existing = w.clone(),
                None => {
                    atoms.insert(y, w.clone());
                }
            }
        }
        IdemMeasure { atoms }
    }

    /// Fallible variant of [`pushforward`](Self::pushforward).
    pub fn try_pushforward<B: Ord + Clone>(&self, mut f: impl FnMut(&A) -> Result<B>) -> Result<IdemMeasure<B>> {
        let images = self.atoms.keys().map(&mut f).collect::<Result<Vec<_>>>()?;
        let mut it = images.into_iter();
        Ok(self.pushforward(|_| it.next().expect("one image per atom")))
    }

    /// Largest atomwise `ϱ` between densities. On finite spaces this is the
    /// limit of the indicator-table distance.
    pub fn weight_rho(&self, other: &Self) -> f64 {
        self.atoms
            .keys()
            .chain(other.atoms.keys())
            .map(|x| self.weight(x).rho(&other.weight(x)))
            .fold(0.0, f64::max)
    }
}

fn merge<A: Ord>(pairs: impl IntoIterator<Item = (A, TropScalar)>) -> Result<BTreeMap<A, Rational>> {
    let mut atoms: BTreeMap<A, Rational> = BTreeMap::new();
    for (x, w) in pairs {
        match w {
            TropScalar::NegInf => {}
            TropScalar::PosInf => return Err(Error::PositiveInfinity),
            TropScalar::Finite(w) => {
                if w.is_positive() {
                    return Err(Error::PositiveWeight { weight: TropScalar::Finite(w) });
                }
                match atoms.get_mut(&x) {
                    Some(existing) if *existing >= w => {}
                    Some(existing) => *existing = w,
                    None => {
                        atoms.insert(x, w);
                    }
                }
            }
        }
    }
    Ok(atoms)
}

#[derive(Serialize, Deserialize)]
struct RawAtom<A> {
    at: A,
    w: TropScalar,
}

/// Serialized as a list of `{"at": atom, "w": weight}`.
impl<A: Ord + Serialize> Serialize for IdemMeasure<A> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.atoms.iter().map(|(at, w)| RawAtom { at, w: TropScalar::Finite(w.clone()) }))
    }
}

impl<'de, A: Ord + Clone + Deserialize<'de>> Deserialize<'de> for IdemMeasure<A> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<RawAtom<A>>::deserialize(deserializer)?;
        IdemMeasure::from_weights(raw.into_iter().map(|a| (a.at, a.w))).map_err(serde::de::Error::custom)
    }
}

impl<A: Ord + fmt::Debug> fmt::Debug for IdemMeasure<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.atoms.iter().map(|(x, w)| (x, crate::scalar::format_rational(w))))
            .finish()
    }
}

impl<A: Ord + fmt::Display> fmt::Display for IdemMeasure<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊕ ")?;
            }
            write!(f, "{}⊙δ[{x}]", crate::scalar::format_rational(w))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, rat};

    fn nu_t(t: &str) -> IdemMeasure<usize> {
        IdemMeasure::from_weights([(0, q(t)), (1, q("0"))]).unwrap()
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let m = IdemMeasure::from_weights([(1, q("-1")), (1, q("0")), (2, TropScalar::NegInf)]).unwrap();
        assert_eq!(m, IdemMeasure::dirac(1));
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let err = IdemMeasure::from_weights([(0, q("-1/2")), (1, q("-1"))]).unwrap_err();
        assert_eq!(err.to_string(), "max weight is -1/2, expected 0");
        assert!(IdemMeasure::from_weights([(0, q("1/2"))]).is_err());
        assert!(IdemMeasure::<usize>::from_weights([(0, TropScalar::NegInf)]).is_err());
        assert!(IdemMeasure::from_weights([(0, TropScalar::PosInf)]).is_err());
        let fixed = IdemMeasure::from_weights_renormalized([(0, q("-1/2")), (1, q("-1"))]).unwrap();
        assert_eq!(fixed.weight(&1), q("-1/2"));
    }

    #[test]
    fn eval_examples() {
        // ν_t(φ) = 1 with φ = (0, 1) for every t ≤ 0
        for t in ["0", "-1/3", "-5"] {
            assert_eq!(nu_t(t).eval_with(|&x| Rational::from_integer((x as i64).into())), rat("1"));
        }
        let mu = IdemMeasure::from_weights([(1, q("0")), (2, q("-1/2"))]).unwrap();
        assert_eq!(mu.eval_with(|&x| if x == 1 { rat("0") } else { rat("1") }), rat("1/2"));
        assert_eq!(mu.eval_with(|_| rat("-7/2")), rat("-7/2"));
    }

    #[test]
    fn combine_examples() {
        let d0 = IdemMeasure::dirac(0usize);
        let d1 = IdemMeasure::dirac(1usize);
        let params = ConvexParams::with_t(q("-1")).unwrap();
        assert_eq!(IdemMeasure::combine(&d0, &d1, &params), nu_t("-1"));
        assert_eq!(IdemMeasure::combine(&d0, &d1, &ConvexParams::second()), d1);
        let mu = nu_t("-3/4");
        assert_eq!(IdemMeasure::combine(&mu, &mu, &params), mu);
    }

    #[test]
    fn pushforward_merges_fibers() {
        let nu = IdemMeasure::from_weights([(0, q("0")), (1, q("-1")), (2, q("-1/2"))]).unwrap();
        let merged = nu.pushforward(|&x| if x == 0 { 0 } else { 1 });
        assert_eq!(merged, nu_t("-1/2").pushforward(|&x| 1 - x));
        assert_eq!(IdemMeasure::dirac(3usize).pushforward(|x| x * 2), IdemMeasure::dirac(6));
    }

}

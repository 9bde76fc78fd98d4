//! The parameter space `J` of normalized two-term max-plus combinations and
//! the pointwise combination map `s(x, y, t, p) = t ⊙ x ⊕ p ⊙ y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::TropScalar;
use crate::vector::TropVector;

/// A pair `(t, p)` with `t, p ∈ [−∞, 0]` and `t ⊕ p = 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ConvexParams {
    t: TropScalar,
    p: TropScalar,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    t: TropScalar,
    p: TropScalar,
}

impl TryFrom<RawParams> for ConvexParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ConvexParams::new(raw.t, raw.p)
    }
}

impl From<ConvexParams> for RawParams {
    fn from(c: ConvexParams) -> Self {
        RawParams { t: c.t, p: c.p }
    }
}

impl std::fmt::Display for ConvexParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.t, self.p)
    }
}

impl ConvexParams {
    pub fn new(t: TropScalar, p: TropScalar) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { t: t.clone(), p: p.clone(), reason };
        if t.is_pos_inf() || p.is_pos_inf() {
            return Err(invalid("+inf component"));
        }
        let zero = TropScalar::zero();
        if t > zero || p > zero {
            return Err(invalid("component above 0"));
        }
        if !t.oplus(&p).is_zero() {
            return Err(invalid("max(t, p) must be 0"));
        }
        Ok(ConvexParams { t, p })
    }

    /// `(0, 0)`.
    pub fn balanced() -> Self {
        ConvexParams { t: TropScalar::zero(), p: TropScalar::zero() }
    }

    /// `(0, −∞)`: selects the first argument.
    pub fn first() -> Self {
        ConvexParams { t: TropScalar::zero(), p: TropScalar::NegInf }
    }

    /// `(−∞, 0)`: selects the second argument.
    pub fn second() -> Self {
        ConvexParams { t: TropScalar::NegInf, p: TropScalar::zero() }
    }

    /// `(t, 0)` for `t ≤ 0`.
    pub fn with_t(t: TropScalar) -> Result<Self> {
        Self::new(t, TropScalar::zero())
    }

    /// `(0, p)` for `p ≤ 0`.
    pub fn with_p(p: TropScalar) -> Result<Self> {
        Self::new(TropScalar::zero(), p)
    }

    pub fn t(&self) -> &TropScalar {
        &self.t
    }

    pub fn p(&self) -> &TropScalar {
        &self.p
    }

    pub fn swapped(&self) -> Self {
        ConvexParams { t: self.p.clone(), p: self.t.clone() }
    }

    /// `max(ϱ(t, t'), ϱ(p, p'))`.
    pub fn rho(&self, other: &Self) -> f64 {
        self.t.rho(&other.t).max(self.p.rho(&other.p))
    }

    /// `t ⊙ a ⊕ p ⊙ b` on scalars.
    pub fn apply(&self, a: &TropScalar, b: &TropScalar) -> TropScalar {
        self.t.odot(a).oplus(&self.p.odot(b))
    }
}

/// `s(x, y, t, p)`: coordinatewise `max(t + x_j, p + y_j)`.
pub fn s_point(x: &TropVector, y: &TropVector, params: &ConvexParams) -> Result<TropVector> {
    x.check_dim(y)?;
    Ok(TropVector::new(
        x.coords().iter().zip(y.coords()).map(|(a, b)| params.apply(a, b)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::vector::tv;

    #[test]
    fn rejects_pairs_outside_j() {
        assert!(ConvexParams::new(q("-1"), q("-1")).is_err());
        assert!(ConvexParams::new(q("1"), q("0")).is_err());
        assert!(ConvexParams::new(TropScalar::PosInf, q("0")).is_err());
        assert!(ConvexParams::new(TropScalar::NegInf, TropScalar::NegInf).is_err());
        assert!(ConvexParams::new(q("-1/3"), q("0")).is_ok());
    }

    #[test]
    fn s_point_examples() {
        let x = tv(&["-2", "-1"]);
        let y = tv(&["-1", "-2"]);
        assert_eq!(s_point(&x, &y, &ConvexParams::balanced()).unwrap(), tv(&["-1", "-1"]));
        assert_eq!(s_point(&x, &y, &ConvexParams::second()).unwrap(), y);
        assert_eq!(s_point(&x, &y, &ConvexParams::first()).unwrap(), x);
        let params = ConvexParams::with_t(q("-7/4")).unwrap();
        assert_eq!(s_point(&x, &x, &params).unwrap(), x);
        assert!(s_point(&x, &tv(&["0"]), &params).is_err());
    }

    #[test]
    fn json_roundtrip_validates() {
        let p: ConvexParams = serde_json::from_str(r#"{"t": "-1/2", "p": "0"}"#).unwrap();
        assert_eq!(p.t(), &q("-1/2"));
        assert!(serde_json::from_str::<ConvexParams>(r#"{"t": "-1/2", "p": "-1"}"#).is_err());
    }
}

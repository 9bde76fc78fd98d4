//! Exact max-plus scalars.
//!
//! A [`TropScalar`] is an element of ℝ_max = ℝ ∪ {−∞} carrying an exact
//! rational payload. `⊕` is `max` and `⊙` is `+`. A top element `+∞` exists
//! only as the result of [`TropScalar::residual`] and is expected to be
//! clamped away by a following `min`; measures and points reject it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number used for every finite payload.
pub type Rational = num_rational::BigRational;

/// Element of ℝ_max, plus a transient top.
///
/// Variant order gives the total order `−∞ < q < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[derive(Default)]
pub enum TropScalar {
    #[default]
    NegInf,
    Finite(Rational),
    PosInf,
}

impl TropScalar {
    /// The multiplicative unit `0`.
    pub fn zero() -> Self {
        TropScalar::Finite(Rational::zero())
    }

    pub fn neg_inf() -> Self {
        TropScalar::NegInf
    }

    pub fn from_int(v: i64) -> Self {
        TropScalar::Finite(Rational::from_integer(BigInt::from(v)))
    }

    /// `num/den` as an exact scalar. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        TropScalar::Finite(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TropScalar::Finite(_))
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, TropScalar::NegInf)
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, TropScalar::PosInf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TropScalar::Finite(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            TropScalar::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// `a ⊕ b = max(a, b)`.
    pub fn oplus(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `a ⊙ b = a + b` with `−∞` absorbing.
    pub fn odot(&self, other: &Self) -> Self {
        match (self, other) {
            (TropScalar::NegInf, _) | (_, TropScalar::NegInf) => TropScalar::NegInf,
            (TropScalar::PosInf, _) | (_, TropScalar::PosInf) => TropScalar::PosInf,
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(a + b),
        }
    }

    /// Extended subtraction `a ⊖ b`.
    ///
    /// `−∞ ⊖ b = −∞` for `b ≠ −∞`, and `a ⊖ −∞ = +∞` for every `a`
    /// (including `−∞`), so that `min(m, a ⊖ b)` collapses to `m`.
    pub fn residual(&self, other: &Self) -> Self {
        match (self, other) {
            (_, TropScalar::NegInf) => TropScalar::PosInf,
            (TropScalar::NegInf, _) => TropScalar::NegInf,
            (TropScalar::PosInf, _) => TropScalar::PosInf,
            (TropScalar::Finite(_), TropScalar::PosInf) => TropScalar::NegInf,
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(a - b),
        }
    }

    pub fn min_with(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Floating approximation: `−∞ → -inf`, `+∞ → inf`.
    pub fn to_f64(&self) -> f64 {
        match self {
            TropScalar::NegInf => f64::NEG_INFINITY,
            TropScalar::PosInf => f64::INFINITY,
            TropScalar::Finite(q) => rational_to_f64(q),
        }
    }

    /// `e^a`, with `e^{−∞} = 0`.
    pub fn exp(&self) -> f64 {
        self.to_f64().exp()
    }

    /// The metric `ϱ(a, b) = |e^a − e^b|`. Reporting only.
    pub fn rho(&self, other: &Self) -> f64 {
        (self.exp() - other.exp()).abs()
    }

    /// Fails on `+∞`; used wherever a value is persisted.
    pub fn ensure_storable(&self) -> Result<()> {
        if self.is_pos_inf() {
            Err(Error::PositiveInfinity)
        } else {
            Ok(())
        }
    }
}


impl From<Rational> for TropScalar {
    fn from(q: Rational) -> Self {
        TropScalar::Finite(q)
    }
}

impl From<i64> for TropScalar {
    fn from(v: i64) -> Self {
        TropScalar::from_int(v)
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerator or denominator: drop low bits of both before dividing.
    let bits = q.numer().bits().max(q.denom().bits());
    let shift = bits.saturating_sub(1000) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropScalar::NegInf => f.write_str("-inf"),
            TropScalar::PosInf => f.write_str("+inf"),
            TropScalar::Finite(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&joined).map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(value)
}

impl FromStr for TropScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "-∞" | "-infinity" => Ok(TropScalar::NegInf),
            "+inf" | "inf" | "+∞" => Ok(TropScalar::PosInf),
            other => parse_rational(other).map(TropScalar::Finite),
        }
    }
}

impl Serialize for TropScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TropScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(deserializer)?;
        scalar_from_json(&raw).map_err(serde::de::Error::custom)
    }
}

/// Accepts the string encoding, JSON integers, and JSON decimals (read
/// through their shortest decimal text).
pub fn scalar_from_json(value: &serde_json::Value) -> Result<TropScalar> {
    match value {
        serde_json::Value::String(s) => s.parse(),
        serde_json::Value::Number(n) => n.to_string().parse(),
        other => Err(Error::Parse(format!("expected a scalar, got {other}"))),
    }
}

/// Serde adapter writing a finite rational with the scalar encoding.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rational, D::Error> {
        match TropScalar::deserialize(deserializer)? {
            TropScalar::Finite(q) => Ok(q),
            other => Err(serde::de::Error::custom(format!("expected a finite value, got {other}"))),
        }
    }
}

/// [`serde_rational`] for sequences.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<TropScalar>::deserialize(deserializer)?
            .into_iter()
            .map(|s| match s {
                TropScalar::Finite(q) => Ok(q),
                other => Err(serde::de::Error::custom(format!("expected a finite value, got {other}"))),
            })
            .collect()
    }
}

/// Convenience for tests and fixtures: `q("-1/2")`.
pub fn q(text: &str) -> TropScalar {
    text.parse().expect("valid scalar literal")
}

/// Convenience for tests and fixtures: exact rational from a literal.
pub fn rat(text: &str) -> Rational {
    parse_rational(text).expect("valid rational literal")
}

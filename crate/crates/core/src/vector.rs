use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, TropScalar};

/// Fixed-dimension vector over ℝ_max with coordinatewise `⊕` and scalar `⊙`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropVector(Vec<TropScalar>);

impl TropVector {
    pub fn new(coords: Vec<TropScalar>) -> Self {
        TropVector(coords)
    }

    /// Point with finite rational coordinates.
    pub fn from_rationals(coords: impl IntoIterator<Item = Rational>) -> Self {
        TropVector(coords.into_iter().map(TropScalar::Finite).collect())
    }

    /// Parses each coordinate with the shared scalar encoding.
    pub fn parse(coords: &[&str]) -> Result<Self> {
        coords.iter().map(|c| c.parse()).collect::<Result<Vec<_>>>().map(TropVector)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[TropScalar] {
        &self.0
    }

    pub fn coord(&self, j: usize) -> &TropScalar {
        &self.0[j]
    }

    pub fn into_coords(self) -> Vec<TropScalar> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(TropScalar::is_finite)
    }

    /// Points of compacta must have finite coordinates.
    pub fn ensure_finite(&self) -> Result<()> {
        match self.0.iter().find(|c| !c.is_finite()) {
            Some(bad) => Err(Error::NonFiniteCoordinate { value: bad.clone() }),
            None => Ok(()),
        }
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() })
        }
    }

    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(TropVector(self.0.iter().zip(&other.0).map(|(a, b)| a.oplus(b)).collect()))
    }

    /// `λ ⊙ x`.
    pub fn shift(&self, by: &TropScalar) -> Self {
        TropVector(self.0.iter().map(|c| c.odot(by)).collect())
    }

    /// `max_j |e^{x_j} − e^{y_j}|`.
    pub fn rho(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.rho(b)).fold(0.0, f64::max)
    }

    /// Sup-norm distance of the float approximations; `∞` when an
    /// infinite coordinate differs.
    pub fn sup_dist(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| if a == b { 0.0 } else { (a.to_f64() - b.to_f64()).abs() })
            .fold(0.0, f64::max)
    }
}

impl From<Vec<TropScalar>> for TropVector {
    fn from(v: Vec<TropScalar>) -> Self {
        TropVector(v)
    }
}

impl fmt::Display for TropVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `TropVector` literal from scalar strings, e.g. `tv(&["-2", "-1"])`.
pub fn tv(coords: &[&str]) -> TropVector {
    TropVector::parse(coords).expect("valid vector literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinatewise_ops() {
        let x = tv(&["-2", "-1"]);
        let y = tv(&["-1", "-2"]);
        assert_eq!(x.oplus(&y).unwrap(), tv(&["-1", "-1"]));
        assert_eq!(x.shift(&"-1/2".parse().unwrap()), tv(&["-5/2", "-3/2"]));
        assert_eq!(x.shift(&TropScalar::NegInf), tv(&["-inf", "-inf"]));
        assert!(x.oplus(&tv(&["0"])).is_err());
        assert_eq!(x.to_string(), "(-2, -1)");
    }
}

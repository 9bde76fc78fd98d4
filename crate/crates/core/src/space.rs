//! Finite spaces `X = {0, …, n−1}`, function tables on them, densities,
//! maps between finite spaces, and the test-function surrogate for the
//! pointwise topology on measures.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::IdemMeasure;
use crate::scalar::{Rational, TropScalar};
use crate::vector::TropVector;

/// Measure on a finite space; atoms are point indices.
pub type FiniteMeasure = IdemMeasure<usize>;

/// Measure whose atoms are points of ℝ^d.
pub type PointMeasure = IdemMeasure<TropVector>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpace {
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<TropVector>>,
}

impl FiniteSpace {
    /// `{0, …, n−1}` labelled by the decimal indices.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("a finite space needs at least one point".into()));
        }
        Ok(FiniteSpace { labels: (0..n).map(|i| i.to_string()).collect(), points: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Invalid("a finite space needs at least one point".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Invalid("labels must be distinct".into()));
        }
        Ok(FiniteSpace { labels, points: None })
    }

    /// Attaches an embedding into ℝ^d: distinct points with finite coordinates.
    pub fn with_points(mut self, points: Vec<TropVector>) -> Result<Self> {
        if points.len() != self.labels.len() {
            return Err(Error::DimensionMismatch { expected: self.labels.len(), got: points.len() });
        }
        if let Some(first) = points.first() {
            for p in &points {
                first.check_dim(p)?;
                p.ensure_finite()?;
            }
        }
        let distinct: BTreeSet<&TropVector> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::Invalid("embedded points must be distinct".into()));
        }
        self.points = Some(points);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> Option<&[TropVector]> {
        self.points.as_deref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Fails if the measure has an atom outside `{0, …, n−1}`.
    pub fn check_measure(&self, mu: &FiniteMeasure) -> Result<()> {
        match mu.support().find(|&&x| x >= self.len()) {
            Some(x) => Err(Error::SpaceMismatch(format!("atom {x} outside a space of {} points", self.len()))),
            None => Ok(()),
        }
    }

    /// Image of a measure under the embedding.
    pub fn embed(&self, mu: &FiniteMeasure) -> Result<PointMeasure> {
        self.check_measure(mu)?;
        let points = self.points.as_ref().ok_or_else(|| Error::UnembeddedAtom("space has no embedding".into()))?;
        Ok(mu.pushforward(|&x| points[x].clone()))
    }
}

/// A continuous function on a finite space: one finite value per point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionTable {
    #[serde(with = "crate::scalar::serde_rational_vec")]
    values: Vec<Rational>,
}

impl FunctionTable {
    pub fn new(values: Vec<Rational>) -> Self {
        FunctionTable { values }
    }

    /// The constant function `c_X`.
    pub fn constant(n: usize, c: Rational) -> Self {
        FunctionTable { values: vec![c; n] }
    }

    /// `0` at `x`, `−big` elsewhere.
    pub fn indicator(n: usize, x: usize, big: &Rational) -> Self {
        FunctionTable { values: (0..n).map(|i| if i == x { Rational::zero() } else { -big.clone() }).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    /// `c ⊙ φ`.
    pub fn shift(&self, c: &Rational) -> Self {
        FunctionTable { values: self.values.iter().map(|v| v + c).collect() }
    }

    /// `φ ⊕ ψ`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SpaceMismatch(format!("tables of sizes {} and {}", self.len(), other.len())));
        }
        Ok(FunctionTable { values: self.values.iter().zip(&other.values).map(|(a, b)| a.max(b).clone()).collect() })
    }

    /// `ψ ∘ f`.
    pub fn compose(&self, f: &FiniteMap) -> Result<Self> {
        if f.codomain() != self.len() {
            return Err(Error::SpaceMismatch(format!(
                "map into {} points composed with a table on {}",
                f.codomain(),
                self.len()
            )));
        }
        Ok(FunctionTable { values: f.targets().iter().map(|&y| self.values[y].clone()).collect() })
    }
}

/// `μ(φ)` on a finite space.
pub fn eval(mu: &FiniteMeasure, phi: &FunctionTable) -> Result<Rational> {
    if let Some(&x) = mu.support().find(|&&x| x >= phi.len()) {
        return Err(Error::SpaceMismatch(format!("atom {x} outside a table of {} points", phi.len())));
    }
    Ok(mu.eval_with(|&x| phi.values[x].clone()))
}

/// Density of a measure on a finite space: a normalized `[−∞, 0]`-valued table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTable {
    values: Vec<TropScalar>,
}

impl DensityTable {
    pub fn new(values: Vec<TropScalar>) -> Result<Self> {
        // Validation is shared with measure construction.
        FiniteMeasure::from_weights(values.iter().cloned().enumerate())?;
        Ok(DensityTable { values })
    }

    pub fn values(&self) -> &[TropScalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `d_μ` on a space of `n` points.
pub fn density_of(mu: &FiniteMeasure, n: usize) -> Result<DensityTable> {
    Ok(DensityTable { values: to_dense(mu, n)? })
}

/// `ν_f(φ) = max_x f(x) ⊙ φ(x)`.
pub fn measure_of_density(f: &DensityTable) -> FiniteMeasure {
    FiniteMeasure::from_weights(f.values.iter().cloned().enumerate()).expect("density tables are normalized")
}

/// Weight vector of length `n`, `−∞` off the support.
pub fn to_dense(mu: &FiniteMeasure, n: usize) -> Result<Vec<TropScalar>> {
    if let Some(&x) = mu.support().find(|&&x| x >= n) {
        return Err(Error::SpaceMismatch(format!("atom {x} outside a space of {n} points")));
    }
    Ok((0..n).map(|x| mu.weight(&x)).collect())
}

pub fn from_dense(weights: &[TropScalar]) -> Result<FiniteMeasure> {
    FiniteMeasure::from_weights(weights.iter().cloned().enumerate())
}

/// A map `f : {0..m−1} → {0..k−1}` given by its table of images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMap {
    targets: Vec<usize>,
    codomain: usize,
}

impl FiniteMap {
    pub fn new(targets: Vec<usize>, codomain: usize) -> Result<Self> {
        if let Some(&bad) = targets.iter().find(|&&y| y >= codomain) {
            return Err(Error::Invalid(format!("image {bad} outside a codomain of {codomain} points")));
        }
        Ok(FiniteMap { targets, codomain })
    }

    pub fn domain(&self) -> usize {
        self.targets.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn apply(&self, x: usize) -> usize {
        self.targets[x]
    }

    pub fn is_surjective(&self) -> bool {
        let hit: BTreeSet<usize> = self.targets.iter().copied().collect();
        hit.len() == self.codomain
    }
}

/// `If(μ)` for a map between finite spaces.
pub fn pushforward(f: &FiniteMap, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    mu.try_pushforward(|&x| {
        f.targets
            .get(x)
            .copied()
            .ok_or_else(|| Error::SpaceMismatch(format!("atom {x} outside the domain of a map on {} points", f.domain())))
    })
}

/// Bound `M` of the default indicator tables `{0 at x, −M elsewhere}`.
pub fn default_indicator_bound() -> Rational {
    Rational::from_integer(BigInt::from(1000))
}

/// Default test family on a finite space: indicator tables for every
/// point, plus the coordinate projections when the space is embedded.
pub fn default_finite_tests(space: &FiniteSpace) -> Vec<FunctionTable> {
    let n = space.len();
    let big = default_indicator_bound();
    let mut tests: Vec<FunctionTable> = (0..n).map(|x| FunctionTable::indicator(n, x, &big)).collect();
    if let Some(points) = space.points() {
        let dim = points.first().map(TropVector::dim).unwrap_or(0);
        for j in 0..dim {
            tests.push(FunctionTable::new(
                points.iter().map(|p| p.coord(j).as_rational().cloned().expect("finite embedding")).collect(),
            ));
        }
    }
    tests
}

/// `max_φ ϱ(μ(φ), ν(φ))` over a test family on a finite space.
pub fn measure_dist(mu: &FiniteMeasure, nu: &FiniteMeasure, tests: &[FunctionTable]) -> Result<f64> {
    if tests.is_empty() {
        return Err(Error::EmptyTestFamily);
    }
    let mut worst = 0.0f64;
    for phi in tests {
        let a = TropScalar::Finite(eval(mu, phi)?);
        let b = TropScalar::Finite(eval(nu, phi)?);
        worst = worst.max(a.rho(&b));
    }
    Ok(worst)
}

/// A continuous test function on ℝ^d used for point measures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointFunctional {
    /// `x ↦ x_j`.
    Projection { coord: usize },
    /// `x ↦ min(x_i, x_j)`.
    PairMin { first: usize, second: usize },
    /// `x ↦ min_j (a_j + x_j)`.
    MinAffine {
        #[serde(with = "crate::scalar::serde_rational_vec")]
        offsets: Vec<Rational>,
    },
}

impl PointFunctional {
    pub fn value(&self, x: &TropVector) -> Rational {
        let c = |j: usize| x.coord(j).as_rational().cloned().expect("points of compacta are finite");
        match self {
            PointFunctional::Projection { coord } => c(*coord),
            PointFunctional::PairMin { first, second } => c(*first).min(c(*second)),
            PointFunctional::MinAffine { offsets } => offsets
                .iter()
                .enumerate()
                .map(|(j, a)| a + c(j))
                .min()
                .expect("nonempty offsets"),
        }
    }
}

/// Size and seed of the random part of the default point test family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFamilyConfig {
    pub random_functions: usize,
    pub seed: u64,
}

impl Default for TestFamilyConfig {
    fn default() -> Self {
        TestFamilyConfig { random_functions: 32, seed: 0x5eed }
    }
}

/// Coordinate projections, pairwise minima, and `K` seeded random
/// min-plus affine functions with offsets in `[−1, 1]`.
pub fn default_point_tests(dim: usize, config: TestFamilyConfig) -> Vec<PointFunctional> {
    let mut tests: Vec<PointFunctional> = (0..dim).map(|coord| PointFunctional::Projection { coord }).collect();
    for first in 0..dim {
        for second in first + 1..dim {
            tests.push(PointFunctional::PairMin { first, second });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_functions {
        let offsets = (0..dim)
            .map(|_| Rational::new(BigInt::from(rng.gen_range(-64i64..=64)), BigInt::from(64)))
            .collect();
        tests.push(PointFunctional::MinAffine { offsets });
    }
    tests
}

/// `max_φ ϱ(μ(φ), ν(φ))` over a point test family.
pub fn point_measure_dist(mu: &PointMeasure, nu: &PointMeasure, tests: &[PointFunctional]) -> Result<f64> {
    if tests.is_empty() {
        return Err(Error::EmptyTestFamily);
    }
    for x in mu.support().chain(nu.support()) {
        x.ensure_finite()?;
    }
    Ok(tests
        .iter()
        .map(|phi| {
            let a = TropScalar::Finite(mu.eval_with(|x| phi.value(x)));
            let b = TropScalar::Finite(nu.eval_with(|x| phi.value(x)));
            a.rho(&b)
        })
        .fold(0.0, f64::max))
}

/// [`point_measure_dist`] with the default family for the atoms' dimension.
pub fn default_point_dist(mu: &PointMeasure, nu: &PointMeasure) -> Result<f64> {
    let dim = mu.support().next().map(TropVector::dim).unwrap_or(0);
    point_measure_dist(mu, nu, &default_point_tests(dim, TestFamilyConfig::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, rat};

    fn nu_t(t: &TropScalar) -> FiniteMeasure {
        from_dense(&[t.clone(), TropScalar::zero()]).unwrap()
    }

    fn phi01() -> FunctionTable {
        FunctionTable::new(vec![rat("0"), rat("1")])
    }

    #[test]
    fn eval_checks_space() {
        let mu = FiniteMeasure::dirac(3);
        assert!(matches!(eval(&mu, &phi01()), Err(Error::SpaceMismatch(_))));
        assert_eq!(eval(&FiniteMeasure::dirac(1), &phi01()).unwrap(), rat("1"));
    }

    #[test]
    fn density_roundtrip_and_examples() {
        let t = q("-2/3");
        assert_eq!(density_of(&nu_t(&t), 2).unwrap().values(), &[t.clone(), TropScalar::zero()]);
        let d = density_of(&FiniteMeasure::dirac(1), 3).unwrap();
        assert_eq!(d.values(), &[TropScalar::NegInf, TropScalar::zero(), TropScalar::NegInf]);
        assert_eq!(measure_of_density(&d), FiniteMeasure::dirac(1));
        assert!(DensityTable::new(vec![q("-1"), q("-1/2")]).is_err());
        // ν_f(φ) = max f(x) ⊙ φ(x)
        let f = DensityTable::new(vec![q("-1/4"), q("0"), TropScalar::NegInf]).unwrap();
        let phi = FunctionTable::new(vec![rat("2"), rat("1"), rat("50")]);
        assert_eq!(eval(&measure_of_density(&f), &phi).unwrap(), rat("7/4"));
    }

    #[test]
    fn merge_map_pushforward() {
        let f = FiniteMap::new(vec![0, 1, 1], 2).unwrap();
        let nu = from_dense(&[q("0"), q("-1"), q("-1/2")]).unwrap();
        assert_eq!(pushforward(&f, &nu).unwrap(), from_dense(&[q("0"), q("-1/2")]).unwrap());
        assert!(f.is_surjective());
        assert!(FiniteMap::new(vec![0, 2], 2).is_err());
        assert!(!FiniteMap::new(vec![0, 0], 2).unwrap().is_surjective());
    }

    #[test]
    fn measure_dist_examples() {
        let space = FiniteSpace::new(2).unwrap();
        let tests = default_finite_tests(&space);
        let mu = nu_t(&q("-1/3"));
        assert_eq!(measure_dist(&mu, &mu, &tests).unwrap(), 0.0);
        assert!(matches!(measure_dist(&mu, &mu, &[]), Err(Error::EmptyTestFamily)));

        // ν_{−1/i} → ν_0
        let limit = nu_t(&TropScalar::zero());
        let mut last = f64::INFINITY;
        for i in [1i64, 2, 4, 8, 16, 1 << 20] {
            let d = measure_dist(&nu_t(&TropScalar::ratio(-1, i)), &limit, &tests).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);

        // On φ = (0, 1) the Dirac at 0 stays e − 1 away from every ν_t.
        let d = measure_dist(&FiniteMeasure::dirac(0), &nu_t(&TropScalar::ratio(-1, 5)), &[phi01()]).unwrap();
        assert!((d - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn point_tests_are_seeded() {
        let a = default_point_tests(2, TestFamilyConfig::default());
        let b = default_point_tests(2, TestFamilyConfig::default());
        assert_eq!(a, b);
        assert_eq!(a.len(), 2 + 1 + 32);
    }
}

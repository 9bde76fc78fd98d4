//! Barycenter-preserving approximation of a measure by one atom per element
//! of a Max-Plus convex cover.

use serde::{Deserialize, Serialize};

use crate::barycenter::barycenter;
use crate::error::{Error, Result};
use crate::geometry::TropPolytope;
use crate::measure::IdemMeasure;
use crate::scalar::{Rational, TropScalar};
use crate::space::{default_point_dist, FiniteSpace, PointMeasure};
use crate::vector::TropVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverElement {
    Polytope(TropPolytope),
    /// An explicit finite set of points.
    Points { points: Vec<TropVector> },
}

impl CoverElement {
    pub fn contains(&self, x: &TropVector) -> Result<bool> {
        match self {
            CoverElement::Polytope(p) => p.contains(x),
            CoverElement::Points { points } => Ok(points.contains(x)),
        }
    }

    /// Elementwise inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &CoverElement) -> Result<bool> {
        let pts = match self {
            CoverElement::Polytope(p) => {
                if let CoverElement::Points { .. } = other {
                    if p.generators().len() > 1 {
                        return Ok(false);
                    }
                }
                p.generators()
            }
            CoverElement::Points { points } => points.as_slice(),
        };
        for x in pts {
            if !other.contains(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub elements: Vec<CoverElement>,
}

impl Cover {
    pub fn new(elements: Vec<CoverElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("a cover needs at least one element".into()));
        }
        Ok(Cover { elements })
    }

    /// Singletons of the support of `mu`.
    pub fn singletons(mu: &PointMeasure) -> Self {
        Cover { elements: mu.support().map(|x| CoverElement::Points { points: vec![x.clone()] }).collect() }
    }

    /// Index subsets of an embedded finite space.
    pub fn from_indices(space: &FiniteSpace, sets: &[Vec<usize>]) -> Result<Self> {
        let points = space.points().ok_or_else(|| Error::UnembeddedAtom("space has no embedding".into()))?;
        let mut elements = Vec::with_capacity(sets.len());
        for set in sets {
            let pts = set
                .iter()
                .map(|&i| points.get(i).cloned().ok_or_else(|| Error::Invalid(format!("index {i} outside the space"))))
                .collect::<Result<Vec<_>>>()?;
            elements.push(CoverElement::Points { points: pts });
        }
        Cover::new(elements)
    }

    /// Every element lies inside some element of `coarser`.
    pub fn refines(&self, coarser: &Cover) -> Result<bool> {
        for e in &self.elements {
            let mut inside = false;
            for c in &coarser.elements {
                if e.is_subset_of(c)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementSummary {
    pub element: usize,
    /// `s_i`, the largest weight inside the element.
    pub weight: TropScalar,
    /// `x_i`, barycenter of the conditional measure; absent when skipped.
    pub point: Option<TropVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Approximation {
    pub measure: PointMeasure,
    pub elements: Vec<ElementSummary>,
    /// `β(ν_U) = β(μ)`, recomputed from the output.
    pub beta_preserved: bool,
    /// `⊕ s_i ⊙ μ_i = μ`.
    pub reconstructs: bool,
}

/// `ν_U = ⊕ s_i ⊙ δ_{x_i}`.
pub fn cover_approximation(mu: &PointMeasure, cover: &Cover) -> Result<Approximation> {
    let atoms: Vec<(&TropVector, &Rational)> = mu.atoms().collect();
    let mut membership = vec![Vec::with_capacity(cover.elements.len()); atoms.len()];
    for (a, (x, _)) in atoms.iter().enumerate() {
        for e in &cover.elements {
            membership[a].push(e.contains(x)?);
        }
        if !membership[a].iter().any(|&m| m) {
            return Err(Error::UncoveredAtom { atom: x.to_string() });
        }
    }

    let mut pieces: Vec<(TropScalar, PointMeasure)> = Vec::new();
    let mut summaries = Vec::with_capacity(cover.elements.len());
    let mut terms: Vec<(TropVector, TropScalar)> = Vec::new();
    for (i, element) in cover.elements.iter().enumerate() {
        let inside: Vec<usize> = (0..atoms.len()).filter(|&a| membership[a][i]).collect();
        let Some(s) = inside.iter().map(|&a| atoms[a].1).max().cloned() else {
            summaries.push(ElementSummary { element: i, weight: TropScalar::NegInf, point: None });
            continue;
        };
        let conditional = PointMeasure::from_weights(
            inside.iter().map(|&a| (atoms[a].0.clone(), TropScalar::Finite(atoms[a].1 - &s))),
        )?;
        let x = barycenter(&conditional)?;
        if !element.contains(&x)? {
            return Err(Error::NonConvexElement { element: i, point: x.to_string() });
        }
        terms.push((x.clone(), TropScalar::Finite(s.clone())));
        summaries.push(ElementSummary { element: i, weight: TropScalar::Finite(s.clone()), point: Some(x) });
        pieces.push((TropScalar::Finite(s), conditional));
    }
    let measure = PointMeasure::from_weights(terms)?;
    let reconstructed = IdemMeasure::join(pieces.iter().map(|(s, m)| (s, m)))?;
    let beta_preserved = barycenter(&measure)? == barycenter(mu)?;
    Ok(Approximation { measure, elements: summaries, beta_preserved, reconstructs: reconstructed == *mu })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub cover_index: usize,
    pub dist: f64,
    pub beta_preserved: bool,
    pub atoms: usize,
}

/// Approximations along a refining chain of covers.
pub fn refinement_sweep(mu: &PointMeasure, chain: &[Cover]) -> Result<Vec<SweepRow>> {
    for (k, pair) in chain.windows(2).enumerate() {
        if !pair[1].refines(&pair[0])? {
            return Err(Error::Invalid(format!("cover {} does not refine cover {k}", k + 1)));
        }
    }
    chain
        .iter()
        .enumerate()
        .map(|(cover_index, cover)| {
            let approx = cover_approximation(mu, cover)?;
            Ok(SweepRow {
                cover_index,
                dist: default_point_dist(&approx.measure, mu)?,
                beta_preserved: approx.beta_preserved,
                atoms: approx.measure.len(),
            })
        })
        .collect()
}

/// Chain of dyadic sub-box covers of `[lo, hi]^d` with `2^level` cells per
/// axis for `level = 0..levels`, followed by the singleton cover of `mu`.
pub fn dyadic_chain(mu: &PointMeasure, lo: &Rational, hi: &Rational, dim: usize, levels: u32) -> Result<Vec<Cover>> {
    let mut chain = Vec::new();
    for level in 0..levels {
        let cells = 1i64 << level;
        let width = (hi - lo) / Rational::from_integer(cells.into());
        let mut elements = Vec::new();
        let mut idx = vec![0i64; dim];
        loop {
            let corner = |off: i64| {
                TropVector::from_rationals(idx.iter().map(|&k| lo + &width * Rational::from_integer((k + off).into())))
            };
            elements.push(CoverElement::Polytope(TropPolytope::boxed(&corner(0), &corner(1))?));
            let mut pos = 0;
            while pos < dim {
                idx[pos] += 1;
                if idx[pos] < cells {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == dim {
                break;
            }
        }
        chain.push(Cover::new(elements)?);
    }
    chain.push(Cover::singletons(mu));
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, rat};
    use crate::vector::tv;

    fn three_atoms() -> PointMeasure {
        PointMeasure::from_weights([
            (tv(&["-2", "-1/2"]), q("0")),
            (tv(&["-1/4", "-3/2"]), q("-1/2")),
            (tv(&["-1", "-1"]), q("-1/4")),
        ])
        .unwrap()
    }

    fn square() -> CoverElement {
        CoverElement::Polytope(TropPolytope::boxed(&tv(&["-2", "-2"]), &tv(&["0", "0"])).unwrap())
    }

    #[test]
    fn singleton_cover_is_identity() {
        let mu = three_atoms();
        let approx = cover_approximation(&mu, &Cover::singletons(&mu)).unwrap();
        assert_eq!(approx.measure, mu);
        assert!(approx.beta_preserved && approx.reconstructs);
    }

    #[test]
    fn whole_host_gives_dirac_at_barycenter() {
        let mu = three_atoms();
        let approx = cover_approximation(&mu, &Cover::new(vec![square()]).unwrap()).unwrap();
        assert_eq!(approx.measure, PointMeasure::dirac(barycenter(&mu).unwrap()));
    }

    #[test]
    fn overlapping_sub_boxes() {
        let mu = three_atoms();
        let left = TropPolytope::boxed(&tv(&["-2", "-2"]), &tv(&["-1", "0"])).unwrap();
        let right = TropPolytope::boxed(&tv(&["-1", "-2"]), &tv(&["0", "0"])).unwrap();
        let cover = Cover::new(vec![CoverElement::Polytope(left), CoverElement::Polytope(right)]).unwrap();
        let approx = cover_approximation(&mu, &cover).unwrap();
        assert_eq!(barycenter(&approx.measure).unwrap(), barycenter(&mu).unwrap());
        assert!(approx.reconstructs);
        assert!(default_point_dist(&approx.measure, &mu).unwrap() > 0.0);
    }

    #[test]
    fn uncovered_and_nonconvex() {
        let mu = three_atoms();
        let small = TropPolytope::boxed(&tv(&["-2", "-2"]), &tv(&["-1", "-1"])).unwrap();
        let err = cover_approximation(&mu, &Cover::new(vec![CoverElement::Polytope(small)]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::UncoveredAtom { .. }));
        let pts = CoverElement::Points { points: mu.support().cloned().collect() };
        let err = cover_approximation(&mu, &Cover::new(vec![pts]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonConvexElement { .. }));
    }

    #[test]
    fn dyadic_sweep_reaches_zero() {
        let mu = three_atoms();
        let chain = dyadic_chain(&mu, &rat("-2"), &rat("0"), 2, 4).unwrap();
        let rows = refinement_sweep(&mu, &chain).unwrap();
        assert!(rows.iter().all(|r| r.beta_preserved));
        assert_eq!(rows.last().unwrap().dist, 0.0);
        assert!(rows[0].dist > 0.0);
    }
}

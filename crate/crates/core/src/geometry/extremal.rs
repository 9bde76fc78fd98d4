use serde::Serialize;

use crate::error::Result;
use crate::scalar::TropScalar;
use crate::vector::TropVector;

use super::polytope::TropPolytope;

/// Generators that are not in the hull of the remaining generators.
pub fn extremal_points(p: &TropPolytope) -> Result<Vec<TropVector>> {
    let mut out = Vec::new();
    for (k, v) in p.generators().iter().enumerate() {
        let redundant = match p.without(k) {
            Some(rest) => rest.contains(v)?,
            None => false,
        };
        if !redundant {
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// A witness `x = t ⊙ y ⊕ z` with `x ∉ {y, z}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub t: TropScalar,
    pub y: TropVector,
    pub z: TropVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalCheck {
    pub extremal: Vec<TropVector>,
    /// For each generator, a decomposition found on the sample grid.
    pub decompositions: Vec<Option<Decomposition>>,
    pub grid_size: usize,
    /// Every generator is extremal iff no decomposition was found for it.
    pub consistent: bool,
}

/// Searches `samples` for `y, z ≠ x` and `t ≤ 0` with `x = t ⊙ y ⊕ z`.
///
/// For fixed `y, z` the largest admissible `t` is `min(0, min_j (x_j − y_j))`,
/// and a smaller `t` never helps, so the search over `t` is exact.
pub fn find_decomposition(x: &TropVector, samples: &[TropVector]) -> Option<Decomposition> {
    let zero = TropScalar::zero();
    let below: Vec<&TropVector> = samples
        .iter()
        .filter(|z| *z != x && z.coords().iter().zip(x.coords()).all(|(a, b)| a <= b))
        .collect();
    for y in samples.iter().filter(|y| *y != x) {
        let t = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(xj, yj)| xj.residual(yj))
            .min()
            .expect("positive dimension")
            .min_with(&zero);
        let ty = y.shift(&t);
        for z in &below {
            if ty.oplus(z).ok().as_ref() == Some(x) {
                return Some(Decomposition { t, y: y.clone(), z: (*z).clone() });
            }
        }
    }
    None
}

/// Generator-redundancy extremal points, cross-checked against the
/// decomposition definition on the grid generated by `levels`.
pub fn check_extremal_points(p: &TropPolytope, levels: &[TropScalar]) -> Result<ExtremalCheck> {
    let extremal = extremal_points(p)?;
    let samples = p.grid_points(levels);
    let decompositions: Vec<Option<Decomposition>> =
        p.generators().iter().map(|v| find_decomposition(v, &samples)).collect();
    let consistent = p
        .generators()
        .iter()
        .zip(&decompositions)
        .all(|(v, d)| extremal.contains(v) == d.is_none());
    Ok(ExtremalCheck { extremal, decompositions, grid_size: samples.len(), consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::coefficient_levels;
    use crate::scalar::{q, rat};
    use crate::vector::tv;

    #[test]
    fn y_has_three_extremal_points() {
        let y = TropPolytope::new(vec![tv(&["-2", "-1"]), tv(&["-1", "-2"]), tv(&["0", "0"])]).unwrap();
        let check = check_extremal_points(&y, &coefficient_levels(&rat("1/4"), 8)).unwrap();
        assert_eq!(check.extremal, y.generators().to_vec());
        assert!(check.consistent);
    }

    #[test]
    fn single_generator() {
        let p = TropPolytope::new(vec![tv(&["1/2", "-3"])]).unwrap();
        assert_eq!(extremal_points(&p).unwrap(), vec![tv(&["1/2", "-3"])]);
    }

    #[test]
    fn redundant_generator_is_dropped() {
        let v = tv(&["0", "-1"]);
        let w = tv(&["-1", "0"]);
        let middle = v.shift(&q("-1/2")).oplus(&w).unwrap();
        assert_eq!(middle, tv(&["-1/2", "0"]));
        let p = TropPolytope::new(vec![v.clone(), middle.clone(), w.clone()]).unwrap();
        let check = check_extremal_points(&p, &coefficient_levels(&rat("1/4"), 6)).unwrap();
        assert_eq!(check.extremal, vec![v.clone(), w.clone()]);
        let d = check.decompositions[1].as_ref().expect("middle generator decomposes");
        assert_eq!(d.y.shift(&d.t).oplus(&d.z).unwrap(), middle);
        assert!(check.consistent);
    }
}

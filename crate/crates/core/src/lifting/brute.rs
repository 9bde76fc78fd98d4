//! Exhaustive grid search for exact lifts, used as an independent oracle
//! for the constructive lifts on small instances.
//!
//! Candidates are drawn from a rational grid together with the values the
//! exactness equation forces (`target ⊖ param`). The search returns the
//! exact candidate closest to the inputs, with ties broken by enumeration
//! order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ConvexParams;
use crate::scalar::{Rational, TropScalar};
use crate::space::{from_dense, to_dense, FiniteMeasure, PointMeasure};
use crate::vector::TropVector;

use super::beta::BoxHost;
use super::LiftWitness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteConfig {
    pub step: Rational,
    pub depth: usize,
    pub budget: u128,
    /// Search only over these params instead of all candidates in `J`.
    pub fixed_params: Option<ConvexParams>,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig { step: Rational::new(1.into(), 8.into()), depth: 16, budget: 1_000_000, fixed_params: None }
    }
}

impl BruteConfig {
    /// `{0, −step, …, −depth·step}`.
    fn weight_grid(&self) -> Vec<TropScalar> {
        (0..=self.depth)
            .map(|k| TropScalar::Finite(-&self.step * Rational::from_integer((k as i64).into())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteWitness<W> {
    pub witness: W,
    /// Largest `ϱ` between a lifted value and the value it replaces.
    pub cost: f64,
    pub evaluated: u128,
}

fn dedup_sorted(mut v: Vec<TropScalar>) -> Vec<TropScalar> {
    v.sort();
    v.dedup();
    v
}

fn param_candidates(extra: impl IntoIterator<Item = TropScalar>, config: &BruteConfig) -> Vec<ConvexParams> {
    if let Some(p) = &config.fixed_params {
        return vec![p.clone()];
    }
    let mut taus: Vec<TropScalar> = vec![TropScalar::zero(), TropScalar::NegInf];
    taus.extend(config.weight_grid());
    taus.extend(extra.into_iter().filter(|v| !v.is_pos_inf() && *v <= TropScalar::zero()));
    let taus = dedup_sorted(taus);
    let mut out = Vec::with_capacity(2 * taus.len());
    for tau in taus.iter().rev() {
        out.push(ConvexParams::new(tau.clone(), TropScalar::zero()).expect("tau <= 0"));
        if !tau.is_zero() {
            out.push(ConvexParams::new(TropScalar::zero(), tau.clone()).expect("tau <= 0"));
        }
    }
    out
}

fn storable_weight(v: &TropScalar) -> bool {
    !v.is_pos_inf() && *v <= TropScalar::zero()
}

/// Exact `(λ', β', params')` with `combine = target` minimizing the largest
/// weight and parameter `ϱ`-distance to `(λ, β, params)`.
pub fn brute_force_lift_finite(
    lambda: &FiniteMeasure,
    beta: &FiniteMeasure,
    params: &ConvexParams,
    target: &FiniteMeasure,
    n: usize,
    config: &BruteConfig,
) -> Result<Option<BruteWitness<LiftWitness<FiniteMeasure>>>> {
    let l = to_dense(lambda, n)?;
    let b = to_dense(beta, n)?;
    let a = to_dense(target, n)?;
    let grid = config.weight_grid();
    let mut extra = vec![params.t().clone(), params.p().clone()];
    for ai in &a {
        extra.push(ai.clone());
        for v in l.iter().chain(&b) {
            extra.push(ai.residual(v));
        }
    }
    let candidates = param_candidates(extra, config);

    let columns = |p: &ConvexParams, i: usize| {
        let mut lc = vec![l[i].clone(), a[i].residual(p.t()), a[i].residual(p.p()), TropScalar::NegInf];
        lc.extend(grid.iter().cloned());
        let mut bc = vec![b[i].clone(), a[i].residual(p.p()), a[i].residual(p.t()), TropScalar::NegInf];
        bc.extend(grid.iter().cloned());
        (dedup_sorted(lc.into_iter().filter(storable_weight).collect()), dedup_sorted(bc.into_iter().filter(storable_weight).collect()))
    };
    let needed: u128 = candidates
        .iter()
        .map(|p| (0..n).map(|i| { let (x, y) = columns(p, i); (x.len() * y.len()) as u128 }).sum::<u128>())
        .sum();
    if needed > config.budget {
        return Err(Error::BudgetExceeded { needed, budget: config.budget });
    }

    type Choice = (TropScalar, TropScalar);
    let mut best: Option<(f64, ConvexParams, Vec<Choice>)> = None;
    for p in &candidates {
        let base = p.rho(params);
        if best.as_ref().is_some_and(|(c, _, _)| base >= *c) {
            continue;
        }
        // dp[state] = (max cost, choices); state bit 0: λ' has a zero, bit 1: β' has a zero.
        let mut dp: [Option<(f64, Vec<Choice>)>; 4] = [Some((base, Vec::new())), None, None, None];
        for i in 0..n {
            let (lc, bc) = columns(p, i);
            let mut next: [Option<(f64, Vec<Choice>)>; 4] = [None, None, None, None];
            for u in &lc {
                for v in &bc {
                    if p.apply(u, v) != a[i] {
                        continue;
                    }
                    let cost = u.rho(&l[i]).max(v.rho(&b[i]));
                    let bits = (u.is_zero() as usize) | ((v.is_zero() as usize) << 1);
                    for (state, entry) in dp.iter().enumerate() {
                        let Some((c, choices)) = entry else { continue };
                        let total = c.max(cost);
                        let slot = &mut next[state | bits];
                        if slot.as_ref().is_none_or(|(best_c, _)| total < *best_c) {
                            let mut ch = choices.clone();
                            ch.push((u.clone(), v.clone()));
                            *slot = Some((total, ch));
                        }
                    }
                }
            }
            dp = next;
        }
        if let Some((cost, choices)) = dp[3].take() {
            if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                best = Some((cost, p.clone(), choices));
            }
        }
    }
    let Some((cost, p, choices)) = best else { return Ok(None) };
    let (first, second): (Vec<_>, Vec<_>) = choices.into_iter().unzip();
    let witness = LiftWitness { first: from_dense(&first)?, second: from_dense(&second)?, params: p, cases: Vec::new() };
    Ok(Some(BruteWitness { witness, cost, evaluated: needed }))
}

/// Box grid `{lo_j + k·step} ∩ [lo_j, hi_j]`.
fn box_grid(lo: &TropScalar, hi: &TropScalar, step: &Rational) -> Vec<TropScalar> {
    let mut out = Vec::new();
    let mut v = lo.clone();
    let s = TropScalar::Finite(step.clone());
    while v <= *hi {
        out.push(v.clone());
        v = v.odot(&s);
    }
    out
}

/// Exact `(x', y', params')` in the box with `s = target`, minimizing the
/// largest coordinate and parameter `ϱ`-distance.
pub fn brute_force_lift_box(
    x: &TropVector,
    y: &TropVector,
    params: &ConvexParams,
    target: &TropVector,
    host: &BoxHost,
    config: &BruteConfig,
) -> Result<Option<BruteWitness<LiftWitness<TropVector>>>> {
    let d = x.dim();
    for v in [y, target, &host.lo] {
        x.check_dim(v)?;
    }
    let mut extra = vec![params.t().clone(), params.p().clone()];
    for j in 0..d {
        extra.push(target.coord(j).residual(x.coord(j)));
        extra.push(target.coord(j).residual(y.coord(j)));
    }
    let candidates = param_candidates(extra, config);
    let grids: Vec<Vec<TropScalar>> = (0..d).map(|j| box_grid(host.lo.coord(j), host.hi.coord(j), &config.step)).collect();
    let inside = |j: usize, v: &TropScalar| v.is_finite() && host.lo.coord(j) <= v && v <= host.hi.coord(j);
    let columns = |p: &ConvexParams, j: usize| {
        let z = target.coord(j);
        let mut xc = vec![x.coord(j).clone(), z.residual(p.t())];
        xc.extend(grids[j].iter().cloned());
        let mut yc = vec![y.coord(j).clone(), z.residual(p.p())];
        yc.extend(grids[j].iter().cloned());
        (dedup_sorted(xc.into_iter().filter(|v| inside(j, v)).collect()), dedup_sorted(yc.into_iter().filter(|v| inside(j, v)).collect()))
    };
    let needed: u128 = candidates
        .iter()
        .map(|p| (0..d).map(|j| { let (a, b) = columns(p, j); (a.len() * b.len()) as u128 }).sum::<u128>())
        .sum();
    if needed > config.budget {
        return Err(Error::BudgetExceeded { needed, budget: config.budget });
    }
    let mut best: Option<(f64, ConvexParams, Vec<TropScalar>, Vec<TropScalar>)> = None;
    'params: for p in &candidates {
        let mut cost = p.rho(params);
        let (mut xs, mut ys) = (Vec::with_capacity(d), Vec::with_capacity(d));
        for j in 0..d {
            let (xc, yc) = columns(p, j);
            let mut local: Option<(f64, TropScalar, TropScalar)> = None;
            for u in &xc {
                for v in &yc {
                    if p.apply(u, v) != *target.coord(j) {
                        continue;
                    }
                    let c = u.rho(x.coord(j)).max(v.rho(y.coord(j)));
                    if local.as_ref().is_none_or(|(lc, _, _)| c < *lc) {
                        local = Some((c, u.clone(), v.clone()));
                    }
                }
            }
            let Some((c, u, v)) = local else { continue 'params };
            cost = cost.max(c);
            xs.push(u);
            ys.push(v);
        }
        if best.as_ref().is_none_or(|(c, ..)| cost < *c) {
            best = Some((cost, p.clone(), xs, ys));
        }
    }
    Ok(best.map(|(cost, p, xs, ys)| BruteWitness {
        witness: LiftWitness { first: TropVector::new(xs), second: TropVector::new(ys), params: p, cases: Vec::new() },
        cost,
        evaluated: needed,
    }))
}

/// Exact `ν'` with `β(ν') = target` keeping the number of atoms, minimizing
/// the largest atom-matched `ϱ`-distance (weights and coordinates).
/// Limited to `k ≤ 3` atoms and `d ≤ 2`.
pub fn brute_force_lift_beta(
    nu: &PointMeasure,
    target: &TropVector,
    host: &BoxHost,
    config: &BruteConfig,
) -> Result<Option<BruteWitness<PointMeasure>>> {
    let atoms: Vec<(&TropVector, TropScalar)> = nu.atoms().map(|(x, w)| (x, TropScalar::Finite(w.clone()))).collect();
    let k = atoms.len();
    let d = target.dim();
    if k > 3 || d > 2 {
        return Err(Error::Invalid(format!("brute-force barycenter lift is limited to k <= 3, d <= 2 (got k = {k}, d = {d})")));
    }
    let grid = config.weight_grid();
    let weight_cols: Vec<Vec<TropScalar>> = atoms
        .iter()
        .map(|(_, w)| {
            let mut c = vec![w.clone()];
            c.extend(grid.iter().cloned());
            dedup_sorted(c)
        })
        .collect();
    let grids: Vec<Vec<TropScalar>> = (0..d).map(|j| box_grid(host.lo.coord(j), host.hi.coord(j), &config.step)).collect();
    let per_weight: u128 = (0..d).map(|j| (grids[j].len() as u128 + 2).pow(k as u32)).sum();
    let needed: u128 = weight_cols.iter().map(|c| c.len() as u128).product::<u128>() * per_weight;
    if needed > config.budget {
        return Err(Error::BudgetExceeded { needed, budget: config.budget });
    }

    let mut best: Option<(f64, Vec<TropScalar>, Vec<Vec<TropScalar>>)> = None;
    let mut idx = vec![0usize; k];
    loop {
        let ws: Vec<TropScalar> = idx.iter().zip(&weight_cols).map(|(&i, c)| c[i].clone()).collect();
        if ws.iter().max().is_some_and(TropScalar::is_zero) {
            let mut cost = ws.iter().zip(&atoms).map(|(w, (_, w0))| w.rho(w0)).fold(0.0, f64::max);
            // coords[i][j]
            let mut coords = vec![vec![TropScalar::NegInf; d]; k];
            let mut feasible = true;
            for j in 0..d {
                let z = target.coord(j);
                let inside = |v: &TropScalar| v.is_finite() && host.lo.coord(j) <= v && v <= host.hi.coord(j);
                let cols: Vec<Vec<TropScalar>> = (0..k)
                    .map(|i| {
                        let mut c = vec![atoms[i].0.coord(j).clone(), z.residual(&ws[i])];
                        c.extend(grids[j].iter().cloned());
                        dedup_sorted(c.into_iter().filter(|v| inside(v) && ws[i].odot(v) <= *z).collect())
                    })
                    .collect();
                // dp over atoms: [not yet attaining z, attaining z]
                let mut dp: [Option<(f64, Vec<TropScalar>)>; 2] = [Some((0.0, Vec::new())), None];
                for i in 0..k {
                    let mut next: [Option<(f64, Vec<TropScalar>)>; 2] = [None, None];
                    for v in &cols[i] {
                        let c = v.rho(atoms[i].0.coord(j));
                        let hit = ws[i].odot(v) == *z;
                        for (state, entry) in dp.iter().enumerate() {
                            let Some((acc, ch)) = entry else { continue };
                            let total = acc.max(c);
                            let slot = &mut next[state | hit as usize];
                            if slot.as_ref().is_none_or(|(b, _)| total < *b) {
                                let mut ch = ch.clone();
                                ch.push(v.clone());
                                *slot = Some((total, ch));
                            }
                        }
                    }
                    dp = next;
                }
                match dp[1].take() {
                    Some((c, ch)) => {
                        cost = cost.max(c);
                        for (i, v) in ch.into_iter().enumerate() {
                            coords[i][j] = v;
                        }
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && best.as_ref().is_none_or(|(c, ..)| cost < *c) {
                best = Some((cost, ws, coords));
            }
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return best
                    .map(|(cost, ws, coords)| {
                        let measure = PointMeasure::from_weights(coords.into_iter().map(TropVector::new).zip(ws))?;
                        Ok(BruteWitness { witness: measure, cost, evaluated: needed })
                    })
                    .transpose();
            }
            idx[pos] += 1;
            if idx[pos] < weight_cols[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barycenter::barycenter;
    use crate::lifting::finite::lift_s_finite;
    use crate::measure::IdemMeasure;
    use crate::params::s_point;
    use crate::scalar::{q, rat};
    use crate::vector::tv;

    fn m(w: &[&str]) -> FiniteMeasure {
        from_dense(&w.iter().map(|s| q(s)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn finite_oracle_agrees_with_constructive() {
        let (l, b) = (m(&["0", "-1", "-inf"]), m(&["-1/2", "0", "-1/4"]));
        let p = ConvexParams::balanced();
        let target = m(&["0", "-1/16", "-1/4"]);
        let constructive = lift_s_finite(&l, &b, &p, &target, 3).unwrap();
        let oracle = brute_force_lift_finite(&l, &b, &p, &target, 3, &BruteConfig::default()).unwrap().unwrap();
        let w = &oracle.witness;
        assert_eq!(IdemMeasure::combine(&w.first, &w.second, &w.params), target);
        let constructive_cost = constructive.first.weight_rho(&l).max(constructive.second.weight_rho(&b)).max(constructive.params.rho(&p));
        assert!(oracle.cost <= constructive_cost + 1e-12);
    }

    #[test]
    fn id_counterexample_has_only_far_witnesses() {
        // ⊕ = s(·, ·, 0, 0): every exact preimage of ν_{-1/i} stays far from (δ_0, δ_1)
        let (d0, d1) = (m(&["0", "-inf"]), m(&["-inf", "0"]));
        let config = BruteConfig { fixed_params: Some(ConvexParams::balanced()), ..BruteConfig::default() };
        for i in [1, 2, 4, 8] {
            let target = from_dense(&[TropScalar::ratio(-1, i), q("0")]).unwrap();
            let best = brute_force_lift_finite(&d0, &d1, &ConvexParams::balanced(), &target, 2, &config).unwrap().unwrap();
            assert!(best.cost >= 1.0 - 1e-12, "i = {i}: {}", best.cost);
        }
    }

    #[test]
    fn box_oracle() {
        let host = BoxHost::cube(2, rat("-2"), rat("0")).unwrap();
        let (x, y) = (tv(&["-1", "-1/2"]), tv(&["-1/2", "-3/2"]));
        let p = ConvexParams::with_t(q("-3/10")).unwrap();
        let target = tv(&["-9/20", "-3/4"]);
        let best = brute_force_lift_box(&x, &y, &p, &target, &host, &BruteConfig::default()).unwrap().unwrap();
        assert_eq!(s_point(&best.witness.first, &best.witness.second, &best.witness.params).unwrap(), target);
        assert!(best.cost < 0.2);
    }

    #[test]
    fn beta_oracle_on_y_measure() {
        let host = BoxHost::cube(2, rat("-2"), rat("0")).unwrap();
        let nu = PointMeasure::from_weights([(tv(&["-2", "-1"]), q("0")), (tv(&["-1", "-2"]), q("0"))]).unwrap();
        let target = tv(&["-1", "-9/10"]);
        let best = brute_force_lift_beta(&nu, &target, &host, &BruteConfig::default()).unwrap().unwrap();
        assert_eq!(barycenter(&best.witness).unwrap(), target);
    }

    #[test]
    fn budget_is_enforced() {
        let (l, b) = (m(&["0", "-1", "-inf"]), m(&["-1/2", "0", "-1/4"]));
        let config = BruteConfig { budget: 10, ..BruteConfig::default() };
        let err = brute_force_lift_finite(&l, &b, &ConvexParams::balanced(), &l, 3, &config).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}

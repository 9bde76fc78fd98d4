//! Replayable certificates for the two non-openness counterexamples.
//!
//! A certificate stores its seed, sample count, a digest of every sample,
//! and a handful of explicit samples, so [`replay`] can re-derive the whole
//! verdict without trusting the run that produced it.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::barycenter::barycenter;
use crate::error::{Error, Result};
use crate::measure::IdemMeasure;
use crate::params::ConvexParams;
use crate::scalar::{Rational, TropScalar};
use crate::space::{eval, from_dense, FiniteMeasure, FunctionTable, PointMeasure};
use crate::vector::TropVector;

use super::polytope::TropPolytope;

pub const CERTIFICATE_VERSION: u32 = 1;

/// Explicit samples stored inside a certificate.
const STORED_SAMPLES: usize = 8;

/// Draw budget per requested sample before the sampler gives up.
const DRAWS_PER_SAMPLE: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub claim: String,
    pub i: u64,
    pub seed: u64,
    pub samples: usize,
    pub draws: usize,
    pub sample_digest: String,
    pub witness: Witness,
    pub holds: bool,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    IdOplus(IdOplusWitness),
    YBeta(YBetaWitness),
}

/// A feasible pair `(α, β)` on `{0, 1}` as weight vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub alpha: [TropScalar; 2],
    pub beta: [TropScalar; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdOplusWitness {
    /// Weights of `ν_{−1/i} = (−1/i) ⊙ δ_0 ⊕ δ_1`.
    pub target: [TropScalar; 2],
    /// `φ(0) = 0, φ(1) = 1`.
    #[serde(with = "crate::scalar::serde_rational_vec")]
    pub test_function: Vec<Rational>,
    /// The neighbourhood `O = {(μ, γ) | |μ(φ)| < bound}` of `(δ_0, δ_1)`.
    #[serde(with = "crate::scalar::serde_rational")]
    pub neighborhood_bound: Rational,
    /// Value of `α(φ)` forced on the whole feasible set.
    #[serde(with = "crate::scalar::serde_rational")]
    pub forced_value: Rational,
    pub derivation: Vec<String>,
    pub stored: Vec<WeightPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub at: TropVector,
    #[serde(with = "crate::scalar::serde_rational")]
    pub w: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YBetaSample {
    pub atoms: Vec<WeightedPoint>,
    /// Atom on the diagonal realising the first barycenter coordinate.
    pub diagonal_achiever: TropVector,
    #[serde(with = "crate::scalar::serde_rational")]
    pub phi_min_value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YBetaWitness {
    pub generators: Vec<TropVector>,
    pub nu: Vec<TropVector>,
    pub nu_barycenter: TropVector,
    pub target: TropVector,
    /// `−1 + 1/i`, the lower bound on `μ(φ_min)`.
    #[serde(with = "crate::scalar::serde_rational")]
    pub lower_bound: Rational,
    /// `ν(φ_min)`, with `φ_min(p) = min(p_1, p_2)`.
    #[serde(with = "crate::scalar::serde_rational")]
    pub nu_value: Rational,
    /// `ϱ(−1 + 1/i, −2)`.
    pub gap: f64,
    #[serde(with = "crate::scalar::serde_rational")]
    pub min_observed: Rational,
    pub infeasible_draws: usize,
    pub stored: Vec<YBetaSample>,
}

fn digest_hex(hasher: Sha256) -> String {
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn grid_value(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(lo * den..=hi * den).into(), den.into())
}

// ---------------------------------------------------------------------------
// ⊕ on ID × ID is not open at (δ_0, δ_1)
// ---------------------------------------------------------------------------

fn id_oplus_draw(rng: &mut ChaCha8Rng, minus_inv_i: &TropScalar) -> TropScalar {
    match rng.gen_range(0..4) {
        0 => TropScalar::zero(),
        1 => minus_inv_i.clone(),
        2 => TropScalar::NegInf,
        _ => TropScalar::Finite(grid_value(rng, -3, 0, 64)),
    }
}

fn nu_t(t: &TropScalar) -> FiniteMeasure {
    from_dense(&[t.clone(), TropScalar::zero()]).expect("normalized")
}

fn phi01() -> FunctionTable {
    FunctionTable::new(vec![Rational::zero(), int(1)])
}

/// Checks a single feasible pair; `Err` describes the violated step.
fn check_id_pair(pair: &WeightPair, target: &FiniteMeasure, minus_inv_i: &TropScalar) -> std::result::Result<(), String> {
    let alpha = from_dense(&pair.alpha).map_err(|e| format!("alpha: {e}"))?;
    let beta = from_dense(&pair.beta).map_err(|e| format!("beta: {e}"))?;
    if IdemMeasure::combine(&alpha, &beta, &ConvexParams::balanced()) != *target {
        return Err("alpha ⊕ beta does not reproduce the target".into());
    }
    if pair.alpha[0] > *minus_inv_i {
        return Err("alpha_0 > -1/i".into());
    }
    if !pair.alpha[1].is_zero() {
        return Err("alpha_1 != 0".into());
    }
    let value = eval(&alpha, &phi01()).map_err(|e| e.to_string())?;
    if value != int(1) {
        return Err(format!("alpha(phi) = {value}, expected 1"));
    }
    Ok(())
}

struct IdRun {
    draws: usize,
    digest: String,
    failures: usize,
    stored: Vec<WeightPair>,
}

fn run_id_oplus(i: u64, samples: usize, seed: u64) -> Result<IdRun> {
    let minus_inv_i = TropScalar::Finite(Rational::new((-1).into(), (i as i64).into()));
    let target = nu_t(&minus_inv_i);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hasher = Sha256::new();
    let mut run = IdRun { draws: 0, digest: String::new(), failures: 0, stored: Vec::new() };
    let mut accepted = 0;
    while accepted < samples {
        if run.draws >= samples.max(1) * DRAWS_PER_SAMPLE {
            return Err(Error::Invalid("feasible-set sampler exhausted its draw budget".into()));
        }
        run.draws += 1;
        let w: Vec<TropScalar> = (0..4).map(|_| id_oplus_draw(&mut rng, &minus_inv_i)).collect();
        let pair = WeightPair { alpha: [w[0].clone(), w[1].clone()], beta: [w[2].clone(), w[3].clone()] };
        // Feasibility: both normalized and α ⊕ β = ν_{−1/i}, decided from
        // the raw constraints rather than the derived consequences.
        let normalized = |a: &TropScalar, b: &TropScalar| a.oplus(b).is_zero();
        let feasible = normalized(&pair.alpha[0], &pair.alpha[1])
            && normalized(&pair.beta[0], &pair.beta[1])
            && pair.alpha[0].oplus(&pair.beta[0]) == minus_inv_i
            && pair.alpha[1].oplus(&pair.beta[1]).is_zero();
        if !feasible {
            continue;
        }
        accepted += 1;
        hasher.update(format!("{}|{}|{}|{};", pair.alpha[0], pair.alpha[1], pair.beta[0], pair.beta[1]));
        if check_id_pair(&pair, &target, &minus_inv_i).is_err() {
            run.failures += 1;
        }
        if run.stored.len() < STORED_SAMPLES {
            run.stored.push(pair);
        }
    }
    run.digest = digest_hex(hasher);
    Ok(run)
}

/// Certificate that no feasible `(α, β)` with `α ⊕ β = ν_{−1/i}` enters the
/// neighbourhood `{|μ(φ)| < 1/2}` of `(δ_0, δ_1)`.
pub fn certify_id_oplus_not_open(i: u64, samples: usize, seed: u64) -> Result<Certificate> {
    if i == 0 {
        return Err(Error::Invalid("i must be at least 1".into()));
    }
    let run = run_id_oplus(i, samples, seed)?;
    let minus_inv_i = TropScalar::Finite(Rational::new((-1).into(), (i as i64).into()));
    let derivation = vec![
        format!("alpha_0 ⊕ beta_0 = {minus_inv_i} implies alpha_0 <= {minus_inv_i} < 0"),
        "alpha_0 ⊕ alpha_1 = 0 and alpha_0 < 0 imply alpha_1 = 0".into(),
        "alpha(phi) = max(alpha_0 + 0, alpha_1 + 1) = max(alpha_0, 1) = 1".into(),
        "|alpha(phi)| = 1 >= 1/2, so (alpha, beta) lies outside O".into(),
    ];
    let witness = IdOplusWitness {
        target: [minus_inv_i, TropScalar::zero()],
        test_function: vec![Rational::zero(), int(1)],
        neighborhood_bound: Rational::new(1.into(), 2.into()),
        forced_value: int(1),
        derivation,
        stored: run.stored,
    };
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        claim: "id-oplus-not-open".into(),
        i,
        seed,
        samples,
        draws: run.draws,
        sample_digest: run.digest,
        witness: Witness::IdOplus(witness),
        holds: run.failures == 0,
        failures: run.failures,
    })
}

/// At `t = 0` the obstruction disappears: `(δ_0, δ_1)` itself is feasible
/// and `δ_0(φ) = 0` lies inside the neighbourhood.
pub fn id_oplus_limit_is_feasible() -> bool {
    let d0 = from_dense(&[TropScalar::zero(), TropScalar::NegInf]).expect("dirac");
    let d1 = from_dense(&[TropScalar::NegInf, TropScalar::zero()]).expect("dirac");
    let limit = nu_t(&TropScalar::zero());
    let value = eval(&d0, &phi01()).expect("same space");
    IdemMeasure::combine(&d0, &d1, &ConvexParams::balanced()) == limit && value.is_zero()
}

// ---------------------------------------------------------------------------
// β_Y is not open at δ_a ⊕ δ_b
// ---------------------------------------------------------------------------

/// `Y`: the tropical hull of `(−2, −1)`, `(−1, −2)` and `(0, 0)`.
pub fn y_polytope() -> TropPolytope {
    TropPolytope::new(vec![
        TropVector::from_rationals([int(-2), int(-1)]),
        TropVector::from_rationals([int(-1), int(-2)]),
        TropVector::from_rationals([int(0), int(0)]),
    ])
    .expect("valid generators")
}

/// `δ_a ⊕ δ_b` with `a = (−2, −1)`, `b = (−1, −2)`.
pub fn y_nu() -> PointMeasure {
    PointMeasure::from_weights([
        (TropVector::from_rationals([int(-2), int(-1)]), TropScalar::zero()),
        (TropVector::from_rationals([int(-1), int(-2)]), TropScalar::zero()),
    ])
    .expect("normalized")
}

/// `c_i = (−1 + 1/i, −1 + 1/i)`.
pub fn y_target(i: u64) -> TropVector {
    let v = int(-1) + Rational::new(1.into(), (i as i64).into());
    TropVector::from_rationals([v.clone(), v])
}

/// `φ_min(p) = min(p_1, p_2)`.
pub fn phi_min(p: &TropVector) -> Rational {
    let a = p.coord(0).as_rational().expect("finite").clone();
    let b = p.coord(1).as_rational().expect("finite").clone();
    a.min(b)
}

/// A point on one of the three pieces `A`, `B`, `C` of `Y`.
fn y_piece_point(rng: &mut ChaCha8Rng) -> TropVector {
    match rng.gen_range(0..3) {
        0 => TropVector::from_rationals([grid_value(rng, -2, -1, 64), int(-1)]),
        1 => TropVector::from_rationals([int(-1), grid_value(rng, -2, -1, 64)]),
        _ => {
            let s = grid_value(rng, -1, 0, 64);
            TropVector::from_rationals([s.clone(), s])
        }
    }
}

fn coord(p: &TropVector, j: usize) -> Rational {
    p.coord(j).as_rational().expect("finite").clone()
}

/// Greatest weights with `max_k (w_k + p_k) ≤ c`, then exactness check.
fn solve_weights(points: &[TropVector], c: &TropVector) -> Option<Vec<Rational>> {
    let w: Vec<Rational> = points
        .iter()
        .map(|p| {
            let m = (0..2).map(|j| coord(c, j) - coord(p, j)).min().expect("2-d");
            m.min(Rational::zero())
        })
        .collect();
    if !w.iter().any(Zero::is_zero) {
        return None;
    }
    let hits = (0..2).all(|j| points.iter().zip(&w).map(|(p, wk)| wk + coord(p, j)).max() == Some(coord(c, j)));
    hits.then_some(w)
}

fn y_sample_measure(rng: &mut ChaCha8Rng, c: &TropVector) -> Option<Vec<WeightedPoint>> {
    let k = rng.gen_range(1..=4);
    let mut points: Vec<TropVector> = (0..k).map(|_| y_piece_point(rng)).collect();
    points.sort();
    points.dedup();
    let mut w = solve_weights(&points, c)?;
    // Lower some weights at random while the barycenter stays at c.
    for idx in 0..w.len() {
        if rng.gen_bool(0.5) {
            let saved = w[idx].clone();
            w[idx] -= grid_value(rng, 0, 1, 64);
            let ok = w.iter().any(Zero::is_zero)
                && (0..2).all(|j| points.iter().zip(&w).map(|(p, wk)| wk + coord(p, j)).max() == Some(coord(c, j)));
            if !ok {
                w[idx] = saved;
            }
        }
    }
    Some(points.into_iter().zip(w).map(|(at, w)| WeightedPoint { at, w }).collect())
}

/// Checks the separation on one sample. Returns the diagonal achiever.
fn check_y_sample(
    atoms: &[WeightedPoint],
    c: &TropVector,
    lower: &Rational,
    host: &TropPolytope,
) -> std::result::Result<(TropVector, Rational), String> {
    let mu = PointMeasure::from_weights(atoms.iter().map(|a| (a.at.clone(), TropScalar::Finite(a.w.clone()))))
        .map_err(|e| e.to_string())?;
    for WeightedPoint { at: p, .. } in atoms {
        if !host.contains(p).map_err(|e| e.to_string())? {
            return Err(format!("atom {p} is outside Y"));
        }
    }
    if barycenter(&mu).map_err(|e| e.to_string())? != *c {
        return Err("barycenter differs from c_i".into());
    }
    // Any atom realising the first coordinate −1 + 1/i > −1 must sit on the
    // diagonal piece with weight at least −1 + 1/i.
    let c1 = coord(c, 0);
    let achiever = atoms
        .iter()
        .filter(|a| &a.w + coord(&a.at, 0) == c1)
        .find(|a| coord(&a.at, 0) == coord(&a.at, 1) && a.w >= *lower)
        .map(|a| a.at.clone())
        .ok_or("no diagonal achiever with weight >= -1 + 1/i")?;
    let value = mu.eval_with(phi_min);
    if value < *lower {
        return Err(format!("mu(phi_min) = {value} < -1 + 1/i"));
    }
    Ok((achiever, value))
}

struct YRun {
    draws: usize,
    infeasible: usize,
    digest: String,
    failures: usize,
    min_observed: Option<Rational>,
    stored: Vec<YBetaSample>,
}

fn run_y_beta(i: u64, samples: usize, seed: u64) -> Result<YRun> {
    let c = y_target(i);
    let lower = coord(&c, 0);
    let host = y_polytope();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hasher = Sha256::new();
    let mut run = YRun { draws: 0, infeasible: 0, digest: String::new(), failures: 0, min_observed: None, stored: Vec::new() };
    let mut accepted = 0;
    while accepted < samples {
        if run.draws >= samples.max(1) * DRAWS_PER_SAMPLE {
            return Err(Error::Invalid(format!("InfeasibleBarycenter: sampler could not hit {c} within its budget")));
        }
        run.draws += 1;
        let Some(atoms) = y_sample_measure(&mut rng, &c) else {
            run.infeasible += 1;
            continue;
        };
        accepted += 1;
        for a in &atoms {
            hasher.update(format!("{}@{}", a.at, a.w));
        }
        hasher.update(";");
        match check_y_sample(&atoms, &c, &lower, &host) {
            Ok((achiever, value)) => {
                if run.min_observed.as_ref().is_none_or(|m| value < *m) {
                    run.min_observed = Some(value.clone());
                }
                if run.stored.len() < STORED_SAMPLES {
                    run.stored.push(YBetaSample { atoms, diagonal_achiever: achiever, phi_min_value: value });
                }
            }
            Err(_) => run.failures += 1,
        }
    }
    run.digest = digest_hex(hasher);
    Ok(run)
}

/// Certificate that every sampled `μ` on `Y` with `β(μ) = c_i` stays
/// uniformly far from `ν = δ_a ⊕ δ_b` on the functional `φ_min`.
pub fn certify_y_beta_not_open(i: u64, samples: usize, seed: u64) -> Result<Certificate> {
    if i == 0 {
        return Err(Error::Invalid("i must be at least 1".into()));
    }
    let run = run_y_beta(i, samples, seed)?;
    let nu = y_nu();
    let c = y_target(i);
    let lower = coord(&c, 0);
    let nu_value = nu.eval_with(phi_min);
    let gap = TropScalar::Finite(lower.clone()).rho(&TropScalar::Finite(nu_value.clone()));
    let witness = YBetaWitness {
        generators: y_polytope().generators().to_vec(),
        nu: nu.support().cloned().collect(),
        nu_barycenter: barycenter(&nu)?,
        target: c,
        lower_bound: lower.clone(),
        nu_value,
        gap,
        min_observed: run.min_observed.clone().unwrap_or(lower),
        infeasible_draws: run.infeasible,
        stored: run.stored,
    };
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        claim: "y-beta-not-open".into(),
        i,
        seed,
        samples,
        draws: run.draws,
        sample_digest: run.digest,
        witness: Witness::YBeta(witness),
        holds: run.failures == 0 && gap > 0.0,
        failures: run.failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replay {
    pub stored_samples_ok: bool,
    pub digest_matches: bool,
    pub verdict_matches: bool,
}

impl Replay {
    pub fn ok(&self) -> bool {
        self.stored_samples_ok && self.digest_matches && self.verdict_matches
    }
}

/// Re-checks the stored samples directly, then regenerates the full sample
/// stream from the stored seed and compares digest and verdict.
pub fn replay(cert: &Certificate) -> Result<Replay> {
    match &cert.witness {
        Witness::IdOplus(w) => {
            let minus_inv_i = TropScalar::Finite(Rational::new((-1).into(), (cert.i as i64).into()));
            let target = nu_t(&minus_inv_i);
            let stored_samples_ok = w.target[0] == minus_inv_i
                && w.stored.iter().all(|pair| check_id_pair(pair, &target, &minus_inv_i).is_ok());
            let run = run_id_oplus(cert.i, cert.samples, cert.seed)?;
            Ok(Replay {
                stored_samples_ok,
                digest_matches: run.digest == cert.sample_digest && run.draws == cert.draws,
                verdict_matches: (run.failures == 0) == cert.holds && run.failures == cert.failures,
            })
        }
        Witness::YBeta(w) => {
            let c = y_target(cert.i);
            let host = y_polytope();
            let stored_samples_ok = w.target == c
                && w.nu_value == y_nu().eval_with(phi_min)
                && w.stored.iter().all(|s| match check_y_sample(&s.atoms, &c, &w.lower_bound, &host) {
                    Ok((_, value)) => value == s.phi_min_value,
                    Err(_) => false,
                });
            let run = run_y_beta(cert.i, cert.samples, cert.seed)?;
            Ok(Replay {
                stored_samples_ok,
                digest_matches: run.digest == cert.sample_digest && run.draws == cert.draws,
                verdict_matches: (run.failures == 0 && w.gap > 0.0) == cert.holds && run.failures == cert.failures,
            })
        }
    }
}

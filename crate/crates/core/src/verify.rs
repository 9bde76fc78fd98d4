//! The verification suite: seeded randomized checks of every algebraic law
//! and lift, reported as `(suite, case, verdict, detail)` rows.
//!
//! Instances are independent and derive their generator from the master
//! seed and their index, so they run in parallel while the report stays
//! byte-identical for a given seed.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approximation::{cover_approximation, dyadic_chain, refinement_sweep, Cover, CoverElement};
use crate::barycenter::{barycenter, barycenter_of_finite_measures};
use crate::error::{Error, Result};
use crate::geometry::{
    certify_id_oplus_not_open, certify_y_beta_not_open, check_extremal_points, coefficient_levels, extremal_points,
    replay, Certificate, TropPolytope, Witness,
};
use crate::lifting::fiber::sweep_levels;
use crate::lifting::{
    brute_force_lift_finite, lift_beta, lift_merge_fiber, lift_s_box, lift_s_finite, lift_s_interval,
    lift_surjection_fiber, BoxHost, BruteConfig, MergeMap,
};
use crate::measure::IdemMeasure;
use crate::params::{s_point, ConvexParams};
use crate::sampling as gen;
use crate::scalar::{Rational, TropScalar};
use crate::space::{
    default_finite_tests, default_point_dist, density_of, eval, from_dense, measure_dist, measure_of_density,
    pushforward, to_dense, FiniteMeasure, FiniteSpace, FunctionTable, PointMeasure,
};
use crate::vector::TropVector;

pub const DEFAULT_SEED: u64 = 7;

/// Number of `ε_j = 2^{−j}` steps in a convergence protocol.
pub const EPS_STEPS: u32 = 20;

/// Required witness distance at the last step of the finite-lift protocol.
pub const FINAL_DISTANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Default,
    Tiny,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Scale::Default),
            "tiny" => Ok(Scale::Tiny),
            other => Err(Error::Parse(format!("unknown scale {other:?}, expected default or tiny"))),
        }
    }
}

/// Deliberate faults for checking that the suite detects broken code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// `combine` ignores its params and returns `λ ⊕ β`.
    TamperCombine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub scale: Scale,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, scale: Scale::Default, fault: None }
    }
}

impl SuiteConfig {
    pub fn new(seed: u64, scale: Scale) -> Self {
        SuiteConfig { seed, scale, fault: None }
    }

    /// Instance count: `full` at default scale, a twentieth (at least 5)
    /// at tiny scale.
    fn count(&self, full: usize) -> usize {
        match self.scale {
            Scale::Default => full,
            Scale::Tiny => (full / 20).max(5),
        }
    }

    fn combine<A: Ord + Clone>(&self, l: &IdemMeasure<A>, b: &IdemMeasure<A>, params: &ConvexParams) -> IdemMeasure<A> {
        match self.fault {
            Some(Fault::TamperCombine) => IdemMeasure::combine(l, b, &ConvexParams::balanced()),
            None => IdemMeasure::combine(l, b, params),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    pub case: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Acceptance criterion number, when the suite implements one.
    pub criterion: Option<u8>,
    pub suite: String,
    pub rows: Vec<Row>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail).count()
    }
}

/// Outcome of one check on one instance.
enum Outcome {
    Pass,
    Fail(String),
    /// Counted and reported, never failing.
    Note,
}

struct Check {
    case: &'static str,
    outcome: Outcome,
}

fn pass(case: &'static str) -> Check {
    Check { case, outcome: Outcome::Pass }
}

fn fail(case: &'static str, detail: impl Into<String>) -> Check {
    Check { case, outcome: Outcome::Fail(detail.into()) }
}

fn note(case: &'static str) -> Check {
    Check { case, outcome: Outcome::Note }
}

fn expect(case: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Check {
    if ok {
        pass(case)
    } else {
        fail(case, detail())
    }
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    noted: usize,
    first_failure: Option<String>,
}

/// Runs `count` instances in parallel and folds their checks into one row
/// per case, in order of first appearance.
fn run_instances<F>(suite: &str, count: usize, f: F) -> Vec<Row>
where
    F: Fn(u64) -> Vec<Check> + Sync,
{
    let results: Vec<Vec<Check>> = (0..count as u64).into_par_iter().map(&f).collect();
    let mut order: Vec<&'static str> = Vec::new();
    let mut tallies: Vec<Tally> = Vec::new();
    for (index, checks) in results.into_iter().enumerate() {
        for c in checks {
            let pos = order.iter().position(|&k| k == c.case).unwrap_or_else(|| {
                order.push(c.case);
                tallies.push(Tally::default());
                order.len() - 1
            });
            let t = &mut tallies[pos];
            match c.outcome {
                Outcome::Pass => t.passed += 1,
                Outcome::Note => t.noted += 1,
                Outcome::Fail(detail) => {
                    t.failed += 1;
                    t.first_failure.get_or_insert_with(|| format!("instance {index}: {detail}"));
                }
            }
        }
    }
    order
        .into_iter()
        .zip(tallies)
        .map(|(case, t)| {
            let (verdict, detail) = if t.noted > 0 && t.passed + t.failed == 0 {
                (Verdict::Pass, format!("{} occurrences", t.noted))
            } else if t.failed == 0 && t.passed > 0 {
                (Verdict::Pass, format!("{}/{} checks", t.passed, t.passed))
            } else {
                let total = t.passed + t.failed;
                let first = t.first_failure.unwrap_or_else(|| "no checks ran".into());
                (Verdict::Fail, format!("{} of {total} failed; first: {first}", t.failed))
            };
            Row { suite: suite.into(), case: case.into(), verdict, detail }
        })
        .collect()
}

fn runtime_row(suite: &str, seconds: f64, budget: f64) -> Row {
    Row {
        suite: suite.into(),
        case: "runtime".into(),
        verdict: if seconds < budget { Verdict::Pass } else { Verdict::Fail },
        detail: format!("{seconds:.2} s (budget {budget} s)"),
    }
}

fn timed(criterion: Option<u8>, suite: &str, budget: Option<f64>, body: impl FnOnce() -> Vec<Row>) -> SuiteReport {
    let start = Instant::now();
    let mut rows = body();
    let seconds = start.elapsed().as_secs_f64();
    if let Some(b) = budget {
        rows.push(runtime_row(suite, seconds, b));
    }
    SuiteReport { criterion, suite: suite.into(), rows, seconds }
}

fn single(suite: &str, case: &str, ok: bool, detail: String) -> Row {
    Row { suite: suite.into(), case: case.into(), verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn err_row(suite: &str, case: &str, e: &Error) -> Row {
    single(suite, case, false, e.to_string())
}

fn finite_dist(a: &FiniteMeasure, b: &FiniteMeasure, tests: &[FunctionTable]) -> f64 {
    measure_dist(a, b, tests).unwrap_or(f64::INFINITY)
}

// ---------------------------------------------------------------------------
// 1. Measure axioms

pub fn measure_axioms(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "measure-axioms";
    timed(Some(1), suite, Some(5.0), || {
        run_instances(suite, cfg.count(1000), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let n = rng.gen_range(1..=6);
            let mu = gen::finite_measure(&mut rng, n);
            let phi = gen::function_table(&mut rng, n);
            let psi = gen::function_table(&mut rng, n);
            let c = gen::grid(&mut rng, -4, 4, 16);
            let base = eval(&mu, &phi).expect("same space");
            let shifted = eval(&mu, &phi.shift(&c)).expect("same space");
            let joined = eval(&mu, &phi.oplus(&psi).expect("same length")).expect("same space");
            let other = eval(&mu, &psi).expect("same space");
            let constant = eval(&mu, &FunctionTable::constant(n, c.clone())).expect("same space");
            vec![
                expect("shift μ(c ⊙ φ) = c ⊙ μ(φ)", shifted == &base + &c, || format!("{shifted} vs {}", &base + &c)),
                expect("max-additive μ(φ ⊕ ψ) = μ(φ) ⊕ μ(ψ)", joined == (&base).max(&other).clone(), || {
                    format!("{joined} vs max({base}, {other})")
                }),
                expect("normalized μ(c_X) = c", constant == c, || format!("{constant} vs {c}")),
            ]
        })
    })
}

// ---------------------------------------------------------------------------
// 2. Naturality of combine

pub fn naturality(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "naturality";
    timed(Some(2), suite, None, || {
        run_instances(suite, cfg.count(500), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=6);
            let f = gen::finite_map(&mut rng, n, m);
            let l = gen::finite_measure(&mut rng, n);
            let b = gen::finite_measure(&mut rng, n);
            let params = gen::params(&mut rng);
            let lhs = pushforward(&f, &cfg.combine(&l, &b, &params)).expect("domain matches");
            let rhs = cfg.combine(
                &pushforward(&f, &l).expect("domain matches"),
                &pushforward(&f, &b).expect("domain matches"),
                &params,
            );
            let normalized = lhs.atoms().any(|(_, w)| num_traits::Zero::is_zero(w));
            vec![
                expect("If ∘ s = s ∘ (If × If × id)", lhs == rhs, || format!("{lhs:?} vs {rhs:?}")),
                expect("combine output is normalized", normalized, || format!("{lhs:?}")),
            ]
        })
    })
}

// ---------------------------------------------------------------------------
// 3. Affinity of the barycenter

fn random_point_measure(rng: &mut impl Rng, dim: usize) -> PointMeasure {
    gen::point_measure(rng, 4, dim, -2, 2, 8, false)
}

pub fn affinity(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "affinity";
    timed(Some(3), suite, None, || {
        let count = cfg.count(500);
        let mut rows = run_instances(suite, count, |i| {
            let mut rng = gen::stream(cfg.seed, "affinity-cor", i);
            let dim = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=4);
            let mus: Vec<PointMeasure> = (0..k).map(|_| random_point_measure(&mut rng, dim)).collect();
            let lambdas = gen::dense_weights(&mut rng, k);
            let joined =
                IdemMeasure::join(lambdas.iter().zip(&mus)).expect("some weight is zero");
            let lhs = barycenter(&joined).expect("finite atoms");
            let mut rhs: Option<TropVector> = None;
            for (l, m) in lambdas.iter().zip(&mus) {
                let b = barycenter(m).expect("finite atoms").shift(l);
                rhs = Some(match rhs {
                    None => b,
                    Some(acc) => acc.oplus(&b).expect("same dim"),
                });
            }
            let rhs = rhs.expect("k >= 1");
            vec![expect("β(⊕ λ_i ⊙ μ_i) = ⊕ λ_i ⊙ β(μ_i)", lhs == rhs, || format!("{lhs} vs {rhs}"))]
        });
        rows.extend(run_instances(suite, count, |i| {
            let mut rng = gen::stream(cfg.seed, "affinity-lemma", i);
            let dim = rng.gen_range(1..=3);
            let mu = random_point_measure(&mut rng, dim);
            let nu = random_point_measure(&mut rng, dim);
            let params = gen::params(&mut rng);
            let lhs = barycenter(&cfg.combine(&mu, &nu, &params)).expect("finite atoms");
            let rhs = s_point(&barycenter(&mu).expect("finite"), &barycenter(&nu).expect("finite"), &params)
                .expect("same dim");
            vec![expect("β(s(μ, ν)) = s(β(μ), β(ν))", lhs == rhs, || format!("{lhs} vs {rhs} at {params}"))]
        }));
        rows
    })
}

// ---------------------------------------------------------------------------
// 4. Finite lift with ε_j targets

fn brute_config() -> BruteConfig {
    BruteConfig { step: Rational::new(1.into(), 2.into()), depth: 2, budget: 2_000_000, fixed_params: None }
}

pub fn finite_lift(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "finite-lift";
    timed(Some(4), suite, Some(60.0), || {
        run_instances(suite, cfg.count(200), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let n = rng.gen_range(1..=5);
            let l = gen::finite_measure(&mut rng, n);
            let b = gen::finite_measure(&mut rng, n);
            let params = gen::params(&mut rng);
            let base = IdemMeasure::combine(&l, &b, &params);
            let base_w = to_dense(&base, n).expect("n points");
            let keep = base_w.iter().position(TropScalar::is_zero).expect("normalized");
            let u: Vec<Rational> = (0..n).map(|_| gen::direction(&mut rng)).collect();
            let tests = default_finite_tests(&FiniteSpace::new(n).expect("n >= 1"));
            let mut checks = Vec::new();

            match lift_s_finite(&l, &b, &params, &base, n) {
                Ok(w) => checks.push(expect("identity at ε = 0", w.first == l && w.second == b && w.params == params, || {
                    format!("got ({:?}, {:?}, {})", w.first, w.second, w.params)
                })),
                Err(e) => checks.push(fail("identity at ε = 0", e.to_string())),
            }

            let mut final_dist = None;
            for j in 1..=EPS_STEPS {
                let target = from_dense(&gen::perturb_weights(&base_w, &u, &gen::eps(j), keep)).expect("normalized");
                match lift_s_finite(&l, &b, &params, &target, n) {
                    Ok(w) => {
                        let combined = IdemMeasure::combine(&w.first, &w.second, &w.params);
                        checks.push(expect("exactness on accepted calls", combined == target, || {
                            format!("ε_{j}: {combined:?} vs {target:?}")
                        }));
                        let dist = finite_dist(&w.first, &l, &tests)
                            .max(finite_dist(&w.second, &b, &tests))
                            .max(w.params.rho(&params));
                        if j == EPS_STEPS {
                            final_dist = Some(dist);
                        }
                        if n <= 3 {
                            checks.push(match brute_force_lift_finite(&l, &b, &params, &target, n, &brute_config()) {
                                Ok(Some(bw)) => {
                                    let c = IdemMeasure::combine(&bw.witness.first, &bw.witness.second, &bw.witness.params);
                                    expect("brute force confirms an exact witness (n ≤ 3)", c == target, || {
                                        format!("ε_{j}: oracle witness is not exact")
                                    })
                                }
                                Ok(None) => fail("brute force confirms an exact witness (n ≤ 3)", format!("ε_{j}: oracle found none")),
                                Err(e) => fail("brute force confirms an exact witness (n ≤ 3)", e.to_string()),
                            });
                        }
                    }
                    Err(e) if e.is_validity_refusal() => checks.push(note("refusals (outside validity region)")),
                    Err(e) => checks.push(fail("exactness on accepted calls", e.to_string())),
                }
            }
            checks.push(match final_dist {
                Some(d) => expect("final witness distance < 1e-6", d < FINAL_DISTANCE, || {
                    format!("distance {d:.3e} at ε_{EPS_STEPS} with params {params}")
                }),
                None => fail("final witness distance < 1e-6", format!("ε_{EPS_STEPS} target refused")),
            });
            checks
        })
    })
}

// ---------------------------------------------------------------------------
// 5. Fiber lift on an exhaustive grid

/// Normalized weight vectors of length `n` over `levels`.
fn normalized_grid(levels: &[TropScalar], n: usize) -> Vec<Vec<TropScalar>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let v: Vec<TropScalar> = idx.iter().map(|&k| levels[k].clone()).collect();
        if v.iter().any(TropScalar::is_zero) {
            out.push(v);
        }
        let mut pos = 0;
        while pos < n {
            idx[pos] += 1;
            if idx[pos] < levels.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return out;
        }
    }
}

/// All `ν` on the source of `f` with `If(ν) = target`, using `levels` and
/// the target values themselves on merged coordinates.
fn fiber_of(f: &MergeMap, target: &[TropScalar], levels: &[TropScalar]) -> Vec<Vec<TropScalar>> {
    let t = &target[f.keep];
    let mut options: Vec<TropScalar> = levels.iter().filter(|v| *v <= t).cloned().collect();
    options.push(t.clone());
    options.sort();
    options.dedup();
    let mut out = Vec::new();
    for u in &options {
        for v in &options {
            if u.oplus(v) != *t {
                continue;
            }
            let nu: Vec<TropScalar> = (0..f.source_len)
                .map(|x| {
                    if x == f.keep {
                        u.clone()
                    } else if x == f.drop {
                        v.clone()
                    } else {
                        target[f.apply(x)].clone()
                    }
                })
                .collect();
            out.push(nu);
        }
    }
    out
}

pub fn fiber_grid(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "fiber-lift";
    let den = match cfg.scale {
        Scale::Default => 8,
        Scale::Tiny => 2,
    };
    timed(Some(5), suite, Some(120.0), || {
        let levels = sweep_levels(den);
        let measures = normalized_grid(&levels, 2);
        let mut params = vec![ConvexParams::balanced()];
        for v in levels.iter().filter(|v| !v.is_zero()) {
            params.push(ConvexParams::with_t(v.clone()).expect("v <= 0"));
            params.push(ConvexParams::with_p(v.clone()).expect("v <= 0"));
        }
        let merges = [MergeMap::new(3, 0, 1), MergeMap::new(3, 0, 2), MergeMap::new(3, 1, 2)]
            .map(|m| m.expect("valid merge"));
        let sources = normalized_grid(&levels, 3);
        let mut cells = Vec::new();
        for f in merges {
            for mu in &measures {
                for a in &measures {
                    for p in &params {
                        cells.push((f, mu, a, p));
                    }
                }
            }
        }
        run_instances(suite, cells.len(), |c| {
            let (f, mu_w, a_w, p) = cells[c as usize];
            let mu = from_dense(mu_w).expect("normalized");
            let a = from_dense(a_w).expect("normalized");
            let target = IdemMeasure::combine(&mu, &a, p);
            let target_w = to_dense(&target, 2).expect("two points");
            let map = f.as_map();
            let mut checks = Vec::new();
            for nu_w in fiber_of(&f, &target_w, &levels) {
                let nu = from_dense(&nu_w).expect("normalized");
                match lift_merge_fiber(&nu, &mu, &a, p, &f) {
                    Ok((lambda, eta)) => {
                        let ok1 = pushforward(&map, &lambda).ok().as_ref() == Some(&mu);
                        let ok2 = pushforward(&map, &eta).ok().as_ref() == Some(&a);
                        let ok3 = IdemMeasure::combine(&lambda, &eta, p) == nu;
                        checks.push(expect("If(λ) = μ", ok1, || format!("ν = {nu:?}, μ = {mu:?}")));
                        checks.push(expect("If(η) = a", ok2, || format!("ν = {nu:?}, a = {a:?}")));
                        checks.push(expect("s(λ, η) = ν", ok3, || format!("ν = {nu:?} at {p}")));
                    }
                    Err(e) => checks.push(fail("no InconsistentFiber false negatives", format!("ν = {nu:?}: {e}"))),
                }
                checks.push(pass("no InconsistentFiber false negatives"));
            }
            // One off-fiber source per cell must be rejected.
            let nu_w = &sources[c as usize % sources.len()];
            let nu = from_dense(nu_w).expect("normalized");
            let consistent = pushforward(&map, &nu).expect("domain matches") == target;
            let result = lift_merge_fiber(&nu, &mu, &a, p, &f);
            checks.push(if consistent {
                expect("off-grid sources: consistent accepted", result.is_ok(), || format!("ν = {nu:?}"))
            } else {
                expect("off-grid sources: inconsistent rejected", matches!(result, Err(Error::InconsistentFiber { .. })), || {
                    format!("ν = {nu:?} gave {result:?}")
                })
            });
            checks
        })
    })
}

// ---------------------------------------------------------------------------
// 6. Interval and box lifts

/// `[lo, hi] ⊂ [−3, 0]` with `lo ≤ −1` and `hi ≥ −1/2`.
fn random_bounds(rng: &mut impl Rng) -> (Rational, Rational) {
    let lo = gen::grid(rng, -3, -1, 4);
    let hi = Rational::new(rng.gen_range(-2..=0).into(), 4.into());
    (lo, hi)
}

fn interior_scalar(rng: &mut impl Rng, lo: &Rational, hi: &Rational) -> Rational {
    let den: i64 = 64;
    let steps = ((hi - lo) * Rational::from_integer(den.into())).to_integer();
    let k: i64 = rng.gen_range(1..i64::try_from(steps).expect("small interval"));
    lo + Rational::new(k.into(), den.into())
}

pub fn interval_box(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "interval-box-lift";
    timed(Some(6), suite, None, || {
        let mut rows = run_instances(suite, cfg.count(500), |i| {
            let mut rng = gen::stream(cfg.seed, "interval-lift", i);
            let (lo, hi) = random_bounds(&mut rng);
            let x = interior_scalar(&mut rng, &lo, &hi);
            let y = interior_scalar(&mut rng, &lo, &hi);
            let params = gen::params(&mut rng);
            let u = gen::direction(&mut rng);
            let xv = TropVector::from_rationals([x]);
            let yv = TropVector::from_rationals([y]);
            let lov = TropVector::from_rationals([lo.clone()]);
            let hiv = TropVector::from_rationals([hi.clone()]);
            let base = s_point(&xv, &yv, &params).expect("same dim");
            box_protocol(&xv, &yv, &params, &base, &[u], &lov, &hiv, |x, y, p, t| {
                lift_s_interval(x.coord(0), y.coord(0), p, t.coord(0), (lov.coord(0), hiv.coord(0))).map(|w| {
                    (TropVector::new(vec![w.first]), TropVector::new(vec![w.second]), w.params)
                })
            })
        });
        rows.extend(run_instances(suite, cfg.count(200), |i| {
            let mut rng = gen::stream(cfg.seed, "box-lift", i);
            let bounds: Vec<(Rational, Rational)> = (0..2).map(|_| random_bounds(&mut rng)).collect();
            let lov = TropVector::from_rationals(bounds.iter().map(|b| b.0.clone()));
            let hiv = TropVector::from_rationals(bounds.iter().map(|b| b.1.clone()));
            let xv = TropVector::from_rationals(bounds.iter().map(|(l, h)| interior_scalar(&mut rng, l, h)));
            let yv = TropVector::from_rationals(bounds.iter().map(|(l, h)| interior_scalar(&mut rng, l, h)));
            let params = gen::params(&mut rng);
            let u = [gen::direction(&mut rng), gen::direction(&mut rng)];
            let base = s_point(&xv, &yv, &params).expect("same dim");
            box_protocol(&xv, &yv, &params, &base, &u, &lov, &hiv, |x, y, p, t| {
                lift_s_box(x, y, p, t, &lov, &hiv).map(|w| (w.first, w.second, w.params))
            })
        }));
        rows
    })
}

#[allow(clippy::too_many_arguments)]
fn box_protocol(
    x: &TropVector,
    y: &TropVector,
    params: &ConvexParams,
    base: &TropVector,
    u: &[Rational],
    lo: &TropVector,
    hi: &TropVector,
    lift: impl Fn(&TropVector, &TropVector, &ConvexParams, &TropVector) -> Result<(TropVector, TropVector, ConvexParams)>,
) -> Vec<Check> {
    let dim = x.dim();
    let mut checks = Vec::new();
    let tag = if dim == 1 { 0 } else { 1 };
    let [c_id, c_exact, c_params, c_final, c_refuse] = [
        ["interval: identity at ε = 0", "box: identity at ε = 0"][tag],
        ["interval: exactness on accepted calls", "box: exactness on accepted calls"][tag],
        ["interval: params unchanged", "box: params unchanged on every coordinate"][tag],
        ["interval: final witness distance < 1e-6", "box: final witness distance < 1e-6"][tag],
        ["interval: refusals (outside validity region)", "box: refusals (outside validity region)"][tag],
    ];
    match lift(x, y, params, base) {
        Ok((a, b, p)) => checks.push(expect(c_id, a == *x && b == *y && p == *params, || format!("({a}, {b}, {p})"))),
        Err(e) => checks.push(fail(c_id, e.to_string())),
    }
    let lo_r: Vec<Rational> = lo.coords().iter().map(|c| c.as_rational().expect("finite").clone()).collect();
    let hi_r: Vec<Rational> = hi.coords().iter().map(|c| c.as_rational().expect("finite").clone()).collect();
    let mut final_dist = None;
    for j in 1..=EPS_STEPS {
        let target = TropVector::from_rationals((0..dim).map(|k| {
            let moved = gen::perturb_point(
                &TropVector::new(vec![base.coord(k).clone()]),
                &u[k..=k],
                &gen::eps(j),
                &lo_r[k],
                &hi_r[k],
            );
            moved.coord(0).as_rational().expect("finite").clone()
        }));
        match lift(x, y, params, &target) {
            Ok((a, b, p)) => {
                let exact = s_point(&a, &b, &p).ok().as_ref() == Some(&target);
                checks.push(expect(c_exact, exact, || format!("ε_{j}: s({a}, {b}, {p}) ≠ {target}")));
                checks.push(expect(c_params, p == *params, || format!("ε_{j}: {p} vs {params}")));
                let inside = (0..dim).all(|k| lo.coord(k) <= a.coord(k) && a.coord(k) <= hi.coord(k))
                    && (0..dim).all(|k| lo.coord(k) <= b.coord(k) && b.coord(k) <= hi.coord(k));
                checks.push(expect(c_exact, inside, || format!("ε_{j}: witness left the box")));
                if j == EPS_STEPS {
                    final_dist = Some(a.rho(x).max(b.rho(y)));
                }
            }
            Err(e) if e.is_validity_refusal() => checks.push(note(c_refuse)),
            Err(e) => checks.push(fail(c_exact, e.to_string())),
        }
    }
    checks.push(match final_dist {
        Some(d) => expect(c_final, d < FINAL_DISTANCE, || format!("distance {d:.3e}")),
        None => fail(c_final, format!("ε_{EPS_STEPS} target refused")),
    });
    checks
}

// ---------------------------------------------------------------------------
// 7. Barycenter lift

pub fn beta_lift(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "beta-lift";
    timed(Some(7), suite, None, || {
        let host = BoxHost::cube(2, Rational::from_integer((-2).into()), Rational::from_integer(0.into()))
            .expect("valid box");
        let lo = Rational::from_integer((-2).into());
        let hi = Rational::from_integer(0.into());
        run_instances(suite, cfg.count(100), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let nu = gen::point_measure(&mut rng, 4, 2, -2, 0, 16, true);
            let b = barycenter(&nu).expect("finite atoms");
            let mut checks = Vec::new();

            let offsets: Vec<Rational> = (0..2).map(|_| Rational::new(rng.gen_range(-10..=10).into(), 1024.into())).collect();
            let target = gen::perturb_point(&b, &offsets, &Rational::from_integer(1.into()), &lo, &hi);
            checks.push(expect("targets within ϱ ≤ 1e-2", target.rho(&b) <= 1e-2, || format!("{}", target.rho(&b))));
            match lift_beta(&host, &nu, &target) {
                Ok(l) => {
                    let got = barycenter(&l.measure).expect("finite atoms");
                    checks.push(expect("β(ν') = target exactly", got == target, || format!("{got} vs {target}")));
                }
                Err(e) => checks.push(fail("β(ν') = target exactly", format!("refused: {e}"))),
            }

            let u = [gen::direction(&mut rng), gen::direction(&mut rng)];
            let mut last = None;
            for j in 1..=EPS_STEPS {
                let target = gen::perturb_point(&b, &u, &gen::eps(j), &lo, &hi);
                match lift_beta(&host, &nu, &target) {
                    Ok(l) => {
                        let got = barycenter(&l.measure).expect("finite atoms");
                        checks.push(expect("ε_j protocol: β(ν') = target exactly", got == target, || {
                            format!("ε_{j}: {got} vs {target}")
                        }));
                        last = Some((j, default_point_dist(&l.measure, &nu).unwrap_or(f64::INFINITY)));
                    }
                    Err(e) if e.is_validity_refusal() => checks.push(note("ε_j protocol: refusals (outside validity region)")),
                    Err(e) => checks.push(fail("ε_j protocol: β(ν') = target exactly", format!("ε_{j}: {e}"))),
                }
            }
            checks.push(match last {
                Some((j, d)) if j == EPS_STEPS => expect("witness distance → 0: ≤ 4·ε_20 at the last step", d <= 4.0 * f64::powi(0.5, EPS_STEPS as i32), || format!("{d:.3e}")),
                _ => fail("witness distance → 0: ≤ 4·ε_20 at the last step", format!("ε_{EPS_STEPS} target refused")),
            });
            checks
        })
    })
}

// ---------------------------------------------------------------------------
// 8. Cover approximation

fn random_cover(rng: &mut impl Rng, mu: &PointMeasure, dim: usize) -> Result<Cover> {
    let eighth = Rational::new(1.into(), 8.into());
    let lo = Rational::from_integer((-2).into());
    let hi = Rational::from_integer(0.into());
    // Per axis: sorted cut points and an overlap.
    let mut axes: Vec<Vec<(Rational, Rational)>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let cuts = rng.gen_range(0..=2);
        let mut pts: Vec<Rational> = (0..cuts).map(|_| Rational::new(rng.gen_range(-15..=-1).into(), 8.into())).collect();
        pts.sort();
        pts.dedup();
        let overlap = if rng.gen_bool(0.5) { eighth.clone() } else { Rational::from_integer(0.into()) };
        let mut edges = vec![lo.clone()];
        edges.extend(pts);
        edges.push(hi.clone());
        axes.push(
            edges
                .windows(2)
                .map(|w| ((&w[0] - &overlap).max(lo.clone()), (&w[1] + &overlap).min(hi.clone())))
                .collect(),
        );
    }
    let mut elements = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let cell_lo = TropVector::from_rationals((0..dim).map(|k| axes[k][idx[k]].0.clone()));
        let cell_hi = TropVector::from_rationals((0..dim).map(|k| axes[k][idx[k]].1.clone()));
        elements.push(CoverElement::Polytope(TropPolytope::boxed(&cell_lo, &cell_hi)?));
        let mut pos = 0;
        while pos < dim {
            idx[pos] += 1;
            if idx[pos] < axes[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == dim {
            break;
        }
    }
    if rng.gen_bool(0.5) {
        let support: Vec<TropVector> = mu.support().cloned().collect();
        let take = rng.gen_range(1..=support.len().min(3));
        let gens: Vec<TropVector> = support.iter().take(take).cloned().collect();
        elements.push(CoverElement::Polytope(TropPolytope::new(gens)?));
    }
    Cover::new(elements)
}

pub fn approximation(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "cover-approximation";
    timed(Some(8), suite, None, || {
        let lo = Rational::from_integer((-2).into());
        let hi = Rational::from_integer(0.into());
        run_instances(suite, cfg.count(200), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let dim = rng.gen_range(1..=2);
            let mu = gen::point_measure(&mut rng, 5, dim, -2, 0, 8, false);
            let target = barycenter(&mu).expect("finite atoms");
            let mut checks = Vec::new();
            match random_cover(&mut rng, &mu, dim).and_then(|c| cover_approximation(&mu, &c)) {
                Ok(a) => {
                    let got = barycenter(&a.measure).expect("finite atoms");
                    checks.push(expect("β(ν_U) = β(μ)", got == target, || format!("{got} vs {target}")));
                    checks.push(expect("⊕ s_i ⊙ μ_i = μ", a.reconstructs, String::new));
                }
                Err(e) => checks.push(fail("β(ν_U) = β(μ)", e.to_string())),
            }
            match dyadic_chain(&mu, &lo, &hi, dim, 4).and_then(|chain| refinement_sweep(&mu, &chain)) {
                Ok(rows) => {
                    checks.push(expect("refinement chain preserves β", rows.iter().all(|r| r.beta_preserved), String::new));
                    let last = rows.last().expect("nonempty chain").dist;
                    checks.push(expect("distance reaches 0 at the singleton cover", last == 0.0, || format!("{last}")));
                }
                Err(e) => checks.push(fail("refinement chain preserves β", e.to_string())),
            }
            checks
        })
    })
}

// ---------------------------------------------------------------------------
// 9–10. Counterexample certificates

fn certificate_rows(suite: &str, i: u64, cert: Result<Certificate>, extra: impl FnOnce(&Certificate) -> Vec<Row>) -> Vec<Row> {
    let cert = match cert {
        Ok(c) => c,
        Err(e) => return vec![err_row(suite, &format!("i = {i}: certificate"), &e)],
    };
    let mut rows = vec![single(
        suite,
        &format!("i = {i}: claim holds on {} samples", cert.samples),
        cert.holds && cert.failures == 0,
        format!("{} failures, {} draws, digest {}", cert.failures, cert.draws, &cert.sample_digest[..16]),
    )];
    rows.extend(extra(&cert));
    rows.push(match replay(&cert) {
        Ok(r) => single(suite, &format!("i = {i}: replays from stored seed"), r.ok(), format!("{r:?}")),
        Err(e) => err_row(suite, &format!("i = {i}: replays from stored seed"), &e),
    });
    rows
}

fn certificate_samples(cfg: &SuiteConfig) -> usize {
    match cfg.scale {
        Scale::Default => 10_000,
        Scale::Tiny => 200,
    }
}

pub fn id_oplus(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "id-oplus-counterexample";
    timed(Some(9), suite, None, || {
        let samples = certificate_samples(cfg);
        [1u64, 2, 4, 8]
            .into_par_iter()
            .map(|i| {
                certificate_rows(suite, i, certify_id_oplus_not_open(i, samples, cfg.seed), |c| match &c.witness {
                    Witness::IdOplus(w) => vec![single(
                        suite,
                        &format!("i = {i}: every feasible pair has α(φ) = 1"),
                        c.failures == 0 && w.forced_value == Rational::from_integer(1.into()),
                        format!("forced value {}", w.forced_value),
                    )],
                    _ => vec![single(suite, "witness kind", false, "expected id-oplus".into())],
                })
            })
            .collect::<Vec<_>>()
            .concat()
    })
}

pub fn y_beta(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "y-beta-counterexample";
    timed(Some(10), suite, None, || {
        let samples = certificate_samples(cfg);
        let mut rows: Vec<Row> = [2u64, 4, 8]
            .into_par_iter()
            .map(|i| {
                certificate_rows(suite, i, certify_y_beta_not_open(i, samples, cfg.seed), |c| match &c.witness {
                    Witness::YBeta(w) => {
                        let bound = TropScalar::Finite(w.lower_bound.clone()).rho(&TropScalar::from_int(-2));
                        vec![
                            single(
                                suite,
                                &format!("i = {i}: ν(φ_min) = −2"),
                                w.nu_value == Rational::from_integer((-2).into()),
                                format!("{}", w.nu_value),
                            ),
                            single(
                                suite,
                                &format!("i = {i}: μ(φ_min) ≥ −1 + 1/i on every sample"),
                                w.min_observed >= w.lower_bound,
                                format!("min observed {} vs bound {}", w.min_observed, w.lower_bound),
                            ),
                            single(
                                suite,
                                &format!("i = {i}: gap ≥ ϱ(−1 + 1/i, −2) > 0"),
                                w.gap >= bound && w.gap > 0.0,
                                format!("gap {:.6}", w.gap),
                            ),
                        ]
                    }
                    _ => vec![single(suite, "witness kind", false, "expected y-beta".into())],
                })
            })
            .collect::<Vec<_>>()
            .concat();
        let y = crate::geometry::certificate::y_polytope();
        let expected: Vec<TropVector> = ["-2,-1", "-1,-2", "0,0"]
            .iter()
            .map(|s| TropVector::parse(&s.split(',').collect::<Vec<_>>()).expect("literal"))
            .collect();
        rows.push(match extremal_points(&y) {
            Ok(mut ext) => {
                ext.sort();
                let mut want = expected.clone();
                want.sort();
                let text = ext.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
                single(suite, "ext(Y) = {(−2,−1), (−1,−2), (0,0)}", ext == want, text)
            }
            Err(e) => err_row(suite, "ext(Y) = {(−2,−1), (−1,−2), (0,0)}", &e),
        });
        rows
    })
}

// ---------------------------------------------------------------------------
// Invariants not tied to a numbered criterion

pub fn invariants(cfg: &SuiteConfig) -> SuiteReport {
    let suite = "invariants";
    timed(None, suite, None, || {
        let mut rows = run_instances(suite, cfg.count(300), |i| {
            let mut rng = gen::stream(cfg.seed, suite, i);
            let n = rng.gen_range(1..=6);
            let mu = gen::finite_measure(&mut rng, n);
            let mut checks = Vec::new();

            let round = density_of(&mu, n).map(|d| measure_of_density(&d));
            checks.push(expect("density roundtrip", round.as_ref().ok() == Some(&mu), || format!("{mu:?}")));

            let x = gen::point(&mut rng, 2, -2, 0, 16);
            let bd = barycenter(&PointMeasure::dirac(x.clone())).expect("finite");
            checks.push(expect("β(δ_x) = x", bd == x, || format!("{bd} vs {x}")));

            let gens: Vec<TropVector> = (0..rng.gen_range(1..=4)).map(|_| gen::point(&mut rng, 2, -2, 0, 8)).collect();
            let poly = TropPolytope::new(gens).expect("nonempty");
            let inside: Vec<(TropVector, TropScalar)> = (0..3)
                .map(|_| {
                    let lambdas = gen::dense_weights(&mut rng, poly.generators().len());
                    (poly.combination(&lambdas).expect("normalized"), TropScalar::Finite(gen::grid(&mut rng, -2, 0, 8)))
                })
                .collect();
            let mut inside = inside;
            inside[0].1 = TropScalar::zero();
            let m = PointMeasure::from_weights(inside).expect("normalized");
            let b = barycenter(&m).expect("finite");
            checks.push(expect("β lands in the hull", poly.contains(&b).unwrap_or(false), || format!("{b}")));

            let k = rng.gen_range(1..=3);
            let m2 = rng.gen_range(1..=n);
            let f = gen::finite_map(&mut rng, n, m2);
            let inner: Vec<FiniteMeasure> = (0..k).map(|_| gen::finite_measure(&mut rng, n)).collect();
            let ws = gen::dense_weights(&mut rng, k);
            let big = IdemMeasure::from_weights_renormalized(inner.iter().cloned().zip(ws)).expect("some weight");
            let lhs = barycenter_of_finite_measures(&big.try_pushforward(|m| pushforward(&f, m)).expect("maps"), m2);
            let rhs = barycenter_of_finite_measures(&big, n).and_then(|b| pushforward(&f, &b));
            checks.push(expect("β_IY ∘ I²f = If ∘ β_IX", lhs.is_ok() && lhs == rhs, || format!("{lhs:?} vs {rhs:?}")));

            let surj_n = rng.gen_range(2..=4);
            let surj_m = rng.gen_range(1..surj_n);
            let f = gen::surjection(&mut rng, surj_n, surj_m);
            let nu = gen::finite_measure(&mut rng, surj_n);
            let params = gen::params(&mut rng);
            let pushed = pushforward(&f, &nu).expect("domain matches");
            checks.push(match lift_surjection_fiber(&nu, &pushed, &pushed, &params, &f) {
                Ok((l, e)) => expect(
                    "surjection fiber lift is exact",
                    pushforward(&f, &l).ok() == Some(pushed.clone())
                        && pushforward(&f, &e).ok() == Some(pushed.clone())
                        && IdemMeasure::combine(&l, &e, &params) == nu,
                    || format!("{nu:?} via {:?}", f.targets()),
                ),
                Err(e) => fail("surjection fiber lift is exact", e.to_string()),
            });
            checks
        });
        let y = crate::geometry::certificate::y_polytope();
        rows.push(match check_extremal_points(&y, &coefficient_levels(&Rational::new(1.into(), 4.into()), 8)) {
            Ok(c) => single(
                suite,
                "ext(Y) agrees with the decomposition definition on a grid",
                c.consistent,
                format!("{} grid points", c.grid_size),
            ),
            Err(e) => err_row(suite, "ext(Y) agrees with the decomposition definition on a grid", &e),
        });
        rows
    })
}

// ---------------------------------------------------------------------------

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 11] = [
    "axioms",
    "naturality",
    "affinity",
    "finite-lift",
    "fiber",
    "interval-box",
    "beta-lift",
    "approximation",
    "id-oplus",
    "y-beta",
    "invariants",
];

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    let one = |n: &str| -> Result<SuiteReport> {
        Ok(match n {
            "axioms" => measure_axioms(cfg),
            "naturality" => naturality(cfg),
            "affinity" => affinity(cfg),
            "finite-lift" => finite_lift(cfg),
            "fiber" => fiber_grid(cfg),
            "interval-box" => interval_box(cfg),
            "beta-lift" => beta_lift(cfg),
            "approximation" => approximation(cfg),
            "id-oplus" => id_oplus(cfg),
            "y-beta" => y_beta(cfg),
            "invariants" => invariants(cfg),
            other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
        })
    };
    if name == "all" {
        let start = Instant::now();
        let mut reports = SUITES.iter().map(|n| one(n)).collect::<Result<Vec<_>>>()?;
        let seconds = start.elapsed().as_secs_f64();
        let failures: usize = reports.iter().map(SuiteReport::failures).sum();
        let suite = "full-suite";
        reports.push(SuiteReport {
            criterion: Some(11),
            suite: suite.into(),
            rows: vec![
                single(suite, "zero failures", failures == 0, format!("{failures} failing rows")),
                runtime_row(suite, seconds, 300.0),
            ],
            seconds,
        });
        Ok(reports)
    } else {
        Ok(vec![one(name)?])
    }
}

/// CSV with columns `suite, case, verdict, detail`.
pub fn to_csv(reports: &[SuiteReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "case", "verdict", "detail"]).expect("in-memory write");
    for r in reports.iter().flat_map(|r| &r.rows) {
        let verdict = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        w.write_record([r.suite.as_str(), r.case.as_str(), verdict, r.detail.as_str()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// One line per suite.
pub fn summary(reports: &[SuiteReport]) -> String {
    reports
        .iter()
        .map(|r| {
            let tag = r.criterion.map(|c| format!("[{c:>2}] ")).unwrap_or_else(|| "     ".into());
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            format!("{verdict} {tag}{:<26} {:>3} rows {:>8.2} s\n", r.suite, r.rows.len(), r.seconds)
        })
        .collect()
}

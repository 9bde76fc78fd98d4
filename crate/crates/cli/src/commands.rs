//! Subcommand implementations. Each returns the text to print and an exit code.

use std::collections::BTreeSet;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use tropibary::approximation::{cover_approximation, dyadic_chain, refinement_sweep, Cover};
use tropibary::barycenter::barycenter;
use tropibary::geometry::certificate::y_polytope;
use tropibary::geometry::svg::render_svg;
use tropibary::geometry::{
    certify_id_oplus_not_open, certify_y_beta_not_open, extremal_points, hull_membership, replay, Certificate, Membership,
    TropPolytope,
};
use tropibary::lifting::{
    brute_force_lift_beta, brute_force_lift_box, brute_force_lift_finite, lift_beta, lift_s_box, lift_s_finite,
    lift_s_interval, lift_surjection_fiber, BoxHost, BruteConfig, BruteWitness,
};
use tropibary::space::{default_point_dist, eval, pushforward, FiniteMap, FiniteSpace, FunctionTable};
use tropibary::verify::{run_suite, summary, to_csv, Fault, Scale, SuiteConfig, DEFAULT_SEED};
use tropibary::{ConvexParams, Error, FiniteMeasure, IdemMeasure, PointMeasure, Rational, TropScalar, TropVector};

use crate::docs::{finite_json, parse, point_json, read_arg, table, ChainDoc, InstanceDoc, MapDoc, Measure};
use crate::report::Builder;
use crate::{ApproxSweep, CertArgs, Cli, Command, CounterexampleKind, FaultArg, Format, LiftArgs, LiftKind, ScaleArg};
use crate::EXIT_CHECK_FAILED;

pub struct Output {
    pub text: String,
    pub code: u8,
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn builder(&self, subcommand: &str) -> Builder {
        let mut b = Builder::new(subcommand);
        b.input("renormalize", [self.cli.renormalize as u8]);
        b
    }

    fn load(&self, b: &mut Builder, name: &str, arg: &str, fallback: Option<&FiniteSpace>) -> Result<Measure> {
        let (m, text) = Measure::load(name, arg, fallback, self.cli.renormalize)?;
        b.input(name, text);
        Ok(m)
    }

    fn text(&self, b: &mut Builder, name: &str, arg: &str) -> Result<String> {
        let text = read_arg(arg)?;
        b.input(name, &text);
        Ok(text)
    }

    /// Serializes the report; failing exactness flags turn into exit 3.
    fn emit(&self, b: Builder, outputs: Value) -> Result<Output> {
        let code = if b.all_exact() { 0 } else { EXIT_CHECK_FAILED };
        self.emit_with(b, outputs, code)
    }

    fn emit_with(&self, b: Builder, outputs: Value, code: u8) -> Result<Output> {
        let report = b.finish(outputs, self.cli.timing);
        let mut text = if self.cli.pretty { serde_json::to_string_pretty(&report)? } else { serde_json::to_string(&report)? };
        text.push('\n');
        Ok(Output { text, code })
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Eval { measure, phi } => cmd_eval(&ctx, measure, phi),
        Command::Combine { lambda, beta, params } => cmd_combine(&ctx, lambda, beta, params),
        Command::Pushforward { measure, map, codomain } => cmd_pushforward(&ctx, measure, map, *codomain),
        Command::Barycenter { measure, in_polytope } => cmd_barycenter(&ctx, measure, in_polytope.as_deref()),
        Command::Member { polytope, point } => cmd_member(&ctx, polytope, point),
        Command::Ext { polytope, svg } => cmd_ext(&ctx, polytope, svg.as_deref()),
        Command::Lift { kind } => match kind {
            LiftKind::S(args) => cmd_lift_s(&ctx, args),
            LiftKind::Beta(args) => cmd_lift_beta(&ctx, args),
            LiftKind::Fiber { instance } => cmd_lift_fiber(&ctx, instance),
        },
        Command::Approx(args) => match &args.sweep {
            Some(ApproxSweep::Sweep { measure, chain, dyadic, lo, hi }) => {
                cmd_sweep(&ctx, measure, chain.as_deref(), *dyadic, lo.as_ref(), hi.as_ref())
            }
            None => {
                let measure = args.measure.as_deref().ok_or_else(|| anyhow!("approx: --measure is required"))?;
                let cover = args.cover.as_deref().ok_or_else(|| anyhow!("approx: --cover is required"))?;
                cmd_approx(&ctx, measure, cover)
            }
        },
        Command::Counterexample { which } => match which {
            CounterexampleKind::IdOplus(args) => cmd_certificate(&ctx, "id-oplus", args),
            CounterexampleKind::YBeta(args) => cmd_certificate(&ctx, "y-beta", args),
            CounterexampleKind::Replay { certificate } => cmd_replay(&ctx, certificate),
        },
        Command::Verify { suite, seed, scale, csv, format, fault } => {
            cmd_verify(&ctx, suite, *seed, *scale, csv.as_deref(), *format, *fault)
        }
    }
}

/// `TROPIBARY_SEED` wins over `--seed`, which wins over the default.
fn effective_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var("TROPIBARY_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("TROPIBARY_SEED: {v:?} is not an unsigned integer")),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn same_space(a: &FiniteSpace, b: &FiniteSpace, what: &str) -> Result<()> {
    if a != b {
        bail!("{what}: measures live on different spaces");
    }
    Ok(())
}

// Independent recomputations used for the exactness flags.

fn pointwise_combine<A: Ord + Clone>(l: &IdemMeasure<A>, b: &IdemMeasure<A>, p: &ConvexParams, out: &IdemMeasure<A>) -> bool {
    let support: BTreeSet<&A> = l.support().chain(b.support()).chain(out.support()).collect();
    support.into_iter().all(|x| out.weight(x) == p.t().odot(&l.weight(x)).oplus(&p.p().odot(&b.weight(x))))
}

fn coordinatewise_barycenter(mu: &PointMeasure) -> Option<TropVector> {
    let dim = mu.support().next()?.dim();
    let coords = (0..dim)
        .map(|j| {
            mu.atoms()
                .map(|(x, w)| TropScalar::Finite(w.clone()).odot(x.coord(j)))
                .fold(TropScalar::NegInf, |acc, v| acc.oplus(&v))
        })
        .collect();
    Some(TropVector::new(coords))
}

fn membership_consistent(poly: &TropPolytope, x: &TropVector, m: &Membership) -> Result<bool> {
    let reproduces = m.coefficients.iter().any(TropScalar::is_zero) && poly.combination(&m.coefficients)? == *x;
    Ok(reproduces == m.member)
}

fn in_box(x: &TropVector, lo: &TropVector, hi: &TropVector) -> bool {
    (0..x.dim()).all(|j| lo.coord(j) <= x.coord(j) && x.coord(j) <= hi.coord(j))
}

fn oracle_config() -> BruteConfig {
    BruteConfig { step: Rational::new(1.into(), 2.into()), depth: 2, budget: 2_000_000, fixed_params: None }
}

fn oracle_json<W: Serialize>(result: tropibary::Result<Option<BruteWitness<W>>>) -> Result<(Value, Option<bool>)> {
    match result {
        Ok(Some(w)) => Ok((json!({ "exists": true, "cost": w.cost, "evaluated": w.evaluated, "witness": w.witness }), Some(true))),
        Ok(None) => Ok((json!({ "exists": false }), Some(false))),
        Err(e @ (Error::BudgetExceeded { .. } | Error::Invalid(_))) => Ok((json!({ "skipped": e.to_string() }), None)),
        Err(e) => Err(e.into()),
    }
}

fn refused(ctx: &Ctx, b: Builder, kind: &str, e: Error) -> Result<Output> {
    let Error::OutsideValidityRegion { case, constraint } = &e else { return Err(e.into()) };
    let outputs = json!({ "kind": kind, "refused": { "case": case, "constraint": constraint, "message": e.to_string() } });
    ctx.emit_with(b, outputs, 2)
}

fn cmd_eval(ctx: &Ctx, measure: &str, phi: &str) -> Result<Output> {
    let mut b = ctx.builder("eval");
    let (space, mu) = ctx.load(&mut b, "measure", measure, None)?.finite("measure")?;
    let values = table("phi", &ctx.text(&mut b, "phi", phi)?)?;
    if values.len() != space.len() {
        bail!("phi: has {} values but the space has {} points", values.len(), space.len());
    }
    let value = eval(&mu, &FunctionTable::new(values.clone()))?;
    let direct = mu.atoms().map(|(x, w)| w + &values[*x]).max().expect("nonempty support");
    b.flag("value_recomputed", direct == value);
    ctx.emit(b, json!({ "value": TropScalar::Finite(value) }))
}

fn cmd_combine(ctx: &Ctx, lambda: &str, beta: &str, params: &str) -> Result<Output> {
    let mut b = ctx.builder("combine");
    let l = ctx.load(&mut b, "lambda", lambda, None)?;
    let fallback = match &l {
        Measure::Finite { space, .. } => Some(space.clone()),
        Measure::Points(_) => None,
    };
    let r = ctx.load(&mut b, "beta", beta, fallback.as_ref())?;
    let p: ConvexParams = parse("params", &ctx.text(&mut b, "params", params)?)?;
    let (out, exact, normalized) = match (l, r) {
        (Measure::Finite { space, mu: l }, Measure::Finite { space: s2, mu: r }) => {
            same_space(&space, &s2, "combine")?;
            let c = IdemMeasure::combine(&l, &r, &p);
            let exact = pointwise_combine(&l, &r, &p, &c);
            let normalized = c.atoms().any(|(_, w)| num_zero(w));
            (finite_json(&space, &c), exact, normalized)
        }
        (Measure::Points(l), Measure::Points(r)) => {
            let c = IdemMeasure::combine(&l, &r, &p);
            let exact = pointwise_combine(&l, &r, &p, &c);
            let normalized = c.atoms().any(|(_, w)| num_zero(w));
            (point_json(&c), exact, normalized)
        }
        _ => bail!("combine: lambda and beta must both be finite-space or both be point measures"),
    };
    b.flag("pointwise", exact).flag("normalized", normalized);
    ctx.emit(b, json!({ "measure": out, "params": p }))
}

fn num_zero(w: &Rational) -> bool {
    *w == Rational::from_integer(0.into())
}

fn cmd_pushforward(ctx: &Ctx, measure: &str, map: &str, codomain: Option<usize>) -> Result<Output> {
    let mut b = ctx.builder("pushforward");
    let (space, mu) = ctx.load(&mut b, "measure", measure, None)?.finite("measure")?;
    let (targets, doc_codomain) = parse::<MapDoc>("map", &ctx.text(&mut b, "map", map)?)?.into_parts();
    if let Some(k) = codomain {
        b.input("codomain", k.to_le_bytes());
    }
    if targets.len() != space.len() {
        bail!("map: has {} entries but the space has {} points", targets.len(), space.len());
    }
    let k = codomain.or(doc_codomain).unwrap_or_else(|| targets.iter().max().map_or(0, |m| m + 1));
    let f = FiniteMap::new(targets, k).context("map")?;
    let out = pushforward(&f, &mu)?;
    let fiberwise = (0..k).all(|y| {
        let expected = (0..space.len())
            .filter(|&x| f.apply(x) == y)
            .map(|x| mu.weight(&x))
            .fold(TropScalar::NegInf, |acc, v| acc.oplus(&v));
        out.weight(&y) == expected
    });
    b.flag("fiberwise_max", fiberwise);
    ctx.emit(b, json!({ "measure": finite_json(&FiniteSpace::new(k)?, &out) }))
}

fn load_polytope(ctx: &Ctx, b: &mut Builder, arg: &str) -> Result<TropPolytope> {
    parse("polytope", &ctx.text(b, "polytope", arg)?)
}

fn cmd_barycenter(ctx: &Ctx, measure: &str, polytope: Option<&str>) -> Result<Output> {
    let mut b = ctx.builder("barycenter");
    let mu = ctx.load(&mut b, "measure", measure, None)?.points("measure")?;
    let point = barycenter(&mu)?;
    b.flag("coordinatewise", coordinatewise_barycenter(&mu).as_ref() == Some(&point));
    let mut outputs = json!({ "point": point });
    if let Some(arg) = polytope {
        let poly = load_polytope(ctx, &mut b, arg)?;
        let m = hull_membership(&poly, &point)?;
        b.flag("membership", membership_consistent(&poly, &point, &m)?);
        outputs["in_polytope"] = json!(m.member);
        outputs["membership"] = json!(m);
    }
    ctx.emit(b, outputs)
}

fn cmd_member(ctx: &Ctx, polytope: &str, point: &str) -> Result<Output> {
    let mut b = ctx.builder("member");
    let poly = load_polytope(ctx, &mut b, polytope)?;
    let x: TropVector = parse("point", &ctx.text(&mut b, "point", point)?)?;
    let m = hull_membership(&poly, &x)?;
    b.flag("membership", membership_consistent(&poly, &x, &m)?);
    ctx.emit(b, json!({ "member": m.member, "membership": m }))
}

fn cmd_ext(ctx: &Ctx, polytope: &str, svg: Option<&std::path::Path>) -> Result<Output> {
    let mut b = ctx.builder("ext");
    let poly = load_polytope(ctx, &mut b, polytope)?;
    let ext = extremal_points(&poly)?;
    // A generator is extremal iff it is outside the hull of the others.
    let mut agrees = true;
    for (k, v) in poly.generators().iter().enumerate() {
        let rest: Vec<TropVector> = poly.generators().iter().enumerate().filter(|(j, _)| *j != k).map(|(_, g)| g.clone()).collect();
        let redundant = !rest.is_empty() && hull_membership(&TropPolytope::new(rest)?, v)?.member;
        agrees &= redundant != ext.contains(v);
    }
    b.flag("extremal", agrees);
    let mut outputs = json!({ "extremal": ext, "generators": poly.generators() });
    if let Some(path) = svg {
        std::fs::write(path, render_svg(&poly, &ext)?).with_context(|| format!("writing {}", path.display()))?;
        outputs["svg"] = json!(path.display().to_string());
    }
    ctx.emit(b, outputs)
}

fn cmd_lift_s(ctx: &Ctx, args: &LiftArgs) -> Result<Output> {
    let mut b = ctx.builder("lift s");
    let doc: InstanceDoc = parse("instance", &ctx.text(&mut b, "instance", &args.instance)?)?;
    let target_text = ctx.text(&mut b, "target", &args.target)?;
    b.input("oracle", [args.oracle as u8]);
    let kind = doc.kind();
    match doc {
        InstanceDoc::Finite { space, lambda, beta, params } => {
            let space = space.map(|s| s.build()).transpose().context("instance")?;
            let (space, l) = lambda.resolve(space.as_ref(), ctx.cli.renormalize).context("instance.lambda")?.finite("lambda")?;
            let (s2, r) = beta.resolve(Some(&space), ctx.cli.renormalize).context("instance.beta")?.finite("beta")?;
            same_space(&space, &s2, "instance")?;
            let target = parse::<crate::docs::MeasureDoc>("target", &target_text)?;
            let (s3, a) = target.resolve(Some(&space), ctx.cli.renormalize).context("target")?.finite("target")?;
            same_space(&space, &s3, "target")?;
            let w = match lift_s_finite(&l, &r, &params, &a, space.len()) {
                Ok(w) => w,
                Err(e) if e.is_validity_refusal() => return refused(ctx, b, kind, e),
                Err(e) => return Err(e.into()),
            };
            let exact = pointwise_combine(&w.first, &w.second, &w.params, &a)
                && IdemMeasure::combine(&w.first, &w.second, &w.params) == a;
            b.flag("target_reproduced", exact);
            let distance = w.first.weight_rho(&l).max(w.second.weight_rho(&r)).max(w.params.rho(&params));
            let mut outputs = json!({
                "kind": kind,
                "witness": {
                    "first": finite_json(&space, &w.first),
                    "second": finite_json(&space, &w.second),
                    "params": w.params,
                },
                "case_tags": w.cases,
                "identity": w.first == l && w.second == r && w.params == params,
                "distance": distance,
                "exactness": exact,
            });
            if args.oracle {
                let (json, exists) = oracle_json(brute_force_lift_finite(&l, &r, &params, &a, space.len(), &oracle_config()))?;
                outputs["oracle"] = json;
                if let Some(exists) = exists {
                    b.flag("oracle_agrees", exists);
                }
            }
            ctx.emit(b, outputs)
        }
        InstanceDoc::Interval { x, y, params, bounds: (lo, hi) } => {
            let target: TropScalar = parse("target", &target_text)?;
            let w = match lift_s_interval(&x, &y, &params, &target, (&lo, &hi)) {
                Ok(w) => w,
                Err(e) if e.is_validity_refusal() => return refused(ctx, b, kind, e),
                Err(e) => return Err(e.into()),
            };
            let exact = params.t().odot(&w.first).oplus(&params.p().odot(&w.second)) == target;
            let inside = [&w.first, &w.second].iter().all(|v| lo <= **v && **v <= hi);
            b.flag("target_reproduced", exact).flag("params_unchanged", w.params == params).flag("in_bounds", inside);
            let mut outputs = json!({
                "kind": kind,
                "witness": { "first": w.first, "second": w.second, "params": w.params },
                "case_tags": w.cases,
                "distance": w.first.rho(&x).max(w.second.rho(&y)),
                "exactness": exact,
            });
            if args.oracle {
                let v = |s: &TropScalar| TropVector::new(vec![s.clone()]);
                let host = BoxHost::new(v(&lo), v(&hi))?;
                let (json, exists) =
                    oracle_json(brute_force_lift_box(&v(&x), &v(&y), &params, &v(&target), &host, &oracle_config()))?;
                outputs["oracle"] = json;
                if let Some(exists) = exists {
                    b.flag("oracle_agrees", exists);
                }
            }
            ctx.emit(b, outputs)
        }
        InstanceDoc::Box { x, y, params, lo, hi } => {
            let target: TropVector = parse("target", &target_text)?;
            let w = match lift_s_box(&x, &y, &params, &target, &lo, &hi) {
                Ok(w) => w,
                Err(e) if e.is_validity_refusal() => return refused(ctx, b, kind, e),
                Err(e) => return Err(e.into()),
            };
            let exact = (0..target.dim()).all(|j| {
                params.t().odot(w.first.coord(j)).oplus(&params.p().odot(w.second.coord(j))) == *target.coord(j)
            });
            let inside = in_box(&w.first, &lo, &hi) && in_box(&w.second, &lo, &hi);
            b.flag("target_reproduced", exact).flag("params_unchanged", w.params == params).flag("in_bounds", inside);
            let mut outputs = json!({
                "kind": kind,
                "witness": { "first": w.first, "second": w.second, "params": w.params },
                "case_tags": w.cases,
                "distance": w.first.rho(&x).max(w.second.rho(&y)),
                "exactness": exact,
            });
            if args.oracle {
                let host = BoxHost::new(lo, hi)?;
                let (json, exists) = oracle_json(brute_force_lift_box(&x, &y, &params, &target, &host, &oracle_config()))?;
                outputs["oracle"] = json;
                if let Some(exists) = exists {
                    b.flag("oracle_agrees", exists);
                }
            }
            ctx.emit(b, outputs)
        }
        InstanceDoc::Beta { .. } | InstanceDoc::Fiber { .. } => {
            bail!("instance: at kind: `lift s` takes finite, interval or box instances, got {kind}")
        }
    }
}

fn cmd_lift_beta(ctx: &Ctx, args: &LiftArgs) -> Result<Output> {
    let mut b = ctx.builder("lift beta");
    let doc: InstanceDoc = parse("instance", &ctx.text(&mut b, "instance", &args.instance)?)?;
    let target: TropVector = parse("target", &ctx.text(&mut b, "target", &args.target)?)?;
    b.input("oracle", [args.oracle as u8]);
    let InstanceDoc::Beta { host, measure } = doc else {
        bail!("instance: at kind: `lift beta` takes a beta instance, got {}", doc.kind());
    };
    let host = BoxHost::new(host.lo, host.hi).context("instance.host")?;
    let nu = measure.resolve(None, ctx.cli.renormalize).context("instance.measure")?.points("instance.measure")?;
    let lifted = match lift_beta(&host, &nu, &target) {
        Ok(l) => l,
        Err(e) if e.is_validity_refusal() => return refused(ctx, b, "beta", e),
        Err(e) => return Err(e.into()),
    };
    let exact = coordinatewise_barycenter(&lifted.measure).as_ref() == Some(&target);
    let inside = lifted.measure.support().all(|x| in_box(x, &host.lo, &host.hi));
    b.flag("target_reproduced", exact).flag("atoms_in_host", inside);
    let mut outputs = json!({
        "kind": "beta",
        "measure": point_json(&lifted.measure),
        "case_tags": lifted.cases,
        "identity": lifted.measure == nu,
        "distance": default_point_dist(&lifted.measure, &nu)?,
        "exactness": exact,
    });
    if args.oracle {
        let (json, exists) = oracle_json(brute_force_lift_beta(&nu, &target, &host, &oracle_config()))?;
        outputs["oracle"] = json;
        if let Some(exists) = exists {
            b.flag("oracle_agrees", exists);
        }
    }
    ctx.emit(b, outputs)
}

fn cmd_lift_fiber(ctx: &Ctx, instance: &str) -> Result<Output> {
    let mut b = ctx.builder("lift fiber");
    let doc: InstanceDoc = parse("instance", &ctx.text(&mut b, "instance", instance)?)?;
    let InstanceDoc::Fiber { map, nu, mu, a, params } = doc else {
        bail!("instance: at kind: `lift fiber` takes a fiber instance, got {}", doc.kind());
    };
    let (targets, codomain) = map.into_parts();
    let k = codomain.unwrap_or_else(|| targets.iter().max().map_or(0, |m| m + 1));
    let source = FiniteSpace::new(targets.len()).context("instance.map")?;
    let image = FiniteSpace::new(k).context("instance.map")?;
    let f = FiniteMap::new(targets, k).context("instance.map")?;
    let finite = |doc: crate::docs::MeasureDoc, space: &FiniteSpace, what: &str| -> Result<FiniteMeasure> {
        let (s, m) = doc.resolve(Some(space), ctx.cli.renormalize).with_context(|| what.to_string())?.finite(what)?;
        same_space(space, &s, what)?;
        Ok(m)
    };
    let nu = finite(nu, &source, "instance.nu")?;
    let mu = finite(mu, &image, "instance.mu")?;
    let a = finite(a, &image, "instance.a")?;
    let (lambda, eta) = lift_surjection_fiber(&nu, &mu, &a, &params, &f)?;
    b.flag("pushforward_lambda", pushforward(&f, &lambda)? == mu)
        .flag("pushforward_eta", pushforward(&f, &eta)? == a)
        .flag("combine", pointwise_combine(&lambda, &eta, &params, &nu));
    ctx.emit(
        b,
        json!({ "kind": "fiber", "lambda": finite_json(&source, &lambda), "eta": finite_json(&source, &eta), "params": params }),
    )
}

fn cmd_approx(ctx: &Ctx, measure: &str, cover: &str) -> Result<Output> {
    let mut b = ctx.builder("approx");
    let mu = ctx.load(&mut b, "measure", measure, None)?.points("measure")?;
    let cover: Cover = parse("cover", &ctx.text(&mut b, "cover", cover)?)?;
    let approx = cover_approximation(&mu, &cover)?;
    let preserved = coordinatewise_barycenter(&approx.measure) == coordinatewise_barycenter(&mu);
    let mut placed = true;
    for e in &approx.elements {
        if let Some(x) = &e.point {
            placed &= cover.elements[e.element].contains(x)?;
        }
    }
    b.flag("beta_preserved", preserved).flag("points_in_elements", placed);
    ctx.emit(
        b,
        json!({
            "measure": point_json(&approx.measure),
            "elements": approx.elements,
            "beta_preserved": preserved,
            "reconstructs": approx.reconstructs,
            "dist": default_point_dist(&approx.measure, &mu)?,
        }),
    )
}

fn cmd_sweep(
    ctx: &Ctx,
    measure: &str,
    chain: Option<&str>,
    dyadic: Option<u32>,
    lo: Option<&TropScalar>,
    hi: Option<&TropScalar>,
) -> Result<Output> {
    let mut b = ctx.builder("approx sweep");
    let mu = ctx.load(&mut b, "measure", measure, None)?.points("measure")?;
    let covers = match (chain, dyadic) {
        (Some(arg), _) => parse::<ChainDoc>("chain", &ctx.text(&mut b, "chain", arg)?)?.into_covers(),
        (None, Some(levels)) => {
            let bound = |v: Option<&TropScalar>, name: &str| {
                v.and_then(TropScalar::as_rational).cloned().ok_or_else(|| anyhow!("--{name} must be a finite scalar"))
            };
            let (lo, hi) = (bound(lo, "lo")?, bound(hi, "hi")?);
            let dim = mu.support().next().expect("nonempty support").dim();
            dyadic_chain(&mu, &lo, &hi, dim, levels)?
        }
        (None, None) => bail!("approx sweep: give --chain or --dyadic"),
    };
    let rows = refinement_sweep(&mu, &covers)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    let code = if rows.iter().all(|r| r.beta_preserved) { 0 } else { EXIT_CHECK_FAILED };
    Ok(Output { text, code })
}

fn cmd_certificate(ctx: &Ctx, which: &str, args: &CertArgs) -> Result<Output> {
    let mut b = ctx.builder(&format!("counterexample {which}"));
    let seed = effective_seed(args.seed)?;
    b.seed(seed).input("i", args.i.to_le_bytes()).input("samples", (args.samples as u64).to_le_bytes());
    let cert = match which {
        "id-oplus" => certify_id_oplus_not_open(args.i, args.samples, seed)?,
        _ => certify_y_beta_not_open(args.i, args.samples, seed)?,
    };
    let rep = replay(&cert)?;
    b.flag("holds", cert.holds).flag("replays", rep.ok());
    let mut outputs = json!({ "certificate": cert, "replay": rep });
    if which == "y-beta" {
        let ext = extremal_points(&y_polytope())?;
        let pt = |a: i64, b: i64| TropVector::new(vec![TropScalar::from_int(a), TropScalar::from_int(b)]);
        let expected = BTreeSet::from([pt(-2, -1), pt(-1, -2), pt(0, 0)]);
        b.flag("ext_y", ext.iter().cloned().collect::<BTreeSet<_>>() == expected);
        outputs["ext_y"] = json!(ext);
    }
    ctx.emit(b, outputs)
}

fn cmd_replay(ctx: &Ctx, arg: &str) -> Result<Output> {
    let mut b = ctx.builder("counterexample replay");
    let text = ctx.text(&mut b, "certificate", arg)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| anyhow!("certificate: invalid JSON: {e}"))?;
    // Accept a bare certificate or a full report around one.
    let value = match value.pointer("/outputs/certificate") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let cert: Certificate = parse("certificate", &value.to_string())
        .or_else(|_| serde_path_to_error::deserialize(value).map_err(|e| anyhow!("certificate: at {}: {}", e.path(), e.inner())))?;
    let rep = replay(&cert)?;
    b.flag("replays", rep.ok());
    ctx.emit(b, json!({ "claim": cert.claim, "i": cert.i, "seed": cert.seed, "replay": rep }))
}

fn cmd_verify(
    ctx: &Ctx,
    suite: &str,
    seed: Option<u64>,
    scale: ScaleArg,
    csv_path: Option<&std::path::Path>,
    format: Format,
    fault: Option<FaultArg>,
) -> Result<Output> {
    let seed = effective_seed(seed)?;
    let scale = match scale {
        ScaleArg::Default => Scale::Default,
        ScaleArg::Tiny => Scale::Tiny,
    };
    let cfg = SuiteConfig { fault: fault.map(|FaultArg::TamperCombine| Fault::TamperCombine), ..SuiteConfig::new(seed, scale) };
    let reports = run_suite(suite, &cfg)?;
    let csv = to_csv(&reports);
    if let Some(path) = csv_path {
        std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
    }
    let code = if reports.iter().all(|r| r.passed()) { 0 } else { EXIT_CHECK_FAILED };
    let text = match format {
        Format::Table => format!("seed {seed}\n{}\n", summary(&reports)),
        Format::Csv => csv,
        Format::Json => {
            let mut b = ctx.builder("verify");
            b.seed(seed).input("suite", suite).input("scale", format!("{scale:?}"));
            for r in &reports {
                b.flag(&r.suite, r.passed());
            }
            return ctx.emit_with(b, json!({ "suites": reports }), code);
        }
    };
    Ok(Output { text, code })
}

//! Worked examples with hand-derived expected values. Where an expected
//! value comes from a computation, the test recomputes it independently
//! in plain `f64` or integer arithmetic rather than through the library.

use tropibary::barycenter::{barycenter, barycenter_of_finite_measures};
use tropibary::geometry::{
    affine_check_on, certify_id_oplus_not_open, coefficient_levels, extremal_points, hull_membership, TropPolytope,
};
use tropibary::lifting::{
    brute_force_lift_beta, brute_force_lift_finite, lift_beta, lift_merge_fiber, lift_s_box, lift_s_finite,
    lift_s_interval, BoxHost, BruteConfig, MergeMap,
};
use tropibary::scalar::{q, rat};
use tropibary::space::{
    default_finite_tests, eval, from_dense, measure_dist, pushforward, FiniteMap, FiniteSpace, FunctionTable,
};
use tropibary::vector::tv;
use tropibary::{s_point, ConvexParams, FiniteMeasure, IdemMeasure, PointMeasure, TropScalar, TropVector};

fn m(w: &[&str]) -> FiniteMeasure {
    from_dense(&w.iter().map(|s| q(s)).collect::<Vec<_>>()).unwrap()
}

fn nu_t(t: &str) -> FiniteMeasure {
    m(&[t, "0"])
}

fn table(v: &[&str]) -> FunctionTable {
    FunctionTable::new(v.iter().map(|s| rat(s)).collect())
}

fn y() -> TropPolytope {
    TropPolytope::new(vec![tv(&["-2", "-1"]), tv(&["-1", "-2"]), tv(&["0", "0"])]).unwrap()
}

#[test]
fn scalar_conventions() {
    assert_eq!(q("-1").residual(&q("-1/5")), q("-4/5"));
    assert!(TropScalar::NegInf.residual(&TropScalar::NegInf).is_pos_inf());
    assert!(q("0").residual(&TropScalar::NegInf).is_pos_inf());
    assert_eq!(TropScalar::NegInf.odot(&q("5")), TropScalar::NegInf);
    for i in 1..=8 {
        assert_eq!(TropScalar::ratio(-1, i).oplus(&q("0")), q("0"));
    }
    assert_eq!(q("0").rho(&TropScalar::NegInf), 1.0);
    // ln 2 ≈ 6931/10000.
    let expected = (6931.0f64 / 10000.0).exp() - 1.0;
    assert!((q("6931/10000").rho(&q("0")) - expected).abs() < 1e-12);
}

#[test]
fn s_point_of_the_two_generators_is_the_diagonal_point() {
    let got = s_point(&tv(&["-2", "-1"]), &tv(&["-1", "-2"]), &ConvexParams::balanced()).unwrap();
    assert_eq!(got, tv(&["-1", "-1"]));
}

#[test]
fn evaluation_examples() {
    let phi = table(&["0", "1"]);
    for t in ["0", "-1/3", "-7", "-inf"] {
        assert_eq!(eval(&nu_t(t), &phi).unwrap(), rat("1"));
    }
    // max{0 + 0, −1/2 + 1}
    let mu = m(&["0", "-1/2"]);
    assert_eq!(eval(&mu, &phi).unwrap(), rat("1/2"));
}

#[test]
fn combine_of_two_diracs_is_nu_t() {
    let got = IdemMeasure::combine(&m(&["0", "-inf"]), &m(&["-inf", "0"]), &ConvexParams::with_t(q("-1")).unwrap());
    assert_eq!(got, nu_t("-1"));
}

#[test]
fn merge_pushforward() {
    let f = FiniteMap::new(vec![0, 1, 1], 2).unwrap();
    assert_eq!(pushforward(&f, &m(&["0", "-1", "-1/2"])).unwrap(), m(&["0", "-1/2"]));
}

#[test]
fn nu_t_converges_to_nu_0_but_stays_far_from_the_first_dirac() {
    let tests = default_finite_tests(&FiniteSpace::new(2).unwrap());
    let mut last = f64::INFINITY;
    for i in [1i64, 2, 4, 8, 16, 32] {
        let d = measure_dist(&nu_t(&format!("-1/{i}")), &nu_t("0"), &tests).unwrap();
        assert!(d < last);
        // Indicator tests see the first weight; |e^{−1/i} − 1| bounds it.
        assert!(d <= 1.0 - (-1.0 / i as f64).exp() + 1e-12);
        last = d;

        let phi = vec![table(&["0", "1"])];
        let far = measure_dist(&m(&["0", "-inf"]), &nu_t(&format!("-1/{i}")), &phi).unwrap();
        assert!((far - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn barycenter_examples() {
    let y_nu = PointMeasure::from_weights([(tv(&["-2", "-1"]), q("0")), (tv(&["-1", "-2"]), q("0"))]).unwrap();
    assert_eq!(barycenter(&y_nu).unwrap(), tv(&["-1", "-1"]));

    let mu = PointMeasure::from_weights([(tv(&["1", "0"]), q("-1/2")), (tv(&["2/10", "3/10"]), q("0"))]).unwrap();
    // Coordinatewise max of weight + coordinate, in f64.
    let expect = [(-0.5f64 + 1.0).max(0.2), (-0.5f64 + 0.0).max(0.3)];
    let got = barycenter(&mu).unwrap();
    for (j, e) in expect.iter().enumerate() {
        assert!((got.coord(j).to_f64() - e).abs() < 1e-15);
    }
    assert_eq!(got, tv(&["1/2", "3/10"]));
}

#[test]
fn barycenter_of_measures_on_two_points() {
    let d0 = m(&["0", "-inf"]);
    let d1 = m(&["-inf", "0"]);
    let big = IdemMeasure::from_weights([(d0, q("0")), (d1, q("-1"))]).unwrap();
    assert_eq!(barycenter_of_finite_measures(&big, 2).unwrap(), m(&["0", "-1"]));
}

#[test]
fn finite_lift_on_two_diracs() {
    let (l, b) = (m(&["0", "-inf"]), m(&["-inf", "0"]));
    let target = m(&["-1/10", "0"]);
    let w = lift_s_finite(&l, &b, &ConvexParams::balanced(), &target, 2).unwrap();
    assert_eq!((&w.first, &w.second), (&l, &b));
    assert_eq!(w.params, ConvexParams::with_t(q("-1/10")).unwrap());
    // max(t + λ_i, β_i) by hand: i = 0 gives −1/10, i = 1 gives 0.
    assert_eq!(IdemMeasure::combine(&w.first, &w.second, &w.params), target);

    let near = m(&["-5", "0"]);
    let w = lift_s_finite(&l, &b, &ConvexParams::second(), &near, 2).unwrap();
    assert_eq!((w.first, w.second, w.params), (l.clone(), near.clone(), ConvexParams::second()));

    let oracle = brute_force_lift_finite(&l, &b, &ConvexParams::balanced(), &target, 2, &BruteConfig::default())
        .unwrap()
        .expect("an exact witness exists");
    assert_eq!(IdemMeasure::combine(&oracle.witness.first, &oracle.witness.second, &oracle.witness.params), target);
}

#[test]
fn merge_fiber_lift_by_the_min_formulas() {
    let nu = m(&["0", "-1", "-1/2"]);
    let (mu, a) = (m(&["0", "-3/10"]), m(&["0", "-1/2"]));
    let params = ConvexParams::with_t(q("-1/5")).unwrap();
    let (lambda, eta) = lift_merge_fiber(&nu, &mu, &a, &params, &MergeMap::normal(2).unwrap()).unwrap();
    // λ_1 = min(μ_1, ν_1 − t) = min(−3/10, −4/5); λ_2 = min(−3/10, −1/2 + 1/5).
    let l1 = (-0.3f64).min(-1.0 + 0.2);
    let l2 = (-0.3f64).min(-0.5 + 0.2);
    assert_eq!((l1, l2), (-0.8, -0.3));
    assert_eq!(lambda, m(&["0", "-4/5", "-3/10"]));
    assert_eq!(eta, m(&["0", "-1", "-1/2"]));
}

#[test]
fn interval_and_box_examples() {
    let p = ConvexParams::with_t(q("-3/10")).unwrap();
    let w = lift_s_interval(&q("-1"), &q("-1/2"), &p, &q("-9/20"), (&q("-2"), &q("0"))).unwrap();
    assert_eq!((w.first, w.second, &w.params), (q("-1"), q("-9/20"), &p));
    assert_eq!((-1.3f64).max(-0.45), -0.45);

    let w = lift_s_interval(&q("-1"), &q("-1/2"), &ConvexParams::second(), &q("-3/2"), (&q("-2"), &q("0"))).unwrap();
    assert_eq!((w.first, w.second), (q("-1"), q("-3/2")));

    // Two interval instances sharing params, stacked.
    let x = tv(&["-1", "-1/4"]);
    let y = tv(&["-1/2", "-3/2"]);
    let target = tv(&["-9/20", "-1/2"]);
    let w = lift_s_box(&x, &y, &p, &target, &tv(&["-2", "-2"]), &tv(&["0", "0"])).unwrap();
    assert_eq!(w.params, p);
    assert_eq!(s_point(&w.first, &w.second, &p).unwrap(), target);
    let single = lift_s_interval(&q("-1/4"), &q("-3/2"), &p, &q("-1/2"), (&q("-2"), &q("0"))).unwrap();
    assert_eq!(w.first.coord(1), &single.first);
}

#[test]
fn beta_lift_near_the_diagonal_point() {
    let host = BoxHost::cube(2, rat("-2"), rat("0")).unwrap();
    let nu = PointMeasure::from_weights([(tv(&["-2", "-1"]), q("0")), (tv(&["-1", "-2"]), q("0"))]).unwrap();
    assert_eq!(lift_beta(&host, &nu, &tv(&["-1", "-1"])).unwrap().measure, nu);
    let target = tv(&["-1", "-9/10"]);
    let lifted = lift_beta(&host, &nu, &target).unwrap();
    assert_eq!(barycenter(&lifted.measure).unwrap(), target);
    let oracle = brute_force_lift_beta(&nu, &target, &host, &BruteConfig::default()).unwrap().expect("a preimage exists");
    assert_eq!(barycenter(&oracle.witness).unwrap(), target);
}

#[test]
fn hull_membership_examples() {
    let p = y();
    assert!(hull_membership(&p, &tv(&["-1/2", "-1/2"])).unwrap().member);
    let out = hull_membership(&p, &tv(&["-3/2", "-3/2"])).unwrap();
    assert!(!out.member);
    // λ*_i = min_j (x_j − v_ij).
    let expect: Vec<f64> = [[-2.0, -1.0], [-1.0, -2.0], [0.0, 0.0]]
        .iter()
        .map(|v: &[f64; 2]| (-1.5 - v[0]).min(-1.5 - v[1]))
        .collect();
    assert_eq!(expect, vec![-0.5, -0.5, -1.5]);
    assert_eq!(out.residual, vec![q("-1/2"), q("-1/2"), q("-3/2")]);
}

#[test]
fn extremal_points_examples() {
    let mut ext = extremal_points(&y()).unwrap();
    ext.sort();
    let mut want = vec![tv(&["-2", "-1"]), tv(&["-1", "-2"]), tv(&["0", "0"])];
    want.sort();
    assert_eq!(ext, want);

    let v = tv(&["-2", "0"]);
    let w = tv(&["0", "-2"]);
    let middle = v.shift(&q("-1")).oplus(&w).unwrap();
    let p = TropPolytope::new(vec![v.clone(), middle, w.clone()]).unwrap();
    assert_eq!(extremal_points(&p).unwrap(), vec![v, w]);
}

#[test]
fn affine_and_non_affine_maps() {
    let levels = coefficient_levels(&rat("1/2"), 4);
    let c = q("-1/2");
    let shift = affine_check_on(|x: &TropVector| x.oplus(&TropVector::new(vec![c.clone(); 2])).unwrap(), &y(), &levels)
        .unwrap();
    assert!(shift.affine);
    let doubling = affine_check_on(
        |x: &TropVector| TropVector::new(x.coords().iter().map(|v| v.odot(v)).collect()),
        &y(),
        &levels,
    )
    .unwrap();
    assert!(!doubling.affine);
    assert!(doubling.counterexample.is_some());
}

#[test]
fn id_oplus_pairs_all_evaluate_to_one() {
    let cert = certify_id_oplus_not_open(1, 2000, 11).unwrap();
    assert!(cert.holds);
    assert_eq!(cert.failures, 0);
}

use cartan_core::bernstein::{bernstein_exponent, BernsteinQuery};
use cartan_core::cartan::{cartan_cover_1d, cartan_cover_poly, Car20Cover};
use cartan_core::cover2d::{build_cover, estimate_inputs, verify_cover};
use cartan_core::curve::{build_atlas, chart_bernstein, ChartKind};
use cartan_core::family::{dirichlet_b0, dirichlet_determinant, named_pair, taylor_truncation, TestFamilySpec};
use cartan_core::poly::ZERO;
use cartan_core::weierstrass::{check_bounds_d, prepare, Frame};
use cartan_core::{json, BivariatePoly, Disk, UnivariatePoly, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn cover_json_round_trip_after_build() {
    let (f1, f2) = named_pair("linear").unwrap();
    let data = estimate_inputs(&f1, &f2, 1e-3, 7).unwrap();
    let res = build_cover(&f1, &f2, &data, 5.0).unwrap();
    let s = json::to_string_pretty(&res.cover).unwrap();
    let back: Car20Cover = json::from_str(&s).unwrap();
    assert_eq!(back, res.cover);
    assert_eq!(verify_cover(&f1, &f2, &res, 5_000, 3).violations, 0);
}

#[test]
fn truncated_determinant_feeds_weierstrass() {
    let spec = TestFamilySpec::trig(1, [0.618, 0.414], 2.0, 8, 4);
    let t = taylor_truncation(&spec, 0.05, 10).unwrap();
    let v = [c(0.01, 0.0), c(-0.02, 0.01)];
    let exact = dirichlet_determinant(&spec, [v[0] * 0.05, v[1] * 0.05]).unwrap().value();
    let approx = t.poly.eval_at(v) * t.log_scale.exp();
    assert!((exact - approx).norm() <= t.error_bound * t.log_scale.exp() + 1e-12);
    let wf = prepare(&t.poly, Frame::identity(), 0.2, 0.01, 8);
    if let Ok(wf) = wf {
        assert!(wf.residual < 1e-8);
        check_bounds_d(&wf).unwrap();
    }
}

#[test]
fn determinant_exponents_stay_moderate_in_n() {
    let b: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| dirichlet_b0(&TestFamilySpec::trig(1, [0.618, 0.414], 2.0, n, 1), 0.05, 128).unwrap())
        .collect();
    assert!(b.iter().all(|x| x.is_finite() && *x >= 0.0));
    // well below linear growth in N
    assert!(b[2] <= 4.0 * b[0].max(0.1) * (32f64.ln() / 8f64.ln()).powi(2), "{b:?}");
}

#[test]
fn regular_chart_exponent_matches_trace_exponent_at_intersection() {
    // f1 has a simple zero at the origin along the curve z = -0.3 w²
    let f1 = BivariatePoly::from_real_terms(&[(1, 0, 1.0), (0, 1, 0.5)]).unwrap();
    let f2 = BivariatePoly::from_real_terms(&[(1, 0, 1.0), (0, 2, 0.3)]).unwrap();
    let atlas = build_atlas(&f2, [ZERO, ZERO], 0.2, 8).unwrap();
    assert!(atlas.charts.iter().all(|ch| ch.kind == ChartKind::Regular));
    let chart = &atlas.charts[0];
    let u0 = C64::new(-chart.base_point[1].re / chart.epsilon, -chart.base_point[1].im / chart.epsilon);
    let b = chart_bernstein(&f1, &f2, chart, 0.25, u0, 0.05, 64).unwrap();
    let on_trace = bernstein_exponent(&f1, &BernsteinQuery::on_trace(0.25, [ZERO, ZERO], 0.05, f2.clone())).unwrap();
    assert!((on_trace.b - 4f64.ln()).abs() < 0.1, "{on_trace:?}");
    assert!((b - 4f64.ln()).abs() < 0.1, "{b}");
}

#[test]
fn polynomial_cover_certificate_on_domain() {
    let p = UnivariatePoly::from_roots(c(1.0, 0.0), &[c(0.1, 0.0), c(0.1, 1e-4), c(-0.3, 0.2)]);
    let (cover, cert) = cartan_cover_poly(&p, Disk::new(ZERO, 0.5).unwrap(), 4.0).unwrap();
    assert!(cover.total_radius() <= (-4f64).exp());
    assert!(cert.worst_value >= cert.lower_bound_log);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cartan_total_radius_and_exterior_bound(
        pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        h in 1.0f64..10.0,
        probe in (-1.5f64..1.5, -1.5f64..1.5),
    ) {
        let zeros: Vec<C64> = pts.iter().map(|&(a, b)| c(a, b)).collect();
        let (cover, log_bound) = cartan_cover_1d(&zeros, h).unwrap();
        prop_assert!(cover.total_radius() <= (-h).exp() * (1.0 + 1e-12));
        let z = c(probe.0, probe.1);
        if !cover.disks.iter().any(|d| d.contains(z)) {
            let l: f64 = zeros.iter().map(|a| (z - a).norm().ln()).sum();
            prop_assert!(l >= log_bound);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn rotated_linear_pairs_give_valid_covers(theta in 0.0f64..6.28, s in 0.5f64..2.0, seed in 0u64..1000) {
        let (a, b) = (C64::from_polar(1.0, theta), c(0.0, s));
        let f1 = BivariatePoly::from_terms(&[(1, 0, a), (0, 1, -a)]).unwrap();
        let f2 = BivariatePoly::from_terms(&[(1, 0, b), (0, 1, b * 0.5), (0, 0, c(0.01, 0.0))]).unwrap();
        let data = estimate_inputs(&f1, &f2, 1e-3, 7).unwrap();
        let res = build_cover(&f1, &f2, &data, 5.0).unwrap();
        res.cover.validate().unwrap();
        prop_assert_eq!(verify_cover(&f1, &f2, &res, 2_000, seed).violations, 0);
    }
}

#[test]
fn cover_count_ratio_stays_below_recorded_constant() {
    let (f1, f2) = named_pair("parabola-hyperbola").unwrap();
    let data = estimate_inputs(&f1, &f2, 1e-3, 7).unwrap();
    for h in [5.0, 8.0, 12.0] {
        let res = build_cover(&f1, &f2, &data, h).unwrap();
        assert!(res.k_ratio <= cartan_core::cover2d::C_PIPELINE, "H = {h}: ratio {}", res.k_ratio);
        assert!(res.cover.balls.len() <= res.cover.k);
    }
}

#[test]
fn covers_from_two_seeds_are_both_valid() {
    let (f1, f2) = named_pair("parabola-hyperbola").unwrap();
    let data = estimate_inputs(&f1, &f2, 1e-3, 7).unwrap();
    for seed in [1, 2] {
        let res = cartan_core::cover2d::build_cover_seeded(&f1, &f2, &data, 6.0, seed).unwrap();
        let rep = verify_cover(&f1, &f2, &res, 10_000, 40 + seed);
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.reference_violations, 0);
    }
}

use super::*;
use crate::weights::phi;

fn compile(spec: &FunctionSpec) -> Function {
    spec.compile().expect("compile")
}

#[test]
fn cheb_cubic_derivative() {
    // x³, first derivative at 0.5 is 0.75.
    let f = compile(&FunctionSpec::monomial(3));
    assert!((f.eval(0.5, 0).unwrap() - 0.125).abs() < 1e-14);
    assert!((f.eval(0.5, 1).unwrap() - 0.75).abs() < 1e-13);
}

#[test]
fn weight_reciprocal_at_zero() {
    let f = compile(&FunctionSpec::weight_reciprocal(0, 1.0, 0.0));
    assert!((f.eval(0.0, 0).unwrap() - 1.0).abs() < 1e-15);
    // (1-x)^{-1} at x = 0.5 is 2.
    assert!((f.eval(0.5, 0).unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn derivative_order_guard() {
    let f = compile(&FunctionSpec::osc_endpoint(1));
    assert!(matches!(
        f.eval(0.0, 5),
        Err(SpecError::DerivativeUnavailable { .. })
    ));
}

#[test]
fn runge_derivatives_match_central_differences() {
    let f = compile(&FunctionSpec::runge(5.0));
    for order in 0..4u32 {
        for &x in &[-0.7, -0.2, 0.0, 0.33, 0.81] {
            let h = 1e-5;
            let fd = (f.eval_raw(x + h, order) - f.eval_raw(x - h, order)) / (2.0 * h);
            let ex = f.eval_raw(x, order + 1);
            assert!(
                (fd - ex).abs() <= 1e-5 * (1.0 + ex.abs()),
                "order {order} x {x}: {fd} vs {ex}"
            );
        }
    }
}

#[test]
fn antiderivative_consistency_across_catalog() {
    // Central differences of eval(·, j) match eval(·, j+1) to 1e-6 relative
    // away from singular points and breakpoints.
    let specs = [
        FunctionSpec::exp(),
        FunctionSpec::sin_scaled(3.0),
        FunctionSpec::runge(5.0),
        FunctionSpec::cheb(vec![0.1, -0.3, 0.2, 0.5, -0.4, 0.3, 0.25]),
        FunctionSpec::abs_power(2.5, 0.3),
        FunctionSpec::endpoint_power(1, 2.6),
        FunctionSpec::weight_reciprocal(2, 0.5, 0.25),
        FunctionSpec::osc_endpoint(2),
    ];
    for spec in &specs {
        let f = compile(spec);
        let orders = 0..f.max_deriv().min(3);
        for j in orders {
            for i in 0..9 {
                let x = -0.8 + 0.2 * i as f64;
                if f.breakpoints().iter().any(|b| (b - x).abs() < 0.05) {
                    continue;
                }
                let h = 1e-6;
                let lo = f.eval_raw(x - h, j);
                let hi = f.eval_raw(x + h, j);
                let fd = (hi - lo) / (2.0 * h);
                let ex = f.eval_raw(x, j + 1);
                let scale = ex.abs().max(1.0);
                assert!(
                    (fd - ex).abs() <= 2e-5 * scale,
                    "{spec:?} order {j} at {x}: {fd} vs {ex}"
                );
            }
        }
    }
}

#[test]
fn window_train_vanishes_between_windows() {
    let params = WindowTrainParams::new(2, 1, 0.0, -0.75, 1.0);
    let f = compile(&FunctionSpec::window_train(params).unwrap());
    // Between window n and window n-1 the order-r derivative is zero.
    for n in 1..=6u32 {
        let eps_n = params.eps(n);
        let hi_n = -1.0 + eps_n * (1.0 + 0.5f64.powi(n as i32));
        let lo_prev = -1.0 + params.eps(n - 1).min(0.25);
        let mid = 0.5 * (hi_n + lo_prev.max(hi_n));
        if mid > hi_n {
            assert_eq!(f.eval_raw(mid, 1), 0.0, "n = {n}");
        }
    }
    // Inside window n the value matches the closed form.
    let n = 3u32;
    let eps = params.eps(n);
    let x = -1.0 + eps * (1.0 + 0.5f64.powi(n as i32) * 0.5);
    let expect = (x + 1.0 - eps).powf(-(0.5) - (-0.75) - 1.0);
    assert!((f.eval_raw(x, 1) - expect).abs() < 1e-10 * expect.abs());
}

#[test]
fn window_train_probe_properties() {
    // h_n < √(2 ε_n), and the stencil points with 2 ≤ i ≤ k land in the gap
    // where f^{(r)} vanishes.
    let params = WindowTrainParams::new(3, 1, 0.0, -0.75, 1.0);
    let f = compile(&FunctionSpec::window_train(params).unwrap());
    let k = params.k as f64;
    for probe in params.probes().iter().take(10) {
        assert!(probe.h < (2.0 * probe.eps).sqrt());
        for i in 2..=params.k {
            for frac in [0.0, 0.3, 0.7, 1.0] {
                let x = probe.x + frac * probe.eps;
                let u = x + (i as f64 - k / 2.0) * probe.h * phi(x);
                assert_eq!(
                    f.eval_raw(u, params.r),
                    0.0,
                    "n={} i={i} frac={frac}",
                    probe.n
                );
            }
        }
    }
}

#[test]
fn window_train_rejects_bad_params() {
    // r/2 + beta must be negative.
    let bad = WindowTrainParams::new(2, 2, 0.0, -0.5, 2.0);
    let err = FunctionSpec::window_train(bad).unwrap_err();
    match err {
        SpecError::InvalidParams { reason } => assert!(reason.contains("r/2 + beta < 0")),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn bump_train_shape() {
    let params = BumpTrainParams {
        r: 1,
        beta: 0.0,
        p: 0.5,
        c0: 1e-3,
        n_max: 50,
    };
    let f = compile(&FunctionSpec::bump_train(params).unwrap());
    for n in [1u32, 3, 10, 40] {
        let h = params.height(n);
        let eps = params.eps(n);
        let w_lo = -1.0 + 1.0 / (n as f64 + 1.0);
        let w_hi = -1.0 + 1.0 / n as f64;
        // Plateau value H_n = n^{r/2+β+1/p}.
        let mid = 0.5 * (w_lo + w_hi);
        assert!((f.eval_raw(mid, 1) - h).abs() < 1e-12 * h, "n = {n}");
        // Zero outside the (shifted) window.
        assert_eq!(f.eval_raw(w_lo - 1e-9, 1).max(0.0), f.eval_raw(w_lo - 1e-9, 1));
        // Ramp slope magnitude H_n/ε_n.
        if w_lo + eps < mid {
            let xr = w_lo + 0.5 * eps;
            let slope = f.eval_raw(xr, 2);
            assert!(
                (slope - h / eps).abs() < 1e-9 * (h / eps),
                "n = {n}: {slope} vs {}",
                h / eps
            );
        }
    }
    // Outside the union of windows (right of x = 0) everything vanishes.
    assert_eq!(f.eval_raw(0.25, 1), 0.0);
}

#[test]
fn bump_train_rejects_bad_params() {
    let bad = BumpTrainParams {
        r: 0,
        beta: 0.0,
        p: 0.5,
        c0: 0.2,
        n_max: 10,
    };
    assert!(FunctionSpec::bump_train(bad).is_err());
}

#[test]
fn monomial_sup_seminorm_is_factorial() {
    // f = x^r: f^{(r)} ≡ r!, and sup of φ^r r! is attained at 0.
    for r in 1..=3u32 {
        let f = compile(&FunctionSpec::monomial(r));
        let (v, _) = weighted_seminorm(&f, r, 0.0, 0.0, f64::INFINITY, 1e-9).unwrap();
        let fact: f64 = (1..=r).map(|i| i as f64).product();
        assert!((v - fact).abs() < 1e-9 * fact, "r = {r}: {v}");
    }
}

#[test]
fn endpoint_witness_not_vanishing() {
    // g = x^r with α = -r/2: w_{α,β} φ^r g^{(r)} stays away from 0 near
    // x = 1.
    let r = 2u32;
    let g = compile(&FunctionSpec::monomial(r));
    let alpha = -(r as f64) / 2.0;
    let beta = 0.25;
    let mut min_near_one = f64::INFINITY;
    for i in 0..50 {
        let x = 1.0 - 1e-3 * (i as f64 + 1.0) * 1e-2;
        let v = jacobi_weight_raw(x, alpha, beta) * phi_pow(x, r) * g.eval_raw(x, r);
        min_near_one = min_near_one.min(v.abs());
    }
    assert!(min_near_one > 1.0, "limit should be 2^{{β+r/2}} r! > 1");
}

#[test]
fn weight_reciprocal_seminorm_is_lp_norm_of_one() {
    // ‖w φ^r (w^{-1} φ^{-r})‖_p = ‖1‖_p = 2^{1/p}.
    let f = compile(&FunctionSpec::weight_reciprocal(1, 0.5, 0.25));
    let (v, _) = weighted_seminorm(&f, 1, 0.5, 0.25, 2.0, 1e-10).unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-8);
    let (vi, _) = weighted_seminorm(&f, 1, 0.5, 0.25, f64::INFINITY, 1e-10).unwrap();
    assert!((vi - 1.0).abs() < 1e-9);
}

#[test]
fn singular_window_matches_closed_form() {
    let eps = 0.01;
    let expo = -0.75;
    let f = compile(&FunctionSpec::singular_window(eps, expo));
    let x = -1.0 + 1.5 * eps;
    assert!((f.eval_raw(x, 0) - (x + 1.0 - eps).powf(expo)).abs() < 1e-12);
    assert_eq!(f.eval_raw(-1.0 + 0.5 * eps, 0), 0.0);
    assert_eq!(f.eval_raw(-1.0 + 3.0 * eps, 0), 0.0);
}

#[test]
fn piecewise_linear_eval() {
    let f = compile(
        &FunctionSpec::piecewise_linear(vec![-0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]).unwrap(),
    );
    assert!((f.eval_raw(-0.25, 0) - 0.5).abs() < 1e-15);
    assert!((f.eval_raw(0.25, 0) - 0.5).abs() < 1e-15);
    assert_eq!(f.eval_raw(0.75, 0), 0.0);
    assert!((f.eval_raw(-0.25, 1) - 2.0).abs() < 1e-15);
}

#[test]
fn spec_json_round_trip_is_lossless() {
    let specs = [
        FunctionSpec::exp(),
        FunctionSpec::sin_scaled(3.0),
        FunctionSpec::runge(5.0),
        FunctionSpec::abs_power(2.5, 0.3),
        FunctionSpec::endpoint_power(-1, 1.5),
        FunctionSpec::weight_reciprocal(1, 0.5, 0.0),
        FunctionSpec::osc_endpoint(0),
        FunctionSpec::singular_window(0.01, -1.25),
        FunctionSpec::window_train(WindowTrainParams::new(2, 0, 0.0, -0.25, 1.0)).unwrap(),
        FunctionSpec::bump_train(BumpTrainParams::new(1, 0.0, 0.5)).unwrap(),
        FunctionSpec::piecewise_linear(vec![-0.5, 0.5], vec![1.0, 2.0]).unwrap(),
    ];
    for spec in &specs {
        let json = serde_json::to_string(spec).unwrap();
        assert!(json.contains("\"kind\""), "{json}");
        assert!(json.contains("\"max_deriv\""), "{json}");
        let back: FunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, &back, "{json}");
    }
}

#[test]
fn lower_orders_by_anchored_antiderivative() {
    // For f^{(r)}-defined kinds, f^{(j)}(0) = 0 for j < r.
    let f = compile(
        &FunctionSpec::window_train(WindowTrainParams::new(2, 2, 0.0, -1.25, 1.0)).unwrap(),
    );
    assert_eq!(f.eval_raw(0.0, 0), 0.0);
    assert_eq!(f.eval_raw(0.0, 1), 0.0);
    let g = compile(&FunctionSpec::osc_endpoint(1));
    assert!(g.eval_raw(0.0, 0).abs() < 1e-12);
    // Central difference of the numeric antiderivative matches the closed
    // form.
    let x = -0.4;
    let h = 1e-5;
    let fd = (g.eval_raw(x + h, 0) - g.eval_raw(x - h, 0)) / (2.0 * h);
    assert!((fd - g.eval_raw(x, 1)).abs() < 1e-5);
}

//! Cross-module invariants at sample scale: containment of the weighted
//! smoothness spaces, boundedness and decay of the moduli, and the
//! modulus/K-functional/realization comparisons. The full parameter-grid
//! versions run in the verification suite of the CLI crate.

use jacmod_core::funcspace::{weighted_seminorm, FunctionSpec};
use jacmod_core::functionals::{CandidateSet, FunctionalOptions};
use jacmod_core::moduli::{
    self, binomial_row, dt_modulus, local_seminorm, local_step_norm, DtRequest, ModulusRequest,
};
use jacmod_core::weights::{domain, phi, Interval, WeightParams};
use jacmod_core::Function;

fn smooth_catalog() -> Vec<(&'static str, Function)> {
    vec![
        ("exp", FunctionSpec::exp().compile().unwrap()),
        ("sin3", FunctionSpec::sin_scaled(3.0).compile().unwrap()),
        ("runge", FunctionSpec::runge(5.0).compile().unwrap()),
        (
            "poly6",
            FunctionSpec::cheb(vec![0.1, -0.3, 0.2, 0.5, -0.4, 0.3, 0.25])
                .compile()
                .unwrap(),
        ),
    ]
}

/// Lemma-2.4-style constant: `2^{1/min(p,1)} (Σ_i C(k,i)^{min(p,1)})^{1/min(p,1)}`.
fn boundedness_constant(k: u32, p: f64) -> f64 {
    let q = p.min(1.0);
    let sum: f64 = binomial_row(k).iter().map(|c| c.powf(q)).sum();
    2f64.powf(1.0 / q) * sum.powf(1.0 / q)
}

#[test]
fn space_hierarchy_under_containment() {
    // Finite (r+1)-seminorm implies finite r-seminorm when the shifted
    // exponents stay admissible (1 ≤ p ≤ ∞).
    let catalog = {
        let mut c = smooth_catalog();
        c.push((
            "endpow26",
            FunctionSpec::endpoint_power(1, 2.6).compile().unwrap(),
        ));
        c.push((
            "abspow25",
            FunctionSpec::abs_power(2.5, 0.3).compile().unwrap(),
        ));
        c
    };
    for (name, f) in &catalog {
        for &p in &[1.0, 2.0, f64::INFINITY] {
            for r in 0..2u32 {
                for &(a, b) in &[(0.0, 0.0), (0.25, 0.5), (1.0, 0.25)] {
                    let hi = weighted_seminorm(f, r + 1, a, b, p, 1e-5);
                    let lo = weighted_seminorm(f, r, a, b, p, 1e-5);
                    if hi.is_ok_and(|(v, _)| v.is_finite()) {
                        assert!(
                            lo.is_ok_and(|(v, _)| v.is_finite()),
                            "{name}: r={r} p={p} a={a} b={b}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn modulus_bounded_by_seminorm_with_explicit_constant() {
    for (name, f) in &smooth_catalog() {
        for &p in &[0.5, 1.0, 2.0, f64::INFINITY] {
            for &(k, r) in &[(1u32, 0u32), (2, 1), (3, 0)] {
                let (a, b) = (0.25, 0.5);
                let (semi, _) = weighted_seminorm(f, r, a, b, p, 1e-5).unwrap();
                let c = boundedness_constant(k, p);
                let req = ModulusRequest::new(f, k, r, a, b, p, 2.0 / k as f64).fast();
                let m = moduli::modulus(&req);
                assert!(!m.diverged);
                assert!(
                    m.value <= c * semi * (1.0 + 1e-6),
                    "{name}: k={k} r={r} p={p}: {} vs {}*{semi}",
                    m.value,
                    c
                );
            }
        }
    }
}

#[test]
fn local_boundedness_on_subintervals() {
    // ‖ŵ_{kh} Δ^k_{hφ} f^{(r)}‖_{L_p[a,b]} ≤ C·‖w φ^r f^{(r)}‖_{L_p(S)} with
    // S the stencil hull of [a, b].
    let f = FunctionSpec::runge(5.0).compile().unwrap();
    let (k, r, alpha, beta, p) = (2u32, 1u32, 0.5, 0.25, 2.0);
    let c = boundedness_constant(k, p);
    let req = ModulusRequest::new(&f, k, r, alpha, beta, p, 1.0).fast();
    for &h in &[0.05, 0.2, 0.5] {
        let dom = domain(k as f64 * h);
        for &(a, b) in &[(-0.5f64, 0.1f64), (0.0, 0.6), (dom.lo, 0.0)] {
            let iv = Interval::new(a.max(dom.lo), b.min(dom.hi));
            let (lhs, _) = local_step_norm(&req, h, iv).unwrap();
            let hull = Interval::new(
                (iv.lo - 0.5 * k as f64 * h * phi(iv.lo)).max(-1.0),
                (iv.hi + 0.5 * k as f64 * h * phi(iv.hi)).min(1.0),
            );
            let (rhs, _) = local_seminorm(&f, r, alpha, beta, p, hull, 1e-6).unwrap();
            assert!(
                lhs <= c * rhs * (1.0 + 1e-6),
                "h={h} [a,b]=({a},{b}): {lhs} vs {c}*{rhs}"
            );
        }
    }
}

#[test]
fn scaling_in_t_is_controlled() {
    // ω(λt) ≤ c·λ^k ω(t) with a modest empirical constant.
    let f = FunctionSpec::sin_scaled(3.0).compile().unwrap();
    for &p in &[1.0, 2.0, f64::INFINITY] {
        for k in 1..=2u32 {
            let req = ModulusRequest::new(&f, k, 0, 0.5, 0.25, p, 1.0).fast();
            for &t in &[0.01, 0.05] {
                let base = moduli::modulus(&req.at_t(t)).value;
                for &lambda in &[2.0, 4.0, 8.0] {
                    let scaled = moduli::modulus(&req.at_t(lambda * t)).value;
                    let c = scaled / (lambda.powi(k as i32) * base);
                    assert!(c <= 100.0, "k={k} p={p} t={t} λ={lambda}: c={c}");
                }
            }
        }
    }
}

#[test]
fn decay_rate_matches_order_for_analytic_functions() {
    // log-log slope of ω over t ∈ [1e-3, 1e-1] is ≥ k - 0.1.
    for (name, f) in &smooth_catalog()[..2] {
        for &(k, r, p) in &[(1u32, 0u32, 2.0), (2, 0, f64::INFINITY), (2, 1, 1.0)] {
            let req = ModulusRequest::new(f, k, r, 0.25, 0.5, p, 1.0).fast();
            let mut pts = Vec::new();
            for j in 0..5 {
                let t = 1e-3 * (100f64).powf(j as f64 / 4.0);
                let v = moduli::modulus(&req.at_t(t)).value;
                if v > 0.0 {
                    pts.push((t.ln(), v.ln()));
                }
            }
            let slope = jacmod_core::quad::fit_slope(&pts);
            assert!(
                slope >= k as f64 - 0.1 && slope <= k as f64 + 0.5,
                "{name}: k={k} r={r} p={p}: slope={slope}"
            );
        }
    }
}

#[test]
fn modulus_vanishes_as_t_to_zero() {
    for (name, f) in &smooth_catalog()[..3] {
        for &p in &[0.5, 2.0] {
            let req = ModulusRequest::new(f, 2, 1, 0.25, 0.5, p, 1.0).fast();
            let v1 = moduli::modulus(&req.at_t(1.0)).value;
            let v0 = moduli::modulus(&req.at_t(1e-4)).value;
            assert!(v0 <= 1e-3 * v1, "{name} p={p}: {v0} vs {v1}");
        }
    }
}

#[test]
fn sup_modulus_endpoint_cases() {
    // p = ∞ characterisation: a smooth function with vanishing weighted
    // endpoint limits has a vanishing modulus; the weight reciprocal stays
    // at 1, the endpoint oscillator stays above 1.
    let runge = FunctionSpec::runge(5.0).compile().unwrap();
    let k = 2u32;
    for &(a, b) in &[(0.5, 0.5), (0.5, 0.0), (0.0, 0.5), (0.0, 0.0)] {
        let req = ModulusRequest::new(&runge, k, 0, a, b, f64::INFINITY, 1.0).fast();
        let v1 = moduli::modulus(&req.at_t(1.0)).value;
        let v0 = moduli::modulus(&req.at_t(1e-3)).value;
        assert!(v0 <= 0.05 * v1, "case ({a},{b}): {v0} vs {v1}");
    }
    // Violators: nonzero exponent → weight reciprocal; zero exponents →
    // bounded oscillation at the endpoint.
    for &(a, b) in &[(0.5, 0.5), (0.5, 0.0), (0.0, 0.5)] {
        let f = FunctionSpec::weight_reciprocal(0, a, b).compile().unwrap();
        let req = ModulusRequest::new(&f, k, 0, a, b, f64::INFINITY, 1.0).fast();
        for &t in &[1e-3, 1e-1, 1.0] {
            assert!(
                moduli::modulus(&req.at_t(t)).value >= 1.0 - 1e-9,
                "case ({a},{b}) t={t}"
            );
        }
    }
    let osc = FunctionSpec::osc_endpoint(0).compile().unwrap();
    let req = ModulusRequest::new(&osc, k, 0, 0.0, 0.0, f64::INFINITY, 1.0).fast();
    for &t in &[1e-3, 1e-2, 1e-1, 1.0] {
        assert!(
            moduli::modulus(&req.at_t(t)).value >= 1.0,
            "osc at t={t}: {}",
            moduli::modulus(&req.at_t(t)).value
        );
    }
}

#[test]
fn order_exchange_and_k_hierarchy() {
    let f = FunctionSpec::exp().compile().unwrap();
    let (a, b, p) = (0.25, 0.5, 2.0);
    for k in 1..=2u32 {
        for &t in &[0.01, 0.1] {
            // ω_{k+1,r}(f^{(r)}, t) ≤ c·t·ω_{k,r+1}(f^{(r+1)}, t).
            let lhs =
                moduli::modulus(&ModulusRequest::new(&f, k + 1, 0, a, b, p, t).fast()).value;
            let rhs =
                moduli::modulus(&ModulusRequest::new(&f, k, 1, a, b, p, t).fast()).value;
            let c = lhs / (t * rhs);
            assert!(c.is_finite() && c <= 100.0, "k={k} t={t}: c={c}");
            // ω_{k+1,r}(t) ≤ c·ω_{k,r}(t).
            let low =
                moduli::modulus(&ModulusRequest::new(&f, k, 0, a, b, p, t).fast()).value;
            assert!(lhs <= 100.0 * low, "k={k} t={t}: {lhs} vs {low}");
        }
    }
}

#[test]
fn equivalence_chain_is_stable() {
    // K(t^k) ≤ μ R(n^{-k}) ≤ c ω*(·) ≤ ω ≤ c K: each link's empirical ratio
    // stays within two orders of magnitude across two decades of t.
    let f = FunctionSpec::runge(5.0).compile().unwrap();
    let (k, r, a, b) = (2u32, 0u32, 0.25, 0.5);
    for &p in &[1.0, 2.0, f64::INFINITY] {
        // The cap must push the approximation term below t^k·‖wφ^{k+r}f^{(k+r)}‖
        // at the smallest t, or the K/R link degrades near the floor.
        let opts = FunctionalOptions {
            degree_cap: 64,
            polish_budget: 0,
            norm_tol: 1e-5,
            ..FunctionalOptions::default()
        };
        let cs = CandidateSet::build(&f, k, r, a, b, p, &opts).unwrap();
        let mut links: Vec<Vec<f64>> = vec![Vec::new(); 4];
        for j in 0..5 {
            let t = 1e-3 * (100f64).powf(j as f64 / 4.0);
            let n = jacmod_core::functionals::degree_for_t(t, 8);
            let req = ModulusRequest::new(&f, k, r, a, b, p, t).fast();
            let om = moduli::modulus(&req).value;
            let oma = moduli::averaged_modulus(&req).value;
            let kv = cs.kfunctional(t).value;
            let rv = cs.realization(n).unwrap().value;
            links[0].push(kv / rv);
            links[1].push(rv / oma);
            links[2].push(oma / om);
            links[3].push(om / kv);
        }
        for (i, ratios) in links.iter().enumerate() {
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
            assert!(
                hi.is_finite() && lo > 0.0 && hi / lo <= 100.0,
                "p={p} link {i}: spread {lo}..{hi}"
            );
        }
        // ω* ≤ ω exactly.
        assert!(links[2].iter().all(|&r| r <= 1.0 + 1e-3), "p={p}");
    }
}

#[test]
fn jackson_polynomial_controlled_by_averaged_complete_modulus() {
    // The realization minimizer P_n satisfies both near-best inequalities
    // against the averaged complete modulus at t = 1/n, with stable
    // empirical constants over n, simultaneously for ν in [k, ν₀].
    use jacmod_core::approx::SolveOptions;
    use jacmod_core::functionals::jackson_polynomial;
    use jacmod_core::moduli::{complete_modulus, MainpartRequest};
    use jacmod_core::norms::{lp_norm, NormTask};

    let f = FunctionSpec::exp().compile().unwrap();
    let k = 2u32;
    let w = WeightParams::new(0.25, 0.25, 2.0);
    let opts = FunctionalOptions {
        degree_cap: 64,
        polish_budget: 0,
        norm_tol: 1e-6,
        ..FunctionalOptions::default()
    };
    let mut approx_ratios = Vec::new();
    let mut deriv_ratios = Vec::new();
    for &n in &[16u32, 64, 256] {
        let (poly, _) = jackson_polynomial(&f, k, &w, n, &opts).unwrap();
        let t = 1.0 / n as f64;
        let mut mreq =
            MainpartRequest::new(&f, k, w, t, MainpartRequest::default_a(k));
        mreq.averaged = true;
        let comp = complete_modulus(&mreq, &SolveOptions::default());
        let om = comp.total();
        assert!(om > 0.0);
        let norm_of = |g: &dyn Fn(f64) -> f64, p: f64| {
            lp_norm(&NormTask::new(g, Interval::FULL, p).with_tol(1e-7))
                .map(|(v, _)| v)
                .unwrap_or(f64::INFINITY)
        };
        let resid = |x: f64| w.eval(x) * (f.eval_raw(x, 0) - poly.eval(x));
        approx_ratios.push(norm_of(&resid, w.p) / om);
        for nu in k..=k + 1 {
            let w_nu = w.with_phi_power(nu);
            let dpoly = poly.derivative_n(nu);
            let g = |x: f64| w_nu.eval(x) * dpoly.eval(x);
            let dval = norm_of(&g, w.p) * (n as f64).powi(-(nu as i32));
            deriv_ratios.push(dval / om);
        }
    }
    for (label, ratios) in [("approx", &approx_ratios), ("deriv", &deriv_ratios)] {
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi.is_finite() && hi <= 100.0, "{label}: {ratios:?}");
    }
}

#[test]
fn edge_best_approximation_below_averaged_modulus() {
    // Local best approximation on the edge zones stays below the averaged
    // modulus (informational Whitney-type check; the constant is recorded,
    // not pinned).
    use jacmod_core::approx::{best_approx, SolveOptions};

    let f = FunctionSpec::runge(5.0).compile().unwrap();
    let (k, a_param) = (2u32, 8.0);
    let w = WeightParams::new(0.25, 0.5, 2.0);
    for &t in &[0.05, 0.1, 0.3] {
        let z = a_param * t * t;
        let edge = Interval::new(-1.0, -1.0 + z);
        let ek = best_approx(&f, k, edge, &w, &SolveOptions::default())
            .unwrap()
            .error;
        let req = ModulusRequest::new(&f, k, 0, w.alpha, w.beta, w.p, t).fast();
        let oma = moduli::averaged_modulus(&req).value;
        let ratio = ek / oma;
        assert!(ratio.is_finite() && ratio <= 100.0, "t={t}: {ratio}");
    }
}

#[test]
fn dt_modulus_comparable_to_weighted_modulus() {
    let f = FunctionSpec::exp().compile().unwrap();
    let (a, b) = (0.5, 0.25);
    for &p in &[1.0, 2.0, f64::INFINITY] {
        for k in 1..=2u32 {
            let mut ratios = Vec::new();
            for &t in &[2e-3, 1e-2, 5e-2, 1e-1] {
                let om =
                    moduli::modulus(&ModulusRequest::new(&f, k, 0, a, b, p, t).fast()).value;
                let dt = dt_modulus(&DtRequest::new(&f, k, WeightParams::new(a, b, p), t));
                assert!(!dt.diverged());
                ratios.push(om / dt.total());
            }
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
            assert!(hi / lo <= 100.0, "k={k} p={p}: {ratios:?}");
        }
    }
}

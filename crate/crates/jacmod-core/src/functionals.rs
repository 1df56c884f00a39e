//! K-functionals and Realization functionals.
//!
//! Both functionals are infima of
//! `‖w φ^r (f^{(r)} - g^{(r)})‖_p + s·‖w φ^{k+r} g^{(k+r)}‖_p`
//! over competitors `g` (all of `B^{k+r}_p` for the K-functional with
//! `s = t^k`; polynomials of degree < n with `s = n^{-k}` for the
//! Realization functional). They are approximated from above over a shared
//! candidate family: best weighted approximants of `f^{(r)}` on a degree
//! ladder, the zero competitor, and — when the derivatives exist and the
//! norm is finite — `f` itself. Working with `Q = g^{(r)}` removes the
//! irrelevant lower coefficients: both objective terms depend on `Q` alone,
//! and `deg Q < n - r` is exactly the degree-< n constraint on `g`.
//!
//! Reported values are upper bounds certified within solver tolerance; for
//! `1 ≤ p ≤ ∞` they lie in the equivalence class of the true infimum.

use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;

use crate::approx::{best_approx_deriv, ApproxError, SolveOptions};
use crate::cheb::ChebPoly;
use crate::funcspace::{weighted_seminorm, Function};
use crate::norms::{lp_norm, sup_norm, NormTask};
use crate::weights::{Interval, WeightParams};

#[derive(Clone, Debug)]
pub struct FunctionalOptions {
    /// Smallest realization degree tied to `t` by `n = ceil(max(n_min, 1/t))`.
    pub n_min: u32,
    /// Cap on candidate polynomial degrees (candidates of lower degree stay
    /// admissible for every larger n).
    pub degree_cap: u32,
    /// Objective evaluations granted to coordinate-descent polish (0 = off).
    pub polish_budget: usize,
    pub solve: SolveOptions,
    pub norm_tol: f64,
}

impl Default for FunctionalOptions {
    fn default() -> Self {
        FunctionalOptions {
            n_min: 8,
            degree_cap: 96,
            polish_budget: 24,
            solve: SolveOptions::default(),
            norm_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    /// `Q = g^{(r)}`; `None` encodes the zero competitor or `f` itself.
    pub poly: Option<ChebPoly>,
    pub is_f: bool,
    /// Degree of `Q` (0 for the zero competitor).
    pub degree: usize,
    /// `‖w φ^r (f^{(r)} - Q)‖_p`.
    pub approx_term: f64,
    /// `‖w φ^{k+r} Q^{(k)}‖_p`.
    pub deriv_term: f64,
}

/// Shared candidate family for one `(f, k, r, α, β, p)` cell; realization
/// and K-functional values for every `n` and `t` are then O(1) lookups.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub k: u32,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub cands: Vec<Candidate>,
}

#[derive(Clone, Debug)]
pub struct FunctionalValue {
    pub value: f64,
    pub approx_term: f64,
    pub deriv_term: f64,
    /// Minimizing candidate polynomial (`Q`); zero polynomial for the zero
    /// competitor, `None` when `f` itself wins the K-functional.
    pub minimizer: Option<ChebPoly>,
    /// For `0 < p < 1` the K-functional is not a faithful smoothness
    /// measure (it may vanish identically); values are flagged.
    pub caveat_small_p: bool,
}

impl CandidateSet {
    pub fn build(
        f: &Function,
        k: u32,
        r: u32,
        alpha: f64,
        beta: f64,
        p: f64,
        opts: &FunctionalOptions,
    ) -> Result<CandidateSet, ApproxError> {
        let mut sets = candidate_sets_shared(f, &[k], r, alpha, beta, p, opts)?;
        Ok(sets.pop().expect("one k"))
    }

    /// `R^φ_{k,r}(f^{(r)}, n^{-k})_{α,β,p}`: inf over polynomials of degree
    /// < n of the composite objective.
    pub fn realization(&self, n: u32) -> Result<FunctionalValue, ApproxError> {
        if n <= self.k + self.r {
            return Err(ApproxError::BadDegree);
        }
        let s = (n as f64).powi(-(self.k as i32));
        let max_deg = (n - self.r) as usize; // deg Q < n - r
        let mut best: Option<&Candidate> = None;
        let mut best_v = f64::INFINITY;
        for c in &self.cands {
            if c.is_f || c.degree >= max_deg {
                continue;
            }
            let v = c.approx_term + s * c.deriv_term;
            if v < best_v {
                best_v = v;
                best = Some(c);
            }
        }
        let c = best.ok_or(ApproxError::BadDegree)?;
        Ok(FunctionalValue {
            value: best_v,
            approx_term: c.approx_term,
            deriv_term: c.deriv_term,
            minimizer: Some(
                c.poly
                    .clone()
                    .unwrap_or_else(|| ChebPoly::zero(Interval::FULL)),
            ),
            caveat_small_p: self.p < 1.0,
        })
    }

    /// Upper approximation of `K^φ_{k,r}(f^{(r)}, t^k)_{α,β,p}` over the
    /// candidate family (equivalent to the true infimum for `1 ≤ p ≤ ∞`).
    pub fn kfunctional(&self, t: f64) -> FunctionalValue {
        let s = t.powi(self.k as i32);
        let mut best_v = f64::INFINITY;
        let mut best: Option<&Candidate> = None;
        for c in &self.cands {
            let v = c.approx_term + s * c.deriv_term;
            if v < best_v {
                best_v = v;
                best = Some(c);
            }
        }
        let c = best.expect("candidate set nonempty");
        FunctionalValue {
            value: best_v,
            approx_term: c.approx_term,
            deriv_term: c.deriv_term,
            minimizer: if c.is_f {
                None
            } else {
                Some(
                    c.poly
                        .clone()
                        .unwrap_or_else(|| ChebPoly::zero(Interval::FULL)),
                )
            },
            caveat_small_p: self.p < 1.0,
        }
    }
}

/// Candidate sets for several `k` at once: the approximation ladder of
/// `f^{(r)}` does not depend on `k`, so grid sweeps share the expensive
/// solves and only the derivative-term norms are recomputed per `k`.
pub fn candidate_sets_shared(
    f: &Function,
    ks: &[u32],
    r: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    opts: &FunctionalOptions,
) -> Result<Vec<CandidateSet>, ApproxError> {
    let w_r = WeightParams::new(alpha + r as f64 / 2.0, beta + r as f64 / 2.0, p);
    let zero_norm = match weighted_seminorm(f, r, alpha, beta, p, opts.norm_tol) {
        Ok((v, _)) => v,
        Err(_) => f64::INFINITY,
    };
    if !zero_norm.is_finite() {
        // f ∉ B^r_p: neither functional is defined.
        return Err(ApproxError::NotIntegrable);
    }
    let k_max = ks.iter().copied().max().unwrap_or(1);
    let mut degree = opts.degree_cap.max(k_max + 2);
    let mut degrees: Vec<u32> = Vec::new();
    loop {
        degrees.push(degree);
        if degree <= k_max + 1 || degree <= 2 {
            break;
        }
        degree /= 2;
    }
    let mut ladder: Vec<(u32, f64, crate::cheb::ChebPoly)> = Vec::new();
    for &d in &degrees {
        let res = best_approx_deriv(f, r, d, Interval::FULL, &w_r, &opts.solve)?;
        ladder.push((d, res.error, res.minimizer));
    }
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let w_kr = WeightParams::new(
            alpha + (k + r) as f64 / 2.0,
            beta + (k + r) as f64 / 2.0,
            p,
        );
        let mut cands: Vec<Candidate> = Vec::new();
        cands.push(Candidate {
            poly: None,
            is_f: false,
            degree: 0,
            approx_term: zero_norm,
            deriv_term: 0.0,
        });
        for (d, err, q) in &ladder {
            let dterm = poly_weighted_norm(&q.derivative_n(k), &w_kr, opts.norm_tol);
            cands.push(Candidate {
                poly: Some(q.clone()),
                is_f: false,
                degree: *d as usize - 1,
                approx_term: *err,
                deriv_term: dterm,
            });
        }
        if f.max_deriv() >= k + r {
            if let Ok((v, _)) = weighted_seminorm(f, k + r, alpha, beta, p, opts.norm_tol) {
                if v.is_finite() {
                    cands.push(Candidate {
                        poly: None,
                        is_f: true,
                        degree: usize::MAX,
                        approx_term: 0.0,
                        deriv_term: v,
                    });
                }
            }
        }
        out.push(CandidateSet {
            k,
            r,
            alpha,
            beta,
            p,
            cands,
        });
    }
    Ok(out)
}

/// `‖w q‖_p` for a polynomial (smooth integrand, no breakpoints).
pub(crate) fn poly_weighted_norm(q: &ChebPoly, w: &WeightParams, tol: f64) -> f64 {
    let g = |x: f64| w.eval(x) * q.eval(x);
    if w.p.is_infinite() {
        sup_norm(&NormTask::new(g, Interval::FULL, w.p).with_grid(1025))
    } else {
        match lp_norm(&NormTask::new(g, Interval::FULL, w.p).with_tol(tol)) {
            Ok((v, _)) => v,
            Err(_) => f64::INFINITY,
        }
    }
}

/// Realization functional with candidate construction and optional
/// coordinate-descent polish of the winning candidate.
pub fn realization(
    f: &Function,
    k: u32,
    r: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    n: u32,
    opts: &FunctionalOptions,
) -> Result<FunctionalValue, ApproxError> {
    let cs = CandidateSet::build(f, k, r, alpha, beta, p, opts)?;
    let mut out = cs.realization(n)?;
    if opts.polish_budget > 0 {
        polish(f, &cs, n, &mut out, opts);
    }
    Ok(out)
}

/// K-functional through the same candidate family, with the realization
/// minimizers for the degree ladder plus the zero and `f` competitors.
pub fn kfunctional(
    f: &Function,
    k: u32,
    r: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    t: f64,
    opts: &FunctionalOptions,
) -> Result<FunctionalValue, ApproxError> {
    let cs = CandidateSet::build(f, k, r, alpha, beta, p, opts)?;
    Ok(cs.kfunctional(t))
}

/// The realization degree tied to `t`.
pub fn degree_for_t(t: f64, n_min: u32) -> u32 {
    (1.0 / t).ceil().max(n_min as f64) as u32
}

/// Near-best polynomial of degree < n: the realization minimizer for `r = 0`.
/// The verification suites compare `‖w(f-P_n)‖` and `n^{-ν}‖w φ^ν P_n^{(ν)}‖`
/// against the averaged complete modulus.
pub fn jackson_polynomial(
    f: &Function,
    k: u32,
    w: &WeightParams,
    n: u32,
    opts: &FunctionalOptions,
) -> Result<(ChebPoly, FunctionalValue), ApproxError> {
    let cs = CandidateSet::build(f, k, 0, w.alpha, w.beta, w.p, opts)?;
    let out = cs.realization(n)?;
    let poly = out
        .minimizer
        .clone()
        .unwrap_or_else(|| ChebPoly::zero(Interval::FULL));
    Ok((poly, out))
}

/// Coordinate descent on the winning candidate's Chebyshev coefficients
/// against the full continuous objective; each probe costs two norms.
fn polish(
    f: &Function,
    cs: &CandidateSet,
    n: u32,
    out: &mut FunctionalValue,
    opts: &FunctionalOptions,
) {
    let Some(q0) = out.minimizer.clone() else {
        return;
    };
    let (k, r) = (cs.k, cs.r);
    let w_r = WeightParams::new(cs.alpha + r as f64 / 2.0, cs.beta + r as f64 / 2.0, cs.p);
    let w_kr = WeightParams::new(
        cs.alpha + (k + r) as f64 / 2.0,
        cs.beta + (k + r) as f64 / 2.0,
        cs.p,
    );
    let s = (n as f64).powi(-(k as i32));
    let objective = |q: &ChebPoly| -> (f64, f64, f64) {
        let a = crate::approx::residual_norm(f, r, q, Interval::FULL, &w_r, opts.norm_tol);
        let d = poly_weighted_norm(&q.derivative_n(k), &w_kr, opts.norm_tol);
        (a + s * d, a, d)
    };
    let mut q = q0;
    let mut budget = opts.polish_budget;
    let mut step = 0.25;
    let scale = q
        .coefficients
        .iter()
        .fold(0.0f64, |acc, c| acc.max(c.abs()))
        .max(out.value)
        .max(1e-12);
    while budget > 0 && step > 1e-4 {
        let mut improved = false;
        let ncoef = q.coefficients.len();
        for j in (0..ncoef).rev().take(8) {
            if budget == 0 {
                break;
            }
            for dir in [1.0, -1.0] {
                let mut trial = q.clone();
                trial.coefficients[j] += dir * step * scale;
                let (v, a, d) = objective(&trial);
                budget = budget.saturating_sub(1);
                if v < out.value {
                    out.value = v;
                    out.approx_term = a;
                    out.deriv_term = d;
                    q = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.25;
        }
    }
    out.minimizer = Some(q);
}

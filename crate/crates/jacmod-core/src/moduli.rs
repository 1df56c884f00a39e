//! Finite differences and the weighted moduli of smoothness.
//!
//! The central quantity is the step norm
//! `N(h) = ‖ŵ_{kh}^{r/2+α, r/2+β}(·) Δ^k_{hφ(·)}(f^{(r)}, ·)‖_{L_p(D_{kh})}`:
//! the modulus is `sup_{0<h≤t} N(h)` (with the sup saturating at `t = 2/k`,
//! where the stencil domain collapses), and the averaged modulus replaces the
//! sup by an `L_p` average of `N` over `(0, t]`. Both propagate the
//! divergence signal of the inner norm together with its growth trace.
//!
//! The module also provides the three-part weighted Ditzian–Totik modulus
//! (interior φ-step part plus unweighted-step forward/backward parts near the
//! endpoints, edge width `t* = 2k²t²`) and the main-part/complete moduli on
//! `I_{A,h} = [-1+Ah², 1-Ah²]` with local best-approximation edge terms.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;

use crate::approx::{self, SolveOptions};
use crate::funcspace::{phi_pow, Function};
use crate::norms::{lp_norm, sup_norm, NormError, NormTask};
use crate::quad::{gl_nodes_scaled, GrowthTrace};
use crate::weights::{domain, phi, shifted_weight_raw, Interval, WeightParams};

/// Binomial row `C(k, 0..=k)`.
pub fn binomial_row(k: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for i in 0..k {
        let last = *row.last().unwrap();
        row.push(last * (k - i) as f64 / (i + 1) as f64);
    }
    row
}

/// `Δ^k_step(f^{(order)}, x; J)`: the k-th symmetric difference with plain
/// step `step`, defined to be exactly 0 when the stencil leaves `J`.
#[inline]
pub fn symmetric_diff(
    f: &Function,
    x: f64,
    step: f64,
    k: u32,
    j: Interval,
    order: u32,
) -> f64 {
    let kf = k as f64;
    let half = 0.5 * kf * step;
    if !(j.contains(x - half) && j.contains(x + half)) {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut c = 1.0;
    let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    for i in 0..=k {
        acc += sign * c * f.eval_raw(x + (i as f64 - 0.5 * kf) * step, order);
        sign = -sign;
        c = c * (k - i) as f64 / (i as f64 + 1.0);
    }
    acc
}

/// Forward difference `→Δ^k_step(f, x) = Δ^k_step(f, x + k·step/2)`.
#[inline]
pub fn forward_diff(f: &Function, x: f64, step: f64, k: u32, j: Interval, order: u32) -> f64 {
    symmetric_diff(f, x + 0.5 * k as f64 * step, step, k, j, order)
}

/// Backward difference `←Δ^k_step(f, x) = Δ^k_step(f, x - k·step/2)`.
#[inline]
pub fn backward_diff(f: &Function, x: f64, step: f64, k: u32, j: Interval, order: u32) -> f64 {
    symmetric_diff(f, x - 0.5 * k as f64 * step, step, k, j, order)
}

/// A modulus query `(k, r, α, β, p, t)` with resolution controls.
#[derive(Clone)]
pub struct ModulusRequest<'a> {
    pub f: &'a Function,
    pub k: u32,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub t: f64,
    /// Log-spaced h samples on `[t·1e-3, t]` (≥ 16).
    pub h_grid_size: usize,
    /// Gauss nodes for the h-average of the averaged modulus.
    pub tau_nodes: usize,
    pub tol: f64,
    /// Golden-section refinement around the best grid h.
    pub refine: bool,
    /// Sample count for `p = ∞` inner norms.
    pub sup_grid: usize,
}

impl<'a> ModulusRequest<'a> {
    pub fn new(f: &'a Function, k: u32, r: u32, alpha: f64, beta: f64, p: f64, t: f64) -> Self {
        assert!(k >= 1, "k >= 1 required");
        assert!(r <= f.max_deriv(), "spec.max_deriv must cover r");
        assert!(t > 0.0 && p > 0.0);
        ModulusRequest {
            f,
            k,
            r,
            alpha,
            beta,
            p,
            t,
            h_grid_size: 64,
            tau_nodes: 32,
            tol: 1e-6,
            refine: true,
            sup_grid: 4097,
        }
    }

    /// Cheaper settings for large parameter sweeps.
    pub fn fast(mut self) -> Self {
        self.h_grid_size = 16;
        self.tau_nodes = 16;
        self.tol = 1e-4;
        self.sup_grid = 1025;
        self.refine = false;
        self
    }

    pub fn at_t(&self, t: f64) -> Self {
        let mut r = self.clone();
        r.t = t;
        r
    }
}

#[derive(Clone, Debug)]
pub enum StepNorm {
    Finite { value: f64, err: f64 },
    Divergent { trace: GrowthTrace },
}

/// The inner weighted difference norm `N(h)` over `D_{kh}`.
pub fn step_norm(req: &ModulusRequest<'_>, h: f64) -> StepNorm {
    let k = req.k;
    let kh = k as f64 * h;
    let dom = domain(kh);
    if dom.empty || h <= 0.0 {
        return StepNorm::Finite {
            value: 0.0,
            err: 0.0,
        };
    }
    let xi = req.r as f64 / 2.0 + req.alpha;
    let zeta = req.r as f64 / 2.0 + req.beta;
    let f = req.f;
    let order = req.r;
    let g = move |x: f64| {
        let w = shifted_weight_raw(x, kh, xi, zeta);
        if w == 0.0 {
            return 0.0;
        }
        w * symmetric_diff(f, x, h * phi(x), k, Interval::FULL, order)
    };
    let breaks = stencil_preimages(f, k, h, &dom, true);
    if req.p.is_infinite() {
        let task = NormTask::new(g, dom, req.p)
            .with_breakpoints(&breaks)
            .with_grid(req.sup_grid);
        StepNorm::Finite {
            value: sup_norm(&task),
            err: 0.0,
        }
    } else {
        let task = NormTask::new(g, dom, req.p)
            .with_breakpoints(&breaks)
            .with_tol(req.tol);
        match lp_norm(&task) {
            Ok((value, err)) => StepNorm::Finite { value, err },
            Err(NormError::Divergent { trace, .. }) => StepNorm::Divergent { trace },
            Err(_) => StepNorm::Finite {
                value: 0.0,
                err: 0.0,
            },
        }
    }
}

/// Preimages of the function's breakpoints under the stencil maps
/// `x ↦ x + (i-k/2)·h·φ(x)` (monotone on the stencil domain), so that
/// quadrature panels never straddle a transported kink. `phi_step` selects
/// the φ-step stencil; plain-step differences shift breakpoints directly.
fn stencil_preimages(
    f: &Function,
    k: u32,
    h: f64,
    dom: &Interval,
    phi_step: bool,
) -> Vec<f64> {
    let breaks = f.breakpoints();
    if breaks.is_empty() {
        return vec![];
    }
    let cap = 2048 / (k as usize + 1);
    if breaks.len() > cap {
        return vec![];
    }
    let kf = k as f64;
    let mut out = Vec::with_capacity(breaks.len() * (k as usize + 1));
    for i in 0..=k {
        let ci = i as f64 - 0.5 * kf;
        if phi_step {
            let u = |x: f64| x + ci * h * phi(x);
            let (ulo, uhi) = (u(dom.lo), u(dom.hi));
            for &b in breaks {
                if b <= ulo.min(uhi) || b >= ulo.max(uhi) {
                    continue;
                }
                let (mut lo, mut hi) = (dom.lo, dom.hi);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if u(mid) < b {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
        } else {
            for &b in breaks {
                let x = b - ci * h;
                if x > dom.lo && x < dom.hi {
                    out.push(x);
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct ModulusResult {
    pub value: f64,
    /// h attaining the sup (sup-type moduli).
    pub argmax_h: f64,
    pub err_est: f64,
    pub diverged: bool,
    pub trace: Option<GrowthTrace>,
}

impl ModulusResult {
    fn divergent(h: f64, trace: GrowthTrace) -> Self {
        ModulusResult {
            value: f64::INFINITY,
            argmax_h: h,
            err_est: f64::INFINITY,
            diverged: true,
            trace: Some(trace),
        }
    }
}

/// `ω^φ_{k,r}(f^{(r)}, t)_{α,β,p} = sup_{0<h≤t} N(h)`.
///
/// `t` saturates at `2/k` (the stencil domain is empty beyond), making the
/// large-`t` identity exact. For window-train specs the probe steps `h_n`
/// are added to the h-grid, since the inner norm diverges only along that
/// sequence.
pub fn modulus(req: &ModulusRequest<'_>) -> ModulusResult {
    let t_eff = req.t.min(2.0 / req.k as f64);
    let mut hs: Vec<f64> = Vec::new();
    for h in req.f.phi_probe_steps() {
        if h > 0.0 && h <= t_eff {
            hs.push(h);
        }
    }
    let m = req.h_grid_size.max(16);
    for j in 0..m {
        let frac = j as f64 / (m - 1) as f64;
        hs.push(t_eff * 1e-3f64.powf(1.0 - frac));
    }
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    hs.dedup();
    let mut best_v = 0.0;
    let mut best_i = hs.len() - 1;
    let mut best_err = 0.0;
    for (i, &h) in hs.iter().enumerate() {
        match step_norm(req, h) {
            StepNorm::Finite { value, err } => {
                if value > best_v {
                    best_v = value;
                    best_i = i;
                    best_err = err;
                }
            }
            StepNorm::Divergent { trace } => return ModulusResult::divergent(h, trace),
        }
    }
    let mut best_h = hs[best_i];
    if req.refine && best_v > 0.0 {
        let mut a = if best_i == 0 { hs[0] * 0.5 } else { hs[best_i - 1] };
        let mut b = if best_i + 1 == hs.len() {
            hs[best_i]
        } else {
            hs[best_i + 1]
        };
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut evals = 0usize;
        while (b - a) > 1e-3 * best_h && evals < 24 {
            let x1 = b - INV_PHI * (b - a);
            let x2 = a + INV_PHI * (b - a);
            let mut val = |h: f64| -> Result<f64, ModulusResult> {
                match step_norm(req, h) {
                    StepNorm::Finite { value, err } => {
                        if value > best_v {
                            best_v = value;
                            best_h = h;
                            best_err = err;
                        }
                        Ok(value)
                    }
                    StepNorm::Divergent { trace } => Err(ModulusResult::divergent(h, trace)),
                }
            };
            let f1 = match val(x1) {
                Ok(v) => v,
                Err(d) => return d,
            };
            let f2 = match val(x2) {
                Ok(v) => v,
                Err(d) => return d,
            };
            evals += 2;
            if f1 < f2 {
                a = x1;
            } else {
                b = x2;
            }
        }
    }
    ModulusResult {
        value: best_v,
        argmax_h: best_h,
        err_est: best_err,
        diverged: false,
        trace: None,
    }
}

/// `ω*^φ_{k,r}(f^{(r)}, t)_{α,β,p}`: the h-average
/// `((1/t) ∫₀ᵗ N(τ)^p dτ)^{1/p}` for `p < ∞`; identical to [`modulus`] for
/// `p = ∞`.
pub fn averaged_modulus(req: &ModulusRequest<'_>) -> ModulusResult {
    if req.p.is_infinite() {
        return modulus(req);
    }
    let p = req.p;
    let t = req.t;
    let nodes = gl_nodes_scaled(req.tau_nodes, 0.0, t);
    let mut acc = 0.0;
    let mut err_acc = 0.0;
    for &(tau, w) in &nodes {
        match step_norm(req, tau) {
            StepNorm::Finite { value, err } => {
                let vp = value.powf(p);
                acc += w * vp;
                if value > 0.0 {
                    err_acc += w * vp * (err / value) * p;
                }
            }
            StepNorm::Divergent { trace } => return ModulusResult::divergent(tau, trace),
        }
    }
    let integral = acc / t;
    let value = integral.powf(1.0 / p);
    let err = if integral > 0.0 {
        value * (err_acc / t) / integral / p
    } else {
        0.0
    };
    ModulusResult {
        value,
        argmax_h: t,
        err_est: err,
        diverged: false,
        trace: None,
    }
}

// ---------------------------------------------------------------------------
// Weighted Ditzian–Totik modulus (three-part form)
// ---------------------------------------------------------------------------

/// One term of a composite modulus; `value` is `+∞` when divergent.
#[derive(Clone, Debug)]
pub struct TermValue {
    pub value: f64,
    pub err: f64,
    pub trace: Option<GrowthTrace>,
}

impl TermValue {
    fn finite(value: f64, err: f64) -> Self {
        TermValue {
            value,
            err,
            trace: None,
        }
    }

    fn divergent(trace: GrowthTrace) -> Self {
        TermValue {
            value: f64::INFINITY,
            err: f64::INFINITY,
            trace: Some(trace),
        }
    }

    pub fn diverged(&self) -> bool {
        self.trace.is_some()
    }
}

#[derive(Clone)]
pub struct DtRequest<'a> {
    pub f: &'a Function,
    /// Derivative order of `f` the modulus is taken of (the weight is the
    /// caller's business; `w φ^r` is again a Jacobi weight).
    pub order: u32,
    pub k: u32,
    pub w: WeightParams,
    pub t: f64,
    /// Width multiple of the endpoint intervals `[-1, -1+c·t*]` in the
    /// sup form.
    pub edge_factor: f64,
    pub h_grid_size: usize,
    pub tau_nodes: usize,
    pub tol: f64,
    pub sup_grid: usize,
}

impl<'a> DtRequest<'a> {
    pub fn new(f: &'a Function, k: u32, w: WeightParams, t: f64) -> Self {
        DtRequest {
            f,
            order: 0,
            k,
            w,
            t,
            edge_factor: 12.0,
            h_grid_size: 16,
            tau_nodes: 16,
            tol: 1e-5,
            sup_grid: 1025,
        }
    }

    pub fn t_star(&self) -> f64 {
        2.0 * (self.k * self.k) as f64 * self.t * self.t
    }
}

#[derive(Clone, Debug)]
pub struct DtModulus {
    pub main: TermValue,
    pub forward: TermValue,
    pub backward: TermValue,
}

impl DtModulus {
    pub fn total(&self) -> f64 {
        self.main.value + self.forward.value + self.backward.value
    }

    pub fn diverged(&self) -> bool {
        self.main.diverged() || self.forward.diverged() || self.backward.diverged()
    }
}

enum DiffKind {
    SymmetricPhi,
    Forward,
    Backward,
}

fn dt_term(
    req: &DtRequest<'_>,
    interval: Interval,
    h_max: f64,
    kind: DiffKind,
) -> TermValue {
    if interval.empty || h_max <= 0.0 {
        return TermValue::finite(0.0, 0.0);
    }
    let f = req.f;
    let k = req.k;
    let order = req.order;
    let w = req.w;
    let m = req.h_grid_size.max(8);
    let mut steps: Vec<f64> = (0..m)
        .map(|j| h_max * 1e-3f64.powf(1.0 - j as f64 / (m - 1) as f64))
        .collect();
    let probes = match kind {
        DiffKind::SymmetricPhi => req.f.phi_probe_steps(),
        _ => req.f.plain_probe_steps(k),
    };
    steps.extend(probes.into_iter().filter(|&h| h > 0.0 && h <= h_max));
    let mut best = TermValue::finite(0.0, 0.0);
    for &h in &steps {
        let phi_step = matches!(kind, DiffKind::SymmetricPhi);
        let g = |x: f64| {
            let d = match kind {
                DiffKind::SymmetricPhi => {
                    symmetric_diff(f, x, h * phi(x), k, Interval::FULL, order)
                }
                DiffKind::Forward => forward_diff(f, x, h, k, Interval::FULL, order),
                DiffKind::Backward => backward_diff(f, x, h, k, Interval::FULL, order),
            };
            if d == 0.0 {
                return 0.0;
            }
            w.eval(x) * d
        };
        let shifted_dom = match kind {
            DiffKind::Forward => Interval::new(interval.lo - k as f64 * h, interval.hi),
            DiffKind::Backward => Interval::new(interval.lo, interval.hi + k as f64 * h),
            DiffKind::SymmetricPhi => interval,
        };
        let breaks = stencil_preimages(f, k, h, &shifted_dom, phi_step);
        if w.p.is_infinite() {
            let task = NormTask::new(g, interval, w.p)
                .with_breakpoints(&breaks)
                .with_grid(req.sup_grid);
            let v = sup_norm(&task);
            if v > best.value {
                best = TermValue::finite(v, 0.0);
            }
        } else {
            let task = NormTask::new(g, interval, w.p)
                .with_breakpoints(&breaks)
                .with_tol(req.tol);
            match lp_norm(&task) {
                Ok((v, e)) => {
                    if v > best.value {
                        best = TermValue::finite(v, e);
                    }
                }
                Err(NormError::Divergent { trace, .. }) => return TermValue::divergent(trace),
                Err(_) => {}
            }
        }
    }
    best
}

/// The weighted DT modulus `ω^k_φ(f^{(order)}, t)_{w,p}`: main φ-step part on
/// `[-1+t*, 1-t*]` (sup over `h ≤ t`) plus forward/backward parts on the
/// endpoint intervals of width `edge_factor·t*` (sup over `h ≤ t*`),
/// `t* = 2k²t²`.
pub fn dt_modulus(req: &DtRequest<'_>) -> DtModulus {
    let ts = req.t_star();
    let main_iv = Interval::new(-1.0 + ts, 1.0 - ts).intersect(&Interval::FULL);
    let lo_edge = Interval::new(-1.0, (-1.0 + req.edge_factor * ts).min(1.0));
    let hi_edge = Interval::new((1.0 - req.edge_factor * ts).max(-1.0), 1.0);
    DtModulus {
        main: dt_term(req, main_iv, req.t, DiffKind::SymmetricPhi),
        forward: dt_term(req, lo_edge, ts, DiffKind::Forward),
        backward: dt_term(req, hi_edge, ts, DiffKind::Backward),
    }
}

fn dt_averaged_term(
    req: &DtRequest<'_>,
    interval: Interval,
    h_max: f64,
    kind: DiffKind,
) -> TermValue {
    if interval.empty || h_max <= 0.0 {
        return TermValue::finite(0.0, 0.0);
    }
    let f = req.f;
    let k = req.k;
    let order = req.order;
    let w = req.w;
    let p = w.p;
    let nodes = gl_nodes_scaled(req.tau_nodes, 0.0, h_max);
    let mut acc = 0.0;
    let mut err_acc = 0.0;
    for &(h, wt) in &nodes {
        let phi_step = matches!(kind, DiffKind::SymmetricPhi);
        let g = |x: f64| {
            let d = match kind {
                DiffKind::SymmetricPhi => {
                    symmetric_diff(f, x, h * phi(x), k, Interval::FULL, order)
                }
                DiffKind::Forward => forward_diff(f, x, h, k, Interval::FULL, order),
                DiffKind::Backward => backward_diff(f, x, h, k, Interval::FULL, order),
            };
            if d == 0.0 {
                return 0.0;
            }
            w.eval(x) * d
        };
        let breaks = stencil_preimages(f, k, h, &interval, phi_step);
        let task = NormTask::new(g, interval, p)
            .with_breakpoints(&breaks)
            .with_tol(req.tol);
        match lp_norm(&task) {
            Ok((v, e)) => {
                let vp = v.powf(p);
                acc += wt * vp;
                if v > 0.0 {
                    err_acc += wt * vp * (e / v) * p;
                }
            }
            Err(NormError::Divergent { trace, .. }) => return TermValue::divergent(trace),
            Err(_) => {}
        }
    }
    let integral = acc / h_max;
    let value = integral.powf(1.0 / p);
    let err = if integral > 0.0 {
        value * (err_acc / h_max) / integral / p
    } else {
        0.0
    };
    TermValue::finite(value, err)
}

/// The averaged weighted DT modulus (three averaged terms; endpoint interval
/// width `a_edge·t*`). Defined as [`dt_modulus`] for `p = ∞`.
pub fn dt_averaged_modulus(req: &DtRequest<'_>, a_edge: f64) -> DtModulus {
    if req.w.p.is_infinite() {
        return dt_modulus(req);
    }
    let ts = req.t_star();
    let main_iv = Interval::new(-1.0 + ts, 1.0 - ts).intersect(&Interval::FULL);
    let lo_edge = Interval::new(-1.0, (-1.0 + a_edge * ts).min(1.0));
    let hi_edge = Interval::new((1.0 - a_edge * ts).max(-1.0), 1.0);
    DtModulus {
        main: dt_averaged_term(req, main_iv, req.t, DiffKind::SymmetricPhi),
        forward: dt_averaged_term(req, lo_edge, ts, DiffKind::Forward),
        backward: dt_averaged_term(req, hi_edge, ts, DiffKind::Backward),
    }
}

// ---------------------------------------------------------------------------
// Main-part and complete moduli
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct MainpartRequest<'a> {
    pub f: &'a Function,
    pub order: u32,
    pub k: u32,
    pub w: WeightParams,
    pub t: f64,
    /// Interval parameter: `I_{A,h} = [-1+Ah², 1-Ah²]`.
    pub a_param: f64,
    pub averaged: bool,
    pub h_grid_size: usize,
    pub tau_nodes: usize,
    pub tol: f64,
    pub sup_grid: usize,
}

impl<'a> MainpartRequest<'a> {
    pub fn new(f: &'a Function, k: u32, w: WeightParams, t: f64, a_param: f64) -> Self {
        MainpartRequest {
            f,
            order: 0,
            k,
            w,
            t,
            a_param,
            averaged: false,
            h_grid_size: 16,
            tau_nodes: 16,
            tol: 1e-5,
            sup_grid: 1025,
        }
    }

    /// The smallest interval parameter for which `I_{A,h} ⊆ D_{2kh}`.
    pub fn default_a(k: u32) -> f64 {
        2.0 * (k * k) as f64
    }
}

fn mainpart_step<'a>(
    req: &MainpartRequest<'a>,
    h: f64,
) -> Result<(f64, f64), TermValue> {
    let iv = Interval::new(-1.0 + req.a_param * h * h, 1.0 - req.a_param * h * h);
    if iv.empty {
        return Ok((0.0, 0.0));
    }
    let f = req.f;
    let k = req.k;
    let order = req.order;
    let w = req.w;
    let g = move |x: f64| {
        let d = symmetric_diff(f, x, h * phi(x), k, iv, order);
        if d == 0.0 {
            return 0.0;
        }
        w.eval(x) * d
    };
    let breaks = stencil_preimages(f, k, h, &iv, true);
    if w.p.is_infinite() {
        let task = NormTask::new(g, iv, w.p)
            .with_breakpoints(&breaks)
            .with_grid(req.sup_grid);
        Ok((sup_norm(&task), 0.0))
    } else {
        let task = NormTask::new(g, iv, w.p)
            .with_breakpoints(&breaks)
            .with_tol(req.tol);
        match lp_norm(&task) {
            Ok(v) => Ok(v),
            Err(NormError::Divergent { trace, .. }) => Err(TermValue::divergent(trace)),
            Err(_) => Ok((0.0, 0.0)),
        }
    }
}

/// Main-part weighted modulus `Ω^k_φ(f, A, t)` (sup form) or its h-average
/// `Ω̃` (`averaged = true`; `p < ∞`).
pub fn mainpart_modulus(req: &MainpartRequest<'_>) -> TermValue {
    if req.averaged && !req.w.p.is_infinite() {
        let p = req.w.p;
        let nodes = gl_nodes_scaled(req.tau_nodes, 0.0, req.t);
        let mut acc = 0.0;
        let mut err_acc = 0.0;
        for &(h, wt) in &nodes {
            match mainpart_step(req, h) {
                Ok((v, e)) => {
                    let vp = v.powf(p);
                    acc += wt * vp;
                    if v > 0.0 {
                        err_acc += wt * vp * (e / v) * p;
                    }
                }
                Err(term) => return term,
            }
        }
        let integral = acc / req.t;
        let value = integral.powf(1.0 / p);
        let err = if integral > 0.0 {
            value * (err_acc / req.t) / integral / p
        } else {
            0.0
        };
        TermValue::finite(value, err)
    } else {
        let m = req.h_grid_size.max(8);
        let mut best = TermValue::finite(0.0, 0.0);
        for j in 0..m {
            let frac = j as f64 / (m - 1) as f64;
            let h = req.t * 1e-3f64.powf(1.0 - frac);
            match mainpart_step(req, h) {
                Ok((v, e)) => {
                    if v > best.value {
                        best = TermValue::finite(v, e);
                    }
                }
                Err(term) => return term,
            }
        }
        best
    }
}

#[derive(Clone, Debug)]
pub struct CompleteModulus {
    pub main: TermValue,
    /// `E_k` on `[-1, -1+2At²]` and `[1-2At², 1]`.
    pub edge_lo: f64,
    pub edge_hi: f64,
}

impl CompleteModulus {
    pub fn total(&self) -> f64 {
        self.main.value + self.edge_lo + self.edge_hi
    }
}

/// Complete weighted modulus: main part plus the local best-approximation
/// errors by polynomials of degree < k on the edge zones `Z_{2A,t}`.
pub fn complete_modulus(req: &MainpartRequest<'_>, solve: &SolveOptions) -> CompleteModulus {
    let main = mainpart_modulus(req);
    let z = (2.0 * req.a_param * req.t * req.t).min(2.0);
    let lo = Interval::new(-1.0, -1.0 + z);
    let hi = Interval::new(1.0 - z, 1.0);
    let edge_lo = approx::best_approx_deriv(req.f, req.order, req.k, lo, &req.w, solve)
        .map(|r| r.error)
        .unwrap_or(f64::INFINITY);
    let edge_hi = approx::best_approx_deriv(req.f, req.order, req.k, hi, &req.w, solve)
        .map(|r| r.error)
        .unwrap_or(f64::INFINITY);
    CompleteModulus {
        main,
        edge_lo,
        edge_hi,
    }
}

/// `‖w_{α,β} φ^r f^{(r)}‖` restricted to `[a, b]` (local seminorm, used by the
/// local boundedness check).
pub fn local_seminorm(
    f: &Function,
    r: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    interval: Interval,
    tol: f64,
) -> Result<(f64, f64), NormError> {
    let g = |x: f64| {
        crate::weights::jacobi_weight_raw(x, alpha, beta) * phi_pow(x, r) * f.eval_raw(x, r)
    };
    if p.is_infinite() {
        let task = NormTask::new(g, interval, p).with_breakpoints(f.breakpoints());
        Ok((sup_norm(&task), 0.0))
    } else {
        let task = NormTask::new(g, interval, p)
            .with_breakpoints(f.breakpoints())
            .with_tol(tol);
        lp_norm(&task)
    }
}

/// Local step norm over `[a, b] ⊆ D_{kh}` (left side of the local
/// boundedness estimate).
pub fn local_step_norm(
    req: &ModulusRequest<'_>,
    h: f64,
    interval: Interval,
) -> Result<(f64, f64), NormError> {
    let k = req.k;
    let kh = k as f64 * h;
    let xi = req.r as f64 / 2.0 + req.alpha;
    let zeta = req.r as f64 / 2.0 + req.beta;
    let f = req.f;
    let order = req.r;
    let g = move |x: f64| {
        let w = shifted_weight_raw(x, kh, xi, zeta);
        if w == 0.0 {
            return 0.0;
        }
        w * symmetric_diff(f, x, h * phi(x), k, Interval::FULL, order)
    };
    let breaks = stencil_preimages(f, k, h, &interval, true);
    if req.p.is_infinite() {
        let task = NormTask::new(g, interval, req.p)
            .with_breakpoints(&breaks)
            .with_grid(req.sup_grid);
        Ok((sup_norm(&task), 0.0))
    } else {
        let task = NormTask::new(g, interval, req.p)
            .with_breakpoints(&breaks)
            .with_tol(req.tol);
        lp_norm(&task)
    }
}

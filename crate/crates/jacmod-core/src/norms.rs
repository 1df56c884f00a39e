//! Weighted `L_p` norms (`0 < p ≤ ∞`) on subintervals of `[-1, 1]`.
//!
//! For `p < ∞` the p-th power of the integrand is integrated with the graded
//! adaptive scheme from [`crate::quad`]; quasi-norm pitfalls for `p < 1` are
//! avoided by working in the p-th-power domain throughout and taking the root
//! once at the end. For `p = ∞` a Chebyshev-distributed sample grid is
//! refined around the detected maxima by golden-section search.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;

use crate::quad::{self, GrowthTrace, Quadrature};
use crate::weights::Interval;

/// A norm computation request.
///
/// `endpoint_exponents`, when known, declare the algebraic behavior of the
/// integrand at the two interval ends (exponent of the distance to the end);
/// a declared exponent `γ` with `γ·p ≤ -1` short-circuits to the divergence
/// signal. `breakpoints` split the quadrature partition so panels never
/// straddle a kink or an interior singularity.
pub struct NormTask<'a, F: Fn(f64) -> f64> {
    pub integrand: F,
    pub interval: Interval,
    pub p: f64,
    pub endpoint_exponents: Option<(f64, f64)>,
    pub tol: f64,
    pub breakpoints: &'a [f64],
    /// Sample count for the `p = ∞` grid.
    pub grid: usize,
}

impl<'a, F: Fn(f64) -> f64> NormTask<'a, F> {
    pub fn new(integrand: F, interval: Interval, p: f64) -> Self {
        NormTask {
            integrand,
            interval,
            p,
            endpoint_exponents: None,
            tol: 1e-7,
            breakpoints: &[],
            grid: 4097,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_breakpoints(mut self, breaks: &'a [f64]) -> Self {
        self.breakpoints = breaks;
        self
    }

    pub fn with_endpoint_exponents(mut self, exps: (f64, f64)) -> Self {
        self.endpoint_exponents = Some(exps);
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }
}

#[derive(Clone, Debug)]
pub enum NormError {
    /// The p-th power integral does not converge; carries the partial value
    /// (in the norm domain, i.e. already rooted) and the shell growth trace.
    Divergent { partial: f64, trace: GrowthTrace },
    EmptyInterval,
    BadExponent { p: f64 },
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::Divergent { partial, .. } => {
                write!(f, "divergent integral (partial value {partial})")
            }
            NormError::EmptyInterval => write!(f, "empty integration interval"),
            NormError::BadExponent { p } => write!(f, "invalid integrability index p = {p}"),
        }
    }
}

impl core::error::Error for NormError {}

impl NormError {
    pub fn trace(&self) -> Option<&GrowthTrace> {
        match self {
            NormError::Divergent { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// `‖g‖_{L_p(I)} = (∫_I |g|^p)^{1/p}` for finite `p`, with an error estimate.
pub fn lp_norm<F: Fn(f64) -> f64>(task: &NormTask<'_, F>) -> Result<(f64, f64), NormError> {
    let p = task.p;
    if !(p > 0.0) || !p.is_finite() {
        return Err(NormError::BadExponent { p });
    }
    if task.interval.empty {
        return Err(NormError::EmptyInterval);
    }
    let (a, b) = (task.interval.lo, task.interval.hi);
    if let Some((glo, ghi)) = task.endpoint_exponents {
        // Declared non-integrable endpoint: produce the shell trace directly.
        if glo * p <= -1.0 {
            return Err(declared_divergence(task, false));
        }
        if ghi * p <= -1.0 {
            return Err(declared_divergence(task, true));
        }
    }
    let g = &task.integrand;
    let f = |x: f64| pow_abs(g(x), p);
    let cfg = Quadrature::with_tol(task.tol);
    match quad::integrate_nonneg(&f, a, b, task.breakpoints, &cfg) {
        Ok((int, err)) => {
            let value = int.powf(1.0 / p);
            let rel = if int > 0.0 { err / int } else { 0.0 };
            Ok((value, value * rel / p))
        }
        Err(div) => Err(NormError::Divergent {
            partial: div.partial.powf(1.0 / p),
            trace: div.trace,
        }),
    }
}

fn declared_divergence<F: Fn(f64) -> f64>(task: &NormTask<'_, F>, at_hi: bool) -> NormError {
    let (a, b) = (task.interval.lo, task.interval.hi);
    let g = &task.integrand;
    let p = task.p;
    let f = |x: f64| pow_abs(g(x), p);
    let end = if at_hi { b } else { a };
    let span = (b - a) * 0.5;
    let mut incs = Vec::with_capacity(40);
    let mut acc = 0.0;
    for j in 0..40 {
        let w_out = span * 0.5f64.powi(j);
        let w_in = 0.5 * w_out;
        let (lo, hi) = if at_hi {
            (end - w_out, end - w_in)
        } else {
            (end + w_in, end + w_out)
        };
        if !(hi > lo) {
            break;
        }
        let inc = quad::gl16(&f, lo, hi).max(0.0);
        incs.push(inc);
        acc += inc;
    }
    NormError::Divergent {
        partial: acc.powf(1.0 / p),
        trace: GrowthTrace {
            increments: incs,
            endpoint: end,
        },
    }
}

#[inline]
fn pow_abs(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 0.5 {
        a.sqrt()
    } else {
        a.powf(p)
    }
}

/// `‖g‖_{L_∞(I)}`: maximum of `|g|` over a Chebyshev-distributed grid
/// (augmented with the registered breakpoints), then three rounds of
/// golden-section refinement around the five best samples. Monotone
/// nondecreasing under grid refinement.
pub fn sup_norm<F: Fn(f64) -> f64>(task: &NormTask<'_, F>) -> f64 {
    if task.interval.empty {
        return 0.0;
    }
    let (a, b) = (task.interval.lo, task.interval.hi);
    let g = &task.integrand;
    let m = task.grid.max(9);
    let c = 0.5 * (a + b);
    let s = 0.5 * (b - a);
    let mut xs: Vec<f64> = (0..m)
        .map(|j| c + s * (core::f64::consts::PI * j as f64 / (m - 1) as f64).cos())
        .collect();
    for &bp in task.breakpoints {
        if bp > a && bp < b {
            xs.push(bp);
            // A kink's one-sided maxima sit next to the breakpoint.
            let eps = 1e-9 * (b - a);
            xs.push((bp - eps).max(a));
            xs.push((bp + eps).min(b));
        }
    }
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let v = g(x).abs();
            if v.is_nan() {
                0.0
            } else {
                v
            }
        })
        .collect();
    let mut best = 0.0f64;
    // Indices of the top 5 samples.
    let mut top: Vec<usize> = (0..xs.len()).collect();
    top.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    top.truncate(5);
    for &i in &top {
        best = best.max(vals[i]);
        let lo = if i == 0 { xs[0] } else { xs[i - 1] };
        let hi = if i + 1 == xs.len() { xs[i] } else { xs[i + 1] };
        best = best.max(golden_max(&|x| g(x).abs(), lo, hi, 3 * 12));
    }
    best
}

/// Golden-section maximisation of a unimodal-ish function; returns the best
/// value seen (never less than the bracket samples).
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let nn = |v: f64| if v.is_nan() { 0.0 } else { v };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = nn(f(x1));
    let mut f2 = nn(f(x2));
    let mut best = nn(f(a)).max(nn(f(b))).max(f1).max(f2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = nn(f(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = nn(f(x1));
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// The quasi-triangle constant `C_p = max{1, 2^{1/p-1}}`.
pub fn quasinorm_constant(p: f64) -> f64 {
    if p.is_finite() && p < 1.0 {
        2f64.powf(1.0 / p - 1.0)
    } else {
        1.0
    }
}

/// Error-budget bookkeeping for `‖Σ f_i‖_p ≤ C_p Σ ‖f_i‖_p` (two-term bound
/// applied associatively; exact for `p ≥ 1`).
pub fn quasinorm_combine(values: &[f64], p: f64) -> f64 {
    quasinorm_constant(p) * values.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{fpow, jacobi_weight_raw, phi};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn constant_l2_norm() {
        let task = NormTask::new(|_| 1.0, Interval::FULL, 2.0);
        let (v, _) = lp_norm(&task).unwrap();
        assert!(close(v, 2f64.sqrt(), 1e-12));
    }

    #[test]
    fn weighted_norm_closed_form() {
        // ‖w_{-1/4,0}‖_2 = (∫ (1-x)^{-1/2} dx)^{1/2} = 2^{3/4}.
        let task = NormTask::new(
            |x| jacobi_weight_raw(x, -0.25, 0.0),
            Interval::FULL,
            2.0,
        )
        .with_tol(1e-10)
        .with_endpoint_exponents((0.0, -0.25));
        let (v, _) = lp_norm(&task).unwrap();
        assert!(close(v, 2f64.powf(0.75), 1e-6), "v = {v}");
    }

    #[test]
    fn gauss_consistency_for_polynomials() {
        // p = 2 with polynomial integrands is exact to 1e-12.
        let g = |x: f64| 0.5 - x + 2.0 * x * x * x;
        let task = NormTask::new(g, Interval::FULL, 2.0).with_tol(1e-12);
        let (v, _) = lp_norm(&task).unwrap();
        // ∫ g² over [-1,1] via exact monomial moments.
        // g² = 0.25 - x + x² + 2x³ - 4x⁴ + 4x⁶.
        let exact = (0.25 * 2.0) + (2.0 / 3.0) - (4.0 * 2.0 / 5.0) + (4.0 * 2.0 / 7.0);
        assert!(close(v, exact.sqrt(), 1e-12));
    }

    #[test]
    fn divergent_window_integral() {
        // (x+1-ε)^{-1} on [-1+ε, -1+2ε], p = 1: log divergence at the left
        // edge of the window.
        let eps = 1e-2;
        let g = |x: f64| {
            if x >= -1.0 + eps && x <= -1.0 + 2.0 * eps {
                1.0 / (x + 1.0 - eps)
            } else {
                0.0
            }
        };
        let task = NormTask::new(g, Interval::new(-1.0 + eps, -1.0 + 2.0 * eps), 1.0);
        let err = lp_norm(&task).unwrap_err();
        let trace = err.trace().expect("divergence trace");
        assert!(trace.loglog_slope(20) > 0.9);
    }

    #[test]
    fn declared_divergence_short_circuits() {
        let task = NormTask::new(|x: f64| fpow(1.0 + x, -1.0), Interval::FULL, 1.0)
            .with_endpoint_exponents((-1.0, 0.0));
        assert!(matches!(
            lp_norm(&task),
            Err(NormError::Divergent { .. })
        ));
    }

    #[test]
    fn monotone_in_interval() {
        let g = |x: f64| (3.0 * x).sin().abs() + 0.1;
        let inner = NormTask::new(g, Interval::new(-0.5, 0.5), 1.5).with_tol(1e-9);
        let outer = NormTask::new(g, Interval::new(-0.9, 0.9), 1.5).with_tol(1e-9);
        let (vi, _) = lp_norm(&inner).unwrap();
        let (vo, _) = lp_norm(&outer).unwrap();
        assert!(vi <= vo * (1.0 + 1e-9));
    }

    #[test]
    fn sup_norm_values() {
        let t1 = NormTask::new(|x: f64| x, Interval::FULL, f64::INFINITY);
        assert!(close(sup_norm(&t1), 1.0, 1e-12));
        let t2 = NormTask::new(phi, Interval::FULL, f64::INFINITY);
        assert!(close(sup_norm(&t2), 1.0, 1e-12));
        // w_{1,1} peaks at x = 0 with value 1.
        let t3 = NormTask::new(
            |x| jacobi_weight_raw(x, 1.0, 1.0),
            Interval::FULL,
            f64::INFINITY,
        );
        assert!(close(sup_norm(&t3), 1.0, 1e-9));
    }

    #[test]
    fn sup_norm_monotone_under_refinement() {
        let g = |x: f64| ((20.0 * x).sin() * (1.0 - x * x)).abs();
        let coarse = sup_norm(&NormTask::new(g, Interval::FULL, f64::INFINITY).with_grid(65));
        let fine = sup_norm(&NormTask::new(g, Interval::FULL, f64::INFINITY).with_grid(4097));
        assert!(fine >= coarse - 1e-15);
    }

    #[test]
    fn quasinorm_constants() {
        assert_eq!(quasinorm_constant(2.0), 1.0);
        assert_eq!(quasinorm_constant(1.0), 1.0);
        assert!(close(quasinorm_constant(0.5), 2.0, 1e-15));
        assert_eq!(quasinorm_constant(f64::INFINITY), 1.0);
        assert!(close(quasinorm_combine(&[1.0, 2.0], 0.5), 6.0, 1e-15));
    }
}

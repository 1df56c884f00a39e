//! Catalog of test functions with exact derivative evaluation.
//!
//! A [`FunctionSpec`] is a serializable description (`{kind, params,
//! max_deriv}` in JSON); [`Function`] is its compiled form with precomputed
//! derivative/antiderivative towers, breakpoint lists and endpoint decay
//! hints. Specs are immutable after construction and evaluation is pure.
//!
//! Kinds whose definition starts at derivative order `r` (the window/bump
//! trains, `weight_reciprocal`, `osc_endpoint`) evaluate lower orders through
//! the declared antiderivative rule `f^{(j)}(0) = 0`, `j < r` — exactly for
//! the piecewise closed-form kinds, numerically (cached cumulative
//! quadrature) for the rest.

mod piecewise;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::norms::{lp_norm, sup_norm, NormError, NormTask};
use crate::quad;
use crate::weights::{fpow, jacobi_weight_raw, phi, Interval};
use crate::ChebPoly;
use piecewise::{Piece, PiecewiseFn, Term};

#[derive(Clone, Debug, PartialEq)]
pub enum SpecError {
    DerivativeUnavailable { order: u32, max_deriv: u32 },
    SingularPoint { x: f64 },
    OutsideInterval { x: f64 },
    InvalidParams { reason: String },
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::DerivativeUnavailable { order, max_deriv } => write!(
                f,
                "derivative unavailable: order {order} exceeds max_deriv {max_deriv}"
            ),
            SpecError::SingularPoint { x } => write!(f, "singular point: x = {x}"),
            SpecError::OutsideInterval { x } => write!(f, "x = {x} outside (-1, 1)"),
            SpecError::InvalidParams { reason } => write!(f, "invalid parameters: {reason}"),
        }
    }
}

impl core::error::Error for SpecError {}

/// Parameters of the singular-window-train construction: the order-`r`
/// derivative equals `(x+1-ε_n)^{-r/2-β-1/p}` on windows `[-1+ε_n,
/// -1+ε_n(1+2^{-n})]` accumulating at `-1`, and 0 elsewhere. The sequence
/// `ε_n = ε₀ (k+3)^{-n}` satisfies `(2+k) ε_n < ε_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowTrainParams {
    pub k: u32,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub eps0: f64,
    pub n_max: u32,
}

impl WindowTrainParams {
    /// Default admissible instance: `ε₀ = 1/(4k)`, 40 windows.
    pub fn new(k: u32, r: u32, alpha: f64, beta: f64, p: f64) -> Self {
        WindowTrainParams {
            k,
            r,
            alpha,
            beta,
            p,
            eps0: 1.0 / (4.0 * k as f64),
            n_max: 40,
        }
    }

    pub fn eps(&self, n: u32) -> f64 {
        self.eps0 * (self.k as f64 + 3.0).powi(-(n as i32))
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let reason = |s: &str| SpecError::InvalidParams {
            reason: String::from(s),
        };
        if self.k < 1 || self.n_max < 1 {
            return Err(reason("k >= 1 and n_max >= 1 required"));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(reason("0 < p < inf required"));
        }
        let rb = self.r as f64 / 2.0 + self.beta;
        if !(rb < 0.0) {
            return Err(reason("r/2 + beta < 0 violated"));
        }
        if self.p < 1.0 && self.r >= 1 && !(rb < 1.0 - 1.0 / self.p) {
            return Err(reason("r/2 + beta < 1 - 1/p violated (0<p<1, r>=1)"));
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0 / (2.0 * self.k as f64)) {
            return Err(reason("eps0 < 1/(2k) violated"));
        }
        Ok(())
    }

    /// Windows below this scale sit beneath quadrature resolution (their
    /// representable mass is zero) and are dropped from the compiled train.
    pub const EPS_FLOOR: f64 = 1e-9;

    /// The windows that survive the resolution floor, as `(n, ε_n, lo, hi)`.
    pub fn effective_windows(&self) -> Vec<(u32, f64, f64, f64)> {
        let mut out = Vec::new();
        for n in 1..=self.n_max {
            let eps = self.eps(n);
            if eps < Self::EPS_FLOOR {
                break;
            }
            let lo = -1.0 + eps;
            let hi = -1.0 + eps * (1.0 + 0.5f64.powi(n as i32));
            if !(hi > lo) {
                break;
            }
            out.push((n, eps, lo, hi));
        }
        out
    }

    /// Probe sequence: `x_n = -1 + (k/2) ε_n`, `h_n = ε_n / φ(x_n)`,
    /// `I_{k,n} = [x_n, x_n + ε_n]`, for the effective windows.
    pub fn probes(&self) -> Vec<TrainProbe> {
        self.effective_windows()
            .into_iter()
            .map(|(n, eps, _, _)| {
                let x = -1.0 + 0.5 * self.k as f64 * eps;
                let h = eps / phi(x);
                TrainProbe { n, eps, x, h }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrainProbe {
    pub n: u32,
    pub eps: f64,
    /// Left endpoint of the probe interval `I_{k,n}` (and of the stencil
    /// domain at step `h`).
    pub x: f64,
    /// Step for which the weighted difference norm diverges.
    pub h: f64,
}

impl TrainProbe {
    pub fn interval(&self) -> Interval {
        Interval::new(self.x, self.x + self.eps)
    }
}

/// Parameters of the trapezoid bump train: the order-`r` derivative is
/// `Σ g_n` with `g_n` a trapezoid of height `H_n = n^{r/2+β+1/p}` on the
/// window `1/(n+1) < x+1 ≤ 1/n`, ramp width `ε_n = c₀ n^{-2/(1-p)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpTrainParams {
    pub r: u32,
    pub beta: f64,
    pub p: f64,
    pub c0: f64,
    pub n_max: u32,
}

impl BumpTrainParams {
    pub fn new(r: u32, beta: f64, p: f64) -> Self {
        BumpTrainParams {
            r,
            beta,
            p,
            c0: 1e-6,
            n_max: 2000,
        }
    }

    pub fn eps(&self, n: u32) -> f64 {
        self.c0 * (n as f64).powf(-2.0 / (1.0 - self.p))
    }

    pub fn height(&self, n: u32) -> f64 {
        (n as f64).powf(self.r as f64 / 2.0 + self.beta + 1.0 / self.p)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let reason = |s: &str| SpecError::InvalidParams {
            reason: String::from(s),
        };
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(reason("0 < p < 1 required"));
        }
        if !(self.c0 > 0.0) {
            return Err(reason("c0 > 0 required"));
        }
        // 4 ε_n n(n+1) < 1; the left side is maximal at n = 1.
        if !(4.0 * self.eps(1) * 2.0 < 1.0) {
            return Err(reason("4 eps_n n(n+1) < 1 violated at n = 1"));
        }
        if self.n_max < 1 {
            return Err(reason("n_max >= 1 required"));
        }
        Ok(())
    }
}

/// Serializable description of a catalog function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SpecKind {
    ChebPolynomial { coefficients: Vec<f64> },
    Exp,
    SinScaled { freq: f64 },
    Runge { c: f64 },
    AbsPower { gamma: f64, shift: f64 },
    EndpointPower { side: i8, gamma: f64 },
    /// `f^{(r)} = w_{α,β}^{-1} φ^{-r}`.
    WeightReciprocal { r: u32, alpha: f64, beta: f64 },
    /// `f^{(r)}(x) = sin(1/(1+x))`: bounded, smooth inside, no limit at -1.
    OscEndpoint { r: u32 },
    /// `f = (x+1-ε)^{exponent}` on `[-1+ε, -1+2ε]`, 0 elsewhere.
    SingularWindow { eps: f64, exponent: f64 },
    WindowTrain(WindowTrainParams),
    BumpTrain(BumpTrainParams),
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub kind: SpecKind,
    pub max_deriv: u32,
}

impl FunctionSpec {
    pub fn exp() -> Self {
        FunctionSpec {
            kind: SpecKind::Exp,
            max_deriv: 16,
        }
    }

    pub fn sin_scaled(freq: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::SinScaled { freq },
            max_deriv: 16,
        }
    }

    pub fn runge(c: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::Runge { c },
            max_deriv: 16,
        }
    }

    pub fn cheb(coefficients: Vec<f64>) -> Self {
        FunctionSpec {
            kind: SpecKind::ChebPolynomial { coefficients },
            max_deriv: 16,
        }
    }

    /// `x^d` in Chebyshev form.
    pub fn monomial(d: u32) -> Self {
        let p = ChebPoly::fit(|x| x.powi(d as i32), d as usize + 1, Interval::FULL);
        Self::cheb(p.coefficients)
    }

    pub fn abs_power(gamma: f64, shift: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::AbsPower { gamma, shift },
            max_deriv: 16,
        }
    }

    pub fn endpoint_power(side: i8, gamma: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::EndpointPower { side, gamma },
            max_deriv: 16,
        }
    }

    pub fn weight_reciprocal(r: u32, alpha: f64, beta: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::WeightReciprocal { r, alpha, beta },
            max_deriv: r + 6,
        }
    }

    pub fn osc_endpoint(r: u32) -> Self {
        FunctionSpec {
            kind: SpecKind::OscEndpoint { r },
            max_deriv: r,
        }
    }

    pub fn singular_window(eps: f64, exponent: f64) -> Self {
        FunctionSpec {
            kind: SpecKind::SingularWindow { eps, exponent },
            max_deriv: 1,
        }
    }

    pub fn window_train(params: WindowTrainParams) -> Result<Self, SpecError> {
        params.validate()?;
        Ok(FunctionSpec {
            kind: SpecKind::WindowTrain(params),
            max_deriv: params.r,
        })
    }

    pub fn bump_train(params: BumpTrainParams) -> Result<Self, SpecError> {
        params.validate()?;
        Ok(FunctionSpec {
            kind: SpecKind::BumpTrain(params),
            max_deriv: params.r + 1,
        })
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, SpecError> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(SpecError::InvalidParams {
                reason: String::from("piecewise_linear needs matching breakpoints/values, >= 2"),
            });
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(SpecError::InvalidParams {
                reason: String::from("breakpoints must be strictly increasing"),
            });
        }
        Ok(FunctionSpec {
            kind: SpecKind::PiecewiseLinear {
                breakpoints,
                values,
            },
            max_deriv: 2,
        })
    }

    pub fn compile(&self) -> Result<Function, SpecError> {
        Function::compile(self)
    }
}

// ---------------------------------------------------------------------------
// Compiled form
// ---------------------------------------------------------------------------

struct TowerLevel {
    xs: Vec<f64>,
    prefix: Vec<f64>,
}

impl TowerLevel {
    fn build(f: &dyn Fn(f64) -> f64) -> TowerLevel {
        let m = 2049usize;
        let mid = (m - 1) / 2;
        let mut xs: Vec<f64> = (0..m)
            .map(|j| -(core::f64::consts::PI * j as f64 / (m - 1) as f64).cos())
            .collect();
        xs[mid] = 0.0;
        let mut prefix = vec![0.0; m];
        for i in mid..m - 1 {
            prefix[i + 1] = prefix[i] + quad::gl16(&f, xs[i], xs[i + 1]);
        }
        for i in (0..mid).rev() {
            prefix[i] = prefix[i + 1] - quad::gl16(&f, xs[i], xs[i + 1]);
        }
        TowerLevel { xs, prefix }
    }

    fn query(&self, f_above: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let m = self.xs.len();
        let x = x.clamp(self.xs[0], self.xs[m - 1]);
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.prefix[i],
            Err(i) => i.saturating_sub(1).min(m - 2),
        };
        self.prefix[i] + quad::gl16(&f_above, self.xs[i], x)
    }
}

enum Imp {
    Cheb { derivs: Vec<ChebPoly> },
    Exp,
    Sin { freq: f64 },
    Runge { c: f64 },
    AbsPower { gamma: f64, shift: f64 },
    EndPow { side: i8, gamma: f64 },
    /// `f^{(r+j)}` as sums of `coef (1-x)^a (1+x)^b`; lower orders numeric.
    JacobiPow {
        r: u32,
        ders: Vec<Vec<(f64, f64, f64)>>,
        tower: Vec<TowerLevel>,
    },
    Osc { r: u32, tower: Vec<TowerLevel> },
    /// Exact per-order piecewise closed forms, `by_order[j] = f^{(j)}`.
    Piecewise { by_order: Vec<PiecewiseFn> },
}

/// A compiled, immutable catalog function.
pub struct Function {
    spec: FunctionSpec,
    imp: Imp,
    breakpoints: Vec<f64>,
    singular: Vec<f64>,
    max_deriv: u32,
}

impl Function {
    pub fn compile(spec: &FunctionSpec) -> Result<Function, SpecError> {
        let max_deriv = spec.max_deriv;
        let (imp, breakpoints, singular) = match &spec.kind {
            SpecKind::ChebPolynomial { coefficients } => {
                let mut derivs = vec![ChebPoly::new(coefficients.clone(), Interval::FULL)];
                for j in 0..max_deriv as usize {
                    let d = derivs[j].derivative();
                    derivs.push(d);
                }
                (Imp::Cheb { derivs }, vec![], vec![])
            }
            SpecKind::Exp => (Imp::Exp, vec![], vec![]),
            SpecKind::SinScaled { freq } => (Imp::Sin { freq: *freq }, vec![], vec![]),
            SpecKind::Runge { c } => (Imp::Runge { c: *c }, vec![], vec![]),
            SpecKind::AbsPower { gamma, shift } => {
                if !(-1.0 < *shift && *shift < 1.0) {
                    return Err(SpecError::InvalidParams {
                        reason: String::from("abs_power shift must lie in (-1, 1)"),
                    });
                }
                (
                    Imp::AbsPower {
                        gamma: *gamma,
                        shift: *shift,
                    },
                    vec![*shift],
                    vec![*shift],
                )
            }
            SpecKind::EndpointPower { side, gamma } => {
                if *side != 1 && *side != -1 {
                    return Err(SpecError::InvalidParams {
                        reason: String::from("endpoint_power side must be +1 or -1"),
                    });
                }
                (
                    Imp::EndPow {
                        side: *side,
                        gamma: *gamma,
                    },
                    vec![],
                    vec![],
                )
            }
            SpecKind::WeightReciprocal { r, alpha, beta } => {
                let a0 = -(alpha + *r as f64 / 2.0);
                let b0 = -(beta + *r as f64 / 2.0);
                let ders = jacobi_term_chain(a0, b0, max_deriv.saturating_sub(*r));
                let top = {
                    let terms = ders[0].clone();
                    move |x: f64| eval_jacobi_terms(&terms, x)
                };
                let tower = build_tower(*r, &top);
                (
                    Imp::JacobiPow {
                        r: *r,
                        ders,
                        tower,
                    },
                    vec![],
                    vec![],
                )
            }
            SpecKind::OscEndpoint { r } => {
                let top = |x: f64| (1.0 / (1.0 + x)).sin();
                let tower = build_tower(*r, &top);
                (Imp::Osc { r: *r, tower }, vec![], vec![])
            }
            SpecKind::SingularWindow { eps, exponent } => {
                if !(*eps > 0.0 && 2.0 * *eps < 2.0) {
                    return Err(SpecError::InvalidParams {
                        reason: String::from("singular_window needs 0 < eps < 1"),
                    });
                }
                let lo = -1.0 + *eps;
                let hi = -1.0 + 2.0 * *eps;
                let base = PiecewiseFn::new(
                    vec![lo, hi],
                    vec![Piece {
                        terms: vec![Term::pow(1.0, lo, *exponent)],
                    }],
                );
                let by_order = piecewise_orders(base, 0, max_deriv)?;
                let sing = if *exponent < 0.0 { vec![lo] } else { vec![] };
                (Imp::Piecewise { by_order }, vec![lo, hi], sing)
            }
            SpecKind::WindowTrain(params) => {
                params.validate()?;
                let (base, breaks, sing) = window_train_base(params);
                let by_order = piecewise_orders(base, params.r, max_deriv)?;
                (Imp::Piecewise { by_order }, breaks, sing)
            }
            SpecKind::BumpTrain(params) => {
                params.validate()?;
                let (base, breaks) = bump_train_base(params);
                let by_order = piecewise_orders(base, params.r, max_deriv)?;
                (Imp::Piecewise { by_order }, breaks, vec![])
            }
            SpecKind::PiecewiseLinear {
                breakpoints,
                values,
            } => {
                if breakpoints.len() < 2 || breakpoints.len() != values.len() {
                    return Err(SpecError::InvalidParams {
                        reason: String::from("piecewise_linear breakpoints/values mismatch"),
                    });
                }
                let mut pieces = Vec::with_capacity(breakpoints.len() - 1);
                for i in 0..breakpoints.len() - 1 {
                    let slope =
                        (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
                    pieces.push(Piece {
                        terms: vec![
                            Term::pow(values[i], breakpoints[i], 0.0),
                            Term::pow(slope, breakpoints[i], 1.0),
                        ],
                    });
                }
                let base = PiecewiseFn::new(breakpoints.clone(), pieces);
                let by_order = piecewise_orders(base, 0, max_deriv)?;
                let interior: Vec<f64> = breakpoints
                    .iter()
                    .copied()
                    .filter(|x| x.abs() < 1.0)
                    .collect();
                (Imp::Piecewise { by_order }, interior, vec![])
            }
        };
        Ok(Function {
            spec: spec.clone(),
            imp,
            breakpoints,
            singular,
            max_deriv,
        })
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn max_deriv(&self) -> u32 {
        self.max_deriv
    }

    /// Interior breakpoints (kinks / window edges) of the function and its
    /// derivatives.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Breakpoints at which some derivative is unbounded.
    pub fn singular_points(&self) -> &[f64] {
        &self.singular
    }

    /// Steps at which φ-step symmetric difference norms can degenerate
    /// (scanned in addition to log-spaced h grids): the window-train probe
    /// sequence `h_n = ε_n/φ(x_n)`.
    pub fn phi_probe_steps(&self) -> Vec<f64> {
        match &self.spec.kind {
            SpecKind::WindowTrain(params) => params.probes().iter().map(|p| p.h).collect(),
            _ => Vec::new(),
        }
    }

    /// Steps at which plain-step (forward/backward) difference norms can
    /// degenerate: stencil points hitting the singular window edge exactly.
    pub fn plain_probe_steps(&self, k: u32) -> Vec<f64> {
        match &self.spec.kind {
            SpecKind::SingularWindow { eps, .. } => {
                (1..=k).map(|i| eps / i as f64).collect()
            }
            SpecKind::WindowTrain(params) => {
                let mut out = Vec::new();
                for probe in params.probes() {
                    for i in 1..=k {
                        out.push(probe.eps / i as f64);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Algebraic decay exponents of `f^{(order)}` at `(-1, +1)`: `f^{(order)}
    /// ~ (1+x)^{γ₋}` near `-1` and `~ (1-x)^{γ₊}` near `+1` (0 when bounded
    /// with nonzero limit, or unknown).
    pub fn endpoint_decay(&self, order: u32) -> (f64, f64) {
        match &self.imp {
            Imp::EndPow { side, gamma } => {
                let g = gamma - order as f64;
                if *side > 0 {
                    (0.0, g)
                } else {
                    (g, 0.0)
                }
            }
            Imp::JacobiPow { r, ders, .. } if order >= *r => {
                let j = (order - r) as usize;
                let a = ders[j]
                    .iter()
                    .map(|t| t.1)
                    .fold(f64::INFINITY, f64::min);
                let b = ders[j]
                    .iter()
                    .map(|t| t.2)
                    .fold(f64::INFINITY, f64::min);
                (b, a)
            }
            _ => (0.0, 0.0),
        }
    }

    /// Exact derivative value. Errors on orders above `max_deriv`, points
    /// outside `(-1, 1)` (endpoints allowed when the value is finite), and
    /// exact hits of a singular point.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64, SpecError> {
        if order > self.max_deriv {
            return Err(SpecError::DerivativeUnavailable {
                order,
                max_deriv: self.max_deriv,
            });
        }
        if !(-1.0..=1.0).contains(&x) {
            return Err(SpecError::OutsideInterval { x });
        }
        let v = self.eval_raw(x, order);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SpecError::SingularPoint { x })
        }
    }

    /// Unchecked evaluation; may return `±inf`/NaN at singular points.
    #[inline]
    pub fn eval_raw(&self, x: f64, order: u32) -> f64 {
        match &self.imp {
            Imp::Cheb { derivs } => derivs[(order as usize).min(derivs.len() - 1)].eval(x),
            Imp::Exp => x.exp(),
            Imp::Sin { freq } => {
                let a = freq.powi(order as i32);
                let u = freq * x;
                a * match order % 4 {
                    0 => u.sin(),
                    1 => u.cos(),
                    2 => -u.sin(),
                    _ => -u.cos(),
                }
            }
            Imp::Runge { c } => runge_deriv(*c, order, x),
            Imp::AbsPower { gamma, shift } => {
                let d = x - shift;
                let coef = falling(*gamma, order);
                let sgn = if d < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
                coef * sgn * fpow(d.abs(), gamma - order as f64)
            }
            Imp::EndPow { side, gamma } => {
                let coef = falling(*gamma, order);
                if *side > 0 {
                    let s = if order % 2 == 1 { -1.0 } else { 1.0 };
                    coef * s * fpow(1.0 - x, gamma - order as f64)
                } else {
                    coef * fpow(1.0 + x, gamma - order as f64)
                }
            }
            Imp::JacobiPow { r, ders, tower } => {
                if order >= *r {
                    eval_jacobi_terms(&ders[(order - r) as usize], x)
                } else {
                    let top = {
                        let terms = &ders[0];
                        move |u: f64| eval_jacobi_terms(terms, u)
                    };
                    tower_eval(tower, &top, *r, order, x)
                }
            }
            Imp::Osc { r, tower } => {
                if order == *r {
                    (1.0 / (1.0 + x)).sin()
                } else {
                    let top = |u: f64| (1.0 / (1.0 + u)).sin();
                    tower_eval(tower, &top, *r, order, x)
                }
            }
            Imp::Piecewise { by_order } => by_order[order as usize].eval(x),
        }
    }
}

fn falling(gamma: f64, order: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..order {
        c *= gamma - i as f64;
    }
    c
}

fn runge_deriv(c: f64, order: u32, x: f64) -> f64 {
    // d^j/dx^j 1/(1+c²x²) = j! c^j (1+c²x²)^{-(j+1)/2} cos(jπ/2 + (j+1) atan(cx)).
    let j = order as i32;
    let mut fact = 1.0;
    for i in 2..=order {
        fact *= i as f64;
    }
    let rho2 = 1.0 + c * c * x * x;
    let rho = rho2.sqrt();
    let theta = (c * x).atan();
    fact * c.powi(j) * rho.powi(-(j + 1))
        * (0.5 * core::f64::consts::PI * j as f64 + (j + 1) as f64 * theta).cos()
}

fn eval_jacobi_terms(terms: &[(f64, f64, f64)], x: f64) -> f64 {
    terms
        .iter()
        .map(|&(c, a, b)| c * fpow(1.0 - x, a) * fpow(1.0 + x, b))
        .sum()
}

fn jacobi_term_chain(a0: f64, b0: f64, orders: u32) -> Vec<Vec<(f64, f64, f64)>> {
    let mut out = vec![vec![(1.0, a0, b0)]];
    for _ in 0..orders {
        let prev = out.last().unwrap();
        let mut next: Vec<(f64, f64, f64)> = Vec::new();
        let mut push = |t: (f64, f64, f64)| {
            for e in next.iter_mut() {
                if e.1 == t.1 && e.2 == t.2 {
                    e.0 += t.0;
                    return;
                }
            }
            next.push(t);
        };
        for &(c, a, b) in prev {
            if a != 0.0 {
                push((-c * a, a - 1.0, b));
            }
            if b != 0.0 {
                push((c * b, a, b - 1.0));
            }
        }
        out.push(next);
    }
    out
}

fn build_tower(r: u32, top: &dyn Fn(f64) -> f64) -> Vec<TowerLevel> {
    let mut levels: Vec<TowerLevel> = Vec::new();
    for i in 0..r {
        // Level i evaluates order r-1-i; its integrand is order r-i.
        let above_order = r - i;
        let f = |x: f64| tower_eval_partial(&levels, top, r, above_order, x);
        let level = TowerLevel::build(&f);
        levels.push(level);
    }
    levels
}

fn tower_eval_partial(levels: &[TowerLevel], top: &dyn Fn(f64) -> f64, r: u32, order: u32, x: f64) -> f64 {
    if order >= r {
        return top(x);
    }
    let idx = (r - 1 - order) as usize;
    let above = |u: f64| tower_eval_partial(levels, top, r, order + 1, u);
    levels[idx].query(&above, x)
}

fn tower_eval(levels: &[TowerLevel], top: &dyn Fn(f64) -> f64, r: u32, order: u32, x: f64) -> f64 {
    tower_eval_partial(levels, top, r, order, x)
}

fn piecewise_orders(base: PiecewiseFn, base_order: u32, max_deriv: u32) -> Result<Vec<PiecewiseFn>, SpecError> {
    // by_order[j] = f^{(j)}; base sits at index base_order.
    let mut down: Vec<PiecewiseFn> = Vec::new(); // orders base_order-1 .. 0
    let mut cur = base.clone();
    for _ in 0..base_order {
        cur = cur
            .antiderivative(0.0)
            .map_err(|e| SpecError::InvalidParams {
                reason: String::from(e),
            })?;
        down.push(cur.clone());
    }
    let mut by_order: Vec<PiecewiseFn> = down.into_iter().rev().collect();
    by_order.push(base);
    let mut up = by_order.last().unwrap().clone();
    for _ in base_order..max_deriv {
        up = up.derivative();
        by_order.push(up.clone());
    }
    Ok(by_order)
}

fn window_train_base(params: &WindowTrainParams) -> (PiecewiseFn, Vec<f64>, Vec<f64>) {
    let q = -(params.r as f64) / 2.0 - params.beta - 1.0 / params.p;
    let mut windows: Vec<(f64, f64)> = params
        .effective_windows()
        .into_iter()
        .map(|(_, _, lo, hi)| (lo, hi))
        .collect();
    windows.reverse(); // ascending in x
    let mut breaks: Vec<f64> = Vec::new();
    let mut pieces: Vec<Piece> = Vec::new();
    let mut singular: Vec<f64> = Vec::new();
    for &(lo, hi) in &windows {
        if let Some(&last) = breaks.last() {
            if lo > last {
                pieces.push(Piece::default());
                breaks.push(lo);
            } else if lo < last {
                continue; // defensive: overlapping after rounding
            }
        } else {
            breaks.push(lo);
        }
        pieces.push(Piece {
            terms: vec![Term::pow(1.0, lo, q)],
        });
        breaks.push(hi);
        if q < 0.0 {
            singular.push(lo);
        }
    }
    let interior: Vec<f64> = breaks.clone();
    (PiecewiseFn::new(breaks, pieces), interior, singular)
}

fn bump_train_base(params: &BumpTrainParams) -> (PiecewiseFn, Vec<f64>) {
    let mut breaks: Vec<f64> = Vec::new();
    let mut pieces: Vec<Piece> = Vec::new();
    for n in (1..=params.n_max).rev() {
        let w_lo = -1.0 + 1.0 / (n as f64 + 1.0);
        let w_hi = -1.0 + 1.0 / n as f64;
        let eps = params.eps(n);
        let h = params.height(n);
        if breaks.is_empty() {
            breaks.push(w_lo);
        }
        let r_up = w_lo + eps;
        let r_dn = w_hi - eps;
        // Ramps below quadrature resolution degenerate into near-vertical
        // jumps; those windows keep the plateau only.
        if eps >= 1e-12 && r_up > w_lo && r_dn < w_hi && r_up < r_dn {
            pieces.push(Piece {
                terms: vec![Term::pow(h / eps, w_lo, 1.0)],
            });
            breaks.push(r_up);
            pieces.push(Piece {
                terms: vec![Term::pow(h, r_up, 0.0)],
            });
            breaks.push(r_dn);
            pieces.push(Piece {
                terms: vec![Term::pow(h, r_dn, 0.0), Term::pow(-h / eps, r_dn, 1.0)],
            });
            breaks.push(w_hi);
        } else {
            // Ramps below resolution: keep the plateau only.
            pieces.push(Piece {
                terms: vec![Term::pow(h, w_lo, 0.0)],
            });
            breaks.push(w_hi);
        }
    }
    let interior: Vec<f64> = breaks.clone();
    (PiecewiseFn::new(breaks, pieces), interior)
}

/// `‖w_{α,β} φ^r f^{(r)}‖_p`; a divergent result signals `f ∉ B^r_p(w_{α,β})`
/// and carries the partial value and growth trace.
pub fn weighted_seminorm(
    f: &Function,
    r: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    tol: f64,
) -> Result<(f64, f64), NormError> {
    assert!(r <= f.max_deriv(), "seminorm order above max_deriv");
    let g = |x: f64| {
        jacobi_weight_raw(x, alpha, beta) * phi_pow(x, r) * f.eval_raw(x, r)
    };
    if p.is_infinite() {
        let task = NormTask::new(g, Interval::FULL, p).with_breakpoints(f.breakpoints());
        return Ok((sup_norm(&task), 0.0));
    }
    let (dm, dp) = f.endpoint_decay(r);
    let rr = r as f64 / 2.0;
    let task = NormTask::new(g, Interval::FULL, p)
        .with_tol(tol)
        .with_breakpoints(f.breakpoints())
        .with_endpoint_exponents((beta + rr + dm, alpha + rr + dp));
    lp_norm(&task)
}

#[inline]
pub(crate) fn phi_pow(x: f64, r: u32) -> f64 {
    match r {
        0 => 1.0,
        1 => phi(x),
        2 => (1.0 - x) * (1.0 + x),
        _ => {
            let p2 = (1.0 - x) * (1.0 + x);
            let mut acc = 1.0;
            for _ in 0..r / 2 {
                acc *= p2;
            }
            if r % 2 == 1 {
                acc *= phi(x);
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests;

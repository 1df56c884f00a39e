//! Jacobi weights, the factor `φ`, shifted stencil weights, and stencil
//! domains.
//!
//! Conventions used throughout the crate:
//!
//! * `w_{α,β}(x) = (1-x)^α (1+x)^β` on `(-1, 1)`;
//! * `φ(x) = √(1-x²)`;
//! * the shifted weight evaluates the two factors of `w` at the outermost
//!   points of a symmetric stencil of span `δ φ(x)`:
//!   `ŵ_δ^{ξ,ζ}(x) = (1-x-δφ(x)/2)^ξ (1+x-δφ(x)/2)^ζ`, so `ŵ_0^{α,β} = w_{α,β}`
//!   and `ŵ_0^{1/2,1/2} = φ`;
//! * `domain(δ)` is the closed set of `x` where the full stencil of span
//!   `δ φ(x)` stays inside `[-1, 1]`: `[-1+δ̄, 1-δ̄]` with `δ̄ = 2δ²/(4+δ²)`,
//!   empty for `δ > 2`.

use core::fmt;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Power with a fast path for the exponents that dominate the workloads here
/// (0, ±1/2, ±1/4, small integers). `fpow(0, 0) = 1` so that `w_{0,0} ≡ 1`
/// holds including at the endpoints.
#[inline]
pub fn fpow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        x.sqrt()
    } else if e == -0.5 {
        1.0 / x.sqrt()
    } else if e == 0.25 {
        x.sqrt().sqrt()
    } else if e == 0.75 {
        let s = x.sqrt();
        s * s.sqrt()
    } else if e == 1.5 {
        x * x.sqrt()
    } else if e == -1.0 {
        1.0 / x
    } else {
        x.powf(e)
    }
}

/// `φ(x) = √(1-x²)`, clamped so that rounding just outside `[-1,1]` yields 0.
#[inline]
pub fn phi(x: f64) -> f64 {
    let s = (1.0 - x) * (1.0 + x);
    if s <= 0.0 {
        0.0
    } else {
        s.sqrt()
    }
}

/// A closed subinterval of `[-1, 1]`, possibly empty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Interval {
    pub const FULL: Interval = Interval {
        lo: -1.0,
        hi: 1.0,
        empty: false,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Self::none()
        } else {
            Interval {
                lo,
                hi,
                empty: false,
            }
        }
    }

    pub fn none() -> Self {
        Interval {
            lo: f64::NAN,
            hi: f64::NAN,
            empty: true,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        !self.empty && x >= self.lo && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.empty || other.empty {
            return Interval::none();
        }
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// True if `other` is contained in `self` (every empty interval is
    /// contained in anything).
    pub fn covers(&self, other: &Interval) -> bool {
        other.empty || (!self.empty && self.lo <= other.lo && other.hi <= self.hi)
    }
}

/// Exponent pair and integrability index defining `w_{α,β}` and `L_p^{α,β}`.
///
/// `p = f64::INFINITY` encodes the sup norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, beta: f64, p: f64) -> Self {
        debug_assert!(p > 0.0);
        WeightParams { alpha, beta, p }
    }

    /// Membership of the exponents in `J_p`: `(-1/p, ∞)` for finite `p`,
    /// `[0, ∞)` for `p = ∞`.
    pub fn in_jp(&self) -> bool {
        if self.p.is_finite() {
            self.alpha > -1.0 / self.p && self.beta > -1.0 / self.p
        } else {
            self.alpha >= 0.0 && self.beta >= 0.0
        }
    }

    /// The weight value, without endpoint checks (may be `inf`).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        jacobi_weight_raw(x, self.alpha, self.beta)
    }

    /// Parameters of `w_{α,β} φ^r` (again a Jacobi weight).
    pub fn with_phi_power(&self, r: u32) -> WeightParams {
        WeightParams {
            alpha: self.alpha + r as f64 / 2.0,
            beta: self.beta + r as f64 / 2.0,
            p: self.p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightError {
    /// Endpoint evaluation with a negative exponent.
    SingularEvaluation { x: f64, exponent: f64 },
    /// Point outside the stencil domain `D_δ`.
    OutsideDomain { x: f64, delta: f64 },
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::SingularEvaluation { x, exponent } => write!(
                f,
                "singular evaluation: weight at x = {x} with negative exponent {exponent}"
            ),
            WeightError::OutsideDomain { x, delta } => {
                write!(f, "x = {x} outside domain D_delta for delta = {delta}")
            }
        }
    }
}

impl core::error::Error for WeightError {}

#[inline]
pub fn jacobi_weight_raw(x: f64, alpha: f64, beta: f64) -> f64 {
    fpow(1.0 - x, alpha) * fpow(1.0 + x, beta)
}

/// `w_{α,β}(x)` for `|x| < 1`; endpoints are allowed only when the matching
/// exponent is nonnegative.
pub fn jacobi_weight(x: f64, alpha: f64, beta: f64) -> Result<f64, WeightError> {
    if x >= 1.0 && alpha < 0.0 {
        return Err(WeightError::SingularEvaluation { x, exponent: alpha });
    }
    if x <= -1.0 && beta < 0.0 {
        return Err(WeightError::SingularEvaluation { x, exponent: beta });
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(WeightError::OutsideDomain { x, delta: 0.0 });
    }
    Ok(jacobi_weight_raw(x, alpha, beta))
}

/// `δ̄ = 2δ²/(4+δ²)`.
#[inline]
pub fn delta_bar(delta: f64) -> f64 {
    2.0 * delta * delta / (4.0 + delta * delta)
}

/// The stencil domain `D_δ = [-1+δ̄, 1-δ̄]`; empty for `δ > 2`.
pub fn domain(delta: f64) -> Interval {
    debug_assert!(delta >= 0.0);
    let db = delta_bar(delta);
    if db > 1.0 {
        Interval::none()
    } else {
        Interval::new(-1.0 + db, 1.0 - db)
    }
}

/// Shifted-weight factors `(1-x-δφ(x)/2, 1+x-δφ(x)/2)`, clamped at zero.
#[inline]
pub(crate) fn shifted_factors(x: f64, delta: f64) -> (f64, f64) {
    let s = 0.5 * delta * phi(x);
    ((1.0 - x - s).max(0.0), (1.0 + x - s).max(0.0))
}

/// `ŵ_δ^{ξ,ζ}(x)` without the domain check. On `∂D_δ` with a negative
/// exponent this is `+∞`.
#[inline]
pub fn shifted_weight_raw(x: f64, delta: f64, xi: f64, zeta: f64) -> f64 {
    let (f1, f2) = shifted_factors(x, delta);
    fpow(f1, xi) * fpow(f2, zeta)
}

/// `ŵ_δ^{ξ,ζ}(x)` for `x ∈ D_δ`. The value may be `+∞` at the endpoints of
/// `D_δ` when an exponent is negative; that is a defined value, not an error.
pub fn shifted_weight(x: f64, delta: f64, xi: f64, zeta: f64) -> Result<f64, WeightError> {
    if !domain(delta).contains(x) {
        return Err(WeightError::OutsideDomain { x, delta });
    }
    Ok(shifted_weight_raw(x, delta, xi, zeta))
}

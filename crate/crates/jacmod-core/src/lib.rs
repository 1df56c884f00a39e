#![cfg_attr(not(feature = "std"), no_std)]

//! Numerical toolkit for Jacobi-weighted smoothness analysis on `[-1, 1]`.
//!
//! The crate computes, for functions with known derivatives:
//!
//! * Jacobi weights `(1-x)^α (1+x)^β`, the factor `φ(x) = √(1-x²)`, shifted
//!   weights evaluated at difference-stencil endpoints, and the domains on
//!   which a symmetric difference stencil stays inside `[-1, 1]`
//!   ([`weights`]);
//! * weighted `L_p` norms (`0 < p ≤ ∞`) with endpoint-singularity-aware
//!   quadrature and empirical divergence detection ([`norms`]);
//! * a catalog of test functions with exact derivative evaluation, including
//!   the singular window trains used to exhibit unbounded moduli
//!   ([`funcspace`]);
//! * weighted moduli of smoothness (sup and averaged forms), weighted
//!   Ditzian–Totik moduli, and main-part/complete moduli ([`moduli`]);
//! * Chebyshev polynomial algebra, best weighted polynomial approximation for
//!   `0 < p ≤ ∞`, and K-/Realization functionals ([`approx`] and
//!   [`functionals`]).
//!
//! Everything is plain `f64`; `p = ∞` is encoded as `f64::INFINITY`. All
//! operations are pure and reentrant.

extern crate alloc;

pub mod approx;
pub mod cheb;
pub mod funcspace;
pub mod functionals;
mod linalg;
pub mod moduli;
pub mod norms;
pub mod quad;
pub mod rng;
pub mod weights;

pub use cheb::ChebPoly;
pub use funcspace::{Function, FunctionSpec};
pub use quad::GrowthTrace;
pub use weights::{Interval, WeightParams};

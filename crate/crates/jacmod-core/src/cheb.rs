//! Chebyshev-T polynomial algebra on a reference interval.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::weights::Interval;

/// Polynomial in Chebyshev coefficient form on an interval: `Σ c_j T_j(u)`,
/// `u` the affine image of `x` in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebPoly {
    pub interval: Interval,
    pub coefficients: Vec<f64>,
}

impl ChebPoly {
    pub fn new(coefficients: Vec<f64>, interval: Interval) -> Self {
        let coefficients = if coefficients.is_empty() {
            vec![0.0]
        } else {
            coefficients
        };
        ChebPoly {
            interval,
            coefficients,
        }
    }

    pub fn zero(interval: Interval) -> Self {
        ChebPoly::new(vec![0.0], interval)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    #[inline]
    fn to_unit(&self, x: f64) -> f64 {
        let (a, b) = (self.interval.lo, self.interval.hi);
        (2.0 * x - a - b) / (b - a)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.to_unit(x);
        let c = &self.coefficients;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &cj in c.iter().skip(1).rev() {
            let t = 2.0 * u * b1 - b2 + cj;
            b2 = b1;
            b1 = t;
        }
        u * b1 - b2 + c[0]
    }

    /// Exact coefficient recurrence for the derivative; the derivative of a
    /// degree-d polynomial has degree d-1 (the zero polynomial below).
    pub fn derivative(&self) -> ChebPoly {
        let c = &self.coefficients;
        let n = c.len();
        if n <= 1 {
            return ChebPoly::zero(self.interval);
        }
        let mut d = vec![0.0; n - 1];
        // d[j] relates to d[j+2]: d_{j} = d_{j+2} + 2(j+1) c_{j+1}.
        let mut prev = 0.0; // d[j+2]
        let mut prev1 = 0.0; // d[j+1]
        for j in (0..n - 1).rev() {
            let dj = prev + 2.0 * (j as f64 + 1.0) * c[j + 1];
            d[j] = dj;
            prev = prev1;
            prev1 = dj;
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.interval.hi - self.interval.lo);
        for v in d.iter_mut() {
            *v *= scale;
        }
        ChebPoly::new(d, self.interval)
    }

    pub fn derivative_n(&self, order: u32) -> ChebPoly {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p
    }

    /// Interpolation at `n` Chebyshev–Gauss nodes (exact for polynomials of
    /// degree < n).
    pub fn fit<F: Fn(f64) -> f64>(f: F, n: usize, interval: Interval) -> ChebPoly {
        let n = n.max(1);
        let (a, b) = (interval.lo, interval.hi);
        let c = 0.5 * (a + b);
        let s = 0.5 * (b - a);
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let u = (core::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos();
                f(c + s * u)
            })
            .collect();
        let mut coeffs = vec![0.0; n];
        for (j, cj) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &v) in vals.iter().enumerate() {
                acc += v
                    * (core::f64::consts::PI * j as f64 * (i as f64 + 0.5) / n as f64).cos();
            }
            *cj = 2.0 * acc / n as f64;
        }
        coeffs[0] *= 0.5;
        ChebPoly::new(coeffs, interval)
    }

    /// Basis values `T_0(u) .. T_{m-1}(u)` at a point (for design matrices).
    pub fn basis_row(&self, x: f64, m: usize, out: &mut Vec<f64>) {
        let u = self.to_unit(x);
        basis_row_unit(u, m, out);
    }
}

/// `T_0(u) .. T_{m-1}(u)` by forward recurrence.
pub fn basis_row_unit(u: f64, m: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(m);
    let mut t0 = 1.0;
    let mut t1 = u;
    for j in 0..m {
        match j {
            0 => out.push(t0),
            1 => out.push(t1),
            _ => {
                let t = 2.0 * u * t1 - t0;
                t0 = t1;
                t1 = t;
                out.push(t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn derivative_of_t1_is_one() {
        let p = ChebPoly::new(vec![0.0, 1.0], Interval::FULL);
        let d = p.derivative();
        assert_eq!(d.coefficients, vec![1.0]);
        assert!((d.eval(0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_past_degree_is_zero() {
        let p = ChebPoly::new(vec![1.0, 2.0, 3.0], Interval::FULL);
        let d = p.derivative_n(3);
        assert_eq!(d.coefficients, vec![0.0]);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut rng = SplitMix64::new(42);
        for _ in 0..5 {
            let coeffs: Vec<f64> = (0..11).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let p = ChebPoly::new(coeffs, Interval::FULL);
            let d = p.derivative();
            for _ in 0..20 {
                let x = rng.uniform(-0.9, 0.9);
                // Fourth-order five-point stencil keeps truncation and
                // rounding both below 1e-9 relative.
                let h = 1e-4;
                let fd = (p.eval(x - 2.0 * h) - 8.0 * p.eval(x - h) + 8.0 * p.eval(x + h)
                    - p.eval(x + 2.0 * h))
                    / (12.0 * h);
                assert!(
                    (d.eval(x) - fd).abs() < 1e-9 * (1.0 + fd.abs()),
                    "x={x}: {} vs {fd}",
                    d.eval(x)
                );
            }
        }
    }

    #[test]
    fn fit_is_exact_for_polynomials() {
        let f = |x: f64| 2.0 - x + 0.5 * x * x * x;
        let p = ChebPoly::fit(f, 8, Interval::FULL);
        for i in 0..50 {
            let x = -1.0 + 2.0 * i as f64 / 49.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fit_on_shifted_interval() {
        let iv = Interval::new(0.2, 0.9);
        let f = |x: f64| x * x;
        let p = ChebPoly::fit(f, 5, iv);
        assert!((p.eval(0.5) - 0.25).abs() < 1e-13);
        let d = p.derivative();
        assert!((d.eval(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let p = ChebPoly::new(vec![1.0, -0.5, 0.25], Interval::new(-0.5, 1.0));
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("coefficients"));
        let q: ChebPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(p, q);
    }
}

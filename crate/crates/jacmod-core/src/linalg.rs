//! Dense solves used by the approximation solvers. Row-major storage.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;

/// Gaussian elimination with partial pivoting; `a` is n×n row-major,
/// overwritten. Returns false on (numerical) singularity.
pub fn solve_dense(a: &mut [f64], n: usize, rhs: &mut [f64]) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(rhs.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return false;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            rhs.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let m = a[r * n + col] / d;
            if m == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= m * a[col * n + c];
            }
            rhs[r] -= m * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = rhs[col];
        for c in col + 1..n {
            v -= a[col * n + c] * rhs[c];
        }
        rhs[col] = v / a[col * n + col];
    }
    true
}

/// Least squares min ‖A x - b‖₂ by Householder QR; `a` is m×n row-major
/// (m ≥ n), both `a` and `b` are consumed. Returns the n-vector solution.
pub fn lstsq_qr(a: &mut [f64], m: usize, n: usize, b: &mut [f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), m);
    debug_assert!(m >= n);
    for col in 0..n {
        // Householder vector for column col, rows col..m.
        let mut norm = 0.0;
        for r in col..m {
            norm += a[r * n + col] * a[r * n + col];
        }
        let norm = norm.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let a0 = a[col * n + col];
        let alpha = if a0 >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - col];
        v[0] = a0 - alpha;
        for r in col + 1..m {
            v[r - col] = a[r * n + col];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv < 1e-300 {
            continue;
        }
        a[col * n + col] = alpha;
        for r in col + 1..m {
            a[r * n + col] = 0.0;
        }
        for c in col + 1..n {
            let mut dot = 0.0;
            for r in col..m {
                dot += v[r - col] * a[r * n + c];
            }
            let f = 2.0 * dot / vtv;
            for r in col..m {
                a[r * n + c] -= f * v[r - col];
            }
        }
        let mut dot = 0.0;
        for r in col..m {
            dot += v[r - col] * b[r];
        }
        let f = 2.0 * dot / vtv;
        for r in col..m {
            b[r] -= f * v[r - col];
        }
    }
    // Back substitution on the R factor.
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = b[col];
        for c in col + 1..n {
            v -= a[col * n + c] * x[c];
        }
        let d = a[col * n + col];
        x[col] = if d.abs() < 1e-300 { 0.0 } else { v / d };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn solve_small_system() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        assert!(solve_dense(&mut a, 2, &mut b));
        assert!((b[0] - 0.8).abs() < 1e-12);
        assert!((b[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let mut rng = SplitMix64::new(3);
        let (m, n) = (40, 7);
        let xs: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let mut a = vec![0.0; m * n];
        let mut b = vec![0.0; m];
        for r in 0..m {
            for c in 0..n {
                a[r * n + c] = rng.uniform(-1.0, 1.0);
            }
        }
        for r in 0..m {
            for c in 0..n {
                b[r] += a[r * n + c] * xs[c];
            }
        }
        let sol = lstsq_qr(&mut a, m, n, &mut b);
        for (s, x) in sol.iter().zip(&xs) {
            assert!((s - x).abs() < 1e-10, "{s} vs {x}");
        }
    }
}

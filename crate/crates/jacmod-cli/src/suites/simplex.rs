//! A small dense two-phase simplex, used as the independent oracle for the
//! discretized uniform approximation problem. Deliberately separate from the
//! production exchange solver in the core crate: the acceptance check
//! compares the two routes.

/// Solve `min c·x` subject to `A x = b`, `x ≥ 0` (row-major `a`, `m×n`).
/// Returns the optimal objective value. Bland's rule, so it cannot cycle.
pub fn solve_standard_form(a: &[f64], b: &[f64], c: &[f64], m: usize, n: usize) -> Option<f64> {
    // Phase 1: artificials with identity columns; minimize their sum.
    let total = n + m;
    let mut tab = vec![0.0; (m + 1) * (total + 1)];
    let width = total + 1;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i * width + j] = sign * a[i * n + j];
        }
        tab[i * width + n + i] = 1.0;
        tab[i * width + total] = sign * b[i];
    }
    // Phase-1 objective row: sum of artificial rows (negated reduced costs).
    for j in 0..=total {
        let mut s = 0.0;
        for i in 0..m {
            s += tab[i * width + j];
        }
        tab[m * width + j] = -s;
    }
    for i in 0..m {
        tab[m * width + n + i] = 0.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    if !simplex_loop(&mut tab, &mut basis, m, total, width) {
        return None;
    }
    let phase1 = -tab[m * width + total];
    if phase1.abs() > 1e-7 {
        return None; // infeasible
    }
    // Drive remaining artificials out of the basis when possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab[i * width + j].abs() > 1e-9) {
                pivot(&mut tab, m, width, i, j);
                basis[i] = j;
            }
        }
    }
    // Phase 2 objective.
    for j in 0..=total {
        tab[m * width + j] = 0.0;
    }
    for (j, &cj) in c.iter().enumerate() {
        tab[m * width + j] = cj;
    }
    // Make reduced costs consistent with the current basis.
    for i in 0..m {
        let bj = basis[i];
        let coef = tab[m * width + bj];
        if coef != 0.0 {
            for j in 0..=total {
                tab[m * width + j] -= coef * tab[i * width + j];
            }
        }
    }
    // Forbid artificials from re-entering.
    for i in 0..m {
        tab[m * width + n + i] = f64::INFINITY;
    }
    if !simplex_loop(&mut tab, &mut basis, m, n, width) {
        return None;
    }
    Some(-tab[m * width + total])
}

fn simplex_loop(
    tab: &mut [f64],
    basis: &mut [usize],
    m: usize,
    n_enterable: usize,
    width: usize,
) -> bool {
    for _ in 0..200_000 {
        // Bland: smallest index with negative reduced cost.
        let mut enter = None;
        for j in 0..n_enterable {
            let rc = tab[m * width + j];
            if rc < -1e-10 && rc.is_finite() {
                enter = Some(j);
                break;
            }
        }
        let Some(e) = enter else { return true };
        // Ratio test (Bland tie-break on basis index).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let aij = tab[i * width + e];
            if aij > 1e-12 {
                let ratio = tab[i * width + width - 1] / aij;
                if ratio < best - 1e-15
                    || (ratio < best + 1e-15
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(l) = leave else { return false }; // unbounded
        pivot(tab, m, width, l, e);
        basis[l] = e;
    }
    false
}

fn pivot(tab: &mut [f64], m: usize, width: usize, row: usize, col: usize) {
    let d = tab[row * width + col];
    for j in 0..width {
        tab[row * width + j] /= d;
    }
    for i in 0..=m {
        if i == row {
            continue;
        }
        let f = tab[i * width + col];
        if f == 0.0 || !f.is_finite() {
            continue;
        }
        for j in 0..width {
            let v = tab[row * width + j];
            if v != 0.0 {
                tab[i * width + j] -= f * v;
            }
        }
    }
}

/// Independent oracle: best uniform approximation error of `x^k` by
/// polynomials of degree < k on a dense Chebyshev grid, via the LP dual
/// `max Σ (μ-ν)·b` over `Σ (μ-ν)·a_i = 0`, `Σ (μ+ν) = 1`, `μ, ν ≥ 0`.
pub fn lp_minimax_monomial(k: usize, grid: usize) -> Option<f64> {
    let m = grid;
    let xs: Vec<f64> = (0..m)
        .map(|j| -(std::f64::consts::PI * j as f64 / (m - 1) as f64).cos())
        .collect();
    // Basis rows: monomials 1, x, ..., x^{k-1}; target b = x^k.
    let rows = k + 1;
    let cols = 2 * m;
    let mut a = vec![0.0; rows * cols];
    let mut c = vec![0.0; cols];
    for (i, &x) in xs.iter().enumerate() {
        let mut pw = 1.0;
        for r in 0..k {
            a[r * cols + i] = pw;
            a[r * cols + m + i] = -pw;
            pw *= x;
        }
        a[k * cols + i] = 1.0;
        a[k * cols + m + i] = 1.0;
        let b = pw; // x^k
        // Dual objective max Σ(μ-ν)b ⇒ minimize the negative.
        c[i] = -b;
        c[m + i] = b;
    }
    let mut b = vec![0.0; rows];
    b[k] = 1.0;
    solve_standard_form(&a, &b, &c, rows, cols).map(|v| -v)
}

//! Gauss-Legendre quadrature: nodes and weights on [-1, 1], composite rules,
//! and partial-integral weights used by the fixed-point integrator.
//!
//! Nodes are roots of the Legendre polynomial P_n, found by Newton iteration
//! from the Chebyshev-like initial guess; weights are 2 / ((1 - x^2) P_n'(x)^2).
//! Order is capped so the monomial manipulations in
//! `partial_interval_weights` stay well conditioned.

use crate::error::{Error, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 16;

/// Legendre P_n(x) and its derivative by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::NonPositive {
            name: "quadrature order (must be 1..=16)",
            value: order as f64,
        });
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Initial guess for the i-th root from the right.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        nodes[mid] = 0.0;
        let (_, dp) = legendre_with_deriv(n, 0.0);
        weights[mid] = 2.0 / (dp * dp);
    }
    Ok((nodes, weights))
}

/// Integrate f over [a, b] with a composite Gauss-Legendre rule.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(order)?;
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    Ok(total)
}

/// For interpolation nodes x_0 < ... < x_{n-1} (on any interval), the matrix
/// c[j][q] = integral over [x_first_ref, x_j] of the Lagrange basis L_q,
/// with the lower limit at `lo`. Evaluating sum_q c[j][q] f(x_q) then gives
/// the exact partial integral of the degree < n interpolant of f from `lo`
/// to x_j.
pub fn partial_interval_weights(nodes: &[f64], lo: f64) -> Result<Vec<Vec<f64>>> {
    let n = nodes.len();
    if n == 0 || n > MAX_ORDER {
        return Err(Error::NonPositive {
            name: "interpolation node count (must be 1..=16)",
            value: n as f64,
        });
    }
    // Monomial coefficients of each Lagrange basis polynomial.
    let mut out = vec![vec![0.0; n]; n];
    for q in 0..n {
        // Build prod_{m != q} (x - x_m) in monomial form, then normalise.
        let mut coeffs = vec![0.0; n];
        coeffs[0] = 1.0;
        let mut deg = 0;
        let mut denom = 1.0;
        for m in 0..n {
            if m == q {
                continue;
            }
            denom *= nodes[q] - nodes[m];
            // Multiply by (x - x_m).
            for k in (0..=deg).rev() {
                coeffs[k + 1] += coeffs[k];
                coeffs[k] *= -nodes[m];
            }
            deg += 1;
        }
        // Antiderivative evaluated at t: sum_k coeffs[k] t^{k+1} / (k+1).
        let anti = |t: f64| -> f64 {
            let mut acc = 0.0;
            let mut tp = t;
            for (k, c) in coeffs.iter().enumerate().take(deg + 1) {
                acc += c * tp / (k as f64 + 1.0);
                tp *= t;
            }
            acc
        };
        let base = anti(lo);
        for (j, &xj) in nodes.iter().enumerate() {
            out[j][q] = (anti(xj) - base) / denom;
        }
    }
    Ok(out)
}

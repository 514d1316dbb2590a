//! Central finite differences, real and Wirtinger flavours.
//!
//! These are the one honest derivative-free derivative: the criticality
//! module builds Hessians from them, the gauge module builds divergence
//! residuals from them, and the test suites use them as oracles against
//! every hand-derived gradient in the crate.

use num_complex::Complex64;

/// Central difference d/dt f(t) with step h.
pub fn central<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Central difference of a complex-valued function of a real parameter.
pub fn central_complex<F: Fn(f64) -> Complex64>(f: F, t: f64, h: f64) -> Complex64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Wirtinger derivative d/dz = (d/dx - i d/dy)/2 of f at z[var], keeping the
/// other components of z fixed. Works for non-holomorphic f (e.g. real
/// potentials); for holomorphic f it reduces to the complex derivative.
pub fn wirtinger<F>(f: F, z: &[Complex64], var: usize, h: f64) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let mut zp = z.to_vec();
    let fx = {
        zp[var] = z[var] + Complex64::new(h, 0.0);
        let plus = f(&zp);
        zp[var] = z[var] - Complex64::new(h, 0.0);
        let minus = f(&zp);
        (plus - minus) / (2.0 * h)
    };
    let fy = {
        zp[var] = z[var] + Complex64::new(0.0, h);
        let plus = f(&zp);
        zp[var] = z[var] - Complex64::new(0.0, h);
        let minus = f(&zp);
        (plus - minus) / (2.0 * h)
    };
    (fx - Complex64::i() * fy) * 0.5
}

/// Conjugate Wirtinger derivative d/dzbar = (d/dx + i d/dy)/2.
pub fn wirtinger_bar<F>(f: F, z: &[Complex64], var: usize, h: f64) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let mut zp = z.to_vec();
    let fx = {
        zp[var] = z[var] + Complex64::new(h, 0.0);
        let plus = f(&zp);
        zp[var] = z[var] - Complex64::new(h, 0.0);
        let minus = f(&zp);
        (plus - minus) / (2.0 * h)
    };
    let fy = {
        zp[var] = z[var] + Complex64::new(0.0, h);
        let plus = f(&zp);
        zp[var] = z[var] - Complex64::new(0.0, h);
        let minus = f(&zp);
        (plus - minus) / (2.0 * h)
    };
    (fx + Complex64::i() * fy) * 0.5
}

/// Gradient of a real scalar function on R^n by central differences.
pub fn grad_real<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let plus = f(&xp);
        xp[i] = x[i] - h;
        let minus = f(&xp);
        xp[i] = x[i];
        g[i] = (plus - minus) / (2.0 * h);
    }
    g
}

/// Symmetric Jacobian of a vector field on R^n (symmetrised so that the
/// result of differentiating a gradient is an exactly symmetric Hessian).
pub fn sym_jacobian<F>(f: F, x: &[f64], h: f64) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let plus = f(&xp);
        xp[j] = x[j] - h;
        let minus = f(&xp);
        xp[j] = x[j];
        cols.push(
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    let mut jac = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            jac[i][j] = 0.5 * (cols[j][i] + cols[i][j]);
        }
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wirtinger_of_holomorphic_square_is_2z() {
        let z = [Complex64::new(0.7, -0.3)];
        let d = wirtinger(|w| w[0] * w[0], &z, 0, 1e-5);
        assert!((d - 2.0 * z[0]).norm() < 1e-9);
    }

    #[test]
    fn wirtinger_of_modulus_squared_is_conjugate() {
        let z = [Complex64::new(0.4, 1.1)];
        let d = wirtinger(|w| Complex64::new(w[0].norm_sqr(), 0.0), &z, 0, 1e-5);
        assert!((d - z[0].conj()).norm() < 1e-9);
    }

    #[test]
    fn sym_jacobian_of_quadratic_gradient_recovers_matrix() {
        // f = x^T A x with symmetric A; grad = 2 A x; jacobian = 2A.
        let a = [[2.0, 0.5], [0.5, 1.0]];
        let grad = |x: &[f64]| {
            vec![
                2.0 * (a[0][0] * x[0] + a[0][1] * x[1]),
                2.0 * (a[1][0] * x[0] + a[1][1] * x[1]),
            ]
        };
        let j = sym_jacobian(grad, &[0.3, -0.2], 1e-4);
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k] - 2.0 * a[i][k]).abs() < 1e-8);
            }
        }
    }
}

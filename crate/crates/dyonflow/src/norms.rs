//! Norm policy: every state-space and gradient norm in the crate is the sup
//! norm over realified components, so certificates and tolerances compose
//! without hidden constant factors.

use num_complex::Complex64;

/// max_i max(|Re z_i|, |Im z_i|).
pub fn sup_complex(z: &[Complex64]) -> f64 {
    z.iter()
        .map(|c| c.re.abs().max(c.im.abs()))
        .fold(0.0, f64::max)
}

/// max_i |x_i|.
pub fn sup_real(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Sup-norm distance between two complex slices of equal length.
pub fn sup_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d.re.abs().max(d.im.abs())
        })
        .fold(0.0, f64::max)
}

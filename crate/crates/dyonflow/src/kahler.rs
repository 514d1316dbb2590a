//! Kahler geometry of the scalar sigma model.
//!
//! The scalar manifold is described by a real potential function K(phi, phibar).
//! Everything downstream needs three objects derived from it: the Hermitian
//! metric g_{i jbar} = d_i d_jbar K, its inverse, and the holomorphic
//! Christoffel symbols Gamma^i_{jk} = g^{i lbar} d_j g_{k lbar} (all
//! derivatives in the Wirtinger sense).
//!
//! Two families are supported:
//! * `Flat`: K = |phi|^2, so g is the identity and Gamma vanishes.
//! * `RadialSeries`: K = P(s) with s = sum_i |phi_i|^2 and P a real
//!   polynomial. Closed forms:
//!     g_{i jbar}   = P'(s) delta_ij + P''(s) conj(phi_i) phi_j
//!     d_k g_{i jbar} = P'' conj(phi_k) delta_ij
//!                    + P''' conj(phi_k) conj(phi_i) phi_j
//!                    + P'' conj(phi_i) delta_kj
//!
//! A model also declares growth constants (epsilon, c1, c2, c3) bounding
//!     |K|     <= epsilon/6 |phi|^6 + c1/2 |phi|^4 + c2 |phi|^2 + c3
//!     |Gamma| <= 2 epsilon |phi|^3 + c1 |phi|
//! (|Gamma| taken as the largest modulus over all components). These feed the
//! contraction estimates of the flow solver; `certify_bounds` spot-checks them
//! on a deterministic low-discrepancy sweep of a field-space ball.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampling::complex_ball;

/// Point in scalar field space: the values of the complex scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPoint(Vec<Complex64>);

impl FieldPoint {
    pub fn new(values: Vec<Complex64>) -> Self {
        FieldPoint(values)
    }

    pub fn zero(n: usize) -> Self {
        FieldPoint(vec![Complex64::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    /// Euclidean field-space norm sqrt(sum |phi_i|^2).
    pub fn radius(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn conj(&self) -> Self {
        FieldPoint(self.0.iter().map(|z| z.conj()).collect())
    }
}

impl std::ops::Deref for FieldPoint {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl From<Vec<Complex64>> for FieldPoint {
    fn from(v: Vec<Complex64>) -> Self {
        FieldPoint(v)
    }
}

/// Functional form of the Kahler potential.
#[derive(Debug, Clone, PartialEq)]
pub enum KahlerFamily {
    /// K = |phi|^2.
    Flat,
    /// K = P(s), s = sum |phi_i|^2, with P(s) = sum_m coeffs[m] s^m.
    RadialSeries { coeffs: Vec<f64> },
}

/// Declared growth constants for the potential and connection bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBounds {
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for GrowthBounds {
    fn default() -> Self {
        GrowthBounds {
            epsilon: 0.0,
            c1: 1.0,
            c2: 1.0,
            c3: 0.0,
        }
    }
}

/// Kahler sector of a model: family, field count, growth constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerModel {
    pub n_fields: usize,
    pub family: KahlerFamily,
    pub bounds: GrowthBounds,
}

/// Evaluate P and its first three derivatives at s by Horner's rule.
fn radial_derivs(coeffs: &[f64], s: f64) -> (f64, f64, f64, f64) {
    let (mut p0, mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0, 0.0);
    for &a in coeffs.iter().rev() {
        p3 = p3 * s + 3.0 * p2;
        p2 = p2 * s + 2.0 * p1;
        p1 = p1 * s + p0;
        p0 = p0 * s + a;
    }
    (p0, p1, p2, p3)
}

impl KahlerModel {
    pub fn flat(n_fields: usize) -> Self {
        KahlerModel {
            n_fields,
            family: KahlerFamily::Flat,
            bounds: GrowthBounds::default(),
        }
    }

    pub fn radial(n_fields: usize, coeffs: Vec<f64>, bounds: GrowthBounds) -> Self {
        KahlerModel {
            n_fields,
            family: KahlerFamily::RadialSeries { coeffs },
            bounds,
        }
    }

    fn check_arity(&self, phi: &FieldPoint) {
        assert_eq!(
            phi.len(),
            self.n_fields,
            "field point arity {} does not match model arity {}",
            phi.len(),
            self.n_fields
        );
    }

    /// K(phi, phibar).
    pub fn potential(&self, phi: &FieldPoint) -> f64 {
        self.check_arity(phi);
        let s = phi.norm_sqr();
        match &self.family {
            KahlerFamily::Flat => s,
            KahlerFamily::RadialSeries { coeffs } => radial_derivs(coeffs, s).0,
        }
    }

    /// Holomorphic gradient K_i = d_i K = P'(s) conj(phi_i).
    pub fn grad_potential(&self, phi: &FieldPoint) -> Vec<Complex64> {
        self.check_arity(phi);
        let s = phi.norm_sqr();
        let p1 = match &self.family {
            KahlerFamily::Flat => 1.0,
            KahlerFamily::RadialSeries { coeffs } => radial_derivs(coeffs, s).1,
        };
        phi.iter().map(|z| p1 * z.conj()).collect()
    }

    /// Pure holomorphic second derivative d_i d_j K = P''(s) conj(phi_i) conj(phi_j).
    /// (Distinct from the metric, which mixes holomorphic and antiholomorphic.)
    pub fn holo_hessian(&self, phi: &FieldPoint) -> DMatrix<Complex64> {
        self.check_arity(phi);
        let n = self.n_fields;
        let s = phi.norm_sqr();
        let p2 = match &self.family {
            KahlerFamily::Flat => 0.0,
            KahlerFamily::RadialSeries { coeffs } => radial_derivs(coeffs, s).2,
        };
        DMatrix::from_fn(n, n, |i, j| p2 * phi[i].conj() * phi[j].conj())
    }

    /// Hermitian metric, entry (i, j) = g_{i jbar}. Built exactly Hermitian:
    /// the diagonal is assembled real and the lower triangle mirrors the upper.
    pub fn metric(&self, phi: &FieldPoint) -> DMatrix<Complex64> {
        self.check_arity(phi);
        let n = self.n_fields;
        match &self.family {
            KahlerFamily::Flat => DMatrix::identity(n, n),
            KahlerFamily::RadialSeries { coeffs } => {
                let s = phi.norm_sqr();
                let (_, p1, p2, _) = radial_derivs(coeffs, s);
                let mut g = DMatrix::zeros(n, n);
                for i in 0..n {
                    g[(i, i)] = Complex64::new(p1 + p2 * phi[i].norm_sqr(), 0.0);
                    for j in (i + 1)..n {
                        let v = p2 * phi[i].conj() * phi[j];
                        g[(i, j)] = v;
                        g[(j, i)] = v.conj();
                    }
                }
                g
            }
        }
    }

    /// Inverse metric as a matrix (so that inverse * metric = identity).
    /// Index-wise, g^{i lbar} = inverse[(l, i)].
    pub fn inverse_metric(&self, phi: &FieldPoint) -> Result<DMatrix<Complex64>> {
        let g = self.metric(phi);
        invert_hermitian_pd(&g).ok_or_else(|| {
            Error::NonPositiveDefinite(format!(
                "|phi| = {:.6}, metric not positive definite",
                phi.radius()
            ))
        })
    }

    /// Holomorphic derivatives of the metric: result[k][(i, j)] = d_k g_{i jbar}.
    pub fn metric_deriv(&self, phi: &FieldPoint) -> Vec<DMatrix<Complex64>> {
        self.check_arity(phi);
        let n = self.n_fields;
        match &self.family {
            KahlerFamily::Flat => vec![DMatrix::zeros(n, n); n],
            KahlerFamily::RadialSeries { coeffs } => {
                let s = phi.norm_sqr();
                let (_, _, p2, p3) = radial_derivs(coeffs, s);
                (0..n)
                    .map(|k| {
                        DMatrix::from_fn(n, n, |i, j| {
                            let mut v = p3 * phi[k].conj() * phi[i].conj() * phi[j];
                            if i == j {
                                v += p2 * phi[k].conj();
                            }
                            if k == j {
                                v += p2 * phi[i].conj();
                            }
                            v
                        })
                    })
                    .collect()
            }
        }
    }

    /// Christoffel symbols: result[i][(j, k)] = Gamma^i_{jk} = g^{i lbar} d_j g_{k lbar},
    /// symmetric in (j, k).
    pub fn christoffel(&self, phi: &FieldPoint) -> Result<Vec<DMatrix<Complex64>>> {
        let n = self.n_fields;
        if matches!(self.family, KahlerFamily::Flat) {
            return Ok(vec![DMatrix::zeros(n, n); n]);
        }
        let ginv = self.inverse_metric(phi)?;
        let dg = self.metric_deriv(phi);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut gamma_i = DMatrix::zeros(n, n);
            for j in 0..n {
                for k in 0..n {
                    // g^{i lbar} = ginv[(l, i)]
                    let mut acc = Complex64::ZERO;
                    for l in 0..n {
                        acc += ginv[(l, i)] * dg[j][(k, l)];
                    }
                    gamma_i[(j, k)] = acc;
                }
            }
            out.push(gamma_i);
        }
        Ok(out)
    }

    /// Largest modulus over all Christoffel components at phi.
    pub fn christoffel_sup(&self, phi: &FieldPoint) -> Result<f64> {
        let gammas = self.christoffel(phi)?;
        Ok(gammas
            .iter()
            .flat_map(|m| m.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Check the declared growth bounds on a deterministic low-discrepancy
    /// sweep of the ball |phi| <= radius.
    pub fn certify_bounds(&self, radius: f64, samples: usize, seed: u64) -> Result<BoundCertificate> {
        if radius <= 0.0 {
            return Err(Error::NonPositive {
                name: "certification radius",
                value: radius,
            });
        }
        let b = self.bounds;
        let mut worst_margin = f64::INFINITY;
        let mut worst_point = FieldPoint::zero(self.n_fields);
        let mut holds = true;
        for pt in complex_ball(self.n_fields, radius, samples, seed) {
            let phi = FieldPoint::new(pt);
            let rho = phi.radius();
            let k_val = self.potential(&phi).abs();
            let k_bound = b.epsilon / 6.0 * rho.powi(6) + b.c1 / 2.0 * rho.powi(4)
                + b.c2 * rho.powi(2)
                + b.c3;
            let gamma_val = self.christoffel_sup(&phi)?;
            let gamma_bound = 2.0 * b.epsilon * rho.powi(3) + b.c1 * rho;
            let margin = (k_bound - k_val).min(gamma_bound - gamma_val);
            if margin < worst_margin {
                worst_margin = margin;
                worst_point = phi;
            }
            if margin < 0.0 {
                holds = false;
            }
        }
        Ok(BoundCertificate {
            holds,
            worst_margin,
            worst_point,
            radius,
            samples,
        })
    }
}

/// Outcome of a growth-bound sweep.
#[derive(Debug, Clone)]
pub struct BoundCertificate {
    pub holds: bool,
    /// Smallest (bound - value) margin seen; negative means a violation.
    pub worst_margin: f64,
    pub worst_point: FieldPoint,
    pub radius: f64,
    pub samples: usize,
}

/// Invert a Hermitian positive definite matrix via Cholesky; None when a
/// pivot is non-positive (i.e. the matrix is not positive definite).
pub(crate) fn invert_hermitian_pd(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    // L L^H = m, L lower triangular with real positive diagonal.
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || m[(j, j)].im.abs() > 1e-12 * m[(j, j)].re.abs().max(1.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / djj;
        }
    }
    // Solve L y = e_col, then L^H x = y, one column at a time.
    let mut inv = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let mut y = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut v = if i == col { Complex64::ONE } else { Complex64::ZERO };
            for k in 0..i {
                v -= l[(i, k)] * y[k];
            }
            y[i] = v / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in (i + 1)..n {
                v -= l[(k, i)].conj() * y[k];
            }
            y[i] = v / l[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = y[i];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::{wirtinger, wirtinger_bar};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quartic_model(cc: f64) -> KahlerModel {
        // P(s) = s + cc s^2
        KahlerModel::radial(
            1,
            vec![0.0, 1.0, cc],
            GrowthBounds {
                epsilon: 0.0,
                c1: 4.0 * cc,
                c2: 1.0,
                c3: 0.0,
            },
        )
    }

    #[test]
    fn flat_metric_is_identity_with_zero_connection() {
        let m = KahlerModel::flat(2);
        let phi = FieldPoint::new(vec![c(0.3, -0.1), c(-0.2, 0.7)]);
        let g = m.metric(&phi);
        assert_eq!(g, DMatrix::identity(2, 2));
        let gammas = m.christoffel(&phi).unwrap();
        for gm in gammas {
            assert!(gm.iter().all(|z| z.norm() == 0.0));
        }
        assert_eq!(m.potential(&phi), phi.norm_sqr());
    }

    #[test]
    fn quartic_metric_closed_form_on_real_slice() {
        let cc = 0.25;
        let m = quartic_model(cc);
        let x = 0.6;
        let phi = FieldPoint::new(vec![c(x, 0.0)]);
        let g = m.metric(&phi)[(0, 0)];
        assert!((g.re - (1.0 + 4.0 * cc * x * x)).abs() < 1e-15);
        assert_eq!(g.im, 0.0);
    }

    #[test]
    fn quartic_christoffel_closed_form() {
        // For P = s + cc s^2 the Wirtinger derivative of g is 4 cc conj(phi),
        // so Gamma = 4 cc conj(phi) / (1 + 4 cc s).
        let cc = 0.25;
        let m = quartic_model(cc);
        let phi = FieldPoint::new(vec![c(0.4, -0.3)]);
        let s = phi.norm_sqr();
        let want = 4.0 * cc * phi[0].conj() / (1.0 + 4.0 * cc * s);
        let gamma = m.christoffel(&phi).unwrap()[0][(0, 0)];
        assert!((gamma - want).norm() < 1e-14);
    }

    #[test]
    fn metric_matches_second_derivatives_of_potential() {
        let m = KahlerModel::radial(
            2,
            vec![0.0, 1.0, 0.15, -0.02],
            GrowthBounds::default(),
        );
        let phi = FieldPoint::new(vec![c(0.31, -0.12), c(-0.05, 0.44)]);
        let g = m.metric(&phi);
        // Nested central differences: a larger step keeps the inner
        // difference's rounding noise out of the outer quotient.
        let h = 1e-4;
        for i in 0..2 {
            for j in 0..2 {
                // g_{i jbar} = d_i (dbar_j K)
                let fd = wirtinger(
                    |z| {
                        wirtinger_bar(
                            |w| c(m.potential(&FieldPoint::new(w.to_vec())), 0.0),
                            z,
                            j,
                            h,
                        )
                    },
                    phi.values(),
                    i,
                    h,
                );
                let rel = (fd - g[(i, j)]).norm() / g[(i, j)].norm().max(1e-3);
                assert!(rel < 1e-6, "entry ({i},{j}): fd {fd} vs {}", g[(i, j)]);
            }
        }
    }

    #[test]
    fn metric_deriv_matches_wirtinger_differences() {
        let m = KahlerModel::radial(2, vec![0.0, 1.0, 0.2, 0.05], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(0.2, 0.1), c(-0.3, 0.25)]);
        let dg = m.metric_deriv(&phi);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let fd = wirtinger(
                        |z| m.metric(&FieldPoint::new(z.to_vec()))[(i, j)],
                        phi.values(),
                        k,
                        1e-5,
                    );
                    assert!(
                        (fd - dg[k][(i, j)]).norm() < 1e-8,
                        "d_{k} g_({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn christoffel_matches_finite_differences_of_metric() {
        let m = KahlerModel::radial(2, vec![0.0, 1.0, 0.2], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(0.35, -0.2), c(0.1, 0.35)]);
        let ginv = m.inverse_metric(&phi).unwrap();
        let gammas = m.christoffel(&phi).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut fd = Complex64::ZERO;
                    for l in 0..2 {
                        let djg = wirtinger(
                            |z| m.metric(&FieldPoint::new(z.to_vec()))[(k, l)],
                            phi.values(),
                            j,
                            1e-5,
                        );
                        fd += ginv[(l, i)] * djg;
                    }
                    let got = gammas[i][(j, k)];
                    let rel = (fd - got).norm() / got.norm().max(1e-3);
                    assert!(rel < 1e-5, "Gamma^{i}_({j},{k}): fd {fd} vs {got}");
                }
            }
        }
    }

    #[test]
    fn christoffel_is_symmetric_in_lower_indices() {
        let m = KahlerModel::radial(3, vec![0.0, 1.0, 0.1, 0.03], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(0.2, 0.3), c(-0.4, 0.1), c(0.05, -0.15)]);
        let gammas = m.christoffel(&phi).unwrap();
        for g in &gammas {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((g[(j, k)] - g[(k, j)]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn inverse_identity_holds_componentwise() {
        let m = KahlerModel::radial(3, vec![0.0, 1.0, 0.3, 0.07], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(0.5, -0.2), c(0.3, 0.3), c(-0.1, 0.6)]);
        let g = m.metric(&phi);
        let ginv = m.inverse_metric(&phi).unwrap();
        let id = &ginv * &g;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_is_exactly_hermitian() {
        let m = KahlerModel::radial(2, vec![0.0, 1.0, 0.4], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(0.8, -0.33), c(0.21, 0.49)]);
        let g = m.metric(&phi);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g[(i, j)], g[(j, i)].conj());
            }
        }
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        // P = s - s^2 gives g = 1 - 4s < 0 for s > 1/4.
        let m = KahlerModel::radial(1, vec![0.0, 1.0, -1.0], GrowthBounds::default());
        let phi = FieldPoint::new(vec![c(1.0, 0.0)]);
        assert!(matches!(
            m.inverse_metric(&phi),
            Err(Error::NonPositiveDefinite(_))
        ));
    }

    #[test]
    fn flat_bounds_hold_and_zero_constants_fail() {
        let mut m = KahlerModel::flat(1);
        let cert = m.certify_bounds(2.0, 2000, 1).unwrap();
        assert!(cert.holds, "worst margin {}", cert.worst_margin);
        assert!(cert.worst_margin >= 0.0);

        m.bounds = GrowthBounds {
            epsilon: 0.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
        };
        let cert = m.certify_bounds(2.0, 2000, 1).unwrap();
        assert!(!cert.holds);
        assert!(cert.worst_margin < 0.0);
    }

    #[test]
    fn quartic_bounds_hold_with_derived_constants() {
        // For P = s + cc s^2: |Gamma| = 4 cc |phi| / (1 + 4 cc s) <= 4 cc |phi|,
        // and |K| = s + cc s^2 <= (c1/2) s^2 + c2 s needs c1 >= 2 cc.
        let m = quartic_model(0.25);
        let cert = m.certify_bounds(2.0, 2000, 3).unwrap();
        assert!(cert.holds, "worst margin {}", cert.worst_margin);
    }
}

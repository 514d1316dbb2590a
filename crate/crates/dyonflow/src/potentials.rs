//! The three potentials that drive radial scalar flows.
//!
//! * Scalar potential: V = e^K (g^{i jbar} D_i W conj(D_j W) - 3 |W|^2) with
//!   the Kahler-covariant derivative D_i W = d_i W + K_i W.
//! * Black-hole potential: V_BH = -1/2 (g q) M (g q)^T where M packs the
//!   gauge couplings h = Re f, k = Im f as
//!   [[h + k h^-1 k, -k h^-1], [-h^-1 k, h^-1]].
//!   With positive definite h this V_BH is negative definite — the sign
//!   convention follows the Lagrangian this crate implements, which flips the
//!   usual gauge kinetic sign; all downstream formulas are consistent with it.
//! * Effective potential: V_eff = (1 - sqrt(1 - 4 V_BH V)) / (2 V), evaluated
//!   in the rationalised form 2 V_BH / (1 + sqrt(1 - 4 V_BH V)) away from the
//!   V = 0 degeneracy and as a three-term series in V_BH V below the switch
//!   threshold |4 V_BH V| < 1e-8.
//!
//! All gradients are analytic Wirtinger derivatives; the test suites check
//! every one of them against central finite differences.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kahler::FieldPoint;
use crate::model::ModelSpec;
use crate::norms::sup_distance;
use crate::poly::Poly;
use crate::sampling::complex_ball;

/// Threshold on |4 V_BH V| below which the effective potential switches to
/// its series form to avoid cancellation at small V.
pub const EFFECTIVE_SERIES_SWITCH: f64 = 1e-8;

/// Safety inflation applied to sampled Lipschitz quotients.
pub const LIPSCHITZ_SAFETY: f64 = 1.5;

/// Holomorphic superpotential W(phi).
#[derive(Debug, Clone, PartialEq)]
pub struct Superpotential(Poly);

impl Superpotential {
    pub fn new(poly: Poly) -> Self {
        Superpotential(poly)
    }

    /// W = w0, constant.
    pub fn constant(n_fields: usize, w0: Complex64) -> Self {
        Superpotential(Poly::constant(n_fields, w0))
    }

    pub fn zero(n_fields: usize) -> Self {
        Superpotential(Poly::zero(n_fields))
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars()
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.0.has_real_coeffs()
    }

    pub fn eval(&self, phi: &FieldPoint) -> Complex64 {
        self.0.eval(phi.values())
    }

    pub fn grad(&self, phi: &FieldPoint) -> Vec<Complex64> {
        self.0.grad(phi.values())
    }

    /// Second holomorphic derivatives d_i d_j W.
    pub fn hessian(&self, phi: &FieldPoint) -> DMatrix<Complex64> {
        let n = self.nvars();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            let di = self.0.derivative(i);
            for j in 0..n {
                h[(i, j)] = di.derivative(j).eval(phi.values());
            }
        }
        h
    }
}

/// Holomorphic gauge kinetic matrix f_ab(phi), symmetric in (a, b);
/// stored as the upper triangle a <= b.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCouplings {
    n_vectors: usize,
    /// Row-major upper triangle: entry for (a, b), a <= b, at index
    /// a * n_vectors - a(a-1)/2 + (b - a).
    entries: Vec<Poly>,
}

impl GaugeCouplings {
    pub fn new(n_vectors: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), n_vectors * (n_vectors + 1) / 2);
        let nvars = entries.first().map_or(0, |p| p.nvars());
        assert!(entries.iter().all(|p| p.nvars() == nvars));
        GaugeCouplings { n_vectors, entries }
    }

    /// Diagonal couplings f_aa = value, off-diagonal zero.
    pub fn diagonal_constant(n_fields: usize, n_vectors: usize, value: Complex64) -> Self {
        let entries = (0..n_vectors)
            .flat_map(|a| {
                (a..n_vectors).map(move |b| {
                    if a == b {
                        Poly::constant(n_fields, value)
                    } else {
                        Poly::zero(n_fields)
                    }
                })
            })
            .collect();
        GaugeCouplings { n_vectors, entries }
    }

    pub fn n_vectors(&self) -> usize {
        self.n_vectors
    }

    pub fn nvars(&self) -> usize {
        self.entries.first().map_or(0, |p| p.nvars())
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.entries.iter().all(|p| p.has_real_coeffs())
    }

    pub fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .all(|p| p.terms().iter().all(|t| t.exponents.iter().all(|&e| e == 0)))
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        // Row offset of an upper triangle stored row-major:
        // sum_{r < a} (n - r) = a (2n - a + 1) / 2.
        a * (2 * self.n_vectors - a + 1) / 2 + (b - a)
    }

    pub fn entry(&self, a: usize, b: usize) -> &Poly {
        &self.entries[self.idx(a, b)]
    }

    /// f_ab(phi) as a symmetric complex matrix.
    pub fn eval(&self, phi: &FieldPoint) -> DMatrix<Complex64> {
        let n = self.n_vectors;
        let mut f = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = self.entry(a, b).eval(phi.values());
                f[(a, b)] = v;
                f[(b, a)] = v;
            }
        }
        f
    }

    /// Holomorphic derivatives: result[i] = d_i f as a symmetric matrix.
    pub fn grad(&self, phi: &FieldPoint) -> Vec<DMatrix<Complex64>> {
        let n = self.n_vectors;
        (0..self.nvars())
            .map(|i| {
                let mut df = DMatrix::zeros(n, n);
                for a in 0..n {
                    for b in a..n {
                        let v = self.entry(a, b).derivative(i).eval(phi.values());
                        df[(a, b)] = v;
                        df[(b, a)] = v;
                    }
                }
                df
            })
            .collect()
    }
}

/// Dyonic charge vectors: magnetic g and electric q, one entry per vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct Charges {
    pub magnetic: Vec<f64>,
    pub electric: Vec<f64>,
}

impl Charges {
    pub fn new(magnetic: Vec<f64>, electric: Vec<f64>) -> Self {
        assert_eq!(magnetic.len(), electric.len());
        Charges { magnetic, electric }
    }

    pub fn n_vectors(&self) -> usize {
        self.magnetic.len()
    }

    /// Stacked (g, q) column used by the quadratic form.
    fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.magnetic.len(),
            self.magnetic.iter().chain(self.electric.iter()).copied(),
        )
    }
}

/// h = Re f and k = Im f at a point, plus h^-1 (symmetrised).
pub struct CouplingMatrices {
    pub h: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub h_inv: DMatrix<f64>,
}

/// Sampled Lipschitz constants for the potential gradients over a ball.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzEstimate {
    /// Bound for the black-hole potential gradient.
    pub c4: f64,
    /// Bound for the scalar potential gradient.
    pub c5: f64,
    pub pairs_used: usize,
    pub radius: f64,
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

impl ModelSpec {
    /// Kahler-covariant superpotential derivative D_i W = d_i W + K_i W.
    pub fn covariant_w_grad(&self, phi: &FieldPoint) -> Vec<Complex64> {
        let w = self.superpotential.eval(phi);
        let dw = self.superpotential.grad(phi);
        let ki = self.kahler.grad_potential(phi);
        dw.iter().zip(&ki).map(|(d, k)| d + k * w).collect()
    }

    /// Scalar potential V at phi.
    pub fn scalar_potential(&self, phi: &FieldPoint) -> Result<f64> {
        let (v, im) = self.scalar_potential_parts(phi)?;
        debug_assert!(
            im.abs() <= 1e-12 * v.abs().max(1.0),
            "imaginary residue {im:e} in scalar potential"
        );
        Ok(v)
    }

    /// Real value and the (roundoff-level) imaginary residue of the assembled
    /// expression, before the residue is discarded.
    pub fn scalar_potential_parts(&self, phi: &FieldPoint) -> Result<(f64, f64)> {
        let k = self.kahler.potential(phi);
        let w = self.superpotential.eval(phi);
        let a = DVector::from_vec(self.covariant_w_grad(phi));
        let ginv = self.kahler.inverse_metric(phi)?;
        // g^{i jbar} a_i conj(a_j) = a^H (Ginv a)
        let kinetic = a.dotc(&(&ginv * &a));
        let t = kinetic - 3.0 * w.norm_sqr();
        Ok((k.exp() * t.re, k.exp() * t.im))
    }

    /// Holomorphic gradient d_i V.
    pub fn scalar_potential_grad(&self, phi: &FieldPoint) -> Result<Vec<Complex64>> {
        let n = self.n_fields();
        let kval = self.kahler.potential(phi);
        let ki = self.kahler.grad_potential(phi);
        let kij = self.kahler.holo_hessian(phi);
        let w = self.superpotential.eval(phi);
        let dw = self.superpotential.grad(phi);
        let d2w = self.superpotential.hessian(phi);
        let a = DVector::from_vec(self.covariant_w_grad(phi));
        let ginv = self.kahler.inverse_metric(phi)?;
        let dg = self.kahler.metric_deriv(phi);

        let ginv_a = &ginv * &a;
        let t = a.dotc(&ginv_a) - Complex64::new(3.0 * w.norm_sqr(), 0.0);
        let ek = kval.exp();
        let wbar = w.conj();

        let mut grad = Vec::with_capacity(n);
        for kdx in 0..n {
            // d_k a_i = d_k d_i W + (d_k d_i K) W + K_i d_k W
            let da = DVector::from_fn(n, |i, _| {
                d2w[(kdx, i)] + kij[(kdx, i)] * w + ki[i] * dw[kdx]
            });
            let term_da = a.dotc(&(&ginv * &da));
            // d_k of the inverse metric: -Ginv dG[k] Ginv
            let term_dginv = -a.dotc(&(&ginv * &(&dg[kdx] * &ginv_a)));
            let term_aw = a[kdx] * wbar;
            let term_w = -3.0 * wbar * dw[kdx];
            grad.push(ek * (ki[kdx] * t + term_da + term_dginv + term_aw + term_w));
        }
        Ok(grad)
    }

    /// h = Re f, k = Im f, and the inverse of h; fails with `SingularH` when
    /// h cannot be inverted reliably.
    pub fn gauge_matrices(&self, phi: &FieldPoint) -> Result<CouplingMatrices> {
        let f = self.couplings.eval(phi);
        let h = f.map(|z| z.re);
        let k = f.map(|z| z.im);
        let mut h_inv = h.clone().try_inverse().ok_or(Error::SingularH)?;
        // Guard against a numerically meaningless inverse from a nearly
        // singular h.
        let residual = (&h * &h_inv - DMatrix::<f64>::identity(h.nrows(), h.nrows()))
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        if !residual.is_finite() || residual > 1e-8 {
            return Err(Error::SingularH);
        }
        symmetrize(&mut h_inv);
        Ok(CouplingMatrices { h, k, h_inv })
    }

    /// The symmetric 2 n_v x 2 n_v matrix M of the black-hole potential,
    /// blocks [[h + k h^-1 k, -k h^-1], [-h^-1 k, h^-1]].
    pub fn bh_matrix(&self, phi: &FieldPoint) -> Result<DMatrix<f64>> {
        let cm = self.gauge_matrices(phi)?;
        let n = self.n_vectors();
        let khk = &cm.k * &cm.h_inv * &cm.k;
        let kh = &cm.k * &cm.h_inv;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = cm.h[(a, b)] + khk[(a, b)];
                m[(a, n + b)] = -kh[(a, b)];
                m[(n + b, a)] = -kh[(a, b)];
                m[(n + a, n + b)] = cm.h_inv[(a, b)];
            }
        }
        symmetrize(&mut m);
        Ok(m)
    }

    /// V_BH = -1/2 (g q) M (g q)^T.
    pub fn bh_potential(&self, phi: &FieldPoint, charges: &Charges) -> Result<f64> {
        let m = self.bh_matrix(phi)?;
        let v = charges.stacked();
        Ok(-0.5 * v.dot(&(&m * &v)))
    }

    /// Holomorphic gradient d_i V_BH, assembled from d_i f via
    /// d_i h = d_i f / 2 and d_i k = -i d_i f / 2.
    pub fn bh_potential_grad(&self, phi: &FieldPoint, charges: &Charges) -> Result<Vec<Complex64>> {
        let cm = self.gauge_matrices(phi)?;
        let n = self.n_vectors();
        let df = self.couplings.grad(phi);
        let h_inv = to_complex(&cm.h_inv);
        let k = to_complex(&cm.k);
        let v = charges.stacked().map(|x| Complex64::new(x, 0.0));

        let mut grad = Vec::with_capacity(self.n_fields());
        for dfi in &df {
            let dh = dfi.map(|z| 0.5 * z);
            let dk = dfi.map(|z| Complex64::new(0.0, -0.5) * z);
            let dhinv = -(&h_inv * &dh * &h_inv);
            let d11 = &dh + &dk * &h_inv * &k + &k * &h_inv * &dk + &k * &dhinv * &k;
            let d12 = -(&dk * &h_inv) - &k * &dhinv;
            let d21 = -(&h_inv * &dk) - &dhinv * &k;
            let d22 = dhinv;
            let mut dm = DMatrix::zeros(2 * n, 2 * n);
            for a in 0..n {
                for b in 0..n {
                    dm[(a, b)] = d11[(a, b)];
                    dm[(a, n + b)] = d12[(a, b)];
                    dm[(n + a, b)] = d21[(a, b)];
                    dm[(n + a, n + b)] = d22[(a, b)];
                }
            }
            grad.push(-0.5 * v.dotc(&(&dm * &v)));
        }
        Ok(grad)
    }

    /// d_i V_eff by the chain rule through (V_BH, V).
    pub fn effective_potential_grad(
        &self,
        phi: &FieldPoint,
        charges: &Charges,
    ) -> Result<Vec<Complex64>> {
        let v_bh = self.bh_potential(phi, charges)?;
        let v = self.scalar_potential(phi)?;
        let (p_bh, p_v) = effective_potential_partials(v_bh, v)?;
        let g_bh = self.bh_potential_grad(phi, charges)?;
        let g_v = self.scalar_potential_grad(phi)?;
        Ok(g_bh
            .iter()
            .zip(&g_v)
            .map(|(b, s)| p_bh * b + p_v * s)
            .collect())
    }

    /// V_eff at phi.
    pub fn effective_potential_at(&self, phi: &FieldPoint, charges: &Charges) -> Result<f64> {
        let v_bh = self.bh_potential(phi, charges)?;
        let v = self.scalar_potential(phi)?;
        effective_potential(v_bh, v)
    }
}

/// V_eff(V_BH, V) = (1 - sqrt(1 - 4 V_BH V)) / (2 V), via the rationalised
/// closed form away from V = 0 and a three-term series below the switch.
pub fn effective_potential(v_bh: f64, v: f64) -> Result<f64> {
    let x = 4.0 * v_bh * v;
    let disc = 1.0 - x;
    if disc < 0.0 {
        return Err(Error::ComplexBranch { disc });
    }
    if x.abs() < EFFECTIVE_SERIES_SWITCH {
        let p = v_bh * v;
        Ok(v_bh * (1.0 + p * (1.0 + 2.0 * p)))
    } else {
        Ok(2.0 * v_bh / (1.0 + disc.sqrt()))
    }
}

/// (d V_eff / d V_BH, d V_eff / d V). Requires a strictly positive
/// discriminant (the boundary point has an infinite slope).
pub fn effective_potential_partials(v_bh: f64, v: f64) -> Result<(f64, f64)> {
    let x = 4.0 * v_bh * v;
    let disc = 1.0 - x;
    if disc <= 0.0 {
        return Err(Error::ComplexBranch { disc });
    }
    if x.abs() < EFFECTIVE_SERIES_SWITCH {
        let p = v_bh * v;
        let d_bh = 1.0 + 2.0 * p + 6.0 * p * p;
        let d_v = v_bh * v_bh * (1.0 + 4.0 * p + 15.0 * p * p);
        Ok((d_bh, d_v))
    } else {
        let d = disc.sqrt();
        let veff = 2.0 * v_bh / (1.0 + d);
        Ok((1.0 / d, veff * veff / d))
    }
}

/// Sampled Lipschitz constants for d V_BH (c4) and d V (c5) over the ball
/// |phi - center| <= radius, inflated by `LIPSCHITZ_SAFETY`. Pairs mix
/// far-apart points with short-offset pairs so both secant and
/// near-derivative quotients are represented.
pub fn lipschitz_estimate(
    model: &ModelSpec,
    charges: &Charges,
    center: &FieldPoint,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    if radius <= 0.0 {
        return Err(Error::NonPositive {
            name: "lipschitz radius",
            value: radius,
        });
    }
    let n = model.n_fields();
    let pts = complex_ball(n, radius, 2 * samples.max(1), seed);
    let at = |offset: &[Complex64]| -> FieldPoint {
        FieldPoint::new(
            center
                .iter()
                .zip(offset)
                .map(|(c, o)| c + o)
                .collect::<Vec<_>>(),
        )
    };

    let mut max_q_bh: f64 = 0.0;
    let mut max_q_v: f64 = 0.0;
    let mut used = 0;
    let short = 1e-3 * radius;
    for pair in pts.chunks_exact(2) {
        let phi_a = at(&pair[0]);
        // Alternate: far partner and short-offset partner.
        let partner: Vec<Complex64> = if used % 2 == 0 {
            pair[1].clone()
        } else {
            pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(a, b)| a + short * (b - a) / (b - a).norm().max(1e-300))
                .collect()
        };
        let phi_b = at(&partner);
        let dist = sup_distance(phi_a.values(), phi_b.values());
        if dist < 1e-14 {
            continue;
        }
        let gb_a = model.bh_potential_grad(&phi_a, charges)?;
        let gb_b = model.bh_potential_grad(&phi_b, charges)?;
        let gv_a = model.scalar_potential_grad(&phi_a)?;
        let gv_b = model.scalar_potential_grad(&phi_b)?;
        max_q_bh = max_q_bh.max(sup_distance(&gb_a, &gb_b) / dist);
        max_q_v = max_q_v.max(sup_distance(&gv_a, &gv_b) / dist);
        used += 1;
    }
    if used == 0 {
        return Err(Error::EmptySample("no pair exceeded the distance floor".into()));
    }
    Ok(LipschitzEstimate {
        c4: LIPSCHITZ_SAFETY * max_q_bh,
        c5: LIPSCHITZ_SAFETY * max_q_v,
        pairs_used: used,
        radius,
    })
}

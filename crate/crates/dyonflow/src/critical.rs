//! Critical points of the landscape potentials.
//!
//! All three potentials are real-valued functions of the complex fields, so
//! their critical points are found on the realified coordinates
//! x = (Re phi_1 .. Re phi_n, Im phi_1 .. Im phi_n), where the gradient of a
//! real function V is (2 Re dV, -2 Im dV) in terms of the Wirtinger
//! derivative dV. The finder is a damped Newton iteration on that gradient:
//! the Hessian comes from symmetric finite differences of the analytic
//! gradient, steps are backtracked until the merit 0.5 |grad|^2 satisfies an
//! Armijo decrease, and a steepest-descent direction takes over when the
//! Newton system is singular or its step fails to make progress.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::diff::sym_jacobian;
use crate::error::{Error, Result};
use crate::kahler::FieldPoint;
use crate::model::ModelSpec;
use crate::norms::sup_real;

/// Which potential the critical point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// The scalar potential V.
    Scalar,
    /// The charge-dependent black-hole potential V_BH.
    BlackHole,
    /// The combined effective potential V_eff.
    Effective,
}

/// Inertia of the realified Hessian at a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

/// Converged (or best-effort) critical point.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub phi_star: FieldPoint,
    pub kind: PotentialKind,
    /// Sup norm of the realified gradient at phi_star.
    pub grad_norm: f64,
    pub signature: Signature,
    pub converged: bool,
    /// Euclidean gradient norms of the accepted iterates, in order; the
    /// line search makes this sequence non-increasing.
    pub grad_history: Vec<f64>,
}

/// Newton iteration tunables.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Central-difference step for the Hessian of the realified gradient.
    pub fd_step: f64,
    pub armijo_c1: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            grad_tol: 1e-10,
            max_iters: 100,
            fd_step: 1e-4,
            armijo_c1: 1e-4,
            max_backtracks: 30,
        }
    }
}

/// Wirtinger gradient of the chosen potential.
pub fn potential_grad(
    model: &ModelSpec,
    kind: PotentialKind,
    phi: &FieldPoint,
) -> Result<Vec<Complex64>> {
    match kind {
        PotentialKind::Scalar => model.scalar_potential_grad(phi),
        PotentialKind::BlackHole => model.bh_potential_grad(phi, &model.charges),
        PotentialKind::Effective => model.effective_potential_grad(phi, &model.charges),
    }
}

/// Gradient on the realified coordinates (Re phi..., Im phi...).
pub fn realified_gradient(
    model: &ModelSpec,
    kind: PotentialKind,
    x: &[f64],
) -> Result<Vec<f64>> {
    let phi = unrealify(x);
    let grad = potential_grad(model, kind, &phi)?;
    let n = grad.len();
    let mut out = vec![0.0; 2 * n];
    for (i, g) in grad.iter().enumerate() {
        out[i] = 2.0 * g.re;
        out[n + i] = -2.0 * g.im;
    }
    Ok(out)
}

fn realify(phi: &FieldPoint) -> Vec<f64> {
    let n = phi.len();
    let mut x = vec![0.0; 2 * n];
    for (i, z) in phi.iter().enumerate() {
        x[i] = z.re;
        x[n + i] = z.im;
    }
    x
}

fn unrealify(x: &[f64]) -> FieldPoint {
    let n = x.len() / 2;
    FieldPoint::new(
        (0..n)
            .map(|i| Complex64::new(x[i], x[n + i]))
            .collect(),
    )
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Realified Hessian by symmetric differencing of the analytic gradient.
/// Evaluation failures at any probe point surface as errors.
pub fn realified_hessian(
    model: &ModelSpec,
    kind: PotentialKind,
    x: &[f64],
    fd_step: f64,
) -> Result<DMatrix<f64>> {
    use std::cell::RefCell;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let rows = sym_jacobian(
        |p| match realified_gradient(model, kind, p) {
            Ok(g) => g,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                vec![0.0; p.len()]
            }
        },
        x,
        fd_step,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Inertia of a symmetric matrix, with eigenvalues below
/// 1e-6 * max(1, |lambda|_max) counted as zero.
pub fn inertia(h: &DMatrix<f64>) -> Signature {
    let eigen = h.clone().symmetric_eigen();
    let lam_max = eigen
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs()));
    let thresh = 1e-6 * lam_max.max(1.0);
    let mut sig = Signature {
        n_plus: 0,
        n_minus: 0,
        n_zero: 0,
    };
    for l in eigen.eigenvalues.iter() {
        if l.abs() <= thresh {
            sig.n_zero += 1;
        } else if *l > 0.0 {
            sig.n_plus += 1;
        } else {
            sig.n_minus += 1;
        }
    }
    sig
}

/// Find a critical point of the chosen potential starting from `guess`.
///
/// Returns the best point reached with `converged` indicating whether the
/// gradient tolerance was met; evaluation errors at the starting point (or
/// while building Hessians along the way) propagate as errors.
pub fn find_critical(
    model: &ModelSpec,
    kind: PotentialKind,
    guess: &FieldPoint,
    opts: &NewtonOptions,
) -> Result<CriticalPoint> {
    let mut x = realify(guess);
    let mut g = realified_gradient(model, kind, &x)?;
    let mut history = vec![euclid(&g)];
    let mut converged = sup_real(&g) <= opts.grad_tol;

    let mut iter = 0;
    while !converged && iter < opts.max_iters {
        iter += 1;
        let h = realified_hessian(model, kind, &x, opts.fd_step)?;
        let gv = DVector::from_column_slice(&g);
        let newton_dir = h.lu().solve(&(-&gv)).map(|d| d.as_slice().to_vec());
        let m0 = 0.5 * euclid(&g).powi(2);

        let mut accepted: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut directions: Vec<Vec<f64>> = Vec::new();
        if let Some(d) = newton_dir {
            directions.push(d);
        }
        directions.push(g.iter().map(|v| -v).collect());
        'dirs: for dir in &directions {
            let mut alpha = 1.0f64;
            for _ in 0..=opts.max_backtracks {
                let xt: Vec<f64> = x
                    .iter()
                    .zip(dir)
                    .map(|(xi, di)| xi + alpha * di)
                    .collect();
                if let Ok(gt) = realified_gradient(model, kind, &xt) {
                    let mt = 0.5 * euclid(&gt).powi(2);
                    if mt <= (1.0 - opts.armijo_c1 * alpha) * m0 {
                        accepted = Some((xt, gt));
                        break 'dirs;
                    }
                }
                alpha *= 0.5;
            }
        }
        match accepted {
            Some((xt, gt)) => {
                x = xt;
                g = gt;
                history.push(euclid(&g));
                converged = sup_real(&g) <= opts.grad_tol;
            }
            // No direction produces a decrease: stalled.
            None => break,
        }
    }

    let hess = realified_hessian(model, kind, &x, opts.fd_step)?;
    Ok(CriticalPoint {
        phi_star: unrealify(&x),
        kind,
        grad_norm: sup_real(&g),
        signature: inertia(&hess),
        converged,
        grad_history: history,
    })
}

/// Consistency report for a pair of frozen endpoints: the field value the
/// flow settles to at large radius and the field value at the horizon.
#[derive(Debug, Clone)]
pub struct FrozenPairReport {
    /// The far endpoint is a critical point of the scalar potential.
    pub asymptotic_ok: bool,
    /// The horizon endpoint is a critical point of the effective potential.
    pub horizon_ok: bool,
    /// The two endpoints agree within the separation tolerance.
    pub coincide: bool,
    pub grad_scalar_norm: f64,
    pub grad_effective_norm: f64,
    pub separation: f64,
}

/// Check whether (phi_inf, phi_h) is a valid frozen pair: phi_inf critical
/// for the scalar potential, phi_h critical for the effective potential,
/// and whether the two coincide.
pub fn check_frozen_pair(
    model: &ModelSpec,
    phi_inf: &FieldPoint,
    phi_h: &FieldPoint,
    grad_tol: f64,
    sep_tol: f64,
) -> Result<FrozenPairReport> {
    let g_inf = realified_gradient(model, PotentialKind::Scalar, &realify(phi_inf))?;
    let g_h = realified_gradient(model, PotentialKind::Effective, &realify(phi_h))?;
    let separation = phi_inf
        .iter()
        .zip(phi_h.iter())
        .map(|(a, b)| {
            let d = a - b;
            d.re.abs().max(d.im.abs())
        })
        .fold(0.0f64, f64::max);
    Ok(FrozenPairReport {
        asymptotic_ok: sup_real(&g_inf) <= grad_tol,
        horizon_ok: sup_real(&g_h) <= grad_tol,
        coincide: separation <= sep_tol,
        grad_scalar_norm: sup_real(&g_inf),
        grad_effective_norm: sup_real(&g_h),
        separation,
    })
}

//! Radial scalar flow integration, two independent ways.
//!
//! The second-order field equations are reduced to the first-order system
//! u = (phi, pi):
//!
//!   phi' = pi
//!   pi^i' = -F pi^i - Gamma^i_{jk} pi^j pi^k
//!           + conj( (Ginv (G grad V_BH + H grad V))_i )
//!
//! with background coefficients (F, G, H) and Wirtinger gradients of the two
//! potentials.
//!
//! * `picard_solve` constructs the solution as the fixed point of the
//!   integral operator K(u)(r) = u0 + int_{r0}^r rhs(t, u(t)) dt on an
//!   interval short enough that K is a contraction on the ball |u| <= M:
//!   delta <= min(1/C_M, 1/(C_M M + |rhs(r0, u0)|)) with C_M an empirically
//!   sampled (and safety-inflated) Lipschitz constant of the right-hand
//!   side. The iteration log and the contraction factor C_M * delta are
//!   recorded in the returned profile so the geometric decay can be replayed.
//! * `rk_solve` is an adaptive embedded Runge-Kutta pair (Dormand-Prince
//!   4(5)) with steps clamped to land exactly on the requested sample radii.
//!   It shares no quadrature machinery with the fixed-point route, so the
//!   two can cross-check each other.
//!
//! `near_horizon_seed` produces boundary data from the logarithmic
//! near-horizon expansion, and `asymptotic_match` fits large-radius profiles
//! in the basis {1, 1/r, P(r), Q(r)}.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::json;

use crate::background::{pq_profiles, Background};
use crate::error::{Error, Result};
use crate::kahler::FieldPoint;
use crate::model::ModelSpec;
use crate::norms::{sup_complex, sup_distance};
use crate::potentials::Charges;
use crate::quad::{gauss_legendre, partial_interval_weights};
use crate::sampling::Halton;

/// Point in phase space: field values and their radial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub phi: FieldPoint,
    pub pi: Vec<Complex64>,
}

impl PhaseState {
    pub fn new(phi: FieldPoint, pi: Vec<Complex64>) -> Self {
        assert_eq!(phi.len(), pi.len());
        PhaseState { phi, pi }
    }

    pub fn frozen(phi: FieldPoint) -> Self {
        let n = phi.len();
        PhaseState {
            phi,
            pi: vec![Complex64::ZERO; n],
        }
    }

    pub fn n_fields(&self) -> usize {
        self.phi.len()
    }

    /// Flat component view (phi then pi), the layout used by the solvers.
    pub fn to_vec(&self) -> Vec<Complex64> {
        self.phi.iter().chain(self.pi.iter()).copied().collect()
    }

    pub fn from_vec(v: &[Complex64]) -> Self {
        let n = v.len() / 2;
        PhaseState {
            phi: FieldPoint::new(v[..n].to_vec()),
            pi: v[n..].to_vec(),
        }
    }

    /// Sup norm over all realified components.
    pub fn sup_norm(&self) -> f64 {
        sup_complex(&self.to_vec())
    }

    pub fn distance(&self, other: &PhaseState) -> f64 {
        sup_distance(&self.to_vec(), &other.to_vec())
    }

    pub fn conj(&self) -> Self {
        PhaseState {
            phi: self.phi.conj(),
            pi: self.pi.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Tunables of both integration routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Radius M of the sup-norm phase-space ball the contraction lives on.
    pub ball_radius: f64,
    /// Successive-iterate sup distance at which the fixed point is accepted.
    pub fixpoint_tol: f64,
    pub max_picard_iters: usize,
    /// Composite quadrature layout for the integral operator.
    pub quadrature_panels: usize,
    pub quadrature_order: usize,
    pub rk_rel_tol: f64,
    pub rk_abs_tol: f64,
    /// Relative offset from the horizon where near-horizon solves start:
    /// r0 = r_h (1 + horizon_offset).
    pub horizon_offset: f64,
    /// Sampling effort and seed for the Lipschitz-constant estimate.
    pub lipschitz_samples: usize,
    pub lipschitz_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            ball_radius: 2.0,
            fixpoint_tol: 1e-10,
            max_picard_iters: 400,
            quadrature_panels: 8,
            quadrature_order: 5,
            rk_rel_tol: 1e-10,
            rk_abs_tol: 1e-12,
            horizon_offset: 1e-4,
            lipschitz_samples: 160,
            lipschitz_seed: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ball_radius", self.ball_radius),
            ("fixpoint_tol", self.fixpoint_tol),
            ("rk_rel_tol", self.rk_rel_tol),
            ("rk_abs_tol", self.rk_abs_tol),
            ("horizon_offset", self.horizon_offset),
        ] {
            if !(v > 0.0) {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if self.fixpoint_tol >= self.ball_radius {
            return Err(Error::ValidationError {
                section: "solver".into(),
                key: "fixpoint_tol".into(),
                msg: "tolerance must be smaller than the ball radius".into(),
            });
        }
        if self.quadrature_order < 2 || self.quadrature_order > 12 {
            return Err(Error::ValidationError {
                section: "solver".into(),
                key: "quadrature_order".into(),
                msg: "order must be in 2..=12".into(),
            });
        }
        Ok(())
    }
}

/// Which integrator produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Picard,
    Rk,
}

/// Certification record of one contraction step.
#[derive(Debug, Clone)]
pub struct PicardSegment {
    pub r_start: f64,
    pub delta: f64,
    pub c_m: f64,
    pub contraction_factor: f64,
    /// Sup distances between successive iterates, in order.
    pub iterate_distances: Vec<f64>,
}

/// Integrated flow: states sampled on increasing radii plus certification
/// metadata (for the fixed-point route).
#[derive(Debug, Clone)]
pub struct FlowProfile {
    pub method: Method,
    pub r_samples: Vec<f64>,
    pub states: Vec<PhaseState>,
    /// Total radial span covered.
    pub delta_used: f64,
    /// C_M * delta of the certified step (max over chained steps); zero for
    /// the Runge-Kutta route.
    pub contraction_factor: f64,
    pub segments: Vec<PicardSegment>,
}

impl FlowProfile {
    /// Largest sup-norm state difference at shared sample radii; the
    /// profiles must be sampled on the same grid.
    pub fn sup_distance(&self, other: &FlowProfile) -> Result<f64> {
        if self.r_samples.len() != other.r_samples.len()
            || self
                .r_samples
                .iter()
                .zip(&other.r_samples)
                .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::ProfileGap(
                "profiles are sampled on different grids".into(),
            ));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }

    /// JSON form: method, certification numbers, and per-sample components.
    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<serde_json::Value> = self
            .r_samples
            .iter()
            .zip(&self.states)
            .map(|(r, s)| {
                json!({
                    "r": r,
                    "phi_re": s.phi.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "phi_im": s.phi.iter().map(|z| z.im).collect::<Vec<_>>(),
                    "pi_re": s.pi.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "pi_im": s.pi.iter().map(|z| z.im).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "method": match self.method { Method::Picard => "picard", Method::Rk => "rk" },
            "delta_used": self.delta_used,
            "contraction_factor": self.contraction_factor,
            "samples": samples,
        })
    }
}

/// Right-hand side of the first-order system at radius r.
pub fn rhs(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r: f64,
    state: &PhaseState,
) -> Result<PhaseState> {
    let coeff = background.coefficients(r)?;
    let n = model.n_fields();
    let ginv = model.kahler.inverse_metric(&state.phi)?;
    let gammas = model.kahler.christoffel(&state.phi)?;
    let grad_bh = model.bh_potential_grad(&state.phi, charges)?;
    let grad_v = model.scalar_potential_grad(&state.phi)?;
    let combo = DVector::from_fn(n, |k, _| coeff.g * grad_bh[k] + coeff.h * grad_v[k]);
    let raised = &ginv * &combo;
    let mut dpi = Vec::with_capacity(n);
    for i in 0..n {
        let mut curvature = Complex64::ZERO;
        for j in 0..n {
            for k in 0..n {
                curvature += gammas[i][(j, k)] * state.pi[j] * state.pi[k];
            }
        }
        dpi.push(-coeff.f * state.pi[i] - curvature + raised[i].conj());
    }
    Ok(PhaseState {
        phi: FieldPoint::new(state.pi.clone()),
        pi: dpi,
    })
}

/// Safety factor applied on top of the sampled Lipschitz quotients.
pub const CM_SAFETY: f64 = 1.5;

/// Empirical Lipschitz constant of the right-hand side with respect to the
/// state, uniformly over r in [r_lo, r_hi] and states in the sup-norm ball
/// |u| <= m_ball: the largest observed difference quotient, inflated by
/// `CM_SAFETY`. Pairs alternate between far-apart and short-offset partners.
pub fn lipschitz_cm(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r_lo: f64,
    r_hi: f64,
    m_ball: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if m_ball <= 0.0 {
        return Err(Error::NonPositive {
            name: "state ball radius",
            value: m_ball,
        });
    }
    let n = model.n_fields();
    let dim = 8 * n + 1; // r plus two states of 4n real components
    let mut halton = Halton::new(dim, seed);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for pair_idx in 0..samples.max(1) {
        let x = halton.next_point();
        let r = r_lo + (r_hi - r_lo) * x[0];
        let comp = |k: usize| m_ball * (2.0 * x[1 + k] - 1.0);
        let mut a = Vec::with_capacity(2 * n);
        let mut b = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            a.push(Complex64::new(comp(2 * i), comp(2 * i + 1)));
            let bi = Complex64::new(comp(4 * n + 2 * i), comp(4 * n + 2 * i + 1));
            if pair_idx % 2 == 0 {
                b.push(bi);
            } else {
                // Short offset in the direction of the second draw.
                let d = bi - a[i];
                let scale = 1e-3 * m_ball / d.norm().max(1e-300);
                b.push(a[i] + d * scale);
            }
        }
        let dist = sup_distance(&a, &b);
        if dist < 1e-14 {
            continue;
        }
        let sa = PhaseState::from_vec(&a);
        let sb = PhaseState::from_vec(&b);
        let fa = rhs(model, charges, background, r, &sa)?;
        let fb = rhs(model, charges, background, r, &sb)?;
        worst = worst.max(fa.distance(&fb) / dist);
        used += 1;
    }
    if used == 0 {
        return Err(Error::EmptySample(
            "no state pair exceeded the distance floor".into(),
        ));
    }
    Ok(CM_SAFETY * worst)
}

/// Largest certified step for Lipschitz constant C_M, ball radius M, and
/// right-hand-side norm at the start: min(1/C_M, 1/(C_M M + j_norm)).
pub fn contraction_delta(c_m: f64, m_ball: f64, j_norm_at_start: f64) -> Result<f64> {
    if c_m <= 0.0 {
        return Err(Error::NonPositive {
            name: "lipschitz constant",
            value: c_m,
        });
    }
    if m_ball <= 0.0 {
        return Err(Error::NonPositive {
            name: "state ball radius",
            value: m_ball,
        });
    }
    if j_norm_at_start < 0.0 {
        return Err(Error::NonPositive {
            name: "rhs norm",
            value: j_norm_at_start,
        });
    }
    Ok((1.0 / c_m).min(1.0 / (c_m * m_ball + j_norm_at_start)))
}

/// Discrete representation of one contraction step: values at composite
/// Gauss-Legendre nodes, plus partial-integral weights that evaluate the
/// integral operator at those same nodes.
struct PicardMesh {
    /// All node radii, ascending, panel by panel.
    nodes: Vec<f64>,
    /// Full-panel quadrature weights (reference interval [-1, 1]).
    full_w: Vec<f64>,
    /// partial[j][q]: integral of Lagrange basis q from -1 to node j.
    partial: Vec<Vec<f64>>,
    half_width: f64,
    panels: usize,
    order: usize,
}

impl PicardMesh {
    fn build(r_start: f64, delta: f64, panels: usize, order: usize) -> Result<PicardMesh> {
        let (ref_nodes, full_w) = gauss_legendre(order)?;
        let partial = partial_interval_weights(&ref_nodes, -1.0)?;
        let panels = panels.max(1);
        let h = delta / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = r_start + (p as f64 + 0.5) * h;
            for x in &ref_nodes {
                nodes.push(mid + 0.5 * h * x);
            }
        }
        Ok(PicardMesh {
            nodes,
            full_w,
            partial,
            half_width: 0.5 * h,
            panels,
            order,
        })
    }

    /// Apply the integral operator: given derivatives at all nodes, return
    /// the cumulative integrals from r_start to each node, and to the right
    /// endpoint.
    fn cumulative(
        &self,
        derivs: &[Vec<Complex64>],
    ) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
        let width = derivs[0].len();
        let mut out = vec![vec![Complex64::ZERO; width]; self.nodes.len()];
        let mut prefix = vec![Complex64::ZERO; width];
        for p in 0..self.panels {
            for j in 0..self.order {
                let row = &mut out[p * self.order + j];
                for q in 0..self.order {
                    let w = self.half_width * self.partial[j][q];
                    let d = &derivs[p * self.order + q];
                    for (o, dv) in row.iter_mut().zip(d) {
                        *o += w * dv;
                    }
                }
                for (o, pv) in row.iter_mut().zip(&prefix) {
                    *o += pv;
                }
            }
            for q in 0..self.order {
                let w = self.half_width * self.full_w[q];
                let d = &derivs[p * self.order + q];
                for (pv, dv) in prefix.iter_mut().zip(d) {
                    *pv += w * dv;
                }
            }
        }
        (out, prefix)
    }
}

/// One certified contraction step from (r_start, u_start).
///
/// The step size comes from `contraction_delta` with C_M estimated by
/// `lipschitz_cm`; the iteration then runs the integral operator on the
/// composite quadrature mesh to the configured tolerance. When an iterate
/// escapes the ball, the step is halved and retried (the contraction bound
/// only controls iterates that start inside the ball).
pub fn picard_solve(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r_start: f64,
    u_start: &PhaseState,
    config: &SolverConfig,
) -> Result<FlowProfile> {
    config.validate()?;
    let m_ball = config.ball_radius;
    let start_norm = u_start.sup_norm();
    if start_norm > m_ball {
        return Err(Error::BallEscape {
            norm: start_norm,
            ball: m_ball,
        });
    }
    let (_, r_hi) = background.domain();
    let room = r_hi - r_start;
    if room <= 0.0 {
        return Err(Error::OutOfDomain {
            r: r_start,
            lo: background.domain().0,
            hi: r_hi,
        });
    }
    let probe = room.min(1.0);
    let c_m = lipschitz_cm(
        model,
        charges,
        background,
        r_start,
        r_start + probe,
        m_ball,
        config.lipschitz_samples,
        config.lipschitz_seed,
    )?;
    let j0 = rhs(model, charges, background, r_start, u_start)?.sup_norm();
    let mut delta = contraction_delta(c_m, m_ball, j0)?.min(probe);
    // Keep a strict margin below 1 so the decay of the iterates is visible.
    let mut halvings = 0;
    while c_m * delta > 0.9 {
        delta *= 0.5;
        halvings += 1;
        if halvings > 20 {
            return Err(Error::NoContraction(format!(
                "contraction factor {:.3} not below 1 after 20 halvings",
                c_m * delta
            )));
        }
    }

    loop {
        match picard_iterate(model, charges, background, r_start, u_start, delta, c_m, config) {
            Err(Error::BallEscape { .. }) if halvings < 20 => {
                delta *= 0.5;
                halvings += 1;
            }
            other => return other,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn picard_iterate(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r_start: f64,
    u_start: &PhaseState,
    delta: f64,
    c_m: f64,
    config: &SolverConfig,
) -> Result<FlowProfile> {
    let mesh = PicardMesh::build(
        r_start,
        delta,
        config.quadrature_panels,
        config.quadrature_order,
    )?;
    let u0 = u_start.to_vec();
    let width = u0.len();
    let mut current: Vec<Vec<Complex64>> = vec![u0.clone(); mesh.nodes.len()];
    let mut iterate_distances = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_picard_iters {
        let mut derivs = Vec::with_capacity(mesh.nodes.len());
        for (t, u) in mesh.nodes.iter().zip(&current) {
            let state = PhaseState::from_vec(u);
            derivs.push(rhs(model, charges, background, *t, &state)?.to_vec());
        }
        let (cums, _) = mesh.cumulative(&derivs);
        let mut next = Vec::with_capacity(mesh.nodes.len());
        let mut dist: f64 = 0.0;
        for (cum, old) in cums.iter().zip(&current) {
            let mut row = Vec::with_capacity(width);
            for (base, inc) in u0.iter().zip(cum) {
                row.push(base + inc);
            }
            let norm = sup_complex(&row);
            if norm > config.ball_radius {
                return Err(Error::BallEscape {
                    norm,
                    ball: config.ball_radius,
                });
            }
            dist = dist.max(sup_distance(&row, old));
            next.push(row);
        }
        current = next;
        iterate_distances.push(dist);
        if dist <= config.fixpoint_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::MaxIters {
            iters: config.max_picard_iters,
            last: *iterate_distances.last().unwrap_or(&f64::NAN),
        });
    }
    // Endpoint value from the converged derivatives.
    let mut derivs = Vec::with_capacity(mesh.nodes.len());
    for (t, u) in mesh.nodes.iter().zip(&current) {
        let state = PhaseState::from_vec(u);
        derivs.push(rhs(model, charges, background, *t, &state)?.to_vec());
    }
    let (_, total) = mesh.cumulative(&derivs);
    let endpoint: Vec<Complex64> = u0.iter().zip(&total).map(|(b, i)| b + i).collect();

    let mut r_samples = Vec::with_capacity(mesh.nodes.len() + 2);
    let mut states = Vec::with_capacity(mesh.nodes.len() + 2);
    r_samples.push(r_start);
    states.push(u_start.clone());
    for (t, u) in mesh.nodes.iter().zip(&current) {
        r_samples.push(*t);
        states.push(PhaseState::from_vec(u));
    }
    r_samples.push(r_start + delta);
    states.push(PhaseState::from_vec(&endpoint));

    let factor = c_m * delta;
    Ok(FlowProfile {
        method: Method::Picard,
        r_samples,
        states,
        delta_used: delta,
        contraction_factor: factor,
        segments: vec![PicardSegment {
            r_start,
            delta,
            c_m,
            contraction_factor: factor,
            iterate_distances,
        }],
    })
}

/// Chain certified contraction steps until r_end (or the step budget runs
/// out), re-estimating the Lipschitz constant per step.
pub fn picard_chain(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r_start: f64,
    u_start: &PhaseState,
    r_end: f64,
    max_steps: usize,
    config: &SolverConfig,
) -> Result<FlowProfile> {
    let mut r = r_start;
    let mut u = u_start.clone();
    let mut r_samples = vec![r_start];
    let mut states = vec![u_start.clone()];
    let mut segments = Vec::new();
    let mut factor: f64 = 0.0;
    for _ in 0..max_steps {
        if r >= r_end {
            break;
        }
        let step = picard_solve(model, charges, background, r, &u, config)?;
        factor = factor.max(step.contraction_factor);
        segments.extend(step.segments);
        // Skip the duplicated junction sample.
        r_samples.extend_from_slice(&step.r_samples[1..]);
        states.extend_from_slice(&step.states[1..]);
        r = *step.r_samples.last().unwrap();
        u = step.states.last().unwrap().clone();
    }
    if r < r_end {
        return Err(Error::NoConvergence(format!(
            "chained steps stalled at r = {r} before reaching {r_end}"
        )));
    }
    Ok(FlowProfile {
        method: Method::Picard,
        r_samples,
        states,
        delta_used: r - r_start,
        contraction_factor: factor,
        segments,
    })
}

/// Independent residual of the fixed-point property: re-evaluate the
/// integral operator along the profile with a finer sub-quadrature
/// (interpolating the profile on each panel's own nodes) and report
/// sup |u - K(u)| over the profile samples.
pub fn fixed_point_residual(
    profile: &FlowProfile,
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    config: &SolverConfig,
) -> Result<f64> {
    if profile.method != Method::Picard || profile.segments.len() != 1 {
        return Err(Error::ProfileGap(
            "fixed-point residual needs a single certified step".into(),
        ));
    }
    let order = config.quadrature_order;
    let panels = config.quadrature_panels;
    let n_nodes = panels * order;
    if profile.r_samples.len() != n_nodes + 2 {
        return Err(Error::ProfileGap(
            "profile layout does not match the quadrature mesh".into(),
        ));
    }
    let u0 = profile.states[0].to_vec();
    // Lagrange interpolation of the state within panel p.
    let node_r = &profile.r_samples[1..=n_nodes];
    let node_u: Vec<Vec<Complex64>> = profile.states[1..=n_nodes]
        .iter()
        .map(|s| s.to_vec())
        .collect();
    let interp = |p: usize, t: f64| -> Vec<Complex64> {
        let rs = &node_r[p * order..(p + 1) * order];
        let us = &node_u[p * order..(p + 1) * order];
        let mut acc = vec![Complex64::ZERO; u0.len()];
        for q in 0..order {
            let mut l = 1.0;
            for m in 0..order {
                if m != q {
                    l *= (t - rs[m]) / (rs[q] - rs[m]);
                }
            }
            for (a, v) in acc.iter_mut().zip(&us[q]) {
                *a += l * v;
            }
        }
        acc
    };
    // Cumulative integral of rhs(t, u(t)) by fine composite quadrature.
    let (sub_nodes, sub_w) = gauss_legendre(8)?;
    let sub_panels = 4;
    let r_start = profile.r_samples[0];
    let h_panel = (profile.r_samples[n_nodes + 1] - r_start) / panels as f64;
    let mut worst: f64 = 0.0;
    let mut prefix = vec![Complex64::ZERO; u0.len()];
    let mut next_sample = 1; // profile sample index to check next
    for p in 0..panels {
        let panel_lo = r_start + p as f64 * h_panel;
        for sp in 0..sub_panels {
            let lo = panel_lo + sp as f64 * h_panel / sub_panels as f64;
            let hi = lo + h_panel / sub_panels as f64;
            // Check any profile samples inside (lo, hi] against the
            // cumulative value at their radius: integrate up to the sample.
            while next_sample <= n_nodes + 1 {
                let r_t = profile.r_samples[next_sample];
                if r_t > hi + 1e-14 * hi.abs().max(1.0) {
                    break;
                }
                let mut cum = prefix.clone();
                add_quad(&mut cum, lo, r_t, &sub_nodes, &sub_w, |t| {
                    rhs(
                        model,
                        charges,
                        background,
                        t,
                        &PhaseState::from_vec(&interp(p, t)),
                    )
                    .map(|s| s.to_vec())
                })?;
                let k_val: Vec<Complex64> =
                    u0.iter().zip(&cum).map(|(b, i)| b + i).collect();
                let u_val = profile.states[next_sample].to_vec();
                worst = worst.max(sup_distance(&k_val, &u_val));
                next_sample += 1;
            }
            add_quad(&mut prefix, lo, hi, &sub_nodes, &sub_w, |t| {
                rhs(
                    model,
                    charges,
                    background,
                    t,
                    &PhaseState::from_vec(&interp(p, t)),
                )
                .map(|s| s.to_vec())
            })?;
        }
    }
    Ok(worst)
}

/// Accumulate int_lo^hi f(t) dt into acc with a single Gauss-Legendre panel.
fn add_quad<F>(
    acc: &mut [Complex64],
    lo: f64,
    hi: f64,
    nodes: &[f64],
    weights: &[f64],
    mut f: F,
) -> Result<()>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    if hi <= lo {
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    for (x, w) in nodes.iter().zip(weights) {
        let v = f(mid + half * x)?;
        for (a, vi) in acc.iter_mut().zip(&v) {
            *a += (w * half) * vi;
        }
    }
    Ok(())
}

// Dormand-Prince 4(5) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    0.025,
];

/// Adaptive Dormand-Prince integration from r_start to r_end, recording the
/// state at every radius in `targets` (which must be sorted in the direction
/// of integration and lie inside [r_start, r_end]). Steps are clamped so the
/// integrator lands exactly on each target — the recorded states carry no
/// interpolation error.
pub fn rk_solve(
    model: &ModelSpec,
    charges: &Charges,
    background: &Background,
    r_start: f64,
    u_start: &PhaseState,
    r_end: f64,
    targets: &[f64],
    config: &SolverConfig,
) -> Result<FlowProfile> {
    config.validate()?;
    let dir = (r_end - r_start).signum();
    if dir == 0.0 {
        return Err(Error::InvalidBackground(
            "empty integration interval".into(),
        ));
    }
    let inside = |r: f64| (r - r_start) * dir >= -1e-12 && (r_end - r) * dir >= -1e-12;
    for &t in targets {
        if !inside(t) {
            return Err(Error::OutOfDomain {
                r: t,
                lo: r_start.min(r_end),
                hi: r_start.max(r_end),
            });
        }
    }
    for w in targets.windows(2) {
        if (w[1] - w[0]) * dir <= 0.0 {
            return Err(Error::ProfileGap(
                "sample targets must be strictly monotone in the integration direction".into(),
            ));
        }
    }

    let mut y = u_start.to_vec();
    let mut t = r_start;
    let mut h = dir * 1e-3 * (r_end - r_start).abs().max(1e-6);
    let mut r_samples = Vec::with_capacity(targets.len());
    let mut states = Vec::with_capacity(targets.len());
    let mut next_target = 0;
    let record_eps = 1e-12;

    let f = |t: f64, y: &[Complex64]| -> Result<Vec<Complex64>> {
        rhs(model, charges, background, t, &PhaseState::from_vec(y)).map(|s| s.to_vec())
    };

    // Record targets equal to the start point.
    while next_target < targets.len()
        && (targets[next_target] - t).abs() <= record_eps * t.abs().max(1.0)
    {
        r_samples.push(targets[next_target]);
        states.push(PhaseState::from_vec(&y));
        next_target += 1;
    }

    let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
    while (r_end - t) * dir > record_eps * t.abs().max(1.0) {
        // Clamp to the next event: target or endpoint.
        let stop = if next_target < targets.len() {
            targets[next_target]
        } else {
            r_end
        };
        if (t + h - stop) * dir > 0.0 {
            h = stop - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { r: t, h });
        }

        k.clear();
        k.push(f(t, &y)?);
        let mut failed = false;
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = DP_A[s - 1][j];
                if a != 0.0 {
                    for (yv, kv) in ys.iter_mut().zip(kj) {
                        *yv += h * a * kv;
                    }
                }
            }
            match f(t + DP_C[s] * h, &ys) {
                Ok(ks) => k.push(ks),
                Err(Error::OutOfDomain { .. }) | Err(Error::HorizonSingularity { .. }) => {
                    // A stage point left the domain: retry with a smaller step.
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            h *= 0.5;
            continue;
        }

        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for (j, kj) in k.iter().enumerate() {
            for ((y5v, y4v), kv) in y5.iter_mut().zip(y4.iter_mut()).zip(kj) {
                *y5v += h * DP_B5[j] * kv;
                *y4v += h * DP_B4[j] * kv;
            }
        }
        // Scaled sup-norm error over realified components.
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let sc_re = config.rk_abs_tol
                + config.rk_rel_tol * y[i].re.abs().max(y5[i].re.abs());
            let sc_im = config.rk_abs_tol
                + config.rk_rel_tol * y[i].im.abs().max(y5[i].im.abs());
            err = err
                .max((y5[i].re - y4[i].re).abs() / sc_re)
                .max((y5[i].im - y4[i].im).abs() / sc_im);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            while next_target < targets.len()
                && (targets[next_target] - t).abs() <= record_eps * t.abs().max(1.0)
            {
                r_samples.push(targets[next_target]);
                states.push(PhaseState::from_vec(&y));
                next_target += 1;
            }
        }
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= grow;
    }

    Ok(FlowProfile {
        method: Method::Rk,
        r_samples,
        states,
        delta_used: (r_end - r_start).abs(),
        contraction_factor: 0.0,
        segments: Vec::new(),
    })
}

/// Boundary data from the logarithmic near-horizon expansion at r0 > r_h:
///
///   phi(r0) = phi_h - ell_inv ln(r0 - r_h) conj(w),
///   pi(r0)  = -ell_inv conj(w) / (r0 - r_h),
///
/// with w = Ginv grad V_eff evaluated at phi_h.
pub fn near_horizon_seed(
    model: &ModelSpec,
    charges: &Charges,
    phi_h: &FieldPoint,
    r_h: f64,
    r0: f64,
) -> Result<PhaseState> {
    if r0 <= r_h {
        return Err(Error::HorizonSingularity { r: r0, r_h });
    }
    let v_bh = model.bh_potential(phi_h, charges)?;
    let v = model.scalar_potential(phi_h)?;
    let ell_inv = crate::background::attractor_ell_inv(v_bh, v)?;
    let grad_eff = model.effective_potential_grad(phi_h, charges)?;
    let ginv = model.kahler.inverse_metric(phi_h)?;
    let w = &ginv * DVector::from_vec(grad_eff);
    let x = r0 - r_h;
    let lnx = x.ln();
    let phi: Vec<Complex64> = phi_h
        .iter()
        .zip(w.iter())
        .map(|(p, wi)| p - ell_inv * lnx * wi.conj())
        .collect();
    let pi: Vec<Complex64> = w.iter().map(|wi| -ell_inv * wi.conj() / x).collect();
    Ok(PhaseState {
        phi: FieldPoint::new(phi),
        pi,
    })
}

/// Result of fitting a large-radius profile in the basis
/// {1, 1/r, P(r), Q(r)}.
///
/// The P and Q columns are normalised to unit max-abs over the fitted
/// samples before solving, so `p_coeff` and `q_coeff` are contribution
/// amplitudes: directly comparable against the fit noise.
#[derive(Debug, Clone)]
pub struct AsymptoticFit {
    pub phi0: FieldPoint,
    pub sigma: Vec<Complex64>,
    pub p_coeff: Vec<Complex64>,
    pub q_coeff: Vec<Complex64>,
    /// Sup norm of the fit residual over samples and components.
    pub fit_residual: f64,
    /// Condition number of the (column-scaled) design matrix.
    pub condition: f64,
}

/// Least-squares fit of phi(r) = phi0 + Sigma/r + cP P(r) + cQ Q(r) per
/// field component over the profile samples.
pub fn asymptotic_match(
    profile: &FlowProfile,
    model: &ModelSpec,
    background: &Background,
) -> Result<AsymptoticFit> {
    let n_s = profile.r_samples.len();
    if n_s < 6 {
        return Err(Error::ProfileGap(format!(
            "need at least 6 samples for a 4-parameter fit, got {n_s}"
        )));
    }
    let (p_vals, q_vals) = pq_profiles(background, &profile.r_samples)?;
    let p_scale = p_vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let q_scale = q_vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut design = DMatrix::zeros(n_s, 4);
    for (i, &r) in profile.r_samples.iter().enumerate() {
        design[(i, 0)] = 1.0;
        design[(i, 1)] = 1.0 / r;
        design[(i, 2)] = p_vals[i] / p_scale;
        design[(i, 3)] = q_vals[i] / q_scale;
    }
    let svd = design.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if condition > 1e10 {
        return Err(Error::IllConditionedFit { cond: condition });
    }

    let n_f = model.n_fields();
    let mut phi0 = Vec::with_capacity(n_f);
    let mut sigma = Vec::with_capacity(n_f);
    let mut p_coeff = Vec::with_capacity(n_f);
    let mut q_coeff = Vec::with_capacity(n_f);
    let mut residual: f64 = 0.0;
    for i in 0..n_f {
        let rhs_re = DVector::from_fn(n_s, |s, _| profile.states[s].phi[i].re);
        let rhs_im = DVector::from_fn(n_s, |s, _| profile.states[s].phi[i].im);
        let sol_re = svd.solve(&rhs_re, 0.0).map_err(|e| {
            Error::NoConvergence(format!("least-squares solve failed: {e}"))
        })?;
        let sol_im = svd.solve(&rhs_im, 0.0).map_err(|e| {
            Error::NoConvergence(format!("least-squares solve failed: {e}"))
        })?;
        let coeff = |k: usize| Complex64::new(sol_re[k], sol_im[k]);
        phi0.push(coeff(0));
        sigma.push(coeff(1));
        p_coeff.push(coeff(2));
        q_coeff.push(coeff(3));
        for s in 0..n_s {
            let fitted = coeff(0)
                + coeff(1) * design[(s, 1)]
                + coeff(2) * design[(s, 2)]
                + coeff(3) * design[(s, 3)];
            let d = profile.states[s].phi[i] - fitted;
            residual = residual.max(d.re.abs().max(d.im.abs()));
        }
    }
    Ok(AsymptoticFit {
        phi0: FieldPoint::new(phi0),
        sigma,
        p_coeff,
        q_coeff,
        fit_residual: residual,
        condition,
    })
}

/// n log-spaced radii covering [lo, hi].
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// n uniformly spaced radii covering [lo, hi].
pub fn linear_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahler::KahlerModel;
    use crate::poly::{Poly, Term};
    use crate::potentials::{GaugeCouplings, Superpotential};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Flat K, constant W = w0, f = 1, charges (0, 1): the standard bench
    /// model.
    fn bench_model(w0: f64) -> ModelSpec {
        ModelSpec {
            kahler: KahlerModel::flat(1),
            superpotential: Superpotential::constant(1, c(w0, 0.0)),
            couplings: GaugeCouplings::diagonal_constant(1, 1, c(1.0, 0.0)),
            charges: Charges::new(vec![0.0], vec![1.0]),
        }
    }

    /// f = 1 + beta phi^2 so the black-hole potential has a real gradient.
    fn coupled_model(w0: f64, beta: f64) -> ModelSpec {
        let f = Poly::new(
            1,
            vec![
                Term {
                    exponents: vec![0],
                    coeff: c(1.0, 0.0),
                },
                Term {
                    exponents: vec![2],
                    coeff: c(beta, 0.0),
                },
            ],
        );
        ModelSpec {
            kahler: KahlerModel::flat(1),
            superpotential: Superpotential::constant(1, c(w0, 0.0)),
            couplings: GaugeCouplings::new(1, vec![f]),
            charges: Charges::new(vec![0.0], vec![1.0]),
        }
    }

    fn flat_bg() -> Background {
        Background::asymptotic(0.0, 0.0, 0.0, 1.0, 60.0).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_simultaneous_critical_point() {
        // phi = 0 is critical for V (flat, constant W) and V_BH (constant f).
        let m = bench_model(0.1);
        let bg = flat_bg();
        let state = PhaseState::frozen(FieldPoint::zero(1));
        let d = rhs(&m, &m.charges, &bg, 2.0, &state).unwrap();
        assert_eq!(d.sup_norm(), 0.0);
    }

    #[test]
    fn rhs_matches_hand_assembly_for_one_flat_field() {
        let m = coupled_model(0.1, 0.5);
        let bg = flat_bg();
        let phi = FieldPoint::new(vec![c(0.3, -0.2)]);
        let pi = vec![c(0.05, 0.1)];
        let state = PhaseState::new(phi.clone(), pi.clone());
        let r = 2.5;
        let d = rhs(&m, &m.charges, &bg, r, &state).unwrap();
        assert_eq!(d.phi[0], pi[0]);
        let coeff = bg.coefficients(r).unwrap();
        let dvbh = m.bh_potential_grad(&phi, &m.charges).unwrap()[0];
        let dv = m.scalar_potential_grad(&phi).unwrap()[0];
        let want = -coeff.f * pi[0] + (coeff.g * dvbh + coeff.h * dv).conj();
        assert!((d.pi[0] - want).norm() < 1e-15);
    }

    #[test]
    fn rhs_commutes_with_conjugation_for_real_models() {
        let m = coupled_model(0.1, 0.5);
        assert!(m.has_real_coefficients());
        let bg = flat_bg();
        let state = PhaseState::new(
            FieldPoint::new(vec![c(0.3, -0.2)]),
            vec![c(0.05, 0.1)],
        );
        let d = rhs(&m, &m.charges, &bg, 2.0, &state).unwrap();
        let d_conj = rhs(&m, &m.charges, &bg, 2.0, &state.conj()).unwrap();
        assert!(d.conj().distance(&d_conj) < 1e-15);
    }

    #[test]
    fn contraction_delta_reference_values() {
        assert_eq!(contraction_delta(2.0, 1.0, 3.0).unwrap(), 0.2);
        assert_eq!(contraction_delta(1.0, 1.0, 0.0).unwrap(), 1.0);
        // Monotone decrease in the Lipschitz constant.
        let mut last = f64::INFINITY;
        for cm in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let d = contraction_delta(cm, 1.0, 3.0).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(contraction_delta(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lipschitz_tracks_friction_bound_for_kinetic_flow() {
        // W = 0, zero charges: rhs = (pi, -F pi); the true Lipschitz
        // constant over the interval is max(1, sup F).
        let m = ModelSpec {
            kahler: KahlerModel::flat(1),
            superpotential: Superpotential::zero(1),
            couplings: GaugeCouplings::diagonal_constant(1, 1, c(1.0, 0.0)),
            charges: Charges::new(vec![0.0], vec![0.0]),
        };
        let bg = flat_bg();
        let c_m = lipschitz_cm(&m, &m.charges, &bg, 1.0, 2.0, 1.0, 400, 3).unwrap();
        let sup_f: f64 = 2.0; // F = 2/r on [1, 2]
        let truth = sup_f.max(1.0);
        assert!(c_m >= truth * 0.9, "c_m = {c_m}");
        assert!(c_m <= 2.0 * (sup_f + 1.0), "c_m = {c_m}");
    }

    #[test]
    fn picard_holds_critical_point_constant() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::frozen(FieldPoint::zero(1));
        let profile =
            picard_solve(&m, &m.charges, &bg, 2.0, &u0, &SolverConfig::default()).unwrap();
        assert!(profile.contraction_factor < 1.0);
        for s in &profile.states {
            assert!(s.distance(&u0) <= 1e-14);
        }
    }

    #[test]
    fn picard_iterates_decay_geometrically() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let profile =
            picard_solve(&m, &m.charges, &bg, 1.5, &u0, &SolverConfig::default()).unwrap();
        let seg = &profile.segments[0];
        assert!(profile.contraction_factor < 1.0);
        assert!(seg.iterate_distances.len() >= 3);
        let floor = 1e-13 * u0.sup_norm().max(1.0);
        for w in seg.iterate_distances.windows(2) {
            if w[0] <= floor {
                break;
            }
            assert!(
                w[1] <= profile.contraction_factor * w[0],
                "distances {} -> {} vs factor {}",
                w[0],
                w[1],
                profile.contraction_factor
            );
        }
    }

    #[test]
    fn picard_agrees_with_rk_on_certified_interval() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let cfg = SolverConfig::default();
        let picard = picard_solve(&m, &m.charges, &bg, 1.5, &u0, &cfg).unwrap();
        let r_end = *picard.r_samples.last().unwrap();
        let rk = rk_solve(
            &m,
            &m.charges,
            &bg,
            1.5,
            &u0,
            r_end,
            &picard.r_samples,
            &cfg,
        )
        .unwrap();
        let dist = picard.sup_distance(&rk).unwrap();
        assert!(dist <= 1e-8, "methods disagree by {dist}");
    }

    #[test]
    fn fixed_point_residual_is_within_tolerance_budget() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let cfg = SolverConfig::default();
        let profile = picard_solve(&m, &m.charges, &bg, 1.5, &u0, &cfg).unwrap();
        let res = fixed_point_residual(&profile, &m, &m.charges, &bg, &cfg).unwrap();
        assert!(res <= 2.0 * cfg.fixpoint_tol, "residual {res}");
    }

    #[test]
    fn picard_chain_covers_long_interval() {
        let m = bench_model(0.05);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.2, 0.1)]), vec![c(0.0, 0.0)]);
        // A ball sized to the trajectory keeps the Lipschitz constant (and
        // hence the number of certified steps) small.
        let mut cfg = SolverConfig::default();
        cfg.ball_radius = 0.6;
        let chain =
            picard_chain(&m, &m.charges, &bg, 2.0, &u0, 3.0, 50, &cfg).unwrap();
        assert!(*chain.r_samples.last().unwrap() >= 3.0);
        assert!(chain.contraction_factor < 1.0);
        // Cross-check the chained endpoint against the independent integrator.
        let r_end = *chain.r_samples.last().unwrap();
        let rk = rk_solve(&m, &m.charges, &bg, 2.0, &u0, r_end, &[r_end], &cfg).unwrap();
        let d = chain.states.last().unwrap().distance(&rk.states[0]);
        assert!(d <= 1e-8, "chain vs rk endpoint: {d}");
    }

    #[test]
    fn rk_keeps_constant_solution_constant() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::frozen(FieldPoint::zero(1));
        let cfg = SolverConfig::default();
        let targets = linear_spaced(2.0, 10.0, 9);
        let p = rk_solve(&m, &m.charges, &bg, 2.0, &u0, 10.0, &targets, &cfg).unwrap();
        for s in &p.states {
            assert!(s.sup_norm() <= cfg.rk_abs_tol * 10.0);
        }
    }

    #[test]
    fn rk_halving_tolerances_converges() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let mut coarse = SolverConfig::default();
        coarse.rk_rel_tol = 1e-8;
        coarse.rk_abs_tol = 1e-10;
        let mut fine = coarse;
        fine.rk_rel_tol = 5e-9;
        fine.rk_abs_tol = 5e-11;
        let pc = rk_solve(&m, &m.charges, &bg, 1.5, &u0, 4.0, &[4.0], &coarse).unwrap();
        let pf = rk_solve(&m, &m.charges, &bg, 1.5, &u0, 4.0, &[4.0], &fine).unwrap();
        let d = pc.states[0].distance(&pf.states[0]);
        assert!(d < 10.0 * 5e-9, "endpoint shift {d}");
    }

    #[test]
    fn rk_round_trip_returns_to_start() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let cfg = SolverConfig::default();
        let fwd = rk_solve(&m, &m.charges, &bg, 1.5, &u0, 5.0, &[5.0], &cfg).unwrap();
        let back = rk_solve(
            &m,
            &m.charges,
            &bg,
            5.0,
            &fwd.states[0],
            1.5,
            &[1.5],
            &cfg,
        )
        .unwrap();
        let d = back.states[0].distance(&u0);
        assert!(d < 1e-7, "round trip drift {d}");
    }

    #[test]
    fn near_horizon_seed_reduces_at_attractor_point() {
        // phi = 0 is a critical point of V_eff for the coupled model.
        let m = coupled_model(0.02, 0.001);
        let seed = near_horizon_seed(&m, &m.charges, &FieldPoint::zero(1), 1.0, 1.0001).unwrap();
        assert_eq!(seed.phi[0], Complex64::ZERO);
        assert_eq!(seed.pi[0], Complex64::ZERO);
    }

    #[test]
    fn near_horizon_seed_matches_closed_form() {
        let m = coupled_model(0.02, 0.001);
        let phi_h = FieldPoint::new(vec![c(0.3, 0.0)]);
        let (r_h, r0) = (1.0, 1.0 + 1e-4);
        let seed = near_horizon_seed(&m, &m.charges, &phi_h, r_h, r0).unwrap();
        let v_bh = m.bh_potential(&phi_h, &m.charges).unwrap();
        let v = m.scalar_potential(&phi_h).unwrap();
        let ell_inv = crate::background::attractor_ell_inv(v_bh, v).unwrap();
        let w = m.effective_potential_grad(&phi_h, &m.charges).unwrap()[0]; // flat metric
        let x: f64 = 1e-4;
        let want_phi = phi_h[0] - ell_inv * x.ln() * w.conj();
        let want_pi = -ell_inv * w.conj() / x;
        assert!((seed.phi[0] - want_phi).norm() < 1e-15);
        assert!((seed.pi[0] - want_pi).norm() < 1e-12 * want_pi.norm());
        assert!(matches!(
            near_horizon_seed(&m, &m.charges, &phi_h, 1.0, 0.9),
            Err(Error::HorizonSingularity { .. })
        ));
    }

    #[test]
    fn log_law_slope_is_reproduced_near_horizon() {
        let m = coupled_model(0.02, 0.001);
        let phi_h = FieldPoint::new(vec![c(0.3, 0.0)]);
        let r_h = 1.0;
        let (bg, data) = crate::background::near_horizon_from_attractor(
            &m, &m.charges, &phi_h, r_h, 0.5,
        )
        .unwrap();
        let x0 = 1e-4 * r_h;
        let x1 = 1e-3 * r_h;
        let seed = near_horizon_seed(&m, &m.charges, &phi_h, r_h, r_h + x0).unwrap();
        let targets: Vec<f64> = log_spaced(x0, x1, 25).iter().map(|x| r_h + x).collect();
        let cfg = SolverConfig::default();
        let prof = rk_solve(
            &m,
            &m.charges,
            &bg,
            r_h + x0,
            &seed,
            r_h + x1,
            &targets,
            &cfg,
        )
        .unwrap();
        // Regress phi against ln(r - r_h).
        let xs: Vec<f64> = prof.r_samples.iter().map(|r| (r - r_h).ln()).collect();
        let ys: Vec<Complex64> = prof.states.iter().map(|s| s.phi[0]).collect();
        let n = xs.len() as f64;
        let xbar = xs.iter().sum::<f64>() / n;
        let ybar = ys.iter().sum::<Complex64>() / n;
        let mut num = Complex64::ZERO;
        let mut den = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            num += (y - ybar) * (x - xbar);
            den += (x - xbar) * (x - xbar);
        }
        let slope = num / den;
        let w = m.effective_potential_grad(&phi_h, &m.charges).unwrap()[0];
        let want = -data.ell_inv * w.conj();
        let rel = (slope - want).norm() / want.norm();
        assert!(rel < 0.01, "slope {slope} vs {want} (rel {rel})");
    }

    #[test]
    fn attractor_seed_stays_put_on_near_horizon_background() {
        let m = coupled_model(0.02, 0.001);
        let phi_h = FieldPoint::zero(1);
        let r_h = 1.0;
        let (bg, _) = crate::background::near_horizon_from_attractor(
            &m, &m.charges, &phi_h, r_h, 0.5,
        )
        .unwrap();
        let r0 = r_h * (1.0 + 1e-4);
        let seed = near_horizon_seed(&m, &m.charges, &phi_h, r_h, r0).unwrap();
        let cfg = SolverConfig::default();
        let prof = picard_solve(&m, &m.charges, &bg, r0, &seed, &cfg).unwrap();
        for s in &prof.states {
            assert!(
                (s.phi[0] - phi_h[0]).norm() <= 1e-8,
                "drift {}",
                (s.phi[0] - phi_h[0]).norm()
            );
        }
    }

    #[test]
    fn synthetic_tail_fit_recovers_scalar_charge() {
        let m = bench_model(0.0);
        let bg = Background::asymptotic(0.0, 0.0, 0.0, 10.0, 200.0).unwrap();
        let sigma = c(0.35, -0.2);
        let phi0 = c(1.1, 0.4);
        let rs = log_spaced(20.0, 150.0, 40);
        let states: Vec<PhaseState> = rs
            .iter()
            .map(|r| {
                PhaseState::new(
                    FieldPoint::new(vec![phi0 + sigma / r]),
                    vec![-sigma / (r * r)],
                )
            })
            .collect();
        let profile = FlowProfile {
            method: Method::Rk,
            r_samples: rs.clone(),
            states,
            delta_used: 130.0,
            contraction_factor: 0.0,
            segments: Vec::new(),
        };
        let fit = asymptotic_match(&profile, &m, &bg).unwrap();
        assert!((fit.sigma[0] - sigma).norm() < 1e-10);
        assert!((fit.phi0[0] - phi0).norm() < 1e-10);
        assert!(fit.fit_residual < 1e-10);
    }

    #[test]
    fn constant_profile_fits_with_zero_charge() {
        let m = bench_model(0.0);
        let bg = Background::asymptotic(0.0, 0.0, 0.0, 10.0, 200.0).unwrap();
        let rs = linear_spaced(20.0, 150.0, 20);
        let phi0 = c(0.77, -0.11);
        let states: Vec<PhaseState> = rs
            .iter()
            .map(|_| PhaseState::frozen(FieldPoint::new(vec![phi0])))
            .collect();
        let profile = FlowProfile {
            method: Method::Rk,
            r_samples: rs,
            states,
            delta_used: 130.0,
            contraction_factor: 0.0,
            segments: Vec::new(),
        };
        let fit = asymptotic_match(&profile, &m, &bg).unwrap();
        assert!((fit.phi0[0] - phi0).norm() < 1e-12);
        assert!(fit.sigma[0].norm() < 1e-12);
        assert!(fit.p_coeff[0].norm() < 1e-12);
        assert!(fit.q_coeff[0].norm() < 1e-12);
    }

    #[test]
    fn noisy_fit_recovers_charge_and_null_correction_terms() {
        let m = bench_model(0.0);
        let bg = Background::asymptotic(0.0, 0.0, 0.0, 10.0, 200.0).unwrap();
        let sigma = c(0.5, 0.25);
        let phi0 = c(1.0, -0.3);
        let rs = log_spaced(20.0, 150.0, 60);
        let mut halton = Halton::new(2, 7);
        let noise = 1e-8;
        let states: Vec<PhaseState> = rs
            .iter()
            .map(|r| {
                let x = halton.next_point();
                let eps = c(
                    noise * (2.0 * x[0] - 1.0),
                    noise * (2.0 * x[1] - 1.0),
                );
                PhaseState::new(
                    FieldPoint::new(vec![phi0 + sigma / r + eps]),
                    vec![-sigma / (r * r)],
                )
            })
            .collect();
        let profile = FlowProfile {
            method: Method::Rk,
            r_samples: rs,
            states,
            delta_used: 130.0,
            contraction_factor: 0.0,
            segments: Vec::new(),
        };
        let fit = asymptotic_match(&profile, &m, &bg).unwrap();
        let rel = (fit.sigma[0] - sigma).norm() / sigma.norm();
        assert!(rel <= 1e-4, "sigma rel error {rel}");
        assert!(fit.p_coeff[0].norm() <= 10.0 * noise, "P amplitude {}", fit.p_coeff[0].norm());
        assert!(fit.q_coeff[0].norm() <= 10.0 * noise, "Q amplitude {}", fit.q_coeff[0].norm());
    }

    #[test]
    fn narrow_sample_window_is_ill_conditioned() {
        let m = bench_model(0.0);
        let bg = Background::asymptotic(0.0, 0.0, 0.0, 10.0, 2000.0).unwrap();
        let rs = linear_spaced(1000.0, 1000.001, 8);
        let states: Vec<PhaseState> = rs
            .iter()
            .map(|_| PhaseState::frozen(FieldPoint::new(vec![c(1.0, 0.0)])))
            .collect();
        let profile = FlowProfile {
            method: Method::Rk,
            r_samples: rs,
            states,
            delta_used: 0.001,
            contraction_factor: 0.0,
            segments: Vec::new(),
        };
        assert!(matches!(
            asymptotic_match(&profile, &m, &bg),
            Err(Error::IllConditionedFit { .. })
        ));
    }

    #[test]
    fn rk_profile_fit_has_small_residual() {
        // W = 0, constant f, charges (0,1): gradients vanish identically, so
        // phi = phi0 + Sigma/r exactly; the pipeline fit should be at solver
        // tolerance.
        let m = bench_model(0.0);
        let bg = Background::asymptotic(0.0, 0.0, 0.0, 10.0, 300.0).unwrap();
        let u0 = PhaseState::new(
            FieldPoint::new(vec![c(1.0, 0.2)]),
            vec![c(-0.5 / 400.0, 0.0)], // pi = -Sigma/r^2 at r = 20 for Sigma = 0.5
        );
        let cfg = SolverConfig::default();
        let targets = log_spaced(20.0, 250.0, 50);
        let prof = rk_solve(&m, &m.charges, &bg, 20.0, &u0, 250.0, &targets, &cfg).unwrap();
        let fit = asymptotic_match(&prof, &m, &bg).unwrap();
        let tail_amp = 0.5 / 20.0;
        assert!(
            fit.fit_residual <= 1e-6 * tail_amp,
            "residual {} vs budget {}",
            fit.fit_residual,
            1e-6 * tail_amp
        );
        assert!((fit.sigma[0] - c(0.5, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn profile_json_has_documented_shape() {
        let m = bench_model(0.1);
        let bg = flat_bg();
        let u0 = PhaseState::new(FieldPoint::new(vec![c(0.4, -0.2)]), vec![c(0.1, 0.05)]);
        let profile =
            picard_solve(&m, &m.charges, &bg, 1.5, &u0, &SolverConfig::default()).unwrap();
        let v = profile.to_json();
        assert_eq!(v["method"], "picard");
        assert!(v["delta_used"].as_f64().unwrap() > 0.0);
        assert!(v["contraction_factor"].as_f64().unwrap() < 1.0);
        let samples = v["samples"].as_array().unwrap();
        assert_eq!(samples.len(), profile.r_samples.len());
        assert_eq!(samples[0]["phi_re"].as_array().unwrap().len(), 1);
        assert_eq!(samples[0]["pi_im"].as_array().unwrap().len(), 1);
    }
}

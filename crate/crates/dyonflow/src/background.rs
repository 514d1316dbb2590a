//! Radial background geometries and the coefficient functions they induce in
//! the scalar flow equations.
//!
//! The metric ansatz is ds^2 = -e^A dt^2 + e^B dr^2 + e^C dOmega^2 with A, B,
//! C functions of r only. The scalar equations of motion then depend on the
//! geometry through three coefficients:
//!
//!   F = (A' - B')/2 + C',   G = e^{B - 2C},   H = e^B.
//!
//! Three geometry families are supported:
//! * `Asymptotic`: e^A = Lambda(r), e^B = 1/Lambda(r), e^C = r^2 with the
//!   lapse Lambda = 1 + 2 eta / r + vbh0 / r^2 - v0 r^2 / 3. Requires
//!   Lambda > 0 on the whole domain, checked at construction.
//! * `NearHorizon`: the product form e^A = (r - r_h)^2 / v1,
//!   e^B = v1 / (r - r_h)^2, e^C = v2 with v1 = v2 * ell_inv^2. With that
//!   normalisation the logarithmic scalar profile
//!   phi = phi_h - ell_inv ln(r - r_h) conj(w), w = Ginv grad V_eff(phi_h),
//!   solves the flow equations exactly up to gradient drift away from phi_h
//!   (see `near_horizon_from_attractor`).
//! * `Tabulated`: (r, A, B, C) samples interpolated by a C^2 cubic spline
//!   with not-a-knot end conditions; derivatives come from the spline.

use std::cell::Cell;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kahler::FieldPoint;
use crate::model::ModelSpec;
use crate::potentials::{effective_potential, Charges};
use crate::quad::gauss_legendre;

/// Grid density used to certify Lambda > 0 at construction time.
const LAMBDA_SCAN_POINTS: usize = 4096;

/// Coefficients of the first-order flow system at a radius r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    /// Friction coefficient (A' - B')/2 + C'.
    pub f: f64,
    /// Black-hole potential weight e^{B - 2C}.
    pub g: f64,
    /// Scalar potential weight e^B.
    pub h: f64,
}

/// One cubic spline y(x) with not-a-knot end conditions.
#[derive(Debug, Clone)]
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Fit to strictly increasing xs; requires at least 4 points so the
    /// not-a-knot conditions are meaningful.
    ///
    /// The knot second derivatives m_i satisfy the standard tridiagonal
    /// moment equations in the interior; the not-a-knot end conditions
    /// (continuous third derivative across the second and second-to-last
    /// knots) are eliminated analytically into the first and last interior
    /// rows, leaving a diagonally dominant tridiagonal system solved by the
    /// Thomas algorithm.
    fn fit(xs: &[f64], ys: &[f64]) -> Result<CubicSpline> {
        let n = xs.len();
        if n < 4 {
            return Err(Error::InvalidBackground(format!(
                "tabulated grid needs at least 4 rows, got {n}"
            )));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let k = n - 2; // unknowns m_1 .. m_{n-2}
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 1..=k {
            sub[i - 1] = h[i - 1];
            diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
            sup[i - 1] = h[i];
            rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        // Not-a-knot at the left: m_0 = ((h0 + h1) m_1 - h0 m_2) / h1,
        // substituted into the first interior equation.
        diag[0] = (h[0] + h[1]) * (h[0] + 2.0 * h[1]) / h[1];
        sup[0] = (h[1] * h[1] - h[0] * h[0]) / h[1];
        // Mirror at the right end with ha = h_{n-3}, hb = h_{n-2}.
        let (ha, hb) = (h[n - 3], h[n - 2]);
        sub[k - 1] = (ha * ha - hb * hb) / ha;
        diag[k - 1] = (ha + hb) * (2.0 * ha + hb) / ha;

        // Thomas sweep.
        for i in 1..k {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[k] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
        }
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    fn segment(&self, x: f64) -> usize {
        // partition_point returns the first index with xs[i] > x.
        let i = self.xs.partition_point(|&v| v <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = x - self.xs[i];
        let u = self.xs[i + 1] - x;
        (self.m[i] * u.powi(3) + self.m[i + 1] * t.powi(3)) / (6.0 * h)
            + (self.ys[i] / h - self.m[i] * h / 6.0) * u
            + (self.ys[i + 1] / h - self.m[i + 1] * h / 6.0) * t
    }

    fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = x - self.xs[i];
        let u = self.xs[i + 1] - x;
        (-self.m[i] * u * u + self.m[i + 1] * t * t) / (2.0 * h)
            + (self.ys[i + 1] - self.ys[i]) / h
            - (self.m[i + 1] - self.m[i]) * h / 6.0
    }
}

/// Geometry family of a background.
#[derive(Debug, Clone)]
pub enum Geometry {
    /// Lapse-driven large-r form; Lambda = 1 + 2 eta/r + vbh0/r^2 - v0 r^2/3.
    Asymptotic { eta: f64, vbh0: f64, v0: f64 },
    /// Product geometry near a horizon at r_h. v1 is derived: v2 * ell_inv^2.
    NearHorizon { r_h: f64, ell_inv: f64, v2: f64 },
    /// Interpolated (A, B, C) samples.
    Tabulated {
        grid: Vec<f64>,
        a: CubicSplineBox,
        b: CubicSplineBox,
        c: CubicSplineBox,
    },
}

/// Opaque wrapper so `Geometry` stays constructible only through the
/// validating constructors.
#[derive(Debug, Clone)]
pub struct CubicSplineBox(CubicSpline);

/// A radial geometry together with its validity interval.
#[derive(Debug, Clone)]
pub struct Background {
    geometry: Geometry,
    r_lo: f64,
    r_hi: f64,
}

impl Background {
    /// Lapse-form background on [r_lo, r_hi]; rejects domains where the
    /// lapse is not strictly positive (checked on a dense log-spaced grid
    /// plus the endpoints).
    pub fn asymptotic(eta: f64, vbh0: f64, v0: f64, r_lo: f64, r_hi: f64) -> Result<Background> {
        if r_lo <= 0.0 {
            return Err(Error::NonPositive {
                name: "asymptotic domain start",
                value: r_lo,
            });
        }
        check_interval(r_lo, r_hi)?;
        let lam = |r: f64| asymptotic_lambda(eta, vbh0, v0, r);
        let ratio = (r_hi / r_lo).ln();
        for i in 0..=LAMBDA_SCAN_POINTS {
            let r = r_lo * (ratio * i as f64 / LAMBDA_SCAN_POINTS as f64).exp();
            let v = lam(r);
            if !(v > 0.0) {
                return Err(Error::NonPositiveLambda { r, value: v });
            }
        }
        Ok(Background {
            geometry: Geometry::Asymptotic { eta, vbh0, v0 },
            r_lo,
            r_hi,
        })
    }

    /// Near-horizon product geometry on [r_lo, r_hi], horizon at r_h < r_lo.
    pub fn near_horizon(r_h: f64, ell_inv: f64, v2: f64, r_lo: f64, r_hi: f64) -> Result<Background> {
        if r_h <= 0.0 {
            return Err(Error::NonPositive {
                name: "horizon radius",
                value: r_h,
            });
        }
        if v2 <= 0.0 {
            return Err(Error::NonPositive {
                name: "sphere factor v2",
                value: v2,
            });
        }
        if ell_inv == 0.0 {
            return Err(Error::InvalidBackground(
                "ell_inv = 0 gives a degenerate throat (v1 = 0)".into(),
            ));
        }
        if r_lo <= r_h {
            return Err(Error::InvalidBackground(format!(
                "domain start {r_lo} must lie outside the horizon {r_h}"
            )));
        }
        check_interval(r_lo, r_hi)?;
        Ok(Background {
            geometry: Geometry::NearHorizon { r_h, ell_inv, v2 },
            r_lo,
            r_hi,
        })
    }

    /// Background interpolating explicit (r, A, B, C) rows.
    pub fn tabulated(rows: &[[f64; 4]]) -> Result<Background> {
        if rows.len() < 4 {
            return Err(Error::InvalidBackground(format!(
                "tabulated grid needs at least 4 rows, got {}",
                rows.len()
            )));
        }
        for w in rows.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(Error::InvalidBackground(format!(
                    "grid not strictly increasing at r = {}",
                    w[1][0]
                )));
            }
        }
        if rows.iter().any(|row| row.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidBackground("non-finite table entry".into()));
        }
        let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
        let a = CubicSpline::fit(&grid, &col(1))?;
        let b = CubicSpline::fit(&grid, &col(2))?;
        let c = CubicSpline::fit(&grid, &col(3))?;
        let (r_lo, r_hi) = (grid[0], grid[grid.len() - 1]);
        Ok(Background {
            geometry: Geometry::Tabulated {
                grid,
                a: CubicSplineBox(a),
                b: CubicSplineBox(b),
                c: CubicSplineBox(c),
            },
            r_lo,
            r_hi,
        })
    }

    /// Parse a plain-text table: one `r A B C` row per line, whitespace
    /// separated, `#` starts a comment.
    pub fn from_table_str(text: &str) -> Result<Background> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::ParseError {
                    line: lineno + 1,
                    msg: format!("expected 4 columns (r A B C), got {}", fields.len()),
                });
            }
            let mut row = [0.0; 4];
            for (k, f) in fields.iter().enumerate() {
                row[k] = f.parse::<f64>().map_err(|_| Error::ParseError {
                    line: lineno + 1,
                    msg: format!("not a number: {f:?}"),
                })?;
            }
            rows.push(row);
        }
        Background::tabulated(&rows)
    }

    pub fn from_table_file(path: &Path) -> Result<Background> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Background::from_table_str(&text)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.r_lo, self.r_hi)
    }

    /// Restrict or extend the validity interval (same positivity checks as
    /// the constructor).
    pub fn with_domain(&self, r_lo: f64, r_hi: f64) -> Result<Background> {
        match &self.geometry {
            Geometry::Asymptotic { eta, vbh0, v0 } => {
                Background::asymptotic(*eta, *vbh0, *v0, r_lo, r_hi)
            }
            Geometry::NearHorizon { r_h, ell_inv, v2 } => {
                Background::near_horizon(*r_h, *ell_inv, *v2, r_lo, r_hi)
            }
            Geometry::Tabulated { grid, .. } => {
                if r_lo < grid[0] || r_hi > grid[grid.len() - 1] {
                    return Err(Error::InvalidBackground(
                        "cannot extend a tabulated background beyond its grid".into(),
                    ));
                }
                check_interval(r_lo, r_hi)?;
                let mut out = self.clone();
                out.r_lo = r_lo;
                out.r_hi = r_hi;
                Ok(out)
            }
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if let Geometry::NearHorizon { r_h, .. } = self.geometry {
            if r <= r_h {
                return Err(Error::HorizonSingularity { r, r_h });
            }
        }
        if r < self.r_lo || r > self.r_hi || !r.is_finite() {
            return Err(Error::OutOfDomain {
                r,
                lo: self.r_lo,
                hi: self.r_hi,
            });
        }
        Ok(())
    }

    /// Metric exponents (A, B, C) at r.
    pub fn exponents(&self, r: f64) -> Result<[f64; 3]> {
        self.check_radius(r)?;
        Ok(match &self.geometry {
            Geometry::Asymptotic { eta, vbh0, v0 } => {
                let lam = asymptotic_lambda(*eta, *vbh0, *v0, r);
                if !(lam > 0.0) {
                    return Err(Error::NonPositiveLambda { r, value: lam });
                }
                [lam.ln(), -lam.ln(), 2.0 * r.ln()]
            }
            Geometry::NearHorizon { r_h, ell_inv, v2 } => {
                let v1 = v2 * ell_inv * ell_inv;
                let x = r - r_h;
                [2.0 * x.ln() - v1.ln(), v1.ln() - 2.0 * x.ln(), v2.ln()]
            }
            Geometry::Tabulated { a, b, c, .. } => [a.0.eval(r), b.0.eval(r), c.0.eval(r)],
        })
    }

    /// Radial derivatives (A', B', C') at r.
    pub fn exponent_derivs(&self, r: f64) -> Result<[f64; 3]> {
        self.check_radius(r)?;
        Ok(match &self.geometry {
            Geometry::Asymptotic { eta, vbh0, v0 } => {
                let lam = asymptotic_lambda(*eta, *vbh0, *v0, r);
                if !(lam > 0.0) {
                    return Err(Error::NonPositiveLambda { r, value: lam });
                }
                let dlam = -2.0 * eta / (r * r) - 2.0 * vbh0 / (r * r * r) - 2.0 * v0 * r / 3.0;
                [dlam / lam, -dlam / lam, 2.0 / r]
            }
            Geometry::NearHorizon { r_h, .. } => {
                let x = r - r_h;
                [2.0 / x, -2.0 / x, 0.0]
            }
            Geometry::Tabulated { a, b, c, .. } => [a.0.deriv(r), b.0.deriv(r), c.0.deriv(r)],
        })
    }

    /// The flow coefficients (F, G, H) at r.
    pub fn coefficients(&self, r: f64) -> Result<OdeCoefficients> {
        let [_a, b, c] = self.exponents(r)?;
        let [da, db, dc] = self.exponent_derivs(r)?;
        Ok(OdeCoefficients {
            f: 0.5 * (da - db) + dc,
            g: (b - 2.0 * c).exp(),
            h: b.exp(),
        })
    }

    /// The lapse, for asymptotic backgrounds.
    pub fn lambda(&self, r: f64) -> Result<f64> {
        match &self.geometry {
            Geometry::Asymptotic { eta, vbh0, v0 } => Ok(asymptotic_lambda(*eta, *vbh0, *v0, r)),
            _ => Err(Error::InvalidBackground(
                "lapse is only defined for asymptotic backgrounds".into(),
            )),
        }
    }
}

fn check_interval(r_lo: f64, r_hi: f64) -> Result<()> {
    if !(r_hi > r_lo) || !r_lo.is_finite() || !r_hi.is_finite() {
        return Err(Error::InvalidBackground(format!(
            "invalid radial interval [{r_lo}, {r_hi}]"
        )));
    }
    Ok(())
}

/// Lambda(r) = 1 + 2 eta / r + vbh0 / r^2 - v0 r^2 / 3.
pub fn asymptotic_lambda(eta: f64, vbh0: f64, v0: f64, r: f64) -> f64 {
    1.0 + 2.0 * eta / r + vbh0 / (r * r) - v0 * r * r / 3.0
}

/// Inverse throat radius from the two potentials at the horizon:
/// ell_inv = V_eff / sqrt(1 - 4 V_BH V).
pub fn attractor_ell_inv(v_bh: f64, v: f64) -> Result<f64> {
    let disc = 1.0 - 4.0 * v_bh * v;
    if disc <= 0.0 {
        return Err(Error::ComplexBranch { disc });
    }
    Ok(effective_potential(v_bh, v)? / disc.sqrt())
}

/// Derived data of a near-horizon construction.
#[derive(Debug, Clone, Copy)]
pub struct AttractorData {
    pub v_bh: f64,
    pub v: f64,
    pub v_eff: f64,
    pub ell_inv: f64,
    /// Sphere factor e^C; the square of the horizon radius.
    pub v2: f64,
    /// Throat factor in e^A = (r - r_h)^2 / v1; equals v2 * ell_inv^2.
    pub v1: f64,
}

/// Build the near-horizon background for horizon scalars phi_h: evaluates
/// both potentials there, sets ell_inv = V_eff / sqrt(1 - 4 V_BH V) and
/// v2 = |V_eff|, and picks the domain (r_h, r_h + span].
pub fn near_horizon_from_attractor(
    model: &ModelSpec,
    charges: &Charges,
    phi_h: &FieldPoint,
    r_h: f64,
    span: f64,
) -> Result<(Background, AttractorData)> {
    let v_bh = model.bh_potential(phi_h, charges)?;
    let v = model.scalar_potential(phi_h)?;
    let v_eff = effective_potential(v_bh, v)?;
    let ell_inv = attractor_ell_inv(v_bh, v)?;
    if v_eff == 0.0 {
        return Err(Error::InvalidBackground(
            "vanishing effective potential gives a degenerate horizon".into(),
        ));
    }
    if span <= 0.0 {
        return Err(Error::NonPositive {
            name: "near-horizon span",
            value: span,
        });
    }
    let v2 = v_eff.abs();
    let data = AttractorData {
        v_bh,
        v,
        v_eff,
        ell_inv,
        v2,
        v1: v2 * ell_inv * ell_inv,
    };
    // Keep a hair's distance from the horizon itself, where the
    // coefficients are singular.
    let r_lo = r_h + 1e-12 * span.max(r_h);
    let bg = Background::near_horizon(r_h, ell_inv, v2, r_lo, r_h + span)?;
    Ok((bg, data))
}

/// Tail-decay profile P and growth profile Q on a radius grid, for an
/// asymptotic background:
///
///   P(r) = (1/r) * int_r^inf int_t^inf s^-3 / Lambda(s) ds dt
///   Q(r) = int_{r_lo}^r int_{r_lo}^t s / Lambda(s) ds dt
///
/// P's constants make it vanish at infinity; Q and its derivative vanish at
/// the domain start. The improper P integrals are mapped to finite intervals
/// by s = 1/x.
pub fn pq_profiles(background: &Background, r_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    pq_profiles_with_panels(background, r_grid, 48)
}

/// Same as `pq_profiles` with an explicit panel count for the composite
/// quadrature (used by refinement checks).
pub fn pq_profiles_with_panels(
    background: &Background,
    r_grid: &[f64],
    panels: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (eta, vbh0, v0) = match background.geometry {
        Geometry::Asymptotic { eta, vbh0, v0 } => (eta, vbh0, v0),
        _ => {
            return Err(Error::InvalidBackground(
                "decay profiles need an asymptotic background".into(),
            ))
        }
    };
    let (r_lo, _) = background.domain();
    let panels = panels.max(1);
    let (nodes, weights) = gauss_legendre(8)?;
    let composite = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            let mut acc = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += w * f(mid + 0.5 * h * x);
            }
            total += acc * 0.5 * h;
        }
        total
    };
    // Guarded reciprocal: a non-positive lapse at any quadrature point
    // poisons the whole profile.
    let bad: Cell<Option<(f64, f64)>> = Cell::new(None);
    let inv_lam = |r: f64| -> f64 {
        let v = asymptotic_lambda(eta, vbh0, v0, r);
        if !(v > 0.0) && bad.get().is_none() {
            bad.set(Some((r, v)));
        }
        1.0 / v
    };

    let mut p_out = Vec::with_capacity(r_grid.len());
    let mut q_out = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r > 0.0) {
            return Err(Error::OutOfDomain {
                r,
                lo: r_lo,
                hi: f64::INFINITY,
            });
        }
        // Inner decay integral I(t) = int_t^inf s^-3 / Lambda ds mapped to
        // int_0^{1/t} x / Lambda(1/x) dx; outer integral
        // int_r^inf I(t) dt mapped to int_0^{1/r} I(1/y) / y^2 dy.
        let inner_decay = |t: f64| composite(&|x| x * inv_lam(1.0 / x), 0.0, 1.0 / t);
        let j = composite(&|y| inner_decay(1.0 / y) / (y * y), 0.0, 1.0 / r);
        // Q: finite nested integrals from the domain start.
        let inner_growth = |t: f64| composite(&|s| s * inv_lam(s), r_lo, t);
        let q = composite(&inner_growth, r_lo, r);
        if let Some((rb, vb)) = bad.get() {
            return Err(Error::NonPositiveLambda { r: rb, value: vb });
        }
        p_out.push(j / r);
        q_out.push(q);
    }
    Ok((p_out, q_out))
}

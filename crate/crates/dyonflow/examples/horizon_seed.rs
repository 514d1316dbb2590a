//! Build a near-horizon background from horizon field values and produce a
//! regular boundary seed just outside the horizon.
//!
//! At a critical point of the effective potential the log-running term of
//! the near-horizon expansion vanishes, so the seed sits exactly at the
//! horizon values with zero radial derivative. Away from criticality the
//! expansion picks up a logarithm whose coefficient is the metric-raised
//! gradient of the effective potential.
//!
//! Run with: `cargo run --example horizon_seed`

use num_complex::Complex64;

use dyonflow::background::near_horizon_from_attractor;
use dyonflow::critical::{find_critical, NewtonOptions, PotentialKind};
use dyonflow::flow::near_horizon_seed;
use dyonflow::kahler::{FieldPoint, KahlerModel};
use dyonflow::model::ModelSpec;
use dyonflow::poly::{Poly, Term};
use dyonflow::potentials::{Charges, GaugeCouplings, Superpotential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Constant superpotential, weakly field-dependent gauge coupling, one
    // electric charge: the effective potential is extremal at the origin.
    let model = ModelSpec {
        kahler: KahlerModel::flat(1),
        superpotential: Superpotential::constant(1, c(0.02, 0.0)),
        couplings: GaugeCouplings::new(
            1,
            vec![Poly::new(
                1,
                vec![
                    Term { exponents: vec![0], coeff: c(1.0, 0.0) },
                    Term { exponents: vec![2], coeff: c(0.001, 0.0) },
                ],
            )],
        ),
        charges: Charges::new(vec![0.0], vec![1.0]),
    };
    model.validate()?;

    let guess = FieldPoint::new(vec![c(0.1, 0.05)]);
    let cp = find_critical(&model, PotentialKind::Effective, &guess, &NewtonOptions::default())?;
    let phi_h = cp.phi_star.clone();
    println!(
        "horizon scalars (effective critical point): {:+.6} {:+.6}i, |grad| = {:.1e}",
        phi_h.values()[0].re,
        phi_h.values()[0].im,
        cp.grad_norm
    );

    let r_h = 1.0;
    let (bg, data) = near_horizon_from_attractor(&model, &model.charges, &phi_h, r_h, 0.5)?;
    let (lo, hi) = bg.domain();
    println!("\nnear-horizon background on [{lo:.6}, {hi}]:");
    println!("  V_BH    = {:+.6}", data.v_bh);
    println!("  V       = {:+.6}", data.v);
    println!("  V_eff   = {:+.6}", data.v_eff);
    println!("  ell_inv = {:+.6}   (inverse throat radius)", data.ell_inv);
    println!("  v2      = {:+.6}   (horizon sphere factor)", data.v2);
    println!("  v1      = {:+.6}   (= v2 * ell_inv^2)", data.v1);

    // Seed slightly outside the horizon. At the attractor the log term is
    // absent, so phi stays put and pi vanishes.
    let r0 = r_h * 1.001;
    let seed = near_horizon_seed(&model, &model.charges, &phi_h, r_h, r0)?;
    let drift = (seed.phi.values()[0] - phi_h.values()[0]).norm();
    let momentum = seed.pi[0].norm();
    println!("\nseed at r0 = {r0}:");
    println!("  |phi - phi_h| = {drift:.3e}   |pi| = {momentum:.3e}   (regular: both ~ 0)");

    // Off the attractor the seed runs logarithmically; pi * (r0 - r_h)
    // recovers the expansion coefficient -ell_inv * conj(w).
    let off = FieldPoint::new(vec![c(0.3, 0.0)]);
    let seed_off = near_horizon_seed(&model, &model.charges, &off, r_h, r0)?;
    let coeff = seed_off.pi[0] * (r0 - r_h);
    println!("\nnon-critical horizon values phi_h = 0.3:");
    println!(
        "  phi(r0) = {:+.6} {:+.6}i   pi(r0) = {:+.3} {:+.3}i",
        seed_off.phi.values()[0].re,
        seed_off.phi.values()[0].im,
        seed_off.pi[0].re,
        seed_off.pi[0].im
    );
    println!(
        "  log coefficient -ell_inv conj(w) = {:+.6} {:+.6}i",
        coeff.re, coeff.im
    );
    Ok(())
}

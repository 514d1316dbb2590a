//! Locate critical points of the scalar, charge, and effective potentials.
//!
//! A damped Newton search walks the realified gradient to zero and reports
//! the Hessian signature at the endpoint, which classifies the critical
//! point (minimum, saddle, or degenerate). The example finishes with a
//! frozen-pair check: for a flow whose scalars sit still, the same field
//! value must be critical for the scalar potential at infinity and for the
//! effective potential at the horizon.
//!
//! Run with: `cargo run --example attractor_search`

use num_complex::Complex64;

use dyonflow::critical::{check_frozen_pair, find_critical, NewtonOptions, PotentialKind};
use dyonflow::kahler::{FieldPoint, KahlerModel};
use dyonflow::model::ModelSpec;
use dyonflow::poly::{Poly, Term};
use dyonflow::potentials::{Charges, GaugeCouplings, Superpotential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One-field model whose gauge coupling is extremal away from the origin,
/// pulling the effective critical point off the scalar one.
fn tilted_model() -> ModelSpec {
    ModelSpec {
        kahler: KahlerModel::flat(1),
        superpotential: Superpotential::new(Poly::new(
            1,
            vec![
                Term { exponents: vec![0], coeff: c(0.05, 0.0) },
                Term { exponents: vec![2], coeff: c(0.1, 0.0) },
            ],
        )),
        couplings: GaugeCouplings::new(
            1,
            vec![Poly::new(
                1,
                vec![
                    Term { exponents: vec![0], coeff: c(1.0, 0.0) },
                    Term { exponents: vec![1], coeff: c(-0.3, 0.0) },
                    Term { exponents: vec![2], coeff: c(1.0, 0.0) },
                ],
            )],
        ),
        charges: Charges::new(vec![0.0], vec![1.0]),
    }
}

fn show(label: &str, cp: &dyonflow::critical::CriticalPoint) {
    let phi = cp.phi_star.values()[0];
    println!(
        "{label:<10} phi* = {:+.6} {:+.6}i   |grad| = {:.2e}   signature (+{}, -{}, 0:{})   {} in {} steps",
        phi.re,
        phi.im,
        cp.grad_norm,
        cp.signature.n_plus,
        cp.signature.n_minus,
        cp.signature.n_zero,
        if cp.converged { "converged" } else { "NOT converged" },
        cp.grad_history.len() - 1,
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = tilted_model();
    model.validate()?;

    let guess = FieldPoint::new(vec![c(0.2, 0.1)]);
    let opts = NewtonOptions::default();

    println!("critical points from the common guess {:+.2}{:+.2}i:", 0.2, 0.1);
    let scalar = find_critical(&model, PotentialKind::Scalar, &guess, &opts)?;
    let bh = find_critical(&model, PotentialKind::BlackHole, &guess, &opts)?;
    let eff = find_critical(&model, PotentialKind::Effective, &guess, &opts)?;
    show("scalar", &scalar);
    show("charge", &bh);
    show("effective", &eff);

    // The Newton line search forces the gradient history down monotonically.
    let hist = &eff.grad_history;
    println!(
        "\neffective-potential gradient history: {:.2e} -> {:.2e} -> ... -> {:.2e}",
        hist[0],
        hist[1.min(hist.len() - 1)],
        hist[hist.len() - 1]
    );

    // Frozen pair: the coupling tilt separates the scalar and effective
    // critical points, so this pair does NOT coincide.
    let pair = check_frozen_pair(&model, &scalar.phi_star, &eff.phi_star, 1e-8, 1e-8)?;
    println!(
        "\nfrozen pair (scalar* vs effective*): asymptotic_ok = {}, horizon_ok = {}, coincide = {} (separation {:.3e})",
        pair.asymptotic_ok, pair.horizon_ok, pair.coincide, pair.separation
    );

    // With the tilt removed both potentials are extremal at the origin and
    // the pair check passes.
    let mut flat = tilted_model();
    flat.couplings = GaugeCouplings::new(
        1,
        vec![Poly::new(1, vec![Term { exponents: vec![0], coeff: c(1.0, 0.0) }])],
    );
    let s2 = find_critical(&flat, PotentialKind::Scalar, &guess, &opts)?;
    let e2 = find_critical(&flat, PotentialKind::Effective, &guess, &opts)?;
    let pair2 = check_frozen_pair(&flat, &s2.phi_star, &e2.phi_star, 1e-8, 1e-6)?;
    println!(
        "after removing the tilt:              asymptotic_ok = {}, horizon_ok = {}, coincide = {} (separation {:.3e})",
        pair2.asymptotic_ok, pair2.horizon_ok, pair2.coincide, pair2.separation
    );
    Ok(())
}

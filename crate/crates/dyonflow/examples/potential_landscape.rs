//! Tabulate the three potentials along a ray in field space.
//!
//! The scalar potential V comes from the superpotential, the charge
//! potential V_BH from the gauge couplings and the dyonic charges, and the
//! effective potential combines the two; its critical points pick the
//! horizon values of the fields. The table shows all three on the real
//! axis for a one-field model.
//!
//! Run with: `cargo run --example potential_landscape`

use num_complex::Complex64;

use dyonflow::kahler::{FieldPoint, KahlerModel};
use dyonflow::model::ModelSpec;
use dyonflow::poly::{Poly, Term};
use dyonflow::potentials::{effective_potential, Charges, GaugeCouplings, Superpotential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // W = w0 (1 + 0.4 phi), f = 1 + 0.2 phi^2, one purely electric charge.
    let w0 = 0.1;
    let model = ModelSpec {
        kahler: KahlerModel::flat(1),
        superpotential: Superpotential::new(Poly::new(
            1,
            vec![
                Term { exponents: vec![0], coeff: c(w0, 0.0) },
                Term { exponents: vec![1], coeff: c(0.4 * w0, 0.0) },
            ],
        )),
        couplings: GaugeCouplings::new(
            1,
            vec![Poly::new(
                1,
                vec![
                    Term { exponents: vec![0], coeff: c(1.0, 0.0) },
                    Term { exponents: vec![2], coeff: c(0.2, 0.0) },
                ],
            )],
        ),
        charges: Charges::new(vec![0.0], vec![1.0]),
    };
    model.validate()?;

    println!("{:>6}  {:>12}  {:>12}  {:>12}", "phi", "V", "V_BH", "V_eff");
    for k in 0..=12 {
        let t = -0.3 + 0.125 * k as f64;
        let phi = FieldPoint::new(vec![c(t, 0.0)]);
        let v = model.scalar_potential(&phi)?;
        let v_bh = model.bh_potential(&phi, &model.charges)?;
        let v_eff = effective_potential(v_bh, v)?;
        println!("{t:>6.3}  {v:>12.6}  {v_bh:>12.6}  {v_eff:>12.6}");
    }

    // Gradients, for orientation: where does the effective potential flatten?
    println!("\ngradient of V_eff on the same ray:");
    for t in [-0.2, 0.0, 0.2, 0.4] {
        let phi = FieldPoint::new(vec![c(t, 0.0)]);
        let g = model.effective_potential_grad(&phi, &model.charges)?[0];
        println!("  phi = {t:>5.2}: dV_eff = {:+.6} {:+.6}i", g.re, g.im);
    }
    Ok(())
}

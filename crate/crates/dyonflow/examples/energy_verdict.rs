//! Audit the total energy of a flow and classify the tail.
//!
//! The audit integrates the energy density over the sampled window, then
//! freezes the fields at their fitted boundary value and estimates the
//! remaining tail in closed form. A nonzero scalar potential at infinity
//! acts as a cosmological term whose volume integral grows without bound,
//! so the verdict flips to divergent; the dyadic tail windows make the
//! growth visible. For finite flows an a-posteriori bound on the total is
//! checked as well.
//!
//! Run with: `cargo run --example energy_verdict`

use num_complex::Complex64;

use dyonflow::background::Background;
use dyonflow::energy::{energy, energy_bound_check, EnergyVerdict};
use dyonflow::flow::{log_spaced, rk_solve, FlowProfile, Method, PhaseState, SolverConfig};
use dyonflow::kahler::{FieldPoint, KahlerModel};
use dyonflow::model::ModelSpec;
use dyonflow::potentials::{Charges, GaugeCouplings, Superpotential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn show(label: &str, report: &dyonflow::energy::EnergyReport) {
    println!("{label}:");
    println!("  finite part (up to L = {}) = {:+.6}", report.radius_split, report.finite_part);
    match report.tail_estimate {
        Some(t) => println!("  frozen tail beyond L       = {t:+.6}"),
        None => println!("  frozen tail beyond L       = divergent"),
    }
    println!("  V at fitted infinity       = {:+.3e}", report.v0_at_infinity);
    let windows: Vec<String> = report.tail_windows.iter().map(|w| format!("{w:+.3e}")).collect();
    println!("  dyadic windows             = [{}]", windows.join(", "));
    println!(
        "  verdict                    = {}",
        match report.verdict {
            EnergyVerdict::Finite => "finite",
            EnergyVerdict::Divergent => "divergent",
        }
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Finite case: vanishing superpotential, so the scalar potential is
    // identically zero and only the kinetic and charge terms contribute.
    let model = ModelSpec {
        kahler: KahlerModel::flat(1),
        superpotential: Superpotential::zero(1),
        couplings: GaugeCouplings::diagonal_constant(1, 1, c(1.0, 0.0)),
        charges: Charges::new(vec![0.0], vec![1.0]),
    };
    model.validate()?;
    let background = Background::asymptotic(0.0, 0.0, 0.0, 1.0, 80.0)?;
    let config = SolverConfig::default();

    let start = PhaseState::new(FieldPoint::new(vec![c(0.3, 0.1)]), vec![c(-0.05, 0.0)]);
    let targets = log_spaced(2.0, 80.0, 200);
    let profile = rk_solve(&model, &model.charges, &background, 2.0, &start, 80.0, &targets, &config)?;
    let report = energy(&model, &model.charges, &background, &profile, 40.0)?;
    show("zero-potential flow", &report);
    let bound_ok = energy_bound_check(&report, &profile, &model, &model.charges, &background)?;
    println!("  a-posteriori bound         = {}", if bound_ok { "holds" } else { "VIOLATED" });

    // Divergent case: a constant superpotential leaves V = -3|w0|^2 at
    // infinity. The geometry carries the matching cosmological term, and
    // the frozen tail integral grows with every dyadic window.
    let w0 = (0.1f64 / 3.0).sqrt();
    let dark = ModelSpec {
        kahler: KahlerModel::flat(1),
        superpotential: Superpotential::constant(1, c(w0, 0.0)),
        couplings: GaugeCouplings::diagonal_constant(1, 1, c(1.0, 0.0)),
        charges: Charges::new(vec![0.0], vec![1.0]),
    };
    dark.validate()?;
    let ads = Background::asymptotic(0.0, 0.0, -0.1, 1.0, 80.0)?;
    let radii = log_spaced(2.0, 80.0, 64);
    let frozen = FlowProfile {
        method: Method::Rk,
        r_samples: radii.clone(),
        states: radii
            .iter()
            .map(|_| PhaseState::frozen(FieldPoint::new(vec![c(0.0, 0.0)])))
            .collect(),
        delta_used: 78.0,
        contraction_factor: 0.0,
        segments: Vec::new(),
    };
    let report = energy(&dark, &dark.charges, &ads, &frozen, 40.0)?;
    println!();
    show("constant-potential flow", &report);
    Ok(())
}

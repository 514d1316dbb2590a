//! Certify field-space metric growth bounds by low-discrepancy sampling.
//!
//! A metric model carries four bound constants; `certify_bounds` sweeps a
//! ball in field space and checks the metric potential and connection
//! against the polynomial envelopes those constants define. The example
//! certifies two healthy models and shows a deliberately broken one fail.
//!
//! Run with: `cargo run --example kahler_certificate`

use dyonflow::kahler::{GrowthBounds, KahlerModel};

fn report(label: &str, model: &KahlerModel) {
    match model.certify_bounds(2.0, 10_000, 1) {
        Ok(cert) => {
            let verdict = if cert.holds { "certified" } else { "VIOLATED" };
            println!(
                "{label:<28} {verdict:<10} worst margin {:+.3e} over {} samples (radius {})",
                cert.worst_margin, cert.samples, cert.radius
            );
            if !cert.holds {
                println!("{:<28} worst point: {:?}", "", cert.worst_point.values());
            }
        }
        Err(e) => println!("{label:<28} error: {e}"),
    }
}

fn main() {
    // |phi|^2 metric potential: identity metric, vanishing connection.
    let flat = KahlerModel::flat(2);
    report("flat, default bounds", &flat);

    // P(s) = s + 0.25 s^2 curves the metric; the connection now grows
    // linearly in the field radius, which c1 = 1 absorbs.
    let curved = KahlerModel::radial(
        1,
        vec![0.0, 1.0, 0.25],
        GrowthBounds {
            epsilon: 0.0,
            c1: 1.0,
            c2: 1.0,
            c3: 0.0,
        },
    );
    report("quartic series, c1 = 1", &curved);

    // Negative control: zero constants bound nothing.
    let broken = KahlerModel::radial(
        1,
        vec![0.0, 1.0, 0.25],
        GrowthBounds {
            epsilon: 0.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
        },
    );
    report("quartic series, zero bounds", &broken);
}

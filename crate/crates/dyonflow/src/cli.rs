//! Command dispatch and artifact serialization.
//!
//! Every command reads one config file, runs a pipeline stage, and writes
//! JSON (and where useful CSV) artifacts into the output directory. The
//! artifact set is staged in memory while a command runs; if the command
//! fails partway, whatever was staged is still written, with a `.partial`
//! suffix, so a failed batch leaves evidence instead of nothing.
//!
//! Exit codes (also shown in `--help`):
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success                                             |
//! | 2    | usage error (bad flags or unknown command)          |
//! | 3    | config syntax error                                 |
//! | 4    | config validation error                             |
//! | 5    | filesystem error                                    |
//! | 6    | integrator failure (no certificate, iteration cap)  |
//! | 7    | critical-point search did not converge              |
//! | 8    | energy verdict is divergent                         |
//! | 9    | verification check failed                           |
//! | 10   | numeric domain error (singular data, bad branch)    |

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::background::{attractor_ell_inv, near_horizon_from_attractor};
use crate::config::{parse_config, parse_config_str, serialize_config, RunConfig};
use crate::critical::{check_frozen_pair, find_critical, CriticalPoint, NewtonOptions, PotentialKind};
use crate::energy::{energy, energy_bound_check, EnergyVerdict};
use crate::error::{Error, Result};
use crate::flow::{
    asymptotic_match, log_spaced, near_horizon_seed, picard_solve, rk_solve, AsymptoticFit,
    FlowProfile, PhaseState,
};
use crate::gauge::{residual_gauge_eom, ResidualOptions};
use crate::kahler::FieldPoint;
use crate::model::ModelSpec;
use crate::potentials::{effective_potential, Charges};

const EXIT_CODE_HELP: &str = "Exit codes:
  0   success
  2   usage error
  3   config syntax error
  4   config validation error
  5   filesystem error
  6   integrator failure
  7   critical-point search did not converge
  8   energy verdict is divergent
  9   verification check failed
  10  numeric domain error";

#[derive(Debug, Parser)]
#[command(
    name = "dyonflow",
    version,
    about = "Certified radial flows of charged scalar field models",
    after_help = EXIT_CODE_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate critical points of the scalar, black-hole, and effective potentials.
    Critical(CommonArgs),
    /// Build the near-horizon background and a regular seed state at the attractor point.
    SeedHorizon(CommonArgs),
    /// Integrate the radial flow: certified fixed-point segment plus adaptive profile.
    Solve(CommonArgs),
    /// Fit the large-radius expansion of an integrated profile.
    Match(CommonArgs),
    /// Integrate the energy functional and classify the tail.
    Energy(CommonArgs),
    /// Run the self-check suite; exit 0 only if every check passes.
    Verify(CommonArgs),
    /// Scan a charge grid and tabulate attractor data per point.
    Scan(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Critical(a)
            | Command::SeedHorizon(a)
            | Command::Solve(a)
            | Command::Match(a)
            | Command::Energy(a)
            | Command::Verify(a)
            | Command::Scan(a) => a,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Path to the run configuration file.
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory for artifacts (overrides the [output] dir key).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Override the finite/tail split radius ([flow] l_split).
    #[arg(long = "L", value_name = "REAL")]
    pub l_split: Option<f64>,

    /// Override the start radius: the flow start for solve/match/energy,
    /// or the seed radius for seed-horizon.
    #[arg(long = "r0", value_name = "REAL")]
    pub r0: Option<f64>,

    /// Override the sampling seed ([solver] lipschitz_seed).
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
}

/// Map an error onto its documented exit code.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ParseError { .. } => 3,
        Error::ValidationError { .. } => 4,
        Error::Io { .. } => 5,
        Error::NoContraction(_)
        | Error::MaxIters { .. }
        | Error::BallEscape { .. }
        | Error::StepUnderflow { .. } => 6,
        Error::NoConvergence(_) => 7,
        _ => 10,
    }
}

/// Staged artifacts, written only once the command settles.
#[derive(Debug, Default)]
pub struct ArtifactSet {
    files: Vec<(String, String)>,
}

impl ArtifactSet {
    /// Stage (or restage) a named artifact.
    pub fn set(&mut self, name: &str, content: String) {
        if let Some(slot) = self.files.iter_mut().find(|(n, _)| n == name) {
            slot.1 = content;
        } else {
            self.files.push((name.to_string(), content));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Write all staged artifacts; `partial` appends the `.partial` suffix.
    pub fn write_all(&self, dir: &Path, partial: bool) -> Result<()> {
        if self.files.is_empty() {
            return Ok(());
        }
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for (name, content) in &self.files {
            let file = if partial {
                dir.join(format!("{name}.partial"))
            } else {
                dir.join(name)
            };
            std::fs::write(&file, content).map_err(|e| Error::io(file.display().to_string(), e))?;
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serialization cannot fail");
    s.push('\n');
    s
}

/// Entry point: run a parsed command line, returning the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let args = cli.command.args();
    let mut config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dyonflow: {e}");
            return exit_code_for(&e);
        }
    };
    if let Some(l) = args.l_split {
        config.flow.l_split = l;
    }
    if let Some(r0) = args.r0 {
        config.flow.r_start = r0;
    }
    if let Some(seed) = args.seed {
        config.solver.lipschitz_seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let base_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    let mut artifacts = ArtifactSet::default();
    let outcome = match &cli.command {
        Command::Critical(_) => cmd_critical(&config, &mut artifacts),
        Command::SeedHorizon(a) => cmd_seed_horizon(&config, a, &mut artifacts),
        Command::Solve(_) => cmd_solve(&config, &base_dir, &mut artifacts),
        Command::Match(_) => cmd_match(&config, &base_dir, &mut artifacts),
        Command::Energy(_) => cmd_energy(&config, &base_dir, &mut artifacts),
        Command::Verify(_) => cmd_verify(&config, &base_dir, &mut artifacts),
        Command::Scan(_) => cmd_scan(&config, &mut artifacts),
    };
    match outcome {
        Ok(code) => match artifacts.write_all(&out_dir, false) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("dyonflow: {e}");
                exit_code_for(&e)
            }
        },
        Err(e) => {
            eprintln!("dyonflow: {e}");
            if let Err(we) = artifacts.write_all(&out_dir, true) {
                eprintln!("dyonflow: {we}");
            }
            exit_code_for(&e)
        }
    }
}

// ---------------------------------------------------------------------------
// JSON/CSV helpers
// ---------------------------------------------------------------------------

fn parts(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (
        values.iter().map(|z| z.re).collect(),
        values.iter().map(|z| z.im).collect(),
    )
}

fn json_field(phi: &FieldPoint) -> Value {
    let (re, im) = parts(phi.values());
    json!({ "re": re, "im": im })
}

fn json_state(state: &PhaseState) -> Value {
    let (phi_re, phi_im) = parts(state.phi.values());
    let (pi_re, pi_im) = parts(&state.pi);
    json!({
        "phi_re": phi_re,
        "phi_im": phi_im,
        "pi_re": pi_re,
        "pi_im": pi_im,
    })
}

fn json_critical(label: &str, cp: &CriticalPoint) -> Value {
    json!({
        "potential": label,
        "phi": json_field(&cp.phi_star),
        "grad_norm": cp.grad_norm,
        "signature": {
            "n_plus": cp.signature.n_plus,
            "n_minus": cp.signature.n_minus,
            "n_zero": cp.signature.n_zero,
        },
        "converged": cp.converged,
        "iterations": cp.grad_history.len() - 1,
    })
}

fn json_fit(fit: &AsymptoticFit) -> Value {
    let (sig_re, sig_im) = parts(&fit.sigma);
    let (p_re, p_im) = parts(&fit.p_coeff);
    let (q_re, q_im) = parts(&fit.q_coeff);
    json!({
        "phi0": json_field(&fit.phi0),
        "sigma_re": sig_re,
        "sigma_im": sig_im,
        "p_coeff_re": p_re,
        "p_coeff_im": p_im,
        "q_coeff_re": q_re,
        "q_coeff_im": q_im,
        "fit_residual": fit.fit_residual,
        "condition": fit.condition,
    })
}

/// Flat CSV of profile samples: r, then per-field phi/pi parts.
fn csv_of_profile(profile: &FlowProfile) -> String {
    let n = profile
        .states
        .first()
        .map(|s| s.n_fields())
        .unwrap_or(0);
    let mut out = String::from("r");
    for i in 0..n {
        out.push_str(&format!(",phi{i}_re,phi{i}_im,pi{i}_re,pi{i}_im"));
    }
    out.push('\n');
    for (r, state) in profile.r_samples.iter().zip(&profile.states) {
        out.push_str(&format!("{r}"));
        for i in 0..n {
            let phi = state.phi.values()[i];
            let pi = state.pi[i];
            out.push_str(&format!(",{},{},{},{}", phi.re, phi.im, pi.re, pi.im));
        }
        out.push('\n');
    }
    out
}

fn initial_state(config: &RunConfig) -> PhaseState {
    PhaseState::new(
        FieldPoint::new(config.flow.phi.clone()),
        config.flow.pi.clone(),
    )
}

/// Sample targets for the adaptive integrator: logarithmic in radius so the
/// tail window is as well resolved as the start.
fn flow_targets(r_start: f64, r_end: f64, n: usize) -> Vec<f64> {
    if r_start > 0.0 && r_end > r_start {
        log_spaced(r_start, r_end, n)
    } else {
        crate::flow::linear_spaced(r_start, r_end, n)
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_critical(config: &RunConfig, artifacts: &mut ArtifactSet) -> Result<i32> {
    let model = &config.model;
    let guess = FieldPoint::new(config.horizon.guess.clone());
    let opts = NewtonOptions::default();
    let kinds = [
        (PotentialKind::Scalar, "scalar"),
        (PotentialKind::BlackHole, "black_hole"),
        (PotentialKind::Effective, "effective"),
    ];
    let mut rows = Vec::new();
    let mut found = Vec::new();
    for (kind, label) in kinds {
        let cp = find_critical(model, kind, &guess, &opts)?;
        rows.push(json_critical(label, &cp));
        artifacts.set("critical.json", pretty(&json!({ "points": rows })));
        found.push(cp);
    }
    let pair = check_frozen_pair(
        model,
        &found[0].phi_star,
        &found[2].phi_star,
        opts.grad_tol,
        1e-6,
    )?;
    artifacts.set(
        "critical.json",
        pretty(&json!({
            "points": rows,
            "frozen_pair": {
                "asymptotic_ok": pair.asymptotic_ok,
                "horizon_ok": pair.horizon_ok,
                "coincide": pair.coincide,
                "grad_scalar_norm": pair.grad_scalar_norm,
                "grad_effective_norm": pair.grad_effective_norm,
                "separation": pair.separation,
            },
        })),
    );
    if let Some((kind, _)) = kinds.iter().zip(&found).find(|(_, cp)| !cp.converged) {
        return Err(Error::NoConvergence(format!(
            "{} potential search stalled before reaching tolerance",
            kind.1
        )));
    }
    Ok(0)
}

fn cmd_seed_horizon(
    config: &RunConfig,
    args: &CommonArgs,
    artifacts: &mut ArtifactSet,
) -> Result<i32> {
    let model = &config.model;
    let charges = &model.charges;
    let guess = FieldPoint::new(config.horizon.guess.clone());
    let cp = find_critical(model, PotentialKind::Effective, &guess, &NewtonOptions::default())?;
    artifacts.set(
        "seed_horizon.json",
        pretty(&json!({ "attractor_point": json_critical("effective", &cp) })),
    );
    if !cp.converged {
        return Err(Error::NoConvergence(
            "effective potential search stalled before reaching tolerance".into(),
        ));
    }
    let r_h = config.horizon.r_h;
    let (background, data) =
        near_horizon_from_attractor(model, charges, &cp.phi_star, r_h, config.horizon.span)?;
    let r0 = args
        .r0
        .unwrap_or(r_h * (1.0 + config.solver.horizon_offset));
    let seed = near_horizon_seed(model, charges, &cp.phi_star, r_h, r0)?;
    let (lo, hi) = background.domain();
    artifacts.set(
        "seed_horizon.json",
        pretty(&json!({
            "attractor_point": json_critical("effective", &cp),
            "attractor": {
                "v_bh": data.v_bh,
                "v": data.v,
                "v_eff": data.v_eff,
                "ell_inv": data.ell_inv,
                "v1": data.v1,
                "v2": data.v2,
            },
            "r_h": r_h,
            "r0": r0,
            "seed": json_state(&seed),
            "background": { "variant": "near_horizon", "r_lo": lo, "r_hi": hi },
        })),
    );
    Ok(0)
}

fn cmd_solve(config: &RunConfig, base_dir: &Path, artifacts: &mut ArtifactSet) -> Result<i32> {
    let model = &config.model;
    let charges = &model.charges;
    let background = config.background.build(base_dir)?;
    let (_, hi) = background.domain();
    let r_start = config.flow.r_start;
    let r_end = config.flow.r_end.unwrap_or(hi);
    let u0 = initial_state(config);

    let picard = picard_solve(model, charges, &background, r_start, &u0, &config.solver)?;
    artifacts.set(
        "solve.json",
        pretty(&json!({ "picard": picard.to_json() })),
    );
    let picard_end = *picard.r_samples.last().unwrap();
    let rk_check = rk_solve(
        model,
        charges,
        &background,
        r_start,
        &u0,
        picard_end,
        &picard.r_samples,
        &config.solver,
    )?;
    let disagreement = picard.sup_distance(&rk_check)?;

    let targets = flow_targets(r_start, r_end, 160);
    let rk_full = rk_solve(
        model,
        charges,
        &background,
        r_start,
        &u0,
        r_end,
        &targets,
        &config.solver,
    )?;
    artifacts.set(
        "solve.json",
        pretty(&json!({
            "picard": picard.to_json(),
            "rk": rk_full.to_json(),
            "certified_window": {
                "r_lo": r_start,
                "r_hi": picard_end,
                "delta": picard.delta_used,
                "contraction_factor": picard.contraction_factor,
                "sup_disagreement": disagreement,
            },
        })),
    );
    artifacts.set("solve.csv", csv_of_profile(&rk_full));
    Ok(0)
}

fn cmd_match(config: &RunConfig, base_dir: &Path, artifacts: &mut ArtifactSet) -> Result<i32> {
    let model = &config.model;
    let charges = &model.charges;
    let background = config.background.build(base_dir)?;
    let f = &config.flow;
    let u0 = initial_state(config);
    let targets = log_spaced(f.match_lo, f.match_hi, f.match_samples);
    let profile = rk_solve(
        model,
        charges,
        &background,
        f.r_start,
        &u0,
        f.match_hi,
        &targets,
        &config.solver,
    )?;
    let fit = asymptotic_match(&profile, model, &background)?;
    artifacts.set(
        "match.json",
        pretty(&json!({
            "fit": json_fit(&fit),
            "window": { "r_lo": f.match_lo, "r_hi": f.match_hi, "samples": f.match_samples },
        })),
    );
    Ok(0)
}

fn cmd_energy(config: &RunConfig, base_dir: &Path, artifacts: &mut ArtifactSet) -> Result<i32> {
    let model = &config.model;
    let charges = &model.charges;
    let background = config.background.build(base_dir)?;
    let (_, hi) = background.domain();
    let f = &config.flow;
    let r_end = f.r_end.unwrap_or(hi);
    if f.l_split <= f.r_start || f.l_split > r_end {
        return Err(Error::ValidationError {
            section: "flow".into(),
            key: "l_split".into(),
            msg: format!(
                "split radius {} must lie inside the integration range ({}, {}]",
                f.l_split, f.r_start, r_end
            ),
        });
    }
    let u0 = initial_state(config);
    let targets = flow_targets(f.r_start, r_end, 200);
    let profile = rk_solve(
        model,
        charges,
        &background,
        f.r_start,
        &u0,
        r_end,
        &targets,
        &config.solver,
    )?;
    let report = energy(model, charges, &background, &profile, f.l_split)?;
    let bound_ok = if report.verdict == EnergyVerdict::Finite {
        Some(energy_bound_check(
            &report,
            &profile,
            model,
            charges,
            &background,
        )?)
    } else {
        None
    };
    let mut doc = report.to_json();
    if let Value::Object(map) = &mut doc {
        map.insert("bound_check".into(), json!(bound_ok));
    }
    artifacts.set("energy.json", pretty(&doc));
    if report.verdict == EnergyVerdict::Divergent {
        return Ok(8);
    }
    Ok(0)
}

fn cmd_verify(config: &RunConfig, base_dir: &Path, artifacts: &mut ArtifactSet) -> Result<i32> {
    let model = &config.model;
    let charges = &model.charges;
    let mut checks: Vec<Value> = Vec::new();
    let mut all_passed = true;
    let push = |checks: &mut Vec<Value>, all: &mut bool, name: &str, passed: bool, detail: Value| {
        *all &= passed;
        checks.push(json!({ "name": name, "passed": passed, "detail": detail }));
    };

    // Config serialization is loss-free.
    let round_trip = parse_config_str(&serialize_config(config))
        .map(|back| back == *config)
        .unwrap_or(false);
    push(&mut checks, &mut all_passed, "config_round_trip", round_trip, json!({}));

    // Metric growth bounds hold on the certification ball.
    let cert = model
        .kahler
        .certify_bounds(2.0, 10_000, config.solver.lipschitz_seed)?;
    push(
        &mut checks,
        &mut all_passed,
        "kahler_growth_bounds",
        cert.holds,
        json!({ "worst_margin": cert.worst_margin, "radius": cert.radius, "samples": cert.samples }),
    );

    // Certified fixed-point segment contracts, and the adaptive integrator
    // lands on the same trajectory.
    let background = config.background.build(base_dir)?;
    let u0 = initial_state(config);
    let picard = picard_solve(
        model,
        charges,
        &background,
        config.flow.r_start,
        &u0,
        &config.solver,
    )?;
    push(
        &mut checks,
        &mut all_passed,
        "picard_contraction",
        picard.contraction_factor < 1.0,
        json!({
            "contraction_factor": picard.contraction_factor,
            "delta": picard.delta_used,
        }),
    );
    let picard_end = *picard.r_samples.last().unwrap();
    let rk = rk_solve(
        model,
        charges,
        &background,
        config.flow.r_start,
        &u0,
        picard_end,
        &picard.r_samples,
        &config.solver,
    )?;
    let disagreement = picard.sup_distance(&rk)?;
    push(
        &mut checks,
        &mut all_passed,
        "picard_rk_agreement",
        disagreement <= 1e-8,
        json!({ "sup_distance": disagreement, "tolerance": 1e-8 }),
    );

    // Frozen-scalar field strengths satisfy the field equations, the
    // closure identities, and the charge first-integrals.
    let phi_frozen = FieldPoint::new(config.flow.phi.clone());
    let residual = residual_gauge_eom(
        model,
        &|_r| phi_frozen.clone(),
        charges,
        &background,
        &ResidualOptions::default(),
    )?;
    push(
        &mut checks,
        &mut all_passed,
        "gauge_residual",
        residual <= 1e-10,
        json!({ "residual": residual, "tolerance": 1e-10 }),
    );

    artifacts.set(
        "verify.json",
        pretty(&json!({ "checks": checks, "all_passed": all_passed })),
    );
    if all_passed {
        Ok(0)
    } else {
        Ok(9)
    }
}

fn cmd_scan(config: &RunConfig, artifacts: &mut ArtifactSet) -> Result<i32> {
    let scan = config.scan.as_ref().ok_or_else(|| Error::ValidationError {
        section: "scan".into(),
        key: String::new(),
        msg: "the scan command needs a [scan] section with charge lists".into(),
    })?;
    let model = &config.model;
    let n_v = model.n_vectors();
    let guess = FieldPoint::new(config.horizon.guess.clone());

    // Cartesian product over all charge lists, rightmost index fastest;
    // the row order is part of the artifact contract.
    let dims: Vec<&[f64]> = scan
        .magnetic
        .iter()
        .chain(scan.electric.iter())
        .map(|v| v.as_slice())
        .collect();
    let total: usize = dims.iter().map(|d| d.len()).product();
    let mut combos = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims.len()];
    loop {
        let magnetic: Vec<f64> = (0..n_v).map(|a| dims[a][idx[a]]).collect();
        let electric: Vec<f64> = (0..n_v).map(|a| dims[n_v + a][idx[n_v + a]]).collect();
        combos.push((magnetic, electric));
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dims[pos].len() {
                break;
            }
            idx[pos] = 0;
            if pos == 0 {
                break;
            }
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.output.workers)
        .build()
        .map_err(|e| Error::ValidationError {
            section: "output".into(),
            key: "workers".into(),
            msg: e.to_string(),
        })?;
    let rows: Vec<Value> = pool.install(|| {
        use rayon::prelude::*;
        combos
            .par_iter()
            .map(|(magnetic, electric)| scan_row(model, &guess, magnetic, electric))
            .collect()
    });

    artifacts.set("scan.json", pretty(&json!({ "rows": rows })));
    artifacts.set("scan.csv", scan_csv(&rows, n_v, model.n_fields()));
    Ok(0)
}

/// One scan grid point: attractor search plus horizon data. Failures are
/// recorded in the row instead of aborting the whole grid.
fn scan_row(model: &ModelSpec, guess: &FieldPoint, magnetic: &[f64], electric: &[f64]) -> Value {
    let compute = || -> Result<Value> {
        let mut local = model.clone();
        local.charges = Charges::new(magnetic.to_vec(), electric.to_vec());
        let cp = find_critical(
            &local,
            PotentialKind::Effective,
            guess,
            &NewtonOptions::default(),
        )?;
        let v_bh = local.bh_potential(&cp.phi_star, &local.charges)?;
        let v = local.scalar_potential(&cp.phi_star)?;
        let v_eff = effective_potential(v_bh, v)?;
        let ell_inv = attractor_ell_inv(v_bh, v)?;
        let (phi_re, phi_im) = parts(cp.phi_star.values());
        Ok(json!({
            "magnetic": magnetic,
            "electric": electric,
            "converged": cp.converged,
            "phi_h_re": phi_re,
            "phi_h_im": phi_im,
            "v_bh": v_bh,
            "v": v,
            "v_eff": v_eff,
            "ell_inv": ell_inv,
        }))
    };
    compute().unwrap_or_else(|e| {
        json!({
            "magnetic": magnetic,
            "electric": electric,
            "converged": false,
            "error": e.to_string(),
        })
    })
}

fn scan_csv(rows: &[Value], n_v: usize, n_c: usize) -> String {
    let mut out = String::from("");
    for a in 0..n_v {
        out.push_str(&format!("magnetic_{a},"));
    }
    for a in 0..n_v {
        out.push_str(&format!("electric_{a},"));
    }
    for i in 0..n_c {
        out.push_str(&format!("phi_h{i}_re,phi_h{i}_im,"));
    }
    out.push_str("converged,v_bh,v,v_eff,ell_inv,error\n");
    for row in rows {
        let list = |key: &str| -> Vec<String> {
            row[key]
                .as_array()
                .map(|a| a.iter().map(|v| v.to_string()).collect())
                .unwrap_or_default()
        };
        for v in list("magnetic") {
            out.push_str(&format!("{v},"));
        }
        for v in list("electric") {
            out.push_str(&format!("{v},"));
        }
        let phi_re = list("phi_h_re");
        let phi_im = list("phi_h_im");
        for i in 0..n_c {
            let re = phi_re.get(i).cloned().unwrap_or_default();
            let im = phi_im.get(i).cloned().unwrap_or_default();
            out.push_str(&format!("{re},{im},"));
        }
        let num = |key: &str| -> String {
            row[key].as_f64().map(|v| format!("{v}")).unwrap_or_default()
        };
        let err = row["error"].as_str().unwrap_or("").replace(',', ";");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row["converged"],
            num("v_bh"),
            num("v"),
            num("v_eff"),
            num("ell_inv"),
            err
        ));
    }
    out
}

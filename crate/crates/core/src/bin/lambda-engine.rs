//! Command-line front end: single-point reports, sweeps, figure presets and
//! cross-solver checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lambda_engine::dynamics::{stroboscopic_steady_state, SteadyOptions};
use lambda_engine::params::PARAM_NAMES;
use lambda_engine::sweep::{
    compare_readings, oracle_check, parse_config, preset, run_sweep, solve_point, write_outputs,
    BranchSelection, PointResult, Solver, SweepSpec, PRESETS,
};
use lambda_engine::{EngineParams, Error, ThermoFluxes};

const EXIT_GENERIC: u8 = 1;
const EXIT_CONFIG: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_ORACLE: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "lambda-engine",
    version,
    about = "Steady states, gain and energy fluxes of a mirror-modulated Λ-atom heat engine"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file (key = value with [section] headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "LAMBDA_ENGINE_WORKERS")]
    workers: Option<usize>,
    /// Sideband branch: plus, minus or both.
    #[arg(long, global = true)]
    branch: Option<BranchSelection>,
    /// Solver: closed, hb or ode.
    #[arg(long, global = true)]
    solver: Option<Solver>,
    /// Harmonic truncation order.
    #[arg(long, global = true)]
    lmax: Option<usize>,
    /// Integrator tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Parameter override, e.g. `--set eta=0.5` (repeatable).
    #[arg(long = "set", global = true, value_name = "NAME=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for one parameter point.
    Steady,
    /// Run the sweep described by --config.
    Sweep,
    /// Run a built-in figure sweep.
    Figure {
        /// One of figure2a, figure2b, figure3a, figure3b, figure4.
        preset: String,
    },
    /// Compare the sweep's solver against its reference solver.
    OracleCheck {
        /// Use a built-in preset instead of --config.
        #[arg(long)]
        preset: Option<String>,
        /// Also score both readings of the closed-form coherence numerator.
        #[arg(long)]
        compare_readings: bool,
    },
    /// Energy fluxes at one parameter point, as CSV.
    Thermo {
        /// Report powers in watts instead of ħ = 1 units.
        #[arg(long)]
        si: bool,
    },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::InvalidParameter { .. } => EXIT_CONFIG,
            Error::Io(_) => EXIT_GENERIC,
            _ => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn load_spec(common: &Common) -> Result<SweepSpec, Failure> {
    let mut spec = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_GENERIC,
                message: format!("{}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        None => SweepSpec::default(),
    };
    apply_overrides(&mut spec, common)?;
    Ok(spec)
}

fn apply_overrides(spec: &mut SweepSpec, common: &Common) -> Result<(), Failure> {
    if let Some(s) = common.solver {
        spec.solver = s;
    }
    if let Some(b) = common.branch {
        spec.branch = b;
    }
    if let Some(l) = common.lmax {
        spec.l_max = l;
    }
    if let Some(t) = common.tol {
        spec.tol = t;
    }
    for item in &common.set {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| config_failure(format!("--set expects NAME=VALUE, got `{item}`")))?;
        let name = name.trim();
        let value: f64 = value.trim().parse().map_err(|_| {
            config_failure(format!("--set {name}: malformed number `{}`", value.trim()))
        })?;
        if !spec.base.set(name, value) {
            return Err(config_failure(format!(
                "--set: unknown parameter `{name}` (known: {})",
                PARAM_NAMES.join(", ")
            )));
        }
    }
    spec.validate()?;
    Ok(())
}

fn workers(common: &Common) -> usize {
    common
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn print_params(p: &EngineParams) {
    for name in PARAM_NAMES {
        println!("  {name:<12} {}", p.get(name).expect("known name"));
    }
    println!("  {:<12} {:?}", "modulation", p.modulation);
}

fn print_result(spec: &SweepSpec, r: &PointResult) {
    println!("populations");
    println!("  rho_gg       {:e}", r.populations.gg);
    println!("  rho_gpgp     {:e}", r.populations.gpgp);
    println!("  rho_ee       {:e}", r.populations.ee);
    println!("gain (dt a = G a)");
    for &b in spec.branch.branches() {
        let g = r.gain.get(b);
        println!("  {:<12} {:e} {:+e}i", b.name(), g.re, g.im);
    }
    if let Some(f) = r.fluxes {
        println!("energy fluxes (hbar = 1)");
        println!("  P_c          {:e}", f.p_c);
        println!("  Qdot_c       {:e}", f.qdot_c);
        println!("  Qdot_out     {:e}", f.qdot_out);
        println!("  Qdot_h       {:e}", f.qdot_h);
        println!("  Edot         {:e}", f.edot_residual);
        match f.efficiency {
            Some(e) => println!("  efficiency   {e:e}"),
            None => println!("  efficiency   undefined"),
        }
        let [a, b, c] = f.identity_residuals();
        println!("  identities   |Qout-Qh| {a:.3e}  |Pc-Qc| {b:.3e}  |Edot| {c:.3e} (relative)");
    }
    let d = r.diagnostics;
    let mut diag = Vec::new();
    if let Some(v) = d.residual {
        diag.push(format!("residual {v:.3e}"));
    }
    if let Some(v) = d.periods {
        diag.push(format!("periods {v}"));
    }
    if let Some(v) = d.last_delta {
        diag.push(format!("last delta {v:.3e}"));
    }
    if let Some(v) = d.rhs_evals {
        diag.push(format!("rhs evals {v}"));
    }
    if let Some(v) = d.reconstruction_error {
        diag.push(format!("reconstruction {v:.3e}"));
    }
    if !diag.is_empty() {
        println!("diagnostics    {}", diag.join(", "));
    }
}

fn steady(common: &Common) -> Result<(), Failure> {
    let spec = load_spec(common)?;
    let p = spec.base;
    let r = solve_point(&p, spec.solver, spec.l_max, spec.tol)?;
    println!(
        "solver         {} (l_max = {}, tol = {:e})",
        spec.solver.name(),
        spec.l_max,
        spec.tol
    );
    if p.eta_out_of_range() {
        println!(
            "warning        eta = {} is outside the small-displacement regime",
            p.eta
        );
    }
    println!("parameters");
    print_params(&p);
    print_result(&spec, &r);
    if let (Some(dir), Solver::Ode) = (&common.out, spec.solver) {
        let ss = stroboscopic_steady_state(
            &p,
            &SteadyOptions {
                tol: spec.tol,
                ..Default::default()
            },
        )?;
        fs::create_dir_all(dir).map_err(Error::from)?;
        let path = dir.join("steady_orbit.csv");
        ss.orbit
            .write_csv(fs::File::create(&path).map_err(Error::from)?)
            .map_err(Error::from)?;
        println!("orbit          {}", path.display());
    }
    Ok(())
}

fn run_and_write(spec: &SweepSpec, common: &Common) -> Result<(), Failure> {
    let records = run_sweep(spec, workers(common))?;
    let out = write_outputs(spec, &records, &out_dir(common))?;
    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    println!("{}: {} points ({failed} failed)", spec.name, records.len());
    println!("csv  {}", out.csv.display());
    println!("svg  {}", out.svg.display());
    if failed == records.len() {
        return Err(Failure {
            code: EXIT_SOLVER,
            message: "every point failed".into(),
        });
    }
    Ok(())
}

fn sweep(common: &Common) -> Result<(), Failure> {
    if common.config.is_none() {
        return Err(config_failure("sweep needs --config"));
    }
    run_and_write(&load_spec(common)?, common)
}

fn preset_spec(name: &str, common: &Common) -> Result<SweepSpec, Failure> {
    let mut spec = preset(name).ok_or_else(|| {
        config_failure(format!(
            "unknown preset `{name}` (known: {})",
            PRESETS.join(", ")
        ))
    })?;
    apply_overrides(&mut spec, common)?;
    Ok(spec)
}

fn figure(name: &str, common: &Common) -> Result<(), Failure> {
    run_and_write(&preset_spec(name, common)?, common)
}

fn oracle(preset_name: Option<&str>, readings: bool, common: &Common) -> Result<(), Failure> {
    let mut spec = match preset_name {
        Some(name) => preset_spec(name, common)?,
        None => load_spec(common)?,
    };
    if spec.reference.is_none() {
        spec.reference = Some(if spec.solver == Solver::Ode {
            Solver::Hb
        } else {
            Solver::Ode
        });
    }
    let report = oracle_check(&spec, workers(common))?;
    let mut text = report.render();
    if readings {
        text.push_str(&compare_readings(&spec, workers(common))?.render());
    }
    print!("{text}");
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(Error::from)?;
        fs::write(
            Path::new(dir).join(format!("{}_oracle.txt", spec.name)),
            &text,
        )
        .map_err(Error::from)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_ORACLE,
            message: "oracle check failed".into(),
        })
    }
}

fn thermo(si: bool, common: &Common) -> Result<(), Failure> {
    let spec = load_spec(common)?;
    let r = solve_point(&spec.base, spec.solver, spec.l_max, spec.tol)?;
    let f: ThermoFluxes = r.fluxes.ok_or_else(|| Failure {
        code: EXIT_SOLVER,
        message: "solver produced no fluxes".into(),
    })?;
    let f = if si { f.to_watts() } else { f };
    println!("{}", ThermoFluxes::CSV_HEADER);
    println!("{}", f.csv_row(&spec.base));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match &cli.command {
        Command::Steady => steady(c),
        Command::Sweep => sweep(c),
        Command::Figure { preset } => figure(preset, c),
        Command::OracleCheck {
            preset,
            compare_readings,
        } => oracle(preset.as_deref(), *compare_readings, c),
        Command::Thermo { si } => thermo(*si, c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{Curve, Solver, SweepSpec};
use crate::dynamics::{extract_harmonics, stroboscopic_steady_state, SteadyOptions};
use crate::error::{Error, Result};
use crate::floquet::{
    gain, harmonic_balance_residual, harmonic_balance_solve, linear_response_gain,
    populations_closed_form, Branch, FloquetComponents, GainResult, PopulationTriple,
};
use crate::params::EngineParams;
use crate::thermo::ThermoFluxes;

/// How a solver got to its answer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Harmonic-balance residual ‖Mx − b‖∞.
    pub residual: Option<f64>,
    /// Whole periods integrated before the recorded one.
    pub periods: Option<usize>,
    /// Stroboscopic change at convergence.
    pub last_delta: Option<f64>,
    pub rhs_evals: Option<usize>,
    /// How well the retained harmonics resum the sampled orbit.
    pub reconstruction_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub gain: GainResult,
    pub populations: PopulationTriple,
    pub fluxes: Option<ThermoFluxes>,
    /// Harmonic amplitudes, for solvers that produce them.
    pub components: Option<FloquetComponents>,
    pub diagnostics: Diagnostics,
}

/// One grid point of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub curve: String,
    /// Value of the swept parameter.
    pub x: f64,
    /// Every parameter the point was evaluated with.
    pub params: EngineParams,
    pub solver: Solver,
    pub l_max: usize,
    pub tol: f64,
    /// Solver failures are kept per point instead of aborting the sweep.
    pub outcome: std::result::Result<PointResult, String>,
    pub wall_time: Duration,
}

fn triple(pops: [f64; 3]) -> PopulationTriple {
    PopulationTriple {
        gg: pops[0],
        gpgp: pops[1],
        ee: pops[2],
    }
}

/// Evaluates one parameter point with one solver.
pub fn solve_point(
    p: &EngineParams,
    solver: Solver,
    l_max: usize,
    tol: f64,
) -> Result<PointResult> {
    p.validate()?;
    match solver {
        Solver::Closed => {
            let populations = populations_closed_form(p)?;
            Ok(PointResult {
                gain: gain(p)?,
                populations,
                fluxes: ThermoFluxes::closed_form(p, Branch::Plus).ok(),
                components: None,
                diagnostics: Diagnostics::default(),
            })
        }
        Solver::Hb => {
            let fc = harmonic_balance_solve(p, l_max)?;
            let g = linear_response_gain(&fc, p)?;
            Ok(PointResult {
                gain: GainResult::uniform(g),
                populations: triple(fc.mean_state(p.probe_amplitude).populations()),
                fluxes: Some(ThermoFluxes::from_floquet(&fc, p)?),
                diagnostics: Diagnostics {
                    residual: Some(harmonic_balance_residual(p, &fc)?),
                    ..Default::default()
                },
                components: Some(fc),
            })
        }
        Solver::Ode => {
            let ss = stroboscopic_steady_state(
                p,
                &SteadyOptions {
                    tol,
                    ..Default::default()
                },
            )?;
            let h = extract_harmonics(&ss.orbit, l_max)?;
            let g = linear_response_gain(&h.components, p)?;
            Ok(PointResult {
                gain: GainResult::uniform(g),
                populations: triple(h.components.mean_state(p.probe_amplitude).populations()),
                fluxes: Some(ThermoFluxes::from_orbit(&ss.orbit, p)?),
                diagnostics: Diagnostics {
                    periods: Some(ss.periods),
                    last_delta: Some(ss.last_delta),
                    rhs_evals: Some(ss.orbit.stats.rhs_evals),
                    reconstruction_error: Some(h.reconstruction_error),
                    ..Default::default()
                },
                components: Some(h.components),
            })
        }
    }
}

fn record(spec: &SweepSpec, curve: &Curve, x: f64, solver: Solver) -> RunRecord {
    let params = spec.point(curve, x);
    let start = Instant::now();
    let outcome = solve_point(&params, solver, spec.l_max, spec.tol).map_err(|e| e.to_string());
    RunRecord {
        curve: curve.label.clone(),
        x,
        params,
        solver,
        l_max: spec.l_max,
        tol: spec.tol,
        outcome,
        wall_time: start.elapsed(),
    }
}

/// Runs every (curve, grid point) pair with `solver` on `workers` threads.
/// Records come back curve-major in grid order whatever the worker count.
pub fn run_sweep_with(spec: &SweepSpec, solver: Solver, workers: usize) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let curves = spec.effective_curves();
    let tasks: Vec<(&Curve, f64)> = curves
        .iter()
        .flat_map(|c| spec.grid.iter().map(move |&x| (c, x)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, x)| record(spec, c, x, solver))
            .collect()
    }))
}

/// [`run_sweep_with`] using the spec's own solver.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<RunRecord>> {
    run_sweep_with(spec, spec.solver, workers)
}

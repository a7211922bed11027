use std::f64::consts::PI;

use super::{check_tol, rhs_fn, Dopri5, IntegratorStats, ProbeMode, Trajectory, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::params::EngineParams;
use crate::state::DensityState;

/// Knobs of the stroboscopic steady-state search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    pub tol: f64,
    /// Convergence threshold on the max-norm change between successive
    /// period samples.
    pub threshold: f64,
    /// Integration horizon; `None` uses 200 over the slowest nonzero rate.
    pub t_max: Option<f64>,
    /// Equal intervals in the returned period.
    pub samples_per_period: usize,
    /// Starting state; `None` starts maximally mixed.
    pub initial: Option<DensityState>,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            threshold: 1e-11,
            t_max: None,
            samples_per_period: 128,
            initial: None,
        }
    }
}

/// One converged period of the fixed-probe dynamics.
#[derive(Debug, Clone)]
pub struct SteadyOrbit {
    /// Uniformly sampled period on [0, T], endpoints included. The drive is
    /// T-periodic, so phases match those of any later period.
    pub orbit: Trajectory,
    /// Mirror period, or the check interval when ω_m = 0.
    pub period: f64,
    /// Number of whole periods integrated before the returned one.
    pub periods: usize,
    /// Stroboscopic change at convergence.
    pub last_delta: f64,
}

/// Interval between convergence checks when the drive is static.
const STATIC_CHECK_INTERVAL: f64 = 1.0;

/// Integrates the fixed-probe dynamics until the state sampled once per
/// mirror period stops changing, then returns the next period densely
/// sampled. With ω_m = 0 the check interval is a fixed 1 µs and the orbit is
/// constant to within the threshold.
pub fn stroboscopic_steady_state(p: &EngineParams, opts: &SteadyOptions) -> Result<SteadyOrbit> {
    check_tol(opts.tol)?;
    p.validate()?;
    let period = if p.omega_m > 0.0 {
        2.0 * PI / p.omega_m
    } else {
        STATIC_CHECK_INTERVAL
    };
    let t_max = opts
        .t_max
        .unwrap_or_else(|| 200.0 / p.slowest_rate().unwrap_or(1.0))
        .max(2.0 * period);
    let n = opts.samples_per_period.max(1);

    let s0 = opts
        .initial
        .unwrap_or_else(|| DensityState::maximally_mixed(p.probe_amplitude));
    let samples: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                period
            } else {
                i as f64 / n as f64 * period
            }
        })
        .collect();

    // Each period restarts at t = 0, which is legitimate because the drive is
    // T-periodic. While the transient decays the steps are adaptive. After
    // that the accepted grid (plus the sample times) is frozen, so the
    // numerical period map becomes a fixed affine contraction and the
    // stroboscopic change can fall below the local integration error.
    let mut stats = IntegratorStats::default();
    let mut grid: Option<Vec<f64>> = None;
    let mut prev = s0;
    let mut periods = 0usize;
    let mut delta = f64::INFINITY;
    loop {
        if (periods + 1) as f64 * period > t_max {
            return Err(Error::Convergence {
                t_max,
                last_delta: delta,
            });
        }
        periods += 1;
        let now = match &grid {
            Some(g) => replay(p, &prev, g, opts.tol, &mut stats)?.0,
            None => {
                let mut accepted = Vec::new();
                let mut stepper =
                    Dopri5::new(rhs_fn(*p, ProbeMode::Fixed), 0.0, prev.to_array(), opts.tol);
                stepper.advance_to(period, |step| accepted.push(step.t))?;
                accumulate(&mut stats, &stepper.stats);
                let now = DensityState::from_array(stepper.y());
                if now.max_abs_diff(&prev) < FREEZE_BELOW {
                    grid = Some(merge_grid(&accepted, &samples, period));
                }
                now
            }
        };
        delta = now.max_abs_diff(&prev);
        prev = now;
        if delta < opts.threshold {
            break;
        }
    }

    let g = grid.unwrap_or_else(|| merge_grid(&[period], &samples, period));
    let (_, on_grid) = replay(p, &prev, &g, opts.tol, &mut stats)?;
    let states: Vec<DensityState> = samples
        .iter()
        .map(|t| {
            on_grid[g
                .binary_search_by(|x| x.total_cmp(t))
                .expect("sample times are grid points")]
        })
        .collect();
    Ok(SteadyOrbit {
        orbit: Trajectory {
            times: samples,
            states,
            stats,
        },
        period,
        periods,
        last_delta: delta,
    })
}

/// Stroboscopic change below which the step grid is frozen.
const FREEZE_BELOW: f64 = 1e-6;

/// Sorted union of step endpoints and sample times, starting at 0 and
/// ending exactly at `period`. Points closer than 1e-12·T are merged onto
/// the sample time.
fn merge_grid(accepted: &[f64], samples: &[f64], period: f64) -> Vec<f64> {
    let mut out: Vec<f64> = samples.to_vec();
    out.push(0.0);
    for &t in accepted {
        if samples.iter().all(|s| (s - t).abs() > 1e-12 * period) {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Fixed-step integration over `grid` (grid[0] = 0), returning the end state
/// and the state at every grid point.
fn replay(
    p: &EngineParams,
    start: &DensityState,
    grid: &[f64],
    tol: f64,
    stats: &mut IntegratorStats,
) -> Result<(DensityState, Vec<DensityState>)> {
    let mut stepper = Dopri5::new(rhs_fn(*p, ProbeMode::Fixed), grid[0], start.to_array(), tol);
    let mut states = Vec::with_capacity(grid.len());
    states.push(*start);
    for w in grid.windows(2) {
        stepper.step_fixed(w[1] - w[0])?;
        states.push(DensityState::from_array(stepper.y()));
    }
    accumulate(stats, &stepper.stats);
    Ok((*states.last().expect("non-empty grid"), states))
}

fn accumulate(total: &mut IntegratorStats, run: &IntegratorStats) {
    total.accepted += run.accepted;
    total.rejected += run.rejected;
    total.rhs_evals += run.rhs_evals;
    total.max_local_error = total.max_local_error.max(run.max_local_error);
}

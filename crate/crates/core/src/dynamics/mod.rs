//! Time-domain integration of the modulated Bloch equations.
//!
//! This is the brute-force route to the periodic steady state: integrate
//! long enough that the one-period map has contracted, then Fourier-analyse
//! the last period.

mod harmonics;
mod integrator;
mod rhs;
mod steady;

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::EngineParams;
use crate::state::{DensityState, Level};

pub use harmonics::{extract_harmonics, Harmonics, MIN_ORBIT_SAMPLES};
pub use integrator::IntegratorStats;
pub use rhs::{bloch_rhs, ProbeMode};
pub use steady::{stroboscopic_steady_state, SteadyOptions, SteadyOrbit};

pub(crate) use integrator::Dopri5;

/// Default relative tolerance of the adaptive integrator.
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;

/// Which points of an integration are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    EveryStep,
    /// `n` equal intervals over the span, `n + 1` samples.
    Uniform(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub tol: f64,
    pub mode: ProbeMode,
    pub sampling: Sampling,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            mode: ProbeMode::Fixed,
            sampling: Sampling::EveryStep,
        }
    }
}

/// Time-ordered samples of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityState>,
    pub stats: IntegratorStats,
}

/// Worst-case physicality figures over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub max_trace_deviation: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityState)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn physicality(&self) -> Physicality {
        let mut out = Physicality {
            max_trace_deviation: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
        };
        for s in &self.states {
            out.max_trace_deviation = out.max_trace_deviation.max((s.trace() - 1.0).norm());
            out.max_hermiticity_error = out.max_hermiticity_error.max(s.hermiticity_error());
            out.min_eigenvalue = out.min_eigenvalue.min(s.min_eigenvalue());
        }
        out
    }

    /// Columns: `t`, real and imaginary part of each ρ_jk (row-major over
    /// g, g′, e), then of the probe amplitude.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut header = String::from("t");
        for j in Level::ALL {
            for k in Level::ALL {
                header.push_str(&format!(
                    ",rho_{}_{}_re,rho_{}_{}_im",
                    j.tag(),
                    k.tag(),
                    j.tag(),
                    k.tag()
                ));
            }
        }
        header.push_str(",a_re,a_im");
        writeln!(w, "{header}")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut line = format!("{t}");
            for z in s.rho.transpose().iter().chain(std::iter::once(&s.probe)) {
                line.push_str(&format!(",{},{}", z.re, z.im));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::invalid(
            "tol",
            format!("{tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"),
        ));
    }
    Ok(())
}

pub(crate) fn rhs_fn(
    p: EngineParams,
    mode: ProbeMode,
) -> impl FnMut(f64, &[Complex64; 10]) -> [Complex64; 10] {
    move |t, y| bloch_rhs(&DensityState::from_array(y), t, &p, mode).to_array()
}

/// Integrates from `s0` over `span` keeping every accepted step, with the
/// probe held fixed.
pub fn evolve(
    s0: &DensityState,
    span: (f64, f64),
    p: &EngineParams,
    tol: f64,
) -> Result<Trajectory> {
    evolve_with(
        s0,
        span,
        p,
        &EvolveOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn evolve_with(
    s0: &DensityState,
    span: (f64, f64),
    p: &EngineParams,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_tol(opts.tol)?;
    p.validate()?;
    let (t0, t1) = span;
    if !(t1 >= t0) {
        return Err(Error::invalid(
            "span",
            format!("end {t1} precedes start {t0}"),
        ));
    }
    let mut stepper = Dopri5::new(rhs_fn(*p, opts.mode), t0, s0.to_array(), opts.tol);
    let mut times = vec![t0];
    let mut states = vec![*s0];
    match opts.sampling {
        Sampling::EveryStep => {
            stepper.advance_to(t1, |info| {
                times.push(info.t);
                states.push(DensityState::from_array(info.y));
            })?;
        }
        Sampling::Uniform(n) => {
            let n = n.max(1);
            for i in 1..=n {
                let t = if i == n {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / n as f64
                };
                stepper.advance_to(t, |_| {})?;
                times.push(t);
                states.push(DensityState::from_array(stepper.y()));
            }
        }
    }
    Ok(Trajectory {
        times,
        states,
        stats: stepper.stats,
    })
}

//! Cross-solver comparison over a sweep grid.

use std::fmt::Write as _;

use super::config::{Solver, SweepSpec};
use super::run::{run_sweep_with, PointResult, RunRecord};
use crate::error::{Error, Result};
use crate::floquet::{gain_with, NumeratorReading};

/// Relative bound on the steady-state flux identities.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub curve: String,
    pub x: f64,
    /// max over harmonics and entries of |ρ_a − ρ_b|, when both solvers
    /// produce harmonic amplitudes.
    pub component_delta: Option<f64>,
    /// Largest relative population difference.
    pub population_delta: Option<f64>,
    /// |G_a − G_b| on the plus branch.
    pub gain_delta: Option<f64>,
    /// Worst of |Q̇_out − Q̇_h|, |P_c − Q̇_c|, |Ė| (relative) over the solvers
    /// that resolve the steady state.
    pub identity_residual: Option<f64>,
    pub passed: bool,
    /// Failure message; the point is skipped.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub solver: Solver,
    pub reference: Solver,
    pub tolerance: f64,
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    /// True when at least one point was compared and every compared point passed.
    pub fn passed(&self) -> bool {
        let compared: Vec<&OracleRow> = self.rows.iter().filter(|r| r.error.is_none()).collect();
        !compared.is_empty() && compared.iter().all(|r| r.passed)
    }

    pub fn max_component_delta(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.component_delta)
            .reduce(f64::max)
    }

    pub fn max_population_delta(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.population_delta)
            .reduce(f64::max)
    }

    pub fn max_identity_residual(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.identity_residual)
            .reduce(f64::max)
    }

    /// Per-point table followed by a one-line verdict.
    pub fn render(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.3e}"));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} vs {} (tolerance {:e}, identities {:e})",
            self.solver.name(),
            self.reference.name(),
            self.tolerance,
            IDENTITY_TOL
        );
        let _ = writeln!(
            out,
            "{:<24} {:>12} {:>12} {:>12} {:>12} {:>12}  result",
            "curve", "x", "components", "populations", "gain", "identities"
        );
        for r in &self.rows {
            let verdict = match &r.error {
                Some(e) => format!("skipped: {e}"),
                None if r.passed => "pass".into(),
                None => "FAIL".into(),
            };
            let _ = writeln!(
                out,
                "{:<24} {:>12} {:>12} {:>12} {:>12} {:>12}  {verdict}",
                r.curve,
                format!("{:.6}", r.x),
                fmt(r.component_delta),
                fmt(r.population_delta),
                fmt(r.gain_delta),
                fmt(r.identity_residual)
            );
        }
        let skipped = self.rows.iter().filter(|r| r.error.is_some()).count();
        let failed = self
            .rows
            .iter()
            .filter(|r| r.error.is_none() && !r.passed)
            .count();
        let _ = writeln!(
            out,
            "{}: {} points, {} failed, {} skipped; max component delta {}, max population delta {}, max identity residual {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.rows.len(),
            failed,
            skipped,
            fmt(self.max_component_delta()),
            fmt(self.max_population_delta()),
            fmt(self.max_identity_residual())
        );
        out
    }
}

fn identity_residual(solver: Solver, r: &PointResult) -> Option<f64> {
    if solver == Solver::Closed {
        return None;
    }
    r.fluxes
        .map(|f| f.identity_residuals().into_iter().fold(0.0, f64::max))
}

fn compare(a: &RunRecord, b: &RunRecord, tolerance: f64) -> OracleRow {
    let mut row = OracleRow {
        curve: a.curve.clone(),
        x: a.x,
        component_delta: None,
        population_delta: None,
        gain_delta: None,
        identity_residual: None,
        passed: false,
        error: None,
    };
    let (ra, rb) = match (&a.outcome, &b.outcome) {
        (Ok(ra), Ok(rb)) => (ra, rb),
        (Err(e), _) => {
            row.error = Some(format!("{}: {e}", a.solver.name()));
            return row;
        }
        (_, Err(e)) => {
            row.error = Some(format!("{}: {e}", b.solver.name()));
            return row;
        }
    };
    if let (Some(ca), Some(cb)) = (&ra.components, &rb.components) {
        row.component_delta = Some(ca.max_abs_diff(cb));
    }
    let (pa, pb) = (ra.populations.as_array(), rb.populations.as_array());
    row.population_delta = Some(
        pa.iter()
            .zip(&pb)
            .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max),
    );
    row.gain_delta = Some((ra.gain.plus - rb.gain.plus).norm());
    row.identity_residual = [
        identity_residual(a.solver, ra),
        identity_residual(b.solver, rb),
    ]
    .into_iter()
    .flatten()
    .reduce(f64::max);

    let agree = match row.component_delta {
        Some(d) => d <= tolerance,
        None => row.population_delta.is_some_and(|d| d <= tolerance),
    };
    row.passed = agree && row.identity_residual.is_none_or(|r| r <= IDENTITY_TOL);
    row
}

/// Runs the spec's solver and its reference solver over the whole grid and
/// compares them point by point. Amplitudes are compared in absolute terms
/// when both solvers produce them, populations relatively otherwise.
pub fn oracle_check(spec: &SweepSpec, workers: usize) -> Result<OracleReport> {
    let reference = spec
        .reference
        .ok_or_else(|| Error::invalid("reference", "oracle check needs a reference solver"))?;
    let a = run_sweep_with(spec, spec.solver, workers)?;
    let b = run_sweep_with(spec, reference, workers)?;
    Ok(OracleReport {
        solver: spec.solver,
        reference,
        tolerance: spec.oracle_tol,
        rows: a
            .iter()
            .zip(&b)
            .map(|(a, b)| compare(a, b, spec.oracle_tol))
            .collect(),
    })
}

/// Closed-form gain under each reading of the coherence numerator, measured
/// against a numerically exact gain at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingRow {
    pub curve: String,
    pub x: f64,
    /// |G₊ − G_ref| with the factor read as 1 + (η/2)(ρ_ee − ρ_g′g′).
    pub as_printed: Option<f64>,
    /// |G₊ − G_ref| with the factor read as (1 + η/2)(ρ_ee − ρ_g′g′).
    pub factored: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadingReport {
    pub reference: Solver,
    pub rows: Vec<ReadingRow>,
}

impl ReadingReport {
    /// Points where each reading is strictly closer: (as printed, factored).
    pub fn wins(&self) -> (usize, usize) {
        self.rows
            .iter()
            .fold((0, 0), |(a, f), r| match (r.as_printed, r.factored) {
                (Some(x), Some(y)) if x < y => (a + 1, f),
                (Some(x), Some(y)) if y < x => (a, f + 1),
                _ => (a, f),
            })
    }

    pub fn render(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.3e}"));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "coherence numerator readings vs {} gain (plus branch)",
            self.reference.name()
        );
        let _ = writeln!(
            out,
            "{:<24} {:>12} {:>12} {:>12}",
            "curve", "x", "as printed", "factored"
        );
        for r in &self.rows {
            let _ = write!(
                out,
                "{:<24} {:>12} {:>12} {:>12}",
                r.curve,
                format!("{:.6}", r.x),
                fmt(r.as_printed),
                fmt(r.factored)
            );
            match &r.error {
                Some(e) => {
                    let _ = writeln!(out, "  skipped: {e}");
                }
                None => out.push('\n'),
            }
        }
        let (a, f) = self.wins();
        let _ = writeln!(
            out,
            "closer: as printed at {a} points, factored at {f} points"
        );
        out
    }
}

/// Evaluates both readings of the closed-form coherence numerator over the
/// grid against the spec's reference solver (time domain when unset).
pub fn compare_readings(spec: &SweepSpec, workers: usize) -> Result<ReadingReport> {
    let reference = match spec.reference {
        Some(Solver::Closed) | None => Solver::Ode,
        Some(r) => r,
    };
    let records = run_sweep_with(spec, reference, workers)?;
    let rows = records
        .iter()
        .map(|r| {
            let mut row = ReadingRow {
                curve: r.curve.clone(),
                x: r.x,
                as_printed: None,
                factored: None,
                error: None,
            };
            let exact = match &r.outcome {
                Ok(res) => res.gain.plus,
                Err(e) => {
                    row.error = Some(format!("{}: {e}", reference.name()));
                    return row;
                }
            };
            let delta = |reading| gain_with(&r.params, reading).map(|g| (g.plus - exact).norm());
            match (
                delta(NumeratorReading::AsPrinted),
                delta(NumeratorReading::Factored),
            ) {
                (Ok(a), Ok(f)) => {
                    row.as_printed = Some(a);
                    row.factored = Some(f);
                }
                (Err(e), _) | (_, Err(e)) => row.error = Some(format!("closed: {e}")),
            }
            row
        })
        .collect();
    Ok(ReadingReport { reference, rows })
}

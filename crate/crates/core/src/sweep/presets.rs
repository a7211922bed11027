//! Built-in sweeps reproducing the standard figure families.

use std::path::PathBuf;

use super::config::{linspace, Curve, Metric, Solver, SweepSpec};

pub const PRESETS: [&str; 5] = ["figure2a", "figure2b", "figure3a", "figure3b", "figure4"];

/// Coupling strengths of the η families.
pub const ETAS: [f64; 3] = [0.01, 0.1, 0.5];
/// Control Rabi frequencies of the κ-sweep family.
pub const RABIS: [f64; 3] = [10.0, 20.0, 30.0];
/// (n_h, n_c) pairs of the second κ-sweep family.
pub const OCCUPATION_PAIRS: [(f64, f64); 3] = [(0.1, 0.05), (0.05, 0.05), (0.05, 0.1)];

fn eta_curves() -> Vec<Curve> {
    ETAS.iter()
        .map(|&e| Curve {
            label: format!("η = {e}"),
            overrides: vec![("eta".into(), e)],
        })
        .collect()
}

fn named(name: &str, parameter: &str, grid: Vec<f64>, curves: Vec<Curve>) -> SweepSpec {
    SweepSpec {
        name: name.into(),
        parameter: parameter.into(),
        grid,
        curves,
        reference: Some(Solver::Ode),
        csv: Some(PathBuf::from(format!("{name}.csv"))),
        svg: Some(PathBuf::from(format!("{name}.svg"))),
        ..Default::default()
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Option<SweepSpec> {
    let occupation_grid = || linspace(0.01, 0.2, 33);
    let kappa_grid = || linspace(0.0, 10.0, 51);
    Some(match name {
        "figure2a" => named(name, "n_h", occupation_grid(), eta_curves()),
        "figure2b" => named(name, "n_c", occupation_grid(), eta_curves()),
        "figure3a" => named(
            name,
            "kappa",
            kappa_grid(),
            RABIS
                .iter()
                .map(|&o| Curve {
                    label: format!("Ω_c = {o} MHz"),
                    overrides: vec![("omega_rabi".into(), o)],
                })
                .collect(),
        ),
        "figure3b" => named(
            name,
            "kappa",
            kappa_grid(),
            OCCUPATION_PAIRS
                .iter()
                .map(|&(h, c)| Curve {
                    label: format!("n_h = {h}, n_c = {c}"),
                    overrides: vec![("n_h".into(), h), ("n_c".into(), c)],
                })
                .collect(),
        ),
        "figure4" => SweepSpec {
            solver: Solver::Hb,
            metric: Metric::Efficiency,
            ..named(name, "n_h", occupation_grid(), eta_curves())
        },
        _ => return None,
    })
}

/// Axis caption for a swept parameter.
pub fn axis_label(parameter: &str) -> String {
    match parameter {
        "n_h" => "hot-reservoir occupation n_h".into(),
        "n_c" => "cold-reservoir occupation n_c".into(),
        "kappa" => "probe leakage κ (MHz)".into(),
        "eta" => "atom-mirror coupling η".into(),
        "omega_rabi" => "control Rabi frequency Ω_c (MHz)".into(),
        "omega_m" => "mirror frequency ω_m (MHz)".into(),
        "g_pr" => "probe coupling g (MHz)".into(),
        other => other.into(),
    }
}

//! Parameter sweeps: configuration, parallel execution, CSV/SVG output,
//! figure presets and cross-solver reports.

mod config;
mod csv;
mod oracle;
mod presets;
mod run;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{linspace, parse_config, BranchSelection, Curve, Metric, Solver, SweepSpec};
pub use csv::{header as csv_header, quote as csv_quote, to_csv_string, write_csv};
pub use oracle::{
    compare_readings, oracle_check, OracleReport, OracleRow, ReadingReport, ReadingRow,
    IDENTITY_TOL,
};
pub use presets::{axis_label, preset, ETAS, OCCUPATION_PAIRS, PRESETS, RABIS};
pub use run::{run_sweep, run_sweep_with, solve_point, Diagnostics, PointResult, RunRecord};
pub use svg::{plot_from_records, render_svg, PlotSpec, Series};

use crate::error::Result;

/// Plot of a finished sweep, titled by the spec name.
pub fn plot_for(spec: &SweepSpec, records: &[RunRecord]) -> PlotSpec {
    plot_from_records(
        &spec.name,
        &axis_label(&spec.parameter),
        records,
        spec.metric,
        spec.branch,
    )
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Writes the CSV and SVG of a sweep into `dir`, using the spec's file names
/// (relative names are resolved against `dir`) or `<name>.csv` / `<name>.svg`.
pub fn write_outputs(spec: &SweepSpec, records: &[RunRecord], dir: &Path) -> Result<Outputs> {
    fs::create_dir_all(dir)?;
    let resolve = |p: &Option<PathBuf>, ext: &str| match p {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(format!("{}.{ext}", spec.name)),
    };
    let out = Outputs {
        csv: resolve(&spec.csv, "csv"),
        svg: resolve(&spec.svg, "svg"),
    };
    for path in [&out.csv, &out.svg] {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&out.csv, to_csv_string(records))?;
    fs::write(&out.svg, render_svg(&plot_for(spec, records)))?;
    Ok(out)
}

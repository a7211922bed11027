//! Deterministic CSV output for sweep records. Wall time is deliberately not
//! written so that identical runs produce identical files.

use std::io::Write;

use super::run::RunRecord;
use crate::params::{ModulationMode, PARAM_NAMES};

const RESULT_COLUMNS: [&str; 18] = [
    "status",
    "G_plus_re",
    "G_plus_im",
    "G_minus_re",
    "G_minus_im",
    "rho_gg",
    "rho_gpgp",
    "rho_ee",
    "P_c",
    "Qdot_c",
    "Qdot_out",
    "Qdot_h",
    "Edot",
    "efficiency",
    "hb_residual",
    "periods",
    "last_delta",
    "error",
];

/// Column names, in order.
pub fn header() -> Vec<String> {
    let mut cols: Vec<String> = ["curve", "x", "solver", "l_max", "tol"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(PARAM_NAMES.iter().map(|s| s.to_string()));
    cols.push("modulation".into());
    cols.extend(RESULT_COLUMNS.iter().map(|s| s.to_string()));
    cols
}

/// Quotes a field when it holds a comma, quote or line break.
pub fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn row(r: &RunRecord) -> Vec<String> {
    let mut out = vec![
        quote(&r.curve),
        r.x.to_string(),
        r.solver.name().into(),
        r.l_max.to_string(),
        r.tol.to_string(),
    ];
    out.extend(
        PARAM_NAMES
            .iter()
            .map(|n| r.params.get(n).expect("known name").to_string()),
    );
    out.push(
        match r.params.modulation {
            ModulationMode::FirstOrder => "first-order",
            ModulationMode::Exact => "exact",
        }
        .into(),
    );
    match &r.outcome {
        Ok(res) => {
            let f = res.fluxes;
            out.push("ok".into());
            for z in [res.gain.plus, res.gain.minus] {
                out.push(z.re.to_string());
                out.push(z.im.to_string());
            }
            out.push(res.populations.gg.to_string());
            out.push(res.populations.gpgp.to_string());
            out.push(res.populations.ee.to_string());
            out.push(opt(f.map(|f| f.p_c)));
            out.push(opt(f.map(|f| f.qdot_c)));
            out.push(opt(f.map(|f| f.qdot_out)));
            out.push(opt(f.map(|f| f.qdot_h)));
            out.push(opt(f.map(|f| f.edot_residual)));
            out.push(opt(f.and_then(|f| f.efficiency)));
            out.push(opt(res.diagnostics.residual));
            out.push(opt(res.diagnostics.periods));
            out.push(opt(res.diagnostics.last_delta));
            out.push(String::new());
        }
        Err(e) => {
            out.push("error".into());
            out.extend(std::iter::repeat_n(String::new(), RESULT_COLUMNS.len() - 2));
            out.push(quote(e));
        }
    }
    out
}

pub fn write_csv(records: &[RunRecord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{}", header().join(","))?;
    for r in records {
        writeln!(w, "{}", row(r).join(","))?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 fields")
}

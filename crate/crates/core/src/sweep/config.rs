//! Line-oriented sweep configuration.
//!
//! ```text
//! # comment
//! [sweep]
//! name = scan
//! parameter = n_h
//! grid = linspace(0.01, 0.2, 33)     # or an explicit list: 0.01, 0.02
//! solver = closed                    # closed | hb | ode
//! reference = ode                    # optional second solver for oracle checks
//! branch = plus                      # plus | minus | both
//! metric = gain                      # gain | efficiency | populations
//! l_max = 3
//! tol = 1e-10
//! oracle_tol = 1e-6
//!
//! [params]
//! omega_rabi = 10
//! modulation = first-order           # first-order | exact
//!
//! [curve]                            # repeatable; one plotted family member each
//! label = eta 0.5
//! eta = 0.5
//!
//! [output]
//! csv = scan.csv
//! svg = scan.svg
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dynamics::{DEFAULT_TOL, MAX_TOL, MIN_TOL};
use crate::error::{Error, Result};
use crate::params::{EngineParams, ModulationMode, PARAM_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    /// Truncated-Fourier closed forms.
    Closed,
    /// Harmonic balance at order `l_max`.
    Hb,
    /// Time-domain stroboscopic steady state.
    Ode,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Closed => "closed",
            Solver::Hb => "hb",
            Solver::Ode => "ode",
        }
    }
}

impl FromStr for Solver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(Solver::Closed),
            "hb" => Ok(Solver::Hb),
            "ode" => Ok(Solver::Ode),
            _ => Err(format!("unknown solver `{s}` (expected closed, hb or ode)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchSelection {
    #[default]
    Plus,
    Minus,
    Both,
}

impl BranchSelection {
    pub fn name(self) -> &'static str {
        match self {
            BranchSelection::Plus => "plus",
            BranchSelection::Minus => "minus",
            BranchSelection::Both => "both",
        }
    }

    pub fn branches(self) -> &'static [crate::Branch] {
        use crate::Branch;
        match self {
            BranchSelection::Plus => &[Branch::Plus],
            BranchSelection::Minus => &[Branch::Minus],
            BranchSelection::Both => &Branch::BOTH,
        }
    }
}

impl FromStr for BranchSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plus" => Ok(BranchSelection::Plus),
            "minus" => Ok(BranchSelection::Minus),
            "both" => Ok(BranchSelection::Both),
            _ => Err(format!(
                "unknown branch `{s}` (expected plus, minus or both)"
            )),
        }
    }
}

/// Quantity on the y axis of the plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Gain,
    Efficiency,
    Populations,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Gain => "gain",
            Metric::Efficiency => "efficiency",
            Metric::Populations => "populations",
        }
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gain" => Ok(Metric::Gain),
            "efficiency" => Ok(Metric::Efficiency),
            "populations" => Ok(Metric::Populations),
            _ => Err(format!(
                "unknown metric `{s}` (expected gain, efficiency or populations)"
            )),
        }
    }
}

/// One family member: overrides applied on top of the base parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub overrides: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    /// Swept [`EngineParams`] field, by config name.
    pub parameter: String,
    /// Non-empty, strictly monotone.
    pub grid: Vec<f64>,
    pub base: EngineParams,
    /// Empty means a single curve with the base parameters.
    pub curves: Vec<Curve>,
    pub solver: Solver,
    pub reference: Option<Solver>,
    pub branch: BranchSelection,
    pub metric: Metric,
    pub l_max: usize,
    pub tol: f64,
    /// Pass threshold for cross-solver deltas.
    pub oracle_tol: f64,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let base = EngineParams::default();
        Self {
            name: "sweep".into(),
            parameter: "n_h".into(),
            grid: vec![base.n_h],
            base,
            curves: Vec::new(),
            solver: Solver::Closed,
            reference: None,
            branch: BranchSelection::Plus,
            metric: Metric::Gain,
            l_max: 3,
            tol: DEFAULT_TOL,
            oracle_tol: 1e-6,
            csv: None,
            svg: None,
        }
    }
}

/// Evenly spaced points from `a` to `b` inclusive; the last point is `b` exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl SweepSpec {
    /// Curves to run, with an implicit base curve when none are configured.
    pub fn effective_curves(&self) -> Vec<Curve> {
        if self.curves.is_empty() {
            vec![Curve {
                label: String::new(),
                overrides: Vec::new(),
            }]
        } else {
            self.curves.clone()
        }
    }

    /// Parameters of one grid point of one curve.
    pub fn point(&self, curve: &Curve, x: f64) -> EngineParams {
        let mut p = self.base;
        for (k, v) in &curve.overrides {
            p.set(k, *v);
        }
        p.set(&self.parameter, x);
        p
    }

    /// Checks everything except the base-parameter invariants, which the
    /// parser checks itself to attach positions.
    pub fn validate(&self) -> Result<()> {
        if !PARAM_NAMES.contains(&self.parameter.as_str()) {
            return Err(Error::invalid(
                "parameter",
                format!("`{}` is not a parameter name", self.parameter),
            ));
        }
        check_grid(&self.grid).map_err(|m| Error::invalid("grid", m))?;
        if !(MIN_TOL..=MAX_TOL).contains(&self.tol) {
            return Err(Error::invalid(
                "tol",
                format!("{:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]", self.tol),
            ));
        }
        if !(self.oracle_tol > 0.0 && self.oracle_tol.is_finite()) {
            return Err(Error::invalid("oracle_tol", "must be positive"));
        }
        self.base.validate()?;
        for curve in self.effective_curves() {
            for (k, _) in &curve.overrides {
                if !PARAM_NAMES.contains(&k.as_str()) {
                    return Err(Error::invalid(
                        "curve",
                        format!("`{k}` is not a parameter name"),
                    ));
                }
            }
            for &x in &self.grid {
                self.point(&curve, x).validate()?;
            }
        }
        Ok(())
    }

    /// Renders the spec in the config format. Grids are written as explicit
    /// lists, so `parse_config(&spec.to_config())` returns an equal spec.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(out, "[sweep]");
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "parameter = {}", self.parameter);
        let _ = writeln!(out, "grid = {}", list(&self.grid));
        let _ = writeln!(out, "solver = {}", self.solver.name());
        if let Some(r) = self.reference {
            let _ = writeln!(out, "reference = {}", r.name());
        }
        let _ = writeln!(out, "branch = {}", self.branch.name());
        let _ = writeln!(out, "metric = {}", self.metric.name());
        let _ = writeln!(out, "l_max = {}", self.l_max);
        let _ = writeln!(out, "tol = {:e}", self.tol);
        let _ = writeln!(out, "oracle_tol = {:e}", self.oracle_tol);
        let _ = writeln!(out, "\n[params]");
        for name in PARAM_NAMES {
            let _ = writeln!(out, "{name} = {}", self.base.get(name).expect("known name"));
        }
        let _ = writeln!(
            out,
            "modulation = {}",
            modulation_name(self.base.modulation)
        );
        for c in &self.curves {
            let _ = writeln!(out, "\n[curve]");
            let _ = writeln!(out, "label = {}", c.label);
            for (k, v) in &c.overrides {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        if self.csv.is_some() || self.svg.is_some() {
            let _ = writeln!(out, "\n[output]");
            if let Some(p) = &self.csv {
                let _ = writeln!(out, "csv = {}", p.display());
            }
            if let Some(p) = &self.svg {
                let _ = writeln!(out, "svg = {}", p.display());
            }
        }
        out
    }
}

fn modulation_name(m: ModulationMode) -> &'static str {
    match m {
        ModulationMode::FirstOrder => "first-order",
        ModulationMode::Exact => "exact",
    }
}

fn check_grid(grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(format!("grid value {x} is not finite"));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err("grid is not strictly monotone".into());
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Sweep,
    Params,
    Curve,
    Output,
}

/// A value with the 1-based position where it starts.
struct Located<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Located<'_> {
    fn err(&self, message: impl std::fmt::Display) -> Error {
        Error::config(self.line, self.column, message)
    }

    fn number(&self) -> Result<f64> {
        parse_number(self.text).map_err(|m| self.err(m))
    }
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("malformed number `{}`", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("number `{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_grid(v: &Located<'_>) -> Result<Vec<f64>> {
    let text = v.text;
    if let Some(inner) = text
        .strip_prefix("linspace(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let args: Vec<&str> = inner.split(',').collect();
        if args.len() != 3 {
            return Err(v.err("linspace takes three arguments (start, stop, count)"));
        }
        let a = parse_number(args[0]).map_err(|m| v.err(m))?;
        let b = parse_number(args[1]).map_err(|m| v.err(m))?;
        let n: usize = args[2]
            .trim()
            .parse()
            .map_err(|_| v.err(format!("malformed count `{}`", args[2].trim())))?;
        return Ok(linspace(a, b, n));
    }
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let lead = item.len() - item.trim_start().len();
        out.push(
            parse_number(item).map_err(|m| Error::config(v.line, v.column + offset + lead, m))?,
        );
        offset += item.len() + 1;
    }
    Ok(out)
}

/// Parses and validates a config document. Unset fields keep their defaults.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut section = Section::None;
    let mut seen: HashSet<(usize, String)> = HashSet::new();
    let mut section_id = 0usize;
    // Position of each base-parameter key, for validation messages.
    let mut param_pos: HashMap<&'static str, (usize, usize)> = HashMap::new();
    let mut grid_pos = (1, 1);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(line, indent + 1, "unterminated section header"))?
                .trim();
            section = match name {
                "sweep" => Section::Sweep,
                "params" => Section::Params,
                "curve" => {
                    spec.curves.push(Curve {
                        label: format!("curve {}", spec.curves.len() + 1),
                        overrides: Vec::new(),
                    });
                    Section::Curve
                }
                "output" => Section::Output,
                _ => {
                    return Err(Error::config(
                        line,
                        indent + 2,
                        format!("unknown section `{name}`"),
                    ))
                }
            };
            section_id += 1;
            continue;
        }
        let eq = content
            .find('=')
            .ok_or_else(|| Error::config(line, indent + 1, "expected `key = value`"))?;
        let key = content[..eq].trim();
        let after = &content[eq + 1..];
        let value = Located {
            text: after.trim(),
            line,
            column: eq + 2 + (after.len() - after.trim_start().len()),
        };
        let key_col = indent + 1;
        if key.is_empty() {
            return Err(Error::config(line, key_col, "missing key"));
        }
        if !seen.insert((section_id, key.to_owned())) {
            return Err(Error::config(
                line,
                key_col,
                format!("duplicate key `{key}`"),
            ));
        }

        match section {
            Section::None => {
                return Err(Error::config(
                    line,
                    key_col,
                    format!("key `{key}` outside any section"),
                ))
            }
            Section::Sweep => match key {
                "name" => spec.name = value.text.to_owned(),
                "parameter" => {
                    if !PARAM_NAMES.contains(&value.text) {
                        return Err(value.err(format!("unknown parameter `{}`", value.text)));
                    }
                    spec.parameter = value.text.to_owned();
                }
                "grid" => {
                    spec.grid = parse_grid(&value)?;
                    grid_pos = (value.line, value.column);
                }
                "solver" => spec.solver = value.text.parse().map_err(|m: String| value.err(m))?,
                "reference" => {
                    spec.reference = Some(value.text.parse().map_err(|m: String| value.err(m))?)
                }
                "branch" => spec.branch = value.text.parse().map_err(|m: String| value.err(m))?,
                "metric" => spec.metric = value.text.parse().map_err(|m: String| value.err(m))?,
                "l_max" => {
                    spec.l_max = value
                        .text
                        .parse()
                        .map_err(|_| value.err(format!("malformed integer `{}`", value.text)))?
                }
                "tol" => spec.tol = value.number()?,
                "oracle_tol" => spec.oracle_tol = value.number()?,
                _ => {
                    return Err(Error::config(
                        line,
                        key_col,
                        format!("unknown key `{key}` in [sweep]"),
                    ))
                }
            },
            Section::Params => {
                if key == "modulation" {
                    spec.base.modulation = match value.text {
                        "first-order" => ModulationMode::FirstOrder,
                        "exact" => ModulationMode::Exact,
                        other => return Err(value.err(format!("unknown modulation `{other}`"))),
                    };
                    continue;
                }
                let name = PARAM_NAMES.iter().find(|n| **n == key).ok_or_else(|| {
                    Error::config(line, key_col, format!("unknown key `{key}` in [params]"))
                })?;
                spec.base.set(name, value.number()?);
                param_pos.insert(name, (line, value.column));
            }
            Section::Curve => {
                let curve = spec.curves.last_mut().expect("curve section opened");
                if key == "label" {
                    curve.label = value.text.to_owned();
                } else if PARAM_NAMES.contains(&key) {
                    curve.overrides.push((key.to_owned(), value.number()?));
                } else {
                    return Err(Error::config(
                        line,
                        key_col,
                        format!("unknown key `{key}` in [curve]"),
                    ));
                }
            }
            Section::Output => match key {
                "csv" => spec.csv = Some(PathBuf::from(value.text)),
                "svg" => spec.svg = Some(PathBuf::from(value.text)),
                _ => {
                    return Err(Error::config(
                        line,
                        key_col,
                        format!("unknown key `{key}` in [output]"),
                    ))
                }
            },
        }
    }

    if let Err(m) = check_grid(&spec.grid) {
        return Err(Error::config(grid_pos.0, grid_pos.1, m));
    }
    if let Err(e) = spec.base.validate() {
        let (line, column) = match &e {
            Error::InvalidParameter { field, .. } => {
                param_pos.get(field).copied().unwrap_or((1, 1))
            }
            _ => (1, 1),
        };
        return Err(Error::config(line, column, e));
    }
    spec.validate()
        .map_err(|e| Error::config(grid_pos.0, grid_pos.1, e))?;
    Ok(spec)
}

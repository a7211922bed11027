//! Engine configuration, reservoir occupations, dephasing rates and the
//! mirror-modulated control field.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Rb D1 optical frequency, MHz (ordinary frequency).
pub const RB_D1_MHZ: f64 = 377.107e6;
/// Rb-87 ground-state hyperfine splitting, MHz.
pub const RB87_HYPERFINE_MHZ: f64 = 6835.0;
/// Natural decay rate of the Rb D1 line, MHz.
pub const RB_D1_DECAY: f64 = 5.7;

/// How the mirror displacement enters the control field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulationMode {
    /// Ω_c(t) = Ω_c [1 + iη cos(ω_m t)].
    #[default]
    FirstOrder,
    /// Ω_c(t) = Ω_c exp(iη cos(ω_m t)).
    Exact,
}

/// One engine configuration. All rates share one unit (MHz as angular rate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams {
    /// Γ_eg, decay |e⟩ → |g⟩ (hot transition).
    pub gamma_eg: f64,
    /// Γ_eg′, decay |e⟩ → |g′⟩ (cold transition).
    pub gamma_egp: f64,
    /// Ω_c, control Rabi frequency on |g′⟩ ↔ |e⟩.
    pub omega_rabi: f64,
    /// ω_m, nanomirror vibration frequency.
    pub omega_m: f64,
    /// η = k_c z₀, atom–mirror coupling strength.
    pub eta: f64,
    /// κ, probe leakage rate.
    pub kappa: f64,
    /// g_pr, probe vacuum Rabi frequency.
    pub g_pr: f64,
    /// Hot-reservoir occupation.
    pub n_h: f64,
    /// Cold-reservoir occupation.
    pub n_c: f64,
    /// ω_eg, optical transition |g⟩ ↔ |e⟩. Enters the fluxes only.
    pub omega_eg: f64,
    /// ω_eg′, optical transition |g′⟩ ↔ |e⟩. Enters the fluxes only.
    pub omega_egp: f64,
    /// Semiclassical probe amplitude â.
    pub probe_amplitude: Complex64,
    pub modulation: ModulationMode,
}

impl Default for EngineParams {
    fn default() -> Self {
        let omega_eg = 2.0 * PI * RB_D1_MHZ;
        Self {
            gamma_eg: RB_D1_DECAY,
            gamma_egp: RB_D1_DECAY,
            omega_rabi: 10.0,
            omega_m: 2.0,
            eta: 0.1,
            kappa: 0.0,
            g_pr: 0.1,
            n_h: 0.05,
            n_c: 0.05,
            omega_eg,
            omega_egp: omega_eg - 2.0 * PI * RB87_HYPERFINE_MHZ,
            probe_amplitude: Complex64::new(1.0, 0.0),
            modulation: ModulationMode::FirstOrder,
        }
    }
}

/// Names accepted by [`EngineParams::set`] and echoed in CSV headers.
pub const PARAM_NAMES: [&str; 13] = [
    "gamma_eg",
    "gamma_egp",
    "omega_rabi",
    "omega_m",
    "eta",
    "kappa",
    "g_pr",
    "n_h",
    "n_c",
    "omega_eg",
    "omega_egp",
    "probe_re",
    "probe_im",
];

impl EngineParams {
    /// Checks every invariant. Returns the params unchanged on success so it
    /// chains after struct-update construction.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("gamma_eg", self.gamma_eg),
            ("gamma_egp", self.gamma_egp),
            ("omega_rabi", self.omega_rabi),
            ("omega_m", self.omega_m),
            ("eta", self.eta),
            ("kappa", self.kappa),
            ("g_pr", self.g_pr),
            ("n_h", self.n_h),
            ("n_c", self.n_c),
        ];
        for (name, v) in non_negative {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
            if v < 0.0 {
                return Err(Error::invalid(name, format!("{v} is negative")));
            }
        }
        if !(self.omega_egp > 0.0 && self.omega_egp.is_finite()) {
            return Err(Error::invalid("omega_egp", "must be positive"));
        }
        if !(self.omega_eg > self.omega_egp && self.omega_eg.is_finite()) {
            return Err(Error::invalid(
                "omega_eg",
                "must exceed omega_egp (|g⟩ below |g′⟩)",
            ));
        }
        if !(self.probe_amplitude.re.is_finite() && self.probe_amplitude.im.is_finite()) {
            return Err(Error::invalid("probe_amplitude", "not finite"));
        }
        Ok(())
    }

    /// True when η leaves the small-displacement regime the first-order
    /// modulation is derived for.
    pub fn eta_out_of_range(&self) -> bool {
        self.eta > 1.0
    }

    /// R_h = Γ_eg n_h.
    pub fn hot_pump(&self) -> f64 {
        self.gamma_eg * self.n_h
    }

    /// R_c = Γ_eg′ n_c.
    pub fn cold_pump(&self) -> f64 {
        self.gamma_egp * self.n_c
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "gamma_eg" => self.gamma_eg,
            "gamma_egp" => self.gamma_egp,
            "omega_rabi" => self.omega_rabi,
            "omega_m" => self.omega_m,
            "eta" => self.eta,
            "kappa" => self.kappa,
            "g_pr" => self.g_pr,
            "n_h" => self.n_h,
            "n_c" => self.n_c,
            "omega_eg" => self.omega_eg,
            "omega_egp" => self.omega_egp,
            "probe_re" => self.probe_amplitude.re,
            "probe_im" => self.probe_amplitude.im,
            _ => return None,
        })
    }

    /// Sets a field by its config name. Returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "gamma_eg" => self.gamma_eg = value,
            "gamma_egp" => self.gamma_egp = value,
            "omega_rabi" => self.omega_rabi = value,
            "omega_m" => self.omega_m = value,
            "eta" => self.eta = value,
            "kappa" => self.kappa = value,
            "g_pr" => self.g_pr = value,
            "n_h" => self.n_h = value,
            "n_c" => self.n_c = value,
            "omega_eg" => self.omega_eg = value,
            "omega_egp" => self.omega_egp = value,
            "probe_re" => self.probe_amplitude.re = value,
            "probe_im" => self.probe_amplitude.im = value,
            _ => return false,
        }
        true
    }

    /// Slowest nonzero rate in the model; sets the default integration horizon.
    pub(crate) fn slowest_rate(&self) -> Option<f64> {
        let d = dephasing_rates(self);
        [
            self.gamma_eg,
            self.gamma_egp,
            self.hot_pump(),
            self.cold_pump(),
            d.eg,
            d.egp,
            d.ggp,
        ]
        .into_iter()
        .filter(|r| *r > 0.0)
        .min_by(f64::total_cmp)
    }
}

/// A thermal reservoir seen by one optical transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    /// Kelvin.
    pub temperature: f64,
    /// Angular frequency in rad/s.
    pub transition_frequency: f64,
}

/// Bose–Einstein occupation 1/(exp(ħω/k_BT) − 1); zero at T = 0.
pub fn bose_occupation(r: ReservoirSpec) -> Result<f64> {
    if !(r.temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature {} K is negative",
            r.temperature
        )));
    }
    if !(r.transition_frequency > 0.0) {
        return Err(Error::Domain(format!(
            "transition frequency {} must be positive",
            r.transition_frequency
        )));
    }
    if r.temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * r.transition_frequency / (K_B * r.temperature);
    Ok(1.0 / x.exp_m1())
}

/// Temperature at which a transition of angular frequency `omega` (rad/s)
/// has thermal occupation `n`.
pub fn occupation_to_temperature(n: f64, omega: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("occupation {n} must be positive")));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "transition frequency {omega} must be positive"
        )));
    }
    Ok(HBAR * omega / (K_B * (1.0 / n).ln_1p()))
}

/// Coherence decay rates γ_eg, γ_eg′, γ_gg′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingRates {
    pub eg: f64,
    pub egp: f64,
    pub ggp: f64,
}

pub fn dephasing_rates(p: &EngineParams) -> DephasingRates {
    let (ge, gc) = (p.gamma_eg, p.gamma_egp);
    DephasingRates {
        eg: (ge * (p.n_h + 1.0) + ge * p.n_h + gc * (p.n_c + 1.0)) / 2.0,
        egp: (gc * (p.n_c + 1.0) + gc * p.n_c + ge * (p.n_h + 1.0)) / 2.0,
        ggp: (ge * p.n_h + gc * p.n_c) / 2.0,
    }
}

/// Control Rabi frequency seen by the atoms at time `t` with the mirror at
/// z_m(t) = z₀ cos(ω_m t).
pub fn rabi_at(t: f64, p: &EngineParams) -> Complex64 {
    let phase = p.eta * (p.omega_m * t).cos();
    match p.modulation {
        ModulationMode::FirstOrder => Complex64::new(p.omega_rabi, p.omega_rabi * phase),
        ModulationMode::Exact => Complex64::from_polar(p.omega_rabi, phase),
    }
}

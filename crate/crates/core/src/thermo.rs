//! Energy fluxes through the engine and the first-law audit.
//!
//! With E = Tr(ρH₀) and H₀ = ħ Σ ω_i |i⟩⟨i|, the equations of motion give
//!
//! ```text
//! Ė = P_c − Q̇_out + Q̇_h − Q̇_c
//! ```
//!
//! where P_c is absorbed from the control field, Q̇_out is emitted into the
//! probe, Q̇_h is drawn from the hot bath and Q̇_c is released to the cold
//! bath. Q̇_c enters with a minus sign because it is defined as heat leaving
//! the atom. At steady state Q̇_out = Q̇_h (stationary ρ_gg) and P_c = Q̇_c
//! (stationary ρ_g′g′).
//!
//! Powers carry ħ = 1, i.e. they are (angular frequency) × (rate); use
//! [`ThermoFluxes::to_watts`] for SI.

use num_complex::Complex64;

use crate::dynamics::{bloch_rhs, ProbeMode, Trajectory};
use crate::error::{Error, Result};
use crate::floquet::{
    coherence_closed_form, modulation_split, populations_closed_form, Branch, FloquetComponents,
};
use crate::params::{rabi_at, EngineParams, ModulationMode, HBAR};
use crate::state::{DensityState, Level};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Converts (rad/µs)·(1/µs) with ħ = 1 into watts.
const MHZ2_TO_WATTS: f64 = HBAR * 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoFluxes {
    pub p_c: f64,
    pub qdot_c: f64,
    pub qdot_out: f64,
    pub qdot_h: f64,
    /// Ė evaluated directly from the equations of motion.
    pub edot_residual: f64,
    /// Q̇_out / (Q̇_h + P_c); `None` when the denominator vanishes.
    pub efficiency: Option<f64>,
}

/// P_c as a complex number; the imaginary part is rounding residue.
fn control_power_raw(s: &DensityState, p: &EngineParams, rabi: Complex64) -> Complex64 {
    I * p.omega_egp * (rabi * s.get(Level::E, Level::Gp) - rabi.conj() * s.get(Level::Gp, Level::E))
}

fn output_power_raw(s: &DensityState, p: &EngineParams) -> Complex64 {
    let a = s.probe;
    I * p.omega_eg * p.g_pr * (s.get(Level::G, Level::E) * a.conj() - s.get(Level::E, Level::G) * a)
}

/// P_c = iħω_eg′ Ω_c (ρ_eg′ − ρ_g′e) with the static Rabi frequency.
pub fn control_power(s: &DensityState, p: &EngineParams) -> f64 {
    control_power_at(s, p, Complex64::new(p.omega_rabi, 0.0))
}

/// P_c for an arbitrary (modulated) Rabi frequency Ω: iħω_eg′(Ω ρ_eg′ − Ω* ρ_g′e).
pub fn control_power_at(s: &DensityState, p: &EngineParams, rabi: Complex64) -> f64 {
    control_power_raw(s, p, rabi).re
}

/// Q̇_c = ħω_eg′ Γ_eg′ [(n_c + 1) ρ_ee − n_c ρ_g′g′].
pub fn cold_flux(s: &DensityState, p: &EngineParams) -> f64 {
    let [_, gp, e] = s.populations();
    p.omega_egp * p.gamma_egp * ((p.n_c + 1.0) * e - p.n_c * gp)
}

/// Q̇_out = iħω_eg g_pr (ρ_ge a* − ρ_eg a); positive when the probe gains energy.
pub fn output_power(s: &DensityState, p: &EngineParams) -> f64 {
    output_power_raw(s, p).re
}

/// Q̇_h = ħω_eg Γ_eg [n_h ρ_gg − (n_h + 1) ρ_ee].
pub fn hot_flux(s: &DensityState, p: &EngineParams) -> f64 {
    let [g, _, e] = s.populations();
    p.omega_eg * p.gamma_eg * (p.n_h * g - (p.n_h + 1.0) * e)
}

/// Two evaluations of Ė that must agree for any state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstLaw {
    /// Tr{ρ̇ H₀} from the equations of motion.
    pub direct: f64,
    /// P_c − Q̇_out + Q̇_h − Q̇_c.
    pub from_fluxes: f64,
}

/// Ė at time `t` (the control field is evaluated at `t`).
pub fn first_law_residual(s: &DensityState, p: &EngineParams, t: f64) -> FirstLaw {
    let d = bloch_rhs(s, t, p, ProbeMode::Fixed);
    let [dg, dgp, _] = d.populations();
    FirstLaw {
        direct: energy_rate(p, dg, dgp),
        from_fluxes: control_power_at(s, p, rabi_at(t, p)) - output_power(s, p) + hot_flux(s, p)
            - cold_flux(s, p),
    }
}

/// Ė from population derivatives, with E measured from |g⟩ and trace fixed:
/// Ė = −ω_eg ρ̇_gg − ω_eg′ ρ̇_g′g′.
fn energy_rate(p: &EngineParams, d_gg: f64, d_gpgp: f64) -> f64 {
    -p.omega_eg * d_gg - p.omega_egp * d_gpgp
}

/// e = Q̇_out / (Q̇_h + P_c).
pub fn efficiency(f: &ThermoFluxes) -> Result<f64> {
    let denominator = f.qdot_h + f.p_c;
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::UndefinedEfficiency { denominator });
    }
    Ok(f.qdot_out / denominator)
}

impl ThermoFluxes {
    fn assemble(p_c: f64, qdot_c: f64, qdot_out: f64, qdot_h: f64, edot_residual: f64) -> Self {
        let mut f = Self {
            p_c,
            qdot_c,
            qdot_out,
            qdot_h,
            edot_residual,
            efficiency: None,
        };
        f.efficiency = efficiency(&f).ok();
        f
    }

    /// Instantaneous fluxes of `s` at time `t`.
    pub fn at_state(s: &DensityState, p: &EngineParams, t: f64) -> Self {
        let law = first_law_residual(s, p, t);
        Self::assemble(
            control_power_at(s, p, rabi_at(t, p)),
            cold_flux(s, p),
            output_power(s, p),
            hot_flux(s, p),
            law.direct,
        )
    }

    /// One-period averages from harmonic amplitudes (first-order modulation).
    pub fn from_floquet(fc: &FloquetComponents, p: &EngineParams) -> Result<Self> {
        if p.modulation != ModulationMode::FirstOrder {
            return Err(Error::Unsupported(
                "period-averaged control power needs first-order modulation".into(),
            ));
        }
        let mean = fc.mean_state(p.probe_amplitude);
        // Ω(t) = Ω + (iηΩ/2)(e^{iω_m t} + e^{−iω_m t}); only l = ±1 survive the average.
        let side = I * (0.5 * p.eta * p.omega_rabi);
        let om = Complex64::new(p.omega_rabi, 0.0);
        let om_rho_egp = om * fc.get(Level::E, Level::Gp, 0)
            + side * (fc.get(Level::E, Level::Gp, 1) + fc.get(Level::E, Level::Gp, -1));
        let omc_rho_gpe = om * fc.get(Level::Gp, Level::E, 0)
            - side * (fc.get(Level::Gp, Level::E, 1) + fc.get(Level::Gp, Level::E, -1));
        let p_c = (I * p.omega_egp * (om_rho_egp - omc_rho_gpe)).re;

        let (a0, a1) = modulation_split(p)?;
        let v = |l: i32| {
            let h = fc.harmonic(l);
            nalgebra::SMatrix::<Complex64, 9, 1>::from_fn(|i, _| h[(i / 3, i % 3)])
        };
        let mean_rate = a0 * v(0) + a1 * (v(1) + v(-1)) * Complex64::new(0.5, 0.0);
        let edot = energy_rate(p, mean_rate[0].re, mean_rate[4].re);

        Ok(Self::assemble(
            p_c,
            cold_flux(&mean, p),
            output_power(&mean, p),
            hot_flux(&mean, p),
            edot,
        ))
    }

    /// Trapezoid averages over a sampled period. Ė is the net energy change
    /// over the span divided by its length.
    pub fn from_orbit(orbit: &Trajectory, p: &EngineParams) -> Result<Self> {
        if orbit.len() < 2 {
            return Err(Error::Resolution {
                samples: orbit.len(),
                required: 2,
            });
        }
        let span = orbit.span();
        let mut acc = [0.0; 4];
        for w in 0..orbit.len() - 1 {
            let weight = 0.5 * (orbit.times[w + 1] - orbit.times[w]) / span;
            for (t, s) in [
                (orbit.times[w], &orbit.states[w]),
                (orbit.times[w + 1], &orbit.states[w + 1]),
            ] {
                acc[0] += weight * control_power_at(s, p, rabi_at(t, p));
                acc[1] += weight * cold_flux(s, p);
                acc[2] += weight * output_power(s, p);
                acc[3] += weight * hot_flux(s, p);
            }
        }
        let first = orbit.states[0].populations();
        let (_, last) = orbit.last().expect("non-empty");
        let last = last.populations();
        let edot = energy_rate(p, (last[0] - first[0]) / span, (last[1] - first[1]) / span);
        Ok(Self::assemble(acc[0], acc[1], acc[2], acc[3], edot))
    }

    /// Fluxes implied by the closed forms alone: rate-equation populations
    /// for the bath fluxes, the closed-form probe coherence (taken as ρ_ge)
    /// for Q̇_out, and P_c = Q̇_c. The residual P_c − Q̇_out + Q̇_h − Q̇_c
    /// exposes how far the closed forms are from a consistent steady state.
    pub fn closed_form(p: &EngineParams, branch: Branch) -> Result<Self> {
        let pops = populations_closed_form(p)?;
        let rho_ge = coherence_closed_form(p, &pops, branch)?;
        let mut s = DensityState::diagonal(pops.as_array(), p.probe_amplitude);
        s.set(Level::G, Level::E, rho_ge);
        s.set(Level::E, Level::G, rho_ge.conj());
        let qdot_c = cold_flux(&s, p);
        let qdot_out = output_power(&s, p);
        let qdot_h = hot_flux(&s, p);
        let p_c = qdot_c;
        Ok(Self::assemble(
            p_c,
            qdot_c,
            qdot_out,
            qdot_h,
            p_c - qdot_out + qdot_h - qdot_c,
        ))
    }

    /// max(|Q̇_h|, |P_c|, ε), the scale residuals are judged against.
    pub fn scale(&self) -> f64 {
        self.qdot_h.abs().max(self.p_c.abs()).max(f64::MIN_POSITIVE)
    }

    /// (|Q̇_out − Q̇_h|, |P_c − Q̇_c|, |Ė|), each relative to [`Self::scale`].
    pub fn identity_residuals(&self) -> [f64; 3] {
        let s = self.scale();
        [
            (self.qdot_out - self.qdot_h).abs() / s,
            (self.p_c - self.qdot_c).abs() / s,
            self.edot_residual.abs() / s,
        ]
    }

    pub fn to_watts(&self) -> Self {
        let k = MHZ2_TO_WATTS;
        Self {
            p_c: self.p_c * k,
            qdot_c: self.qdot_c * k,
            qdot_out: self.qdot_out * k,
            qdot_h: self.qdot_h * k,
            edot_residual: self.edot_residual * k,
            efficiency: self.efficiency,
        }
    }

    pub const CSV_HEADER: &'static str =
        "n_h,n_c,eta,omega_rabi,omega_m,kappa,P_c,Qdot_c,Qdot_out,Qdot_h,residual,efficiency";

    pub fn csv_row(&self, p: &EngineParams) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.n_h,
            p.n_c,
            p.eta,
            p.omega_rabi,
            p.omega_m,
            p.kappa,
            self.p_c,
            self.qdot_c,
            self.qdot_out,
            self.qdot_h,
            self.edot_residual,
            fmt_opt(self.efficiency)
        )
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_owned(), |x| x.to_string())
}

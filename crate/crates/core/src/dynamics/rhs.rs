use num_complex::Complex64;

use crate::params::{dephasing_rates, rabi_at, EngineParams};
use crate::state::{DensityState, Level};

/// How the probe amplitude is treated during time evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeMode {
    /// The probe is an external field held at the state's amplitude.
    #[default]
    Fixed,
    /// The probe amplitude evolves as ∂_t a = −(κ/2) a + i g_pr ρ_ge.
    Coupled,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Time derivative of the state under the modulated Bloch equations.
///
/// The five independent equations (ρ_gg, ρ_g′g′, ρ_gg′, ρ_ge, ρ_g′e) are
/// evaluated with Ω_c replaced by Ω_c(t); the lower triangle follows by
/// conjugation and ρ_ee by trace conservation.
pub fn bloch_rhs(s: &DensityState, t: f64, p: &EngineParams, mode: ProbeMode) -> DensityState {
    use Level::{Gp, E, G};

    let d = dephasing_rates(p);
    let om = rabi_at(t, p);
    let om_c = om.conj();
    let a = s.probe;
    let g = p.g_pr;
    let r = |j, k| s.get(j, k);

    let d_gg = -p.gamma_eg * p.n_h * r(G, G)
        + p.gamma_eg * (p.n_h + 1.0) * r(E, E)
        + I * g * (a.conj() * r(G, E) - a * r(E, G));
    let d_gpgp = -p.gamma_egp * p.n_c * r(Gp, Gp) + p.gamma_egp * (p.n_c + 1.0) * r(E, E)
        - I * om * r(E, Gp)
        + I * om_c * r(Gp, E);
    let d_ggp = -d.ggp * r(G, Gp) + I * om_c * r(G, E) - I * g * r(E, Gp) * a;
    let d_ge = -d.eg * r(G, E) + I * om * r(G, Gp) - I * g * (r(E, E) - r(G, G)) * a;
    let d_gpe = -d.egp * r(Gp, E) - I * om * (r(E, E) - r(Gp, Gp)) + I * g * r(Gp, G) * a;

    // Populations are real by construction; drop the rounding residue so the
    // diagonal stays exactly real along a trajectory.
    let d_gg = Complex64::new(d_gg.re, 0.0);
    let d_gpgp = Complex64::new(d_gpgp.re, 0.0);

    let mut out = DensityState::zero();
    out.set(G, G, d_gg);
    out.set(Gp, Gp, d_gpgp);
    out.set(E, E, -(d_gg + d_gpgp));
    out.set(G, Gp, d_ggp);
    out.set(Gp, G, d_ggp.conj());
    out.set(G, E, d_ge);
    out.set(E, G, d_ge.conj());
    out.set(Gp, E, d_gpe);
    out.set(E, Gp, d_gpe.conj());
    out.probe = match mode {
        ProbeMode::Fixed => Complex64::new(0.0, 0.0),
        ProbeMode::Coupled => -0.5 * p.kappa * a + I * g * r(G, E),
    };
    out
}

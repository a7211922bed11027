use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{dephasing_rates, EngineParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Sideband branch selecting the sign in (γ_gg′/2 ± iω_m) and (γ_eg′ ± 2iω_m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Steady-state populations from the rate-equation closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationTriple {
    pub gg: f64,
    pub ee: f64,
    pub gpgp: f64,
}

impl PopulationTriple {
    pub fn sum(&self) -> f64 {
        self.gg + self.ee + self.gpgp
    }

    /// In storage order (g, g′, e).
    pub fn as_array(&self) -> [f64; 3] {
        [self.gg, self.gpgp, self.ee]
    }
}

/// Complex gain per sideband branch; ∂_t a = G a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainResult {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl GainResult {
    /// Same value on both branches, for solvers without a branch notion.
    pub fn uniform(g: Complex64) -> Self {
        Self { plus: g, minus: g }
    }

    pub fn get(&self, branch: Branch) -> Complex64 {
        match branch {
            Branch::Plus => self.plus,
            Branch::Minus => self.minus,
        }
    }

    /// Re G, the amplification rate.
    pub fn rate(&self, branch: Branch) -> f64 {
        self.get(branch).re
    }

    /// Im G, the frequency pull.
    pub fn frequency_pull(&self, branch: Branch) -> f64 {
        self.get(branch).im
    }
}

/// How the modulation factor in the coherence numerator is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumeratorReading {
    /// 1 + (η/2)(ρ_ee − ρ_g′g′)
    #[default]
    AsPrinted,
    /// (1 + η/2)(ρ_ee − ρ_g′g′)
    Factored,
}

impl NumeratorReading {
    fn factor(self, eta: f64, pops: &PopulationTriple) -> f64 {
        let diff = pops.ee - pops.gpgp;
        match self {
            NumeratorReading::AsPrinted => 1.0 + 0.5 * eta * diff,
            NumeratorReading::Factored => (1.0 + 0.5 * eta) * diff,
        }
    }
}

/// X = R_c + γ_eg′ (1 + η/2) Ω_c² / (γ_eg′² + 4ω_m²).
pub fn x_factor(p: &EngineParams) -> f64 {
    let g = dephasing_rates(p).egp;
    let denom = g * g + 4.0 * p.omega_m * p.omega_m;
    let pump = if denom > 0.0 {
        g * (1.0 + 0.5 * p.eta) * p.omega_rabi.powi(2) / denom
    } else {
        0.0
    };
    p.cold_pump() + pump
}

/// Rate-equation populations with the control pumping folded into X.
pub fn populations_closed_form(p: &EngineParams) -> Result<PopulationTriple> {
    p.validate()?;
    let x = x_factor(p);
    let r_h = p.hot_pump();
    let denom = 3.0 * x * r_h + x * p.gamma_eg + r_h * p.gamma_egp;
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!(
            "population denominator 3XR_h + XΓ_eg + R_hΓ_eg′ = {denom} (X = {x}, R_h = {r_h})"
        )));
    }
    Ok(PopulationTriple {
        gg: x * (p.gamma_eg + r_h) / denom,
        ee: r_h * x / denom,
        gpgp: -(-x * r_h - r_h * p.gamma_egp) / denom,
    })
}

struct Denominators {
    /// γ_gg′/2 ± iω_m
    ground: Complex64,
    /// γ_eg′ ± 2iω_m
    control: Complex64,
    /// −(γ_eg/2)(γ_gg′/2 ± iω_m) − ¼(1 + η/2)Ω_c²
    outer: Complex64,
}

fn denominators(p: &EngineParams, branch: Branch) -> Result<Denominators> {
    let d = dephasing_rates(p);
    let s = branch.sign();
    let ground = Complex64::new(0.5 * d.ggp, s * p.omega_m);
    let control = Complex64::new(d.egp, 2.0 * s * p.omega_m);
    let outer = -0.5 * d.eg * ground - 0.25 * (1.0 + 0.5 * p.eta) * p.omega_rabi.powi(2);
    let point = || {
        format!(
            "Ω_c = {}, ω_m = {}, η = {}, n_h = {}, n_c = {}, branch {}",
            p.omega_rabi,
            p.omega_m,
            p.eta,
            p.n_h,
            p.n_c,
            branch.name()
        )
    };
    if control.norm() == 0.0 {
        return Err(Error::Singular {
            what: "γ_eg′ ± 2iω_m vanishes",
            point: point(),
        });
    }
    if outer.norm() == 0.0 {
        return Err(Error::Singular {
            what: "coherence denominator vanishes",
            point: point(),
        });
    }
    Ok(Denominators {
        ground,
        control,
        outer,
    })
}

/// Steady-state probe coherence ρ̃_eg on one branch.
pub fn coherence_closed_form(
    p: &EngineParams,
    pops: &PopulationTriple,
    branch: Branch,
) -> Result<Complex64> {
    coherence_closed_form_with(p, pops, branch, NumeratorReading::AsPrinted)
}

pub fn coherence_closed_form_with(
    p: &EngineParams,
    pops: &PopulationTriple,
    branch: Branch,
    reading: NumeratorReading,
) -> Result<Complex64> {
    let den = denominators(p, branch)?;
    let ga = p.g_pr * p.probe_amplitude;
    let factor = reading.factor(p.eta, pops);
    let numerator = -0.5 * I * (pops.ee - pops.gg) * den.ground * ga
        + I * factor * ga * p.omega_rabi.powi(2) / (4.0 * den.control);
    Ok(-numerator / den.outer)
}

/// G on one branch, from the closed-form populations.
pub fn gain_branch(p: &EngineParams, branch: Branch) -> Result<Complex64> {
    let pops = populations_closed_form(p)?;
    gain_from(p, &pops, branch, NumeratorReading::AsPrinted)
}

/// G on both branches.
pub fn gain(p: &EngineParams) -> Result<GainResult> {
    gain_with(p, NumeratorReading::AsPrinted)
}

pub fn gain_with(p: &EngineParams, reading: NumeratorReading) -> Result<GainResult> {
    let pops = populations_closed_form(p)?;
    Ok(GainResult {
        plus: gain_from(p, &pops, Branch::Plus, reading)?,
        minus: gain_from(p, &pops, Branch::Minus, reading)?,
    })
}

fn gain_from(
    p: &EngineParams,
    pops: &PopulationTriple,
    branch: Branch,
    reading: NumeratorReading,
) -> Result<Complex64> {
    let den = denominators(p, branch)?;
    let g2 = p.g_pr * p.g_pr;
    let factor = reading.factor(p.eta, pops);
    let numerator = 0.5 * (pops.ee - pops.gg) * den.ground * g2
        + (-factor * g2 * p.omega_rabi.powi(2)) / (4.0 * den.control);
    Ok(-0.5 * p.kappa - numerator / den.outer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> EngineParams {
        EngineParams {
            omega_rabi: 10.0,
            eta: 0.1,
            omega_m: 2.0,
            n_h: 0.05,
            n_c: 0.05,
            ..Default::default()
        }
    }

    #[test]
    fn x_factor_limits() {
        let p = EngineParams {
            omega_rabi: 0.0,
            ..base()
        };
        assert_eq!(x_factor(&p), p.cold_pump());
        let p = EngineParams {
            omega_rabi: 0.0,
            n_c: 0.0,
            ..base()
        };
        assert_eq!(x_factor(&p), 0.0);
    }

    #[test]
    fn x_factor_regression() {
        // γ_eg′ = 6.1275; X = 0.285 + 6.1275·1.05·100 / (6.1275² + 16).
        let expected = 0.285 + 6.1275 * 1.05 * 100.0 / (6.1275f64.powi(2) + 16.0);
        let x = x_factor(&base());
        assert!((x - expected).abs() < 1e-13, "{x}");
        assert!((x - 12.300545904761549).abs() < 1e-12);
    }

    #[test]
    fn trapped_in_gp_without_pumping_out() {
        let p = EngineParams {
            n_c: 0.0,
            omega_rabi: 0.0,
            n_h: 0.1,
            ..base()
        };
        let pops = populations_closed_form(&p).unwrap();
        assert_eq!((pops.gg, pops.ee, pops.gpgp), (0.0, 0.0, 1.0));
    }

    #[test]
    fn degenerate_when_pumps_off() {
        let p = EngineParams {
            n_h: 0.0,
            n_c: 0.0,
            omega_rabi: 0.0,
            ..base()
        };
        assert!(matches!(
            populations_closed_form(&p),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn coherence_vanishes_without_drive_and_inversion_or_probe() {
        let pops = PopulationTriple {
            gg: 0.3,
            ee: 0.3,
            gpgp: 0.4,
        };
        let p = EngineParams {
            omega_rabi: 0.0,
            ..base()
        };
        assert_eq!(
            coherence_closed_form(&p, &pops, Branch::Plus).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let p = EngineParams {
            g_pr: 0.0,
            ..base()
        };
        let pops = populations_closed_form(&p).unwrap();
        for b in Branch::BOTH {
            assert_eq!(coherence_closed_form(&p, &pops, b).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn coherence_linear_in_probe() {
        let p = base();
        let pops = populations_closed_form(&p).unwrap();
        let c1 = coherence_closed_form(&p, &pops, Branch::Plus).unwrap();
        let scaled = EngineParams {
            probe_amplitude: Complex64::new(-0.7, 2.3),
            ..p
        };
        let c2 = coherence_closed_form(&scaled, &pops, Branch::Plus).unwrap();
        assert!((c2 - c1 * Complex64::new(-0.7, 2.3)).norm() < 1e-15);
    }

    #[test]
    fn gain_matches_coherence_in_probe_equation() {
        // ∂_t a = −(κ/2) a + i g_pr ρ̃ with the closed-form coherence.
        let p = EngineParams {
            kappa: 0.4,
            probe_amplitude: Complex64::new(0.3, 0.2),
            ..base()
        };
        let pops = populations_closed_form(&p).unwrap();
        let g = gain(&p).unwrap();
        for reading in [NumeratorReading::AsPrinted, NumeratorReading::Factored] {
            let g = gain_with(&p, reading).unwrap();
            for b in Branch::BOTH {
                let rho = coherence_closed_form_with(&p, &pops, b, reading).unwrap();
                let via = -0.5 * p.kappa + I * p.g_pr * rho / p.probe_amplitude;
                assert!((g.get(b) - via).norm() < 1e-15);
            }
        }
        assert_eq!(g.plus, gain_branch(&p, Branch::Plus).unwrap());
    }

    #[test]
    fn no_probe_coupling_leaves_cavity_loss() {
        let p = EngineParams {
            g_pr: 0.0,
            kappa: 3.0,
            ..base()
        };
        let g = gain(&p).unwrap();
        assert_eq!(g.plus, Complex64::new(-1.5, 0.0));
        assert_eq!(g.minus, Complex64::new(-1.5, 0.0));
    }

    #[test]
    fn kappa_slope_is_minus_half() {
        let g0 = gain(&base()).unwrap();
        let g1 = gain(&EngineParams {
            kappa: 1.0,
            ..base()
        })
        .unwrap();
        assert_eq!(g1.rate(Branch::Plus) - g0.rate(Branch::Plus), -0.5);
        assert_eq!(
            g1.frequency_pull(Branch::Minus),
            g0.frequency_pull(Branch::Minus)
        );
    }

    #[test]
    fn minus_branch_is_plus_with_reversed_mirror_frequency() {
        // ω_m enters X only through ω_m², so reversing it leaves populations alone.
        for eta in [0.01, 0.1, 0.5] {
            let p = EngineParams { eta, ..base() };
            let minus = gain_branch(&p, Branch::Minus).unwrap();
            let flipped = gain_branch(
                &EngineParams {
                    omega_m: -p.omega_m,
                    ..p
                },
                Branch::Plus,
            );
            // Negative ω_m fails validation, so evaluate the formula directly.
            assert!(flipped.is_err());
            let pops = populations_closed_form(&p).unwrap();
            let raw = gain_from(
                &EngineParams {
                    omega_m: -p.omega_m,
                    ..p
                },
                &pops,
                Branch::Plus,
                NumeratorReading::AsPrinted,
            )
            .unwrap();
            assert!((minus - raw).norm() < 1e-16);
        }
    }

    #[test]
    fn singular_denominator_reports_point() {
        let p = EngineParams {
            gamma_eg: 0.0,
            gamma_egp: 0.0,
            omega_m: 0.0,
            omega_rabi: 0.0,
            n_h: 1.0,
            ..base()
        };
        let pops = PopulationTriple {
            gg: 0.5,
            ee: 0.0,
            gpgp: 0.5,
        };
        let err = coherence_closed_form(&p, &pops, Branch::Plus).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
        assert!(err.to_string().contains("ω_m = 0"));
    }
}

//! Harmonic balance for the periodically driven steady state.
//!
//! With the probe held fixed the Bloch equations are linear in the nine
//! matrix entries, ẋ = A(t) x, and first-order modulation makes the
//! generator affine in the drive: A(t) = A₀ + cos(ω_m t) A₁. Inserting
//! x(t) = Σ_l x_l e^{−ilω_m t} gives, for every harmonic,
//!
//! ```text
//! (A₀ + ilω_m) x_l + (A₁/2)(x_{l−1} + x_{l+1}) = 0,
//! ```
//!
//! which is truncated at |l| ≤ l_max and closed by trace normalization on
//! the l = 0 block.

use nalgebra::{DMatrix, DVector, SMatrix};
use num_complex::Complex64;

use super::components::FloquetComponents;
use crate::error::{Error, Result};
use crate::params::{dephasing_rates, rabi_at, EngineParams, ModulationMode};
use crate::state::{DensityState, Level};

/// Generator acting on the row-major vector of the nine stored entries.
pub type GeneratorMatrix = SMatrix<Complex64, 9, 9>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const EE_ROW: usize = 8;

fn idx(j: Level, k: Level) -> usize {
    3 * j.index() + k.index()
}

/// Generator of the fixed-probe Bloch equations for a given (complex)
/// control Rabi frequency. Linear over ℂ: every conjugate equation is written
/// out instead of being obtained by conjugating the state.
pub fn generator(p: &EngineParams, rabi: Complex64) -> GeneratorMatrix {
    use Level::{Gp, E, G};

    let d = dephasing_rates(p);
    let a = p.probe_amplitude;
    let g = p.g_pr;
    let mut m = GeneratorMatrix::zeros();
    let mut put = |row: (Level, Level), col: (Level, Level), c: Complex64| {
        m[(idx(row.0, row.1), idx(col.0, col.1))] += c;
    };
    let re = |x: f64| Complex64::new(x, 0.0);

    // ρ_gg
    put((G, G), (G, G), re(-p.gamma_eg * p.n_h));
    put((G, G), (E, E), re(p.gamma_eg * (p.n_h + 1.0)));
    put((G, G), (G, E), I * g * a.conj());
    put((G, G), (E, G), -I * g * a);
    // ρ_g′g′
    put((Gp, Gp), (Gp, Gp), re(-p.gamma_egp * p.n_c));
    put((Gp, Gp), (E, E), re(p.gamma_egp * (p.n_c + 1.0)));
    put((Gp, Gp), (E, Gp), -I * rabi);
    put((Gp, Gp), (Gp, E), I * rabi.conj());
    // ρ_gg′ and its conjugate ρ_g′g
    put((G, Gp), (G, Gp), re(-d.ggp));
    put((G, Gp), (G, E), I * rabi.conj());
    put((G, Gp), (E, Gp), -I * g * a);
    put((Gp, G), (Gp, G), re(-d.ggp));
    put((Gp, G), (E, G), -I * rabi);
    put((Gp, G), (Gp, E), I * g * a.conj());
    // ρ_ge and ρ_eg
    put((G, E), (G, E), re(-d.eg));
    put((G, E), (G, Gp), I * rabi);
    put((G, E), (E, E), -I * g * a);
    put((G, E), (G, G), I * g * a);
    put((E, G), (E, G), re(-d.eg));
    put((E, G), (Gp, G), -I * rabi.conj());
    put((E, G), (E, E), I * g * a.conj());
    put((E, G), (G, G), -I * g * a.conj());
    // ρ_g′e and ρ_eg′
    put((Gp, E), (Gp, E), re(-d.egp));
    put((Gp, E), (E, E), -I * rabi);
    put((Gp, E), (Gp, Gp), I * rabi);
    put((Gp, E), (Gp, G), I * g * a);
    put((E, Gp), (E, Gp), re(-d.egp));
    put((E, Gp), (E, E), I * rabi.conj());
    put((E, Gp), (Gp, Gp), -I * rabi.conj());
    put((E, Gp), (G, Gp), -I * g * a.conj());

    // ρ_ee by trace conservation.
    let ee = -(m.row(idx(G, G)) + m.row(idx(Gp, Gp)));
    m.set_row(idx(E, E), &ee);
    m
}

/// (A₀, A₁) with A(t) = A₀ + cos(ω_m t) A₁ under first-order modulation.
pub fn modulation_split(p: &EngineParams) -> Result<(GeneratorMatrix, GeneratorMatrix)> {
    if p.modulation != ModulationMode::FirstOrder {
        return Err(Error::Unsupported(
            "harmonic balance needs first-order modulation".into(),
        ));
    }
    let a0 = generator(p, Complex64::new(p.omega_rabi, 0.0));
    let a1 = generator(p, Complex64::new(p.omega_rabi, p.omega_rabi * p.eta)) - a0;
    Ok((a0, a1))
}

fn to_vec(rho: &nalgebra::Matrix3<Complex64>) -> SMatrix<Complex64, 9, 1> {
    SMatrix::<Complex64, 9, 1>::from_fn(|i, _| rho[(i / 3, i % 3)])
}

/// Solves the truncated Fourier-domain equations for |l| ≤ `l_max`.
pub fn harmonic_balance_solve(p: &EngineParams, l_max: usize) -> Result<FloquetComponents> {
    p.validate()?;
    if l_max < 1 {
        return Err(Error::invalid("l_max", "must be at least 1"));
    }
    if !(p.omega_m > 0.0) {
        return Err(Error::invalid(
            "omega_m",
            "harmonic balance needs a vibrating mirror (ω_m > 0)",
        ));
    }
    let (a0, a1) = modulation_split(p)?;
    let half = a1 * Complex64::new(0.5, 0.0);
    let blocks = 2 * l_max + 1;
    let n = 9 * blocks;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for b in 0..blocks {
        let l = b as f64 - l_max as f64;
        let diag = a0 + GeneratorMatrix::identity() * (I * l * p.omega_m);
        m.view_mut((9 * b, 9 * b), (9, 9)).copy_from(&diag);
        if b > 0 {
            m.view_mut((9 * b, 9 * (b - 1)), (9, 9)).copy_from(&half);
        }
        if b + 1 < blocks {
            m.view_mut((9 * b, 9 * (b + 1)), (9, 9)).copy_from(&half);
        }
    }
    let trace_row = 9 * l_max + EE_ROW;
    m.row_mut(trace_row).fill(Complex64::new(0.0, 0.0));
    for level in Level::ALL {
        m[(trace_row, 9 * l_max + idx(level, level))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = DVector::<Complex64>::zeros(n);
    rhs[trace_row] = Complex64::new(1.0, 0.0);

    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("harmonic-balance system is singular".into()))?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Degenerate(
            "harmonic-balance solution is not finite".into(),
        ));
    }
    let out = (0..blocks)
        .map(|b| nalgebra::Matrix3::from_fn(|j, k| x[9 * b + 3 * j + k]))
        .collect();
    Ok(FloquetComponents::new(l_max, p.omega_m, out))
}

/// Max-norm residual of the truncated Fourier-domain equations, with the
/// trace condition in place of the l = 0 ρ_ee equation.
pub fn harmonic_balance_residual(p: &EngineParams, fc: &FloquetComponents) -> Result<f64> {
    let (a0, a1) = modulation_split(p)?;
    let l_max = fc.l_max() as i32;
    let mut worst: f64 = 0.0;
    for l in -l_max..=l_max {
        let xl = to_vec(&fc.harmonic(l));
        let neighbours = to_vec(&fc.harmonic(l - 1)) + to_vec(&fc.harmonic(l + 1));
        let r =
            a0 * xl + xl * (I * l as f64 * p.omega_m) + a1 * neighbours * Complex64::new(0.5, 0.0);
        for (i, z) in r.iter().enumerate() {
            if l == 0 && i == EE_ROW {
                continue;
            }
            worst = worst.max(z.norm());
        }
    }
    worst = worst.max((fc.mean_trace() - 1.0).norm());
    Ok(worst)
}

/// Steady state of the time-independent problem with the control field
/// frozen at its t = 0 value (ω_m = 0).
pub fn static_steady_state(p: &EngineParams) -> Result<DensityState> {
    p.validate()?;
    let mut a = generator(p, rabi_at(0.0, p));
    a.row_mut(EE_ROW).fill(Complex64::new(0.0, 0.0));
    for level in Level::ALL {
        a[(EE_ROW, idx(level, level))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = SMatrix::<Complex64, 9, 1>::zeros();
    rhs[EE_ROW] = Complex64::new(1.0, 0.0);
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("static steady state is not unique".into()))?;
    Ok(DensityState::new(
        nalgebra::Matrix3::from_fn(|j, k| x[3 * j + k]),
        p.probe_amplitude,
    ))
}

/// Linear-response gain from a numerically exact steady state:
/// G = −κ/2 + i g_pr ⟨ρ_ge⟩ / a, with ⟨·⟩ the period average.
pub fn linear_response_gain(fc: &FloquetComponents, p: &EngineParams) -> Result<Complex64> {
    if p.probe_amplitude.norm() == 0.0 {
        return Err(Error::Degenerate(
            "gain needs a nonzero probe amplitude".into(),
        ));
    }
    let rho_ge = fc.get(Level::G, Level::E, 0);
    Ok(-0.5 * p.kappa + I * p.g_pr * rho_ge / p.probe_amplitude)
}

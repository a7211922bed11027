use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::floquet::FloquetComponents;

/// Fewest samples accepted for a one-period orbit.
pub const MIN_ORBIT_SAMPLES: usize = 64;

/// Harmonic amplitudes of an orbit together with how well they resum it.
#[derive(Debug, Clone)]
pub struct Harmonics {
    pub components: FloquetComponents,
    /// max over samples and entries of |ρ(t) − Σ_l ρ_l e^{−ilω_m t}|.
    pub reconstruction_error: f64,
}

/// Fourier amplitudes ρ_{jk,l} = (1/T) ∫ ρ_jk(t) e^{+ilω_m t} dt of an orbit
/// spanning exactly one period T = 2π/ω_m, by trapezoid quadrature.
///
/// Sample times are absolute, so phases refer to the drive cos(ω_m t).
pub fn extract_harmonics(orbit: &Trajectory, l_max: usize) -> Result<Harmonics> {
    let n = orbit.len();
    let required = MIN_ORBIT_SAMPLES.max(2 * l_max + 2);
    if n < required {
        return Err(Error::Resolution {
            samples: n,
            required,
        });
    }
    let period = orbit.span();
    if !(period > 0.0) {
        return Err(Error::invalid("orbit", "zero time span"));
    }
    let omega = 2.0 * PI / period;

    let mut blocks = vec![Matrix3::<Complex64>::zeros(); 2 * l_max + 1];
    for w in 0..n - 1 {
        let (t0, t1) = (orbit.times[w], orbit.times[w + 1]);
        let half = 0.5 * (t1 - t0) / period;
        for (slot, block) in blocks.iter_mut().enumerate() {
            let l = slot as f64 - l_max as f64;
            let e0 = Complex64::from_polar(half, l * omega * t0);
            let e1 = Complex64::from_polar(half, l * omega * t1);
            *block += orbit.states[w].rho * e0 + orbit.states[w + 1].rho * e1;
        }
    }
    let components = FloquetComponents::new(l_max, omega, blocks);
    let reconstruction_error = orbit
        .times
        .iter()
        .zip(&orbit.states)
        .map(|(&t, s)| {
            (components.evaluate(t) - s.rho)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(Harmonics {
        components,
        reconstruction_error,
    })
}

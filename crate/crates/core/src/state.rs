//! Density matrix of the Λ atom over {|g⟩, |g′⟩, |e⟩} plus the semiclassical
//! probe amplitude.
//!
//! Entries are labelled the way the equations of motion label them: the
//! entry `(j, k)` is the quantity written ρ_jk there. For the interaction
//! Hamiltonian in use this is ⟨k|ρ|j⟩, the transpose of the usual matrix
//! element. Transposition preserves trace, Hermiticity and the spectrum, so
//! every physicality check is convention-independent.

use std::ops::{Add, Mul};

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;

/// Atomic levels, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    Gp = 1,
    E = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::Gp, Level::E];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short label used in CSV column names.
    pub fn tag(self) -> &'static str {
        match self {
            Level::G => "g",
            Level::Gp => "gp",
            Level::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState {
    pub rho: Matrix3<Complex64>,
    pub probe: Complex64,
}

impl DensityState {
    pub fn new(rho: Matrix3<Complex64>, probe: Complex64) -> Self {
        Self { rho, probe }
    }

    pub fn zero() -> Self {
        Self {
            rho: Matrix3::zeros(),
            probe: Complex64::new(0.0, 0.0),
        }
    }

    /// All population in one level.
    pub fn pure_level(level: Level, probe: Complex64) -> Self {
        let mut rho = Matrix3::zeros();
        rho[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self { rho, probe }
    }

    pub fn maximally_mixed(probe: Complex64) -> Self {
        Self {
            rho: Matrix3::identity() / Complex64::new(3.0, 0.0),
            probe,
        }
    }

    /// Diagonal state with the given populations (g, g′, e).
    pub fn diagonal(populations: [f64; 3], probe: Complex64) -> Self {
        let mut rho = Matrix3::zeros();
        for (i, p) in populations.into_iter().enumerate() {
            rho[(i, i)] = Complex64::new(p, 0.0);
        }
        Self { rho, probe }
    }

    #[inline]
    pub fn get(&self, j: Level, k: Level) -> Complex64 {
        self.rho[(j.index(), k.index())]
    }

    #[inline]
    pub fn set(&mut self, j: Level, k: Level, v: Complex64) {
        self.rho[(j.index(), k.index())] = v;
    }

    /// Real parts of ρ_gg, ρ_g′g′, ρ_ee.
    pub fn populations(&self) -> [f64; 3] {
        [
            self.rho[(0, 0)].re,
            self.rho[(1, 1)].re,
            self.rho[(2, 2)].re,
        ]
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// max |ρ_jk − conj(ρ_kj)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for j in 0..3 {
            for k in j..3 {
                err = err.max((self.rho[(j, k)] - self.rho[(k, j)].conj()).norm());
            }
        }
        err
    }

    /// Smallest eigenvalue of the Hermitian part of ρ.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    /// Max-norm distance over the nine matrix entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.rho - other.rho)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Row-major matrix entries followed by the probe amplitude.
    pub(crate) fn to_array(&self) -> [Complex64; 10] {
        let mut out = [Complex64::new(0.0, 0.0); 10];
        for j in 0..3 {
            for k in 0..3 {
                out[3 * j + k] = self.rho[(j, k)];
            }
        }
        out[9] = self.probe;
        out
    }

    pub(crate) fn from_array(y: &[Complex64; 10]) -> Self {
        Self {
            rho: Matrix3::from_fn(|j, k| y[3 * j + k]),
            probe: y[9],
        }
    }
}

impl Add for DensityState {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            rho: self.rho + rhs.rho,
            probe: self.probe + rhs.probe,
        }
    }
}

impl Mul<f64> for DensityState {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        let c = Complex64::new(s, 0.0);
        Self {
            rho: self.rho * c,
            probe: self.probe * c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_and_mixed_states_are_physical() {
        let a = Complex64::new(1.0, 0.0);
        for s in [
            DensityState::pure_level(Level::E, a),
            DensityState::maximally_mixed(a),
            DensityState::diagonal([0.2, 0.3, 0.5], a),
        ] {
            assert!((s.trace() - 1.0).norm() < 1e-15);
            assert_eq!(s.hermiticity_error(), 0.0);
            assert!(s.min_eigenvalue() >= -1e-15);
        }
    }

    #[test]
    fn min_eigenvalue_detects_negativity() {
        let mut s = DensityState::diagonal([0.5, 0.5, 0.0], Complex64::new(0.0, 0.0));
        s.set(Level::G, Level::E, Complex64::new(0.1, 0.0));
        s.set(Level::E, Level::G, Complex64::new(0.1, 0.0));
        // Eigenvalues of [[0.5, 0.1], [0.1, 0]] block include a negative one.
        assert!(s.min_eigenvalue() < -0.01);
    }

    #[test]
    fn array_round_trip() {
        let mut s = DensityState::maximally_mixed(Complex64::new(0.3, -0.2));
        s.set(Level::Gp, Level::E, Complex64::new(0.01, 0.02));
        assert_eq!(DensityState::from_array(&s.to_array()), s);
    }
}

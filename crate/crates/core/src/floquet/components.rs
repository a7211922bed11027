use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::state::{DensityState, Level};

/// Fourier amplitudes ρ_{jk,l} of a periodic steady state, with
/// ρ_jk(t) = Σ_l ρ_{jk,l} exp(−i l ω_m t) over |l| ≤ `l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetComponents {
    l_max: usize,
    omega_m: f64,
    blocks: Vec<Matrix3<Complex64>>,
}

impl FloquetComponents {
    /// `blocks[i]` holds harmonic `l = i − l_max`.
    pub fn new(l_max: usize, omega_m: f64, blocks: Vec<Matrix3<Complex64>>) -> Self {
        assert_eq!(blocks.len(), 2 * l_max + 1, "need one block per harmonic");
        Self {
            l_max,
            omega_m,
            blocks,
        }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    /// Block of harmonic `l`; zero outside the stored range.
    pub fn harmonic(&self, l: i32) -> Matrix3<Complex64> {
        match self.slot(l) {
            Some(i) => self.blocks[i],
            None => Matrix3::zeros(),
        }
    }

    pub fn get(&self, j: Level, k: Level, l: i32) -> Complex64 {
        self.harmonic(l)[(j.index(), k.index())]
    }

    fn slot(&self, l: i32) -> Option<usize> {
        let i = l + self.l_max as i32;
        (0..self.blocks.len() as i32)
            .contains(&i)
            .then_some(i as usize)
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (i32, &Matrix3<Complex64>)> {
        let l_max = self.l_max as i32;
        self.blocks
            .iter()
            .enumerate()
            .map(move |(i, b)| (i as i32 - l_max, b))
    }

    /// Time-averaged state (the l = 0 block).
    pub fn mean_state(&self, probe: Complex64) -> DensityState {
        DensityState::new(self.harmonic(0), probe)
    }

    /// Resums the series at time `t`.
    pub fn evaluate(&self, t: f64) -> Matrix3<Complex64> {
        self.harmonics().fold(Matrix3::zeros(), |acc, (l, b)| {
            acc + b * Complex64::from_polar(1.0, -(l as f64) * self.omega_m * t)
        })
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_m
    }

    /// max |ρ_{jk,l} − conj(ρ_{kj,−l})|.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (l, b) in self.harmonics() {
            let mirror = self.harmonic(-l);
            for j in 0..3 {
                for k in 0..3 {
                    err = err.max((b[(j, k)] - mirror[(k, j)].conj()).norm());
                }
            }
        }
        err
    }

    /// Σ_j ρ_{jj,0}.
    pub fn mean_trace(&self) -> Complex64 {
        self.harmonic(0).trace()
    }

    /// Largest |ρ_{jk,l}| over all entries of harmonic `l`.
    pub fn max_magnitude(&self, l: i32) -> f64 {
        self.harmonic(l)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference over harmonics both sets store.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let l = self.l_max.min(other.l_max) as i32;
        (-l..=l)
            .flat_map(|l| {
                let d = self.harmonic(l) - other.harmonic(l);
                d.iter().map(|z| z.norm()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

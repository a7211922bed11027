//! Embedded Dormand–Prince 5(4) stepper over fixed-size complex vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

type Vector<const N: usize> = [Complex64; N];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Counters accumulated while stepping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest absolute local error estimate over accepted steps.
    pub max_local_error: f64,
}

/// Accepted step, handed to observers.
pub(crate) struct StepInfo<'a, const N: usize> {
    pub t: f64,
    pub y: &'a Vector<N>,
}

pub(crate) struct Dopri5<F, const N: usize> {
    f: F,
    t: f64,
    y: Vector<N>,
    k1: Vector<N>,
    h: f64,
    tol: f64,
    pub stats: IntegratorStats,
}

#[inline]
fn axpy<const N: usize>(y: &Vector<N>, h: f64, terms: &[(f64, &Vector<N>)]) -> Vector<N> {
    let mut out = *y;
    for (c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += k[i] * ch;
        }
    }
    out
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &Vector<N>) -> Vector<N>,
{
    pub fn new(mut f: F, t0: f64, y0: Vector<N>, tol: f64) -> Self {
        let k1 = f(t0, &y0);
        let d0 = y0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let d1 = k1.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let h = if d1 > 1e-12 {
            0.01 * d0.max(1e-3) / d1
        } else {
            1e-2
        };
        Self {
            f,
            t: t0,
            y: y0,
            k1,
            h,
            tol,
            stats: IntegratorStats {
                rhs_evals: 1,
                ..Default::default()
            },
        }
    }

    #[cfg(test)]
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &Vector<N> {
        &self.y
    }

    /// Integrates up to exactly `t_end`, reporting every accepted step.
    pub fn advance_to(
        &mut self,
        t_end: f64,
        mut observe: impl FnMut(StepInfo<'_, N>),
    ) -> Result<()> {
        while self.t < t_end {
            let remaining = t_end - self.t;
            let clipped = self.h >= remaining;
            let h = if clipped { remaining } else { self.h };
            let h_floor = 1e-13 * self.t.abs().max(1.0);
            if h < h_floor && !clipped {
                return Err(Error::Stiffness {
                    t: self.t,
                    h,
                    tol: self.tol,
                });
            }
            let (y_new, k7, err_norm, err_abs) = self.trial(h);
            self.stats.rhs_evals += 6;
            if !err_norm.is_finite() {
                self.h = h * MIN_FACTOR;
                self.stats.rejected += 1;
                continue;
            }
            let factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err_norm <= 1.0 {
                self.t = if clipped { t_end } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                self.stats.accepted += 1;
                self.stats.max_local_error = self.stats.max_local_error.max(err_abs);
                // A clipped step says nothing about the natural step size.
                if !clipped || factor < 1.0 {
                    self.h = h * factor;
                }
                observe(StepInfo {
                    t: self.t,
                    y: &self.y,
                });
            } else {
                self.stats.rejected += 1;
                self.h = h * factor.min(1.0);
            }
        }
        Ok(())
    }

    /// Takes one unconditional step of size `h`. Used to replay a grid that
    /// an adaptive run already accepted, which makes the result a smooth
    /// function of the initial state.
    pub fn step_fixed(&mut self, h: f64) -> Result<()> {
        let (y_new, k7, err_norm, err_abs) = self.trial(h);
        self.stats.rhs_evals += 6;
        if !err_norm.is_finite() {
            return Err(Error::Stiffness {
                t: self.t,
                h,
                tol: self.tol,
            });
        }
        self.t += h;
        self.y = y_new;
        self.k1 = k7;
        self.stats.accepted += 1;
        self.stats.max_local_error = self.stats.max_local_error.max(err_abs);
        Ok(())
    }

    fn trial(&mut self, h: f64) -> (Vector<N>, Vector<N>, f64, f64) {
        let (t, y, k1) = (self.t, &self.y, &self.k1);
        let f = &mut self.f;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            y,
            h,
            &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut sum = 0.0;
        let mut err_abs: f64 = 0.0;
        for i in 0..N {
            let e =
                (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = self.tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            sum += (e.re / scale).powi(2) + (e.im / scale).powi(2);
            err_abs = err_abs.max(e.norm());
        }
        let err_norm = (sum / (2 * N) as f64).sqrt();
        (y_new, k7, err_norm, err_abs)
    }
}

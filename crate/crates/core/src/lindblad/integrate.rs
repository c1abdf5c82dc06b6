use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::sparse::MatrixRhs;
use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-7;

/// Adaptive Dormand–Prince 5(4) stepper on matrix-valued states.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rtol: f64,
    pub max_steps: usize,
    /// Symmetrize `X ← (X + X†)/2` after every accepted step.
    pub hermitian: bool,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rtol: DEFAULT_RTOL,
            max_steps: 20_000_000,
            hermitian: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// `y += a·x` elementwise.
fn axpy(y: &mut DMatrix<C64>, a: f64, x: &DMatrix<C64>) {
    for (yv, xv) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yv += xv * a;
    }
}

fn max_abs(x: &DMatrix<C64>) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

impl Integrator {
    pub fn with_rtol(rtol: f64) -> Self {
        Integrator {
            rtol,
            ..Default::default()
        }
    }

    pub fn non_hermitian(mut self) -> Self {
        self.hermitian = false;
        self
    }

    pub fn integrate<F: MatrixRhs + ?Sized>(
        &self,
        f: &F,
        x0: DMatrix<C64>,
        duration: f64,
    ) -> Result<(DMatrix<C64>, StepStats)> {
        if !(self.rtol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "integrator tolerance must be positive, got {}",
                self.rtol
            )));
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid duration {duration}")));
        }
        let mut stats = StepStats::default();
        if duration == 0.0 {
            return Ok((x0, stats));
        }
        let (r, c) = x0.shape();
        let mut x = x0;
        let mut k: Vec<DMatrix<C64>> = (0..7).map(|_| DMatrix::zeros(r, c)).collect();
        f.eval(&x, &mut k[0]);
        stats.evaluations += 1;

        let fnorm = max_abs(&k[0]);
        let xnorm = max_abs(&x).max(1e-300);
        let mut h = if fnorm > 0.0 {
            (0.01 * xnorm / fnorm).min(duration)
        } else {
            duration
        };
        let mut t = 0.0;
        let mut stage = DMatrix::zeros(r, c);
        while t < duration {
            if stats.accepted + stats.rejected >= self.max_steps || h < duration * 1e-14 || t + h == t {
                return Err(Error::StepUnderflow {
                    time: t,
                    step: h,
                    suggested_tol: (self.rtol * 10.0).min(1e-3),
                });
            }
            let last = t + h >= duration;
            if last {
                h = duration - t;
            }
            for s in 0..6 {
                stage.copy_from(&x);
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        axpy(&mut stage, h * a, kj);
                    }
                }
                f.eval(&stage, &mut k[s + 1]);
                stats.evaluations += 1;
            }
            // stage now holds the 5th-order solution; k[6] = f(stage)
            let mut err = DMatrix::zeros(r, c);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    axpy(&mut err, h * E[j], kj);
                }
            }
            let scale = max_abs(&x).max(max_abs(&stage)).max(1e-300);
            let en = max_abs(&err) / (self.rtol * scale);
            if en <= 1.0 {
                t = if last { duration } else { t + h };
                std::mem::swap(&mut x, &mut stage);
                if self.hermitian {
                    let adj = x.adjoint();
                    x += adj;
                    x *= C64::new(0.5, 0.0);
                }
                k.swap(0, 6);
                stats.accepted += 1;
                let fac = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= fac;
            } else {
                stats.rejected += 1;
                h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok((x, stats))
    }
}

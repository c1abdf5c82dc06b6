use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a phase sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub phi: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub delta: f64,
    pub fisher_c: Option<f64>,
    pub leakage: Option<f64>,
}

impl WitnessPoint {
    pub fn new(phi: f64, p_plus: f64, p_minus: f64) -> Self {
        WitnessPoint {
            phi,
            p_plus,
            p_minus,
            delta: p_plus - p_minus,
            fisher_c: None,
            leakage: None,
        }
    }

    /// Row with probabilities reconstructed from the witness, `p± = (1 ± Δ)/2`.
    pub fn from_delta(phi: f64, delta: f64) -> Self {
        let p_plus = 0.5 * (1.0 + delta);
        let p_minus = 0.5 * (1.0 - delta);
        WitnessPoint {
            phi,
            p_plus,
            p_minus,
            delta: p_plus - p_minus,
            fisher_c: None,
            leakage: None,
        }
    }
}

/// Least-squares fit `Δ(φ) ≈ c₀ + A cos nφ + B sin nφ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub harmonic: u32,
    /// `√(A² + B²)`, i.e. (max − min)/2 of the fitted fringe.
    pub visibility: f64,
    /// `c₀ = (max + min)/2`.
    pub offset: f64,
    /// Phase `ϑ` in `c₀ − V cos(nφ − ϑ)`; zero for a `−cos` fringe.
    pub phase: f64,
    /// Fringe period `2π/n`.
    pub period: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_fringe(phis: &[f64], deltas: &[f64], harmonic: u32) -> Result<FringeFit> {
    if phis.len() != deltas.len() {
        return Err(Error::InvalidParameter(
            "phase and witness columns differ in length".into(),
        ));
    }
    if harmonic == 0 {
        return Err(Error::InvalidParameter("harmonic must be at least 1".into()));
    }
    if phis.len() < 3 {
        return Err(Error::InvalidParameter(
            "need at least three points to fit a fringe".into(),
        ));
    }
    let n = harmonic as f64;
    let (lo, hi) = phis
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
    let period = 2.0 * std::f64::consts::PI / n;
    if hi - lo < period * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "phase range {:.4} is shorter than one fringe period {period:.4}",
            hi - lo
        )));
    }
    let m = DMatrix::from_fn(phis.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => (n * phis[i]).cos(),
        _ => (n * phis[i]).sin(),
    });
    let y = DVector::from_column_slice(deltas);
    let coef = m
        .clone()
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::InvalidParameter(format!("fringe fit failed: {e}")))?;
    let r = &m * &coef - &y;
    let (c0, a, b) = (coef[0], coef[1], coef[2]);
    Ok(FringeFit {
        harmonic,
        visibility: a.hypot(b),
        offset: c0,
        phase: (-b).atan2(-a),
        period,
        residual: (r.norm_squared() / phis.len() as f64).sqrt(),
    })
}

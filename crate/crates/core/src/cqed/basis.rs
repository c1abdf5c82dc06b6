use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, PureState, SpaceLayout};

/// Logical states of the Kerr-cat ancilla on a single truncated mode.
#[derive(Debug, Clone)]
pub struct CatBasis {
    pub beta: f64,
    /// `∝ |β⟩ + |−β⟩`, the even-parity cat.
    pub plus_cat: PureState,
    /// `∝ |β⟩ − |−β⟩`, the odd-parity cat.
    pub minus_cat: PureState,
    /// `|β⟩`.
    pub logical_zero: PureState,
    /// `|−β⟩`.
    pub logical_one: PureState,
}

/// Weight the truncation may drop from `|β⟩`.
pub const CAT_TRUNCATION_TOL: f64 = 1e-6;

impl CatBasis {
    pub fn new(beta: f64, dim: usize) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cat amplitude must be positive, got {beta}"
            )));
        }
        let (amps, leak) = coherent_amplitudes(C64::new(beta, 0.0), dim);
        if leak > CAT_TRUNCATION_TOL {
            return Err(Error::EnlargeDimension(format!(
                "cat_dim {dim} drops {leak:.2e} of |β={beta:.3}⟩; increase cat_dim"
            )));
        }
        let layout = SpaceLayout::new(vec![dim])?;
        let parity = |even: bool| {
            let v = DVector::from_fn(dim, |k, _| {
                if (k % 2 == 0) == even {
                    amps[k]
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let n = v.norm();
            PureState::new(layout.clone(), v / C64::new(n, 0.0))
        };
        let flipped = DVector::from_fn(dim, |k, _| if k % 2 == 0 { amps[k] } else { -amps[k] });
        Ok(CatBasis {
            beta,
            plus_cat: parity(true)?,
            minus_cat: parity(false)?,
            logical_zero: PureState::new(layout.clone(), amps)?,
            logical_one: PureState::new(layout, flipped)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.plus_cat.layout().dim(0)
    }

    pub fn plus_projector(&self) -> DMatrix<C64> {
        let v = self.plus_cat.amplitudes();
        v * v.adjoint()
    }

    pub fn minus_projector(&self) -> DMatrix<C64> {
        let v = self.minus_cat.amplitudes();
        v * v.adjoint()
    }
}

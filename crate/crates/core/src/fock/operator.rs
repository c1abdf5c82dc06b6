use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::layout::SpaceLayout;
use super::state::PureState;
use crate::error::{Error, Result};

/// Dense operator on a truncated multi-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: SpaceLayout,
    data: DMatrix<C64>,
}

/// Absolute tolerance used for Hermiticity and positivity checks,
/// scaled by the largest matrix entry.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub(crate) fn scaled_tol(m: &DMatrix<C64>) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    HERMITIAN_TOL * scale.max(1.0)
}

pub(crate) fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl Operator {
    pub fn from_matrix(layout: SpaceLayout, data: DMatrix<C64>) -> Result<Self> {
        let n = layout.total();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::Layout(format!(
                "matrix is {}x{}, layout needs {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Operator { layout, data })
    }

    pub fn identity(layout: &SpaceLayout) -> Self {
        let n = layout.total();
        Operator {
            layout: layout.clone(),
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(layout: &SpaceLayout) -> Self {
        let n = layout.total();
        Operator {
            layout: layout.clone(),
            data: DMatrix::zeros(n, n),
        }
    }

    /// Embeds a single-mode matrix as `I ⊗ … ⊗ local ⊗ … ⊗ I`.
    pub fn embed(layout: &SpaceLayout, mode: usize, local: &DMatrix<C64>) -> Result<Self> {
        layout.check_mode(mode)?;
        let d = layout.dim(mode);
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::Layout(format!(
                "local matrix is {}x{}, mode {mode} has dimension {d}",
                local.nrows(),
                local.ncols()
            )));
        }
        let n = layout.total();
        let stride = layout.stride(mode);
        let mut data = DMatrix::zeros(n, n);
        for col in 0..n {
            let k = layout.occupation(col, mode);
            let base = col - k * stride;
            for kp in 0..d {
                let v = local[(kp, k)];
                if v != C64::new(0.0, 0.0) {
                    data[(base + kp * stride, col)] = v;
                }
            }
        }
        Ok(Operator {
            layout: layout.clone(),
            data,
        })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            layout: self.layout.clone(),
            data: self.data.adjoint(),
        }
    }

    fn same_layout(&self, other: &Operator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Layout(format!(
                "layout mismatch: {:?} vs {:?}",
                self.layout.dims(),
                other.layout.dims()
            )));
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.same_layout(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            data: &self.data * &other.data,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_layout(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.same_layout(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Operator {
            layout: self.layout.clone(),
            data: &self.data * factor,
        }
    }

    /// `self · ψ` without renormalization.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.layout() != &self.layout {
            return Err(Error::Layout("state and operator layouts differ".into()));
        }
        let amps: DVector<C64> = &self.data * state.amplitudes();
        Ok(PureState::from_parts(self.layout.clone(), amps, state.leakage()))
    }

    /// `⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<C64> {
        if state.layout() != &self.layout {
            return Err(Error::Layout("state and operator layouts differ".into()));
        }
        let v = state.amplitudes();
        let av = &self.data * v;
        Ok(v.dotc(&av) / v.norm_squared())
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.data)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= scaled_tol(&self.data)
    }

    /// `max |U†U − I|` entrywise.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.data.adjoint() * &self.data;
        let n = g.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest entrywise difference to another operator on the same layout.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.same_layout(other)?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Lowering operator of one mode.
pub fn annihilation(layout: &SpaceLayout, mode: usize) -> Result<Operator> {
    layout.check_mode(mode)?;
    let d = layout.dim(mode);
    let mut local = DMatrix::zeros(d, d);
    for k in 1..d {
        local[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Operator::embed(layout, mode, &local)
}

pub fn creation(layout: &SpaceLayout, mode: usize) -> Result<Operator> {
    Ok(annihilation(layout, mode)?.adjoint())
}

pub fn number(layout: &SpaceLayout, mode: usize) -> Result<Operator> {
    layout.check_mode(mode)?;
    let d = layout.dim(mode);
    let local = DMatrix::from_diagonal(&DVector::from_fn(d, |k, _| C64::new(k as f64, 0.0)));
    Operator::embed(layout, mode, &local)
}

/// Flat-index permutation exchanging the occupations of two equal-dimension modes.
pub fn swap_permutation(layout: &SpaceLayout, mode_a: usize, mode_b: usize) -> Result<Vec<usize>> {
    layout.check_mode(mode_a)?;
    layout.check_mode(mode_b)?;
    if layout.dim(mode_a) != layout.dim(mode_b) {
        return Err(Error::Layout(format!(
            "cannot swap modes of dimension {} and {}",
            layout.dim(mode_a),
            layout.dim(mode_b)
        )));
    }
    let (sa, sb) = (layout.stride(mode_a), layout.stride(mode_b));
    Ok((0..layout.total())
        .map(|i| {
            let ka = layout.occupation(i, mode_a);
            let kb = layout.occupation(i, mode_b);
            i - ka * sa - kb * sb + kb * sa + ka * sb
        })
        .collect())
}

/// Permutation operator `S` with `S|ψ⟩|φ⟩ = |φ⟩|ψ⟩` on the two modes.
pub fn swap_operator(layout: &SpaceLayout, mode_a: usize, mode_b: usize) -> Result<Operator> {
    let perm = swap_permutation(layout, mode_a, mode_b)?;
    let n = layout.total();
    let mut data = DMatrix::zeros(n, n);
    for (col, &row) in perm.iter().enumerate() {
        data[(row, col)] = C64::new(1.0, 0.0);
    }
    Operator::from_matrix(layout.clone(), data)
}

/// Idempotent projector `(I + S)/2` onto the exchange-symmetric subspace.
///
/// The `(I ± S)/√2` normalization often quoted for swap tests is not
/// idempotent; probabilities `(1 ± |⟨ψ|φ⟩|²)/2` follow from this one.
pub fn symmetric_projector(layout: &SpaceLayout, mode_a: usize, mode_b: usize) -> Result<Operator> {
    let s = swap_operator(layout, mode_a, mode_b)?;
    Ok(Operator::identity(layout).add(&s)?.scale(C64::new(0.5, 0.0)))
}

/// Idempotent projector `(I − S)/2` onto the exchange-antisymmetric subspace.
pub fn antisymmetric_projector(layout: &SpaceLayout, mode_a: usize, mode_b: usize) -> Result<Operator> {
    let s = swap_operator(layout, mode_a, mode_b)?;
    Ok(Operator::identity(layout).sub(&s)?.scale(C64::new(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::{coherent_state, fock_state};
    use approx::assert_abs_diff_eq;

    fn l(d: &[usize]) -> SpaceLayout {
        SpaceLayout::new(d.to_vec()).unwrap()
    }

    #[test]
    fn lowering_matrix_entries() {
        let a = annihilation(&l(&[3]), 0).unwrap();
        let m = a.matrix();
        assert_abs_diff_eq!(m[(0, 1)].re, 1.0);
        assert_abs_diff_eq!(m[(1, 2)].re, 2f64.sqrt());
        let nonzero = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn lowering_acts_on_fock() {
        let lay = l(&[3]);
        let a = annihilation(&lay, 0).unwrap();
        let out = a.apply(&fock_state(&lay, &[2]).unwrap()).unwrap();
        let expect = fock_state(&lay, &[1]).unwrap();
        for (x, y) in out.amplitudes().iter().zip(expect.amplitudes().iter()) {
            assert_abs_diff_eq!((x - y * 2f64.sqrt()).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn canonical_commutator_below_truncation() {
        let lay = l(&[6, 2]);
        let a = annihilation(&lay, 0).unwrap();
        let ad = a.adjoint();
        let comm = a.compose(&ad).unwrap().sub(&ad.compose(&a).unwrap()).unwrap();
        for i in 0..lay.total() {
            if lay.occupation(i, 0) < 5 {
                assert_abs_diff_eq!(comm.matrix()[(i, i)].re, 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn coherent_mean_field() {
        let lay = l(&[20]);
        let alpha = C64::new(0.5, 0.0);
        let psi = coherent_state(&lay, 0, alpha).unwrap();
        let e = annihilation(&lay, 0).unwrap().expectation(&psi).unwrap();
        assert_abs_diff_eq!((e - alpha).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn swap_exchanges_and_is_involutive() {
        let lay = l(&[3, 3]);
        let s = swap_operator(&lay, 0, 1).unwrap();
        let out = s.apply(&fock_state(&lay, &[1, 0]).unwrap()).unwrap();
        assert_eq!(out.amplitudes(), fock_state(&lay, &[0, 1]).unwrap().amplitudes());
        let s2 = s.compose(&s).unwrap();
        assert_eq!(s2.max_abs_diff(&Operator::identity(&lay)).unwrap(), 0.0);
        assert!(s.unitarity_residual() < 1e-12);
    }

    #[test]
    fn antisymmetric_projector_kills_symmetric_state() {
        let lay = l(&[3, 3]);
        let p = antisymmetric_projector(&lay, 0, 1).unwrap();
        let out = p.apply(&fock_state(&lay, &[1, 1]).unwrap()).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn swap_rejects_unequal_dims() {
        assert!(matches!(swap_operator(&l(&[2, 3]), 0, 1), Err(Error::Layout(_))));
    }

    #[test]
    fn embed_matches_kronecker_product() {
        let lay = l(&[2, 3]);
        let a = annihilation(&lay, 1).unwrap();
        let local = annihilation(&l(&[3]), 0).unwrap().into_matrix();
        let kron = DMatrix::<C64>::identity(2, 2).kronecker(&local);
        assert_eq!(a.matrix(), &kron);
    }
}

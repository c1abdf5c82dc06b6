use num_complex::Complex64 as C64;

use super::operator::{antisymmetric_projector, symmetric_projector, Operator};
use super::state::{DensityState, PureState};
use crate::error::{Error, Result};

/// Outcomes below this probability are treated as impossible.
pub const NULL_OUTCOME_FLOOR: f64 = 1e-12;

/// States that can be projected by an [`Operator`].
pub trait Projectable: Sized {
    /// Returns the normalized post-measurement state and the outcome probability.
    fn project(&self, projector: &Operator) -> Result<(Self, f64)>;
}

impl Projectable for PureState {
    fn project(&self, projector: &Operator) -> Result<(Self, f64)> {
        let out = projector.apply(self)?;
        let p = out.norm().powi(2) / self.norm().powi(2);
        if p < NULL_OUTCOME_FLOOR {
            return Err(Error::NullOutcome { probability: p });
        }
        Ok((out.normalized()?, p))
    }
}

impl Projectable for DensityState {
    fn project(&self, projector: &Operator) -> Result<(Self, f64)> {
        if projector.layout() != self.layout() {
            return Err(Error::Layout("state and projector layouts differ".into()));
        }
        let pm = projector.matrix();
        let out = pm * self.matrix() * pm.adjoint();
        let p = out.trace().re / self.trace().re;
        if p < NULL_OUTCOME_FLOOR {
            return Err(Error::NullOutcome { probability: p });
        }
        let tr = out.trace().re;
        let scaled = out / C64::new(tr, 0.0);
        Ok((DensityState::new(self.layout().clone(), scaled)?, p))
    }
}

/// Probabilities of the symmetric and antisymmetric outcomes of a swap test
/// between modes `a` and `b` of a joint pure state.
pub fn swap_test_probabilities(state: &PureState, a: usize, b: usize) -> Result<(f64, f64)> {
    let lay = state.layout();
    let pp = symmetric_projector(lay, a, b)?;
    let pm = antisymmetric_projector(lay, a, b)?;
    let n2 = state.norm().powi(2);
    let plus = pp.apply(state)?.norm().powi(2) / n2;
    let minus = pm.apply(state)?.norm().powi(2) / n2;
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::layout::SpaceLayout;
    use crate::fock::state::{coherent_product, fock_state};
    use approx::assert_abs_diff_eq;

    fn l(d: &[usize]) -> SpaceLayout {
        SpaceLayout::new(d.to_vec()).unwrap()
    }

    #[test]
    fn orthogonal_inputs_split_evenly() {
        let s = fock_state(&l(&[3, 3]), &[1, 0]).unwrap();
        let (p, m) = swap_test_probabilities(&s, 0, 1).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn coherent_pair_matches_overlap() {
        let s = coherent_product(&l(&[30, 30]), &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)], 1e-10).unwrap();
        let (p, m) = swap_test_probabilities(&s, 0, 1).unwrap();
        // |<1|-1>|^2 = exp(-|1 - (-1)|^2)
        assert_abs_diff_eq!(p, 0.5 * (1.0 + (-4.0f64).exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(p + m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn antisymmetric_state_always_minus() {
        let lay = l(&[2, 2]);
        let a = fock_state(&lay, &[1, 0]).unwrap().into_amplitudes();
        let b = fock_state(&lay, &[0, 1]).unwrap().into_amplitudes();
        let psi = PureState::new(lay, (a - b) / C64::new(2f64.sqrt(), 0.0)).unwrap();
        let (p, m) = swap_test_probabilities(&psi, 0, 1).unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn projection_pure_and_mixed_agree() {
        let lay = l(&[4, 4]);
        let s = coherent_product(&lay, &[C64::new(0.3, 0.1), C64::new(0.0, -0.2)], 1e-4).unwrap();
        let proj = antisymmetric_projector(&lay, 0, 1).unwrap();
        let (ps, p1) = s.project(&proj).unwrap();
        let (rs, p2) = s.density().project(&proj).unwrap();
        assert_abs_diff_eq!(p1, p2, epsilon = 1e-13);
        assert_abs_diff_eq!((ps.density().matrix() - rs.matrix()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn null_outcome_is_an_error() {
        let lay = l(&[3, 3]);
        let s = fock_state(&lay, &[1, 1]).unwrap();
        let proj = antisymmetric_projector(&lay, 0, 1).unwrap();
        assert!(matches!(s.project(&proj), Err(Error::NullOutcome { .. })));
        assert!(matches!(s.density().project(&proj), Err(Error::NullOutcome { .. })));
    }
}

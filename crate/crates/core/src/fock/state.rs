use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::layout::SpaceLayout;
use super::operator::{hermiticity_residual, scaled_tol};
use crate::error::{Error, Result};

/// Default bound on the probability mass lost to truncation.
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-8;

/// Truncation for a coherent state of amplitude `alpha`: `⌈|α|² + 7|α| + 10⌉`.
pub fn default_coherent_dim(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 7.0 * a + 10.0).ceil() as usize
}

/// Pure state vector together with the norm discarded by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SpaceLayout,
    amps: DVector<C64>,
    leakage: f64,
}

impl PureState {
    pub fn new(layout: SpaceLayout, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != layout.total() {
            return Err(Error::Layout(format!(
                "{} amplitudes for layout of size {}",
                amps.len(),
                layout.total()
            )));
        }
        Ok(PureState {
            layout,
            amps,
            leakage: 0.0,
        })
    }

    pub(crate) fn from_parts(layout: SpaceLayout, amps: DVector<C64>, leakage: f64) -> Self {
        PureState { layout, amps, leakage }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    /// Probability mass outside the truncated space (before renormalization).
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateInput("cannot normalize a zero vector".into()));
        }
        Ok(PureState {
            layout: self.layout.clone(),
            amps: &self.amps / C64::new(n, 0.0),
            leakage: self.leakage,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::Layout("inner product of states on different layouts".into()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `self ⊗ other`; leakages combine as independent losses.
    pub fn product(&self, other: &PureState) -> PureState {
        let layout = self.layout.tensor(&other.layout);
        let amps = self.amps.kronecker(&other.amps);
        let leakage = 1.0 - (1.0 - self.leakage) * (1.0 - other.leakage);
        PureState { layout, amps, leakage }
    }

    /// Total weight on basis states where `mode` sits at its top level.
    pub fn top_level_weight(&self, mode: usize) -> Result<f64> {
        self.layout.check_mode(mode)?;
        let top = self.layout.dim(mode) - 1;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.layout.occupation(*i, mode) == top)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn density(&self) -> DensityState {
        DensityState::from_pure(self)
    }
}

/// Number state `|n_0, n_1, …⟩`.
pub fn fock_state(layout: &SpaceLayout, occupations: &[usize]) -> Result<PureState> {
    let idx = layout.flatten(occupations)?;
    let mut amps = DVector::zeros(layout.total());
    amps[idx] = C64::new(1.0, 0.0);
    PureState::new(layout.clone(), amps)
}

/// Single-mode coherent amplitudes `e^{-|α|²/2} α^k / √k!` for `k < dim`,
/// renormalized, plus the Poisson tail weight beyond the truncation.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> (DVector<C64>, f64) {
    let r = alpha.norm();
    let theta = alpha.arg();
    let mut amps = DVector::zeros(dim);
    if r == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
        return (amps, 0.0);
    }
    let ln_r = r.ln();
    let mut ln_fact = 0.0;
    let mut kept = 0.0;
    for k in 0..dim {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let ln_mag = -0.5 * r * r + k as f64 * ln_r - 0.5 * ln_fact;
        let mag = ln_mag.exp();
        kept += mag * mag;
        amps[k] = C64::from_polar(mag, k as f64 * theta);
    }
    let leakage = poisson_tail(r * r, dim);
    if kept > 0.0 {
        amps /= C64::new(kept.sqrt(), 0.0);
    }
    (amps, leakage)
}

/// `P[N ≥ dim]` for `N ~ Poisson(mean)`, summed from the tail side so small
/// values keep their relative precision.
fn poisson_tail(mean: f64, dim: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_fact: f64 = (1..=dim).map(|k| (k as f64).ln()).sum();
    let mut total = 0.0;
    let mut k = dim;
    loop {
        let term = (-mean + k as f64 * ln_mean - ln_fact).exp();
        total += term;
        if k as f64 > mean && term < total * 1e-18 {
            break;
        }
        k += 1;
        ln_fact += (k as f64).ln();
        if k > dim + 100_000 {
            break;
        }
    }
    total.min(1.0)
}

/// Coherent state `|α⟩` on one mode, vacuum elsewhere.
///
/// Fails with [`Error::Truncation`] if the discarded tail exceeds
/// [`DEFAULT_LEAKAGE_TOL`].
pub fn coherent_state(layout: &SpaceLayout, mode: usize, alpha: C64) -> Result<PureState> {
    coherent_state_with_tol(layout, mode, alpha, DEFAULT_LEAKAGE_TOL)
}

pub fn coherent_state_with_tol(layout: &SpaceLayout, mode: usize, alpha: C64, tol: f64) -> Result<PureState> {
    layout.check_mode(mode)?;
    let (local, leakage) = coherent_amplitudes(alpha, layout.dim(mode));
    if leakage > tol {
        return Err(Error::Truncation {
            leakage,
            tolerance: tol,
        });
    }
    let stride = layout.stride(mode);
    let mut amps = DVector::zeros(layout.total());
    for (k, a) in local.iter().enumerate() {
        amps[k * stride] = *a;
    }
    Ok(PureState::from_parts(layout.clone(), amps, leakage))
}

/// Product of coherent states, one amplitude per mode.
pub fn coherent_product(layout: &SpaceLayout, alphas: &[C64], tol: f64) -> Result<PureState> {
    if alphas.len() != layout.num_modes() {
        return Err(Error::Layout(format!(
            "{} amplitudes for {} modes",
            alphas.len(),
            layout.num_modes()
        )));
    }
    let mut out: Option<PureState> = None;
    for (m, &a) in alphas.iter().enumerate() {
        let single = SpaceLayout::new(vec![layout.dim(m)])?;
        let s = coherent_state_with_tol(&single, 0, a, tol)?;
        out = Some(match out {
            None => s,
            Some(prev) => prev.product(&s),
        });
    }
    let s = out.expect("at least one mode");
    if s.leakage > tol {
        return Err(Error::Truncation {
            leakage: s.leakage,
            tolerance: tol,
        });
    }
    Ok(s)
}

/// Density matrix on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    layout: SpaceLayout,
    rho: DMatrix<C64>,
}

impl DensityState {
    pub fn new(layout: SpaceLayout, rho: DMatrix<C64>) -> Result<Self> {
        let n = layout.total();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Layout(format!(
                "density matrix is {}x{}, layout needs {n}x{n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(DensityState { layout, rho })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = &state.amps;
        DensityState {
            layout: state.layout.clone(),
            rho: v * v.adjoint(),
        }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` with non-negative weights summing to one.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let layout = first.1.layout.clone();
        let n = layout.total();
        let mut rho = DMatrix::zeros(n, n);
        let mut wsum = 0.0;
        for (w, s) in components {
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("mixture weight {w}")));
            }
            if s.layout != layout {
                return Err(Error::Layout("mixture components on different layouts".into()));
            }
            rho += (&s.amps * s.amps.adjoint()) * C64::new(*w, 0.0);
            wsum += w;
        }
        if (wsum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {wsum}")));
        }
        Ok(DensityState { layout, rho })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_residual();
        if herm > scaled_tol(&self.rho).max(tol) {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidParameter(format!("trace is {tr}")));
        }
        let ev = self.min_eigenvalue();
        if ev < -tol {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {ev:.3e}")));
        }
        Ok(())
    }

    /// Traces out every mode not listed in `keep`; the result keeps the
    /// listed modes in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        for &m in keep {
            self.layout.check_mode(m)?;
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::Layout("duplicate mode in partial trace".into()));
        }
        let dims: Vec<usize> = keep_sorted.iter().map(|&m| self.layout.dim(m)).collect();
        let out_layout = SpaceLayout::new(dims)?;
        let n = self.layout.total();
        let reduced_index = |i: usize| -> (usize, usize) {
            let mut kept = 0;
            let mut traced = 0;
            for m in 0..self.layout.num_modes() {
                let o = self.layout.occupation(i, m);
                if keep_sorted.contains(&m) {
                    kept = kept * self.layout.dim(m) + o;
                } else {
                    traced = traced * self.layout.dim(m) + o;
                }
            }
            (kept, traced)
        };
        let idx: Vec<(usize, usize)> = (0..n).map(reduced_index).collect();
        let mut out = DMatrix::zeros(out_layout.total(), out_layout.total());
        for j in 0..n {
            for i in 0..n {
                if idx[i].1 == idx[j].1 {
                    out[(idx[i].0, idx[j].0)] += self.rho[(i, j)];
                }
            }
        }
        DensityState::new(out_layout, out)
    }
}

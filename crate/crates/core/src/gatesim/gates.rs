use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analytics::GateKind;
use crate::error::{Error, Result};
use crate::fock::{swap_permutation, Operator, SpaceLayout};

/// How a swap test is realized at the gate level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Apply `e^{iπ a†a}` on the swapped branch so the beam-splitter circuit is an exact swap.
    pub include_conditional_phase: bool,
    /// Mixing angle `θ` of the controlled beam splitter; `π/4` is balanced.
    pub splitting_angle: f64,
}

impl GateSpec {
    pub fn controlled_swap() -> Self {
        GateSpec {
            kind: GateKind::ControlledSwap,
            include_conditional_phase: false,
            splitting_angle: std::f64::consts::FRAC_PI_4,
        }
    }

    pub fn controlled_bs(include_conditional_phase: bool) -> Self {
        GateSpec {
            kind: GateKind::ControlledBeamSplitter,
            include_conditional_phase,
            splitting_angle: std::f64::consts::FRAC_PI_4,
        }
    }

    /// Gate realizing the plan's gate kind with the balanced angle and no
    /// compensating phase.
    pub fn for_kind(kind: GateKind) -> Self {
        match kind {
            GateKind::ControlledSwap => Self::controlled_swap(),
            GateKind::ControlledBeamSplitter => Self::controlled_bs(false),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.splitting_angle;
        if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!("splitting angle {t} outside (0, π/2]")));
        }
        Ok(())
    }
}

/// Two-mode beam splitter `exp(θ(a†b − ab†))` on a `d × d` truncated space,
/// stored as one orthogonal block per total photon number.
///
/// Maps `a† → cos θ a† − sin θ b†`, `b† → sin θ a† + cos θ b†`.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    dim: usize,
    theta: f64,
    blocks: Vec<DMatrix<C64>>,
}

impl BeamSplitter {
    pub fn new(dim: usize, theta: f64) -> Self {
        let blocks = (0..=2 * (dim - 1)).map(|n| sector_block(dim, n, theta)).collect();
        BeamSplitter { dim, theta, blocks }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn sector_range(&self, n: usize) -> (usize, usize) {
        sector_range(self.dim, n)
    }

    /// Applies the beam splitter to a field vector on layout `[d, d]`.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let d = self.dim;
        debug_assert_eq!(v.len(), d * d);
        let mut out = DVector::zeros(d * d);
        let mut buf = Vec::with_capacity(d);
        for (n, block) in self.blocks.iter().enumerate() {
            let (kmin, kmax) = self.sector_range(n);
            buf.clear();
            buf.extend((kmin..=kmax).map(|k| v[k * d + (n - k)]));
            for (ri, k) in (kmin..=kmax).enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (ci, x) in buf.iter().enumerate() {
                    acc += block[(ri, ci)] * x;
                }
                out[k * d + (n - k)] = acc;
            }
        }
        out
    }

    /// Dense operator on an arbitrary layout, acting on modes `a` and `b`.
    pub fn dense(&self, layout: &SpaceLayout, a: usize, b: usize) -> Result<Operator> {
        check_pair(layout, a, b)?;
        if layout.dim(a) != self.dim {
            return Err(Error::Layout(format!(
                "beam splitter built for dimension {}, mode has {}",
                self.dim,
                layout.dim(a)
            )));
        }
        let (sa, sb) = (layout.stride(a), layout.stride(b));
        let total = layout.total();
        let mut m = DMatrix::zeros(total, total);
        for col in 0..total {
            let k = layout.occupation(col, a);
            let l = layout.occupation(col, b);
            let base = col - k * sa - l * sb;
            let n = k + l;
            let (kmin, kmax) = self.sector_range(n);
            let block = &self.blocks[n];
            for (ri, kr) in (kmin..=kmax).enumerate() {
                let row = base + kr * sa + (n - kr) * sb;
                m[(row, col)] = block[(ri, k - kmin)];
            }
        }
        Operator::from_matrix(layout.clone(), m)
    }
}

fn sector_range(d: usize, n: usize) -> (usize, usize) {
    (n.saturating_sub(d - 1), n.min(d - 1))
}

/// `exp(θG')` restricted to the states `|k, n−k⟩` that fit in the truncation.
fn sector_block(d: usize, n: usize, theta: f64) -> DMatrix<C64> {
    let (kmin, kmax) = sector_range(d, n);
    let size = kmax - kmin + 1;
    // H = iG' is Hermitian; exp(θG') = exp(−iθH).
    let mut h = DMatrix::<C64>::zeros(size, size);
    for i in 0..size {
        let k = kmin + i;
        let l = n - k;
        if i + 1 < size {
            // a†b |k,l⟩ = √((k+1)l) |k+1,l−1⟩
            let g = ((k + 1) as f64 * l as f64).sqrt();
            h[(i + 1, i)] = C64::new(0.0, g);
            h[(i, i + 1)] = C64::new(0.0, -g);
        }
    }
    if size == 1 {
        return DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    }
    let eig = h.symmetric_eigen();
    let phases = DVector::from_iterator(size, eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -theta * l)));
    let v = &eig.eigenvectors;
    let mut out = v * DMatrix::from_diagonal(&phases) * v.adjoint();
    // The exact result is real; drop rounding noise in the imaginary part.
    for z in out.iter_mut() {
        z.im = 0.0;
    }
    out
}

fn check_pair(layout: &SpaceLayout, a: usize, b: usize) -> Result<()> {
    layout.check_mode(a)?;
    layout.check_mode(b)?;
    if a == b {
        return Err(Error::Layout("field modes must differ".into()));
    }
    if layout.dim(a) != layout.dim(b) {
        return Err(Error::Layout(format!(
            "field modes have unequal dimensions {} and {}",
            layout.dim(a),
            layout.dim(b)
        )));
    }
    Ok(())
}

fn check_ancilla(layout: &SpaceLayout, ancilla: usize) -> Result<()> {
    layout.check_mode(ancilla)?;
    if layout.dim(ancilla) != 2 {
        return Err(Error::Layout(format!(
            "ancilla mode must have dimension 2, got {}",
            layout.dim(ancilla)
        )));
    }
    Ok(())
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ S`.
pub fn controlled_swap_unitary(layout: &SpaceLayout, ancilla: usize, a: usize, b: usize) -> Result<Operator> {
    check_ancilla(layout, ancilla)?;
    check_pair(layout, a, b)?;
    let perm = swap_permutation(layout, a, b)?;
    let total = layout.total();
    let mut m = DMatrix::zeros(total, total);
    for col in 0..total {
        let row = if layout.occupation(col, ancilla) == 1 {
            perm[col]
        } else {
            col
        };
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    Operator::from_matrix(layout.clone(), m)
}

/// Controlled operator `|0⟩⟨0| ⊗ U₀ + |1⟩⟨1| ⊗ U₁` with field operators given
/// on the same layout (their action on the ancilla index is ignored).
fn controlled(layout: &SpaceLayout, ancilla: usize, u0: &Operator, u1: &Operator) -> Operator {
    let total = layout.total();
    let mut m = DMatrix::zeros(total, total);
    for col in 0..total {
        let q = layout.occupation(col, ancilla);
        let src = if q == 0 { u0 } else { u1 };
        for row in 0..total {
            if layout.occupation(row, ancilla) == q {
                m[(row, col)] = src.matrix()[(row, col)];
            }
        }
    }
    Operator::from_matrix(layout.clone(), m).expect("same layout")
}

/// The controlled-beam-splitter swap circuit: a deterministic beam splitter
/// `B(θ)`, the controlled-phase beam splitter (`B(−θ)` on ancilla `|0⟩`,
/// `B(θ)` on `|1⟩`) and optionally the compensating phase `e^{iπ a†a}` on the
/// `|1⟩` branch, applied first.
pub fn controlled_bs_unitary(
    layout: &SpaceLayout,
    spec: &GateSpec,
    ancilla: usize,
    a: usize,
    b: usize,
) -> Result<Operator> {
    spec.validate()?;
    check_ancilla(layout, ancilla)?;
    check_pair(layout, a, b)?;
    let d = layout.dim(a);
    let theta = spec.splitting_angle;
    let fwd = BeamSplitter::new(d, theta).dense(layout, a, b)?;
    let bwd = BeamSplitter::new(d, -theta).dense(layout, a, b)?;
    let cpbs = controlled(layout, ancilla, &bwd, &fwd);
    let mut u = cpbs.compose(&fwd)?;
    if spec.include_conditional_phase {
        let parity = phase_shift(layout, a, -std::f64::consts::PI)?;
        let cp = controlled(layout, ancilla, &Operator::identity(layout), &parity);
        u = u.compose(&cp)?;
    }
    Ok(u)
}

/// Dense unitary for the given gate spec.
pub fn swap_test_unitary(
    layout: &SpaceLayout,
    spec: &GateSpec,
    ancilla: usize,
    a: usize,
    b: usize,
) -> Result<Operator> {
    match spec.kind {
        GateKind::ControlledSwap => controlled_swap_unitary(layout, ancilla, a, b),
        GateKind::ControlledBeamSplitter => controlled_bs_unitary(layout, spec, ancilla, a, b),
    }
}

/// `e^{−iφ a†a}` on one mode.
pub fn phase_shift(layout: &SpaceLayout, mode: usize, phi: f64) -> Result<Operator> {
    layout.check_mode(mode)?;
    let total = layout.total();
    let diag = DVector::from_fn(total, |i, _| {
        C64::from_polar(1.0, -phi * layout.occupation(i, mode) as f64)
    });
    Operator::from_matrix(layout.clone(), DMatrix::from_diagonal(&diag))
}

/// Inputs whose image under the deterministic balanced beam splitter is
/// `|α₁⟩|α₂⟩`: `((α₁−α₂)/√2, (α₁+α₂)/√2)`.
pub fn modified_inputs_for_cbs(alpha1: C64, alpha2: C64) -> (C64, C64) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ((alpha1 - alpha2) * r, (alpha1 + alpha2) * r)
}

//! Two-level ancilla with phase- and bit-flip rates in place of the Kerr cat.
//!
//! Couplings follow the complex-rate convention of the Kerr-cat engine:
//! `ζ₁β → −i·zeta1_beta` and `ζ₂ → −i·zeta2`, which makes the CPBS
//! Hamiltonian `i·zeta1_beta·(a†b − ab†)Z` and lets the BS segment undo the
//! `|0⟩` branch.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analytics::ProbePlan;
use crate::error::{Error, Result};
use crate::fock::{annihilation, creation, DensityState, Operator, SpaceLayout};
use crate::lindblad::{AncillaModel, BsSegment, Generator, Integrator, Liouvillian, OpenSweep, SectorEngine, Segment};
use crate::sweep::WitnessPoint;

/// Rates are angular frequencies (rad/s), times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyParams {
    pub zeta1_beta: f64,
    pub zeta2: f64,
    pub gamma_z: f64,
    pub gamma_x: f64,
    pub tau: f64,
}

impl ToyParams {
    /// Couplings of the circuit-QED parameter set with `γ_z = κβ²`, no bit flips,
    /// and `τ` set for a balanced CPBS.
    pub fn table_one() -> Self {
        let zeta = 2.0 * PI * 210e3;
        ToyParams {
            zeta1_beta: zeta,
            zeta2: zeta,
            gamma_z: 2.0 * PI * 1.35e3 * 3.0,
            gamma_x: 0.0,
            tau: FRAC_PI_4 / zeta,
        }
    }

    pub fn with_rates(mut self, gamma_z: f64, gamma_x: f64) -> Self {
        self.gamma_z = gamma_z;
        self.gamma_x = gamma_x;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("zeta1_beta", self.zeta1_beta),
            ("zeta2", self.zeta2),
            ("gamma_z", self.gamma_z),
            ("gamma_x", self.gamma_x),
            ("tau", self.tau),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.zeta2 == 0.0 {
            return Err(Error::InvalidParameter("zeta2 must be positive".into()));
        }
        Ok(())
    }

    /// Duration of a balanced deterministic beam splitter.
    pub fn bs_duration(&self) -> f64 {
        FRAC_PI_4 / self.zeta2
    }

    /// Phase-flip probability per swap test, `(1 − e^{−2γ_z τ})/2`.
    pub fn flip_probability(&self) -> f64 {
        -0.5 * (-2.0 * self.gamma_z * self.tau).exp_m1()
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

fn x_projectors() -> (DMatrix<C64>, DMatrix<C64>) {
    (
        DMatrix::from_element(2, 2, c(0.5)),
        DMatrix::from_row_slice(2, 2, &[c(0.5), c(-0.5), c(-0.5), c(0.5)]),
    )
}

fn check_layout(layout: &SpaceLayout) -> Result<()> {
    let d = layout.dims();
    if d.len() != 3 || d[0] != 2 || d[1] != d[2] {
        return Err(Error::Layout(format!(
            "toy model expects [2, d, d] (qubit, a, b), got {d:?}"
        )));
    }
    Ok(())
}

/// `a†b` on modes 1, 2 of a `[2, d, d]` layout.
fn hop(layout: &SpaceLayout) -> Result<Operator> {
    creation(layout, 1)?.compose(&annihilation(layout, 2)?)
}

/// `i·zeta1_beta·(a†b − ab†) Z` on `[2, d, d]`.
pub fn toy_cpbs_hamiltonian(layout: &SpaceLayout, params: &ToyParams) -> Result<Operator> {
    check_layout(layout)?;
    let h = hop(layout)?;
    let gen = h.sub(&h.adjoint())?;
    let z = Operator::embed(layout, 0, &pauli_z())?;
    Ok(gen.compose(&z)?.scale(C64::new(0.0, params.zeta1_beta)))
}

/// `ζ₂ a†b + ζ₂* ab†` with `ζ₂ = −i·zeta2`.
pub fn toy_bs_hamiltonian(layout: &SpaceLayout, params: &ToyParams) -> Result<Operator> {
    check_layout(layout)?;
    let h = hop(layout)?;
    let z2 = C64::new(0.0, -params.zeta2);
    h.scale(z2).add(&h.adjoint().scale(z2.conj()))
}

fn toy_generator(layout: &SpaceLayout, params: &ToyParams, segment: Segment) -> Result<Generator> {
    params.validate()?;
    let h = match segment {
        Segment::Cpbs => toy_cpbs_hamiltonian(layout, params)?,
        Segment::Bs => toy_bs_hamiltonian(layout, params)?,
    };
    let jz = Operator::embed(layout, 0, &pauli_z())?.scale(c(params.gamma_z.sqrt()));
    let jx = Operator::embed(layout, 0, &pauli_x())?.scale(c(params.gamma_x.sqrt()));
    Generator::new(h.matrix(), &[jz.into_matrix(), jx.into_matrix()])
}

/// Integrates the qubit master equation for one segment.
pub fn evolve_toy(state: &DensityState, params: &ToyParams, segment: Segment, duration: f64) -> Result<DensityState> {
    evolve_toy_with(state, params, segment, duration, Integrator::default())
}

pub fn evolve_toy_with(
    state: &DensityState,
    params: &ToyParams,
    segment: Segment,
    duration: f64,
    integrator: Integrator,
) -> Result<DensityState> {
    let layout = state.layout().clone();
    let gen = toy_generator(&layout, params, segment)?;
    let (rho, _) = integrator.integrate(&Liouvillian::new(&gen), state.matrix().clone(), duration)?;
    DensityState::new(layout, rho)
}

/// Sector-engine form of the toy model.
pub fn toy_engine(params: &ToyParams) -> Result<SectorEngine> {
    params.validate()?;
    let (plus, minus) = x_projectors();
    Ok(SectorEngine {
        model: AncillaModel {
            dim: 2,
            h: DMatrix::zeros(2, 2),
            cross: None,
            coupling: pauli_z() * C64::new(0.0, params.zeta1_beta),
            jumps: vec![
                pauli_z() * c(params.gamma_z.sqrt()),
                pauli_x() * c(params.gamma_x.sqrt()),
            ],
            initial: plus.clone(),
            plus,
            minus,
        },
        cpbs_duration: params.tau,
        bs: BsSegment {
            zeta: C64::new(0.0, -params.zeta2),
            duration: params.bs_duration(),
        },
        integrator: Integrator::default(),
    })
}

/// Two swap tests with the qubit measured in the X basis after each CPBS
/// segment and before the BS segment.
pub fn toy_protocol_sweep(plan: &ProbePlan, params: &ToyParams, phis: &[f64]) -> Result<Vec<WitnessPoint>> {
    Ok(toy_protocol_run(plan, params, phis)?.points)
}

pub fn toy_protocol_run(plan: &ProbePlan, params: &ToyParams, phis: &[f64]) -> Result<OpenSweep> {
    toy_engine(params)?.sweep(plan, phis)
}

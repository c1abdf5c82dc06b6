use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::gates::{BeamSplitter, GateSpec};
use crate::analytics::{Branch, FlipProbs, GateKind, ProbeKind, ProbePlan};
use crate::error::{Error, Result};
use crate::fock::{
    coherent_product, default_coherent_dim, fock_state, swap_permutation, PureState, SpaceLayout, DEFAULT_LEAKAGE_TOL,
    NULL_OUTCOME_FLOOR,
};

/// Record of one two-swap-test run.
#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub branch1: Branch,
    pub prob1: f64,
    pub post1: PureState,
    pub phi: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub delta: f64,
    /// Input probability mass lost to truncation.
    pub leakage: f64,
}

/// Field action on the two ancilla branches of one swap test.
#[derive(Debug, Clone)]
enum FieldGate {
    Swap(Vec<usize>),
    Bs {
        fwd: BeamSplitter,
        bwd: BeamSplitter,
        parity: bool,
    },
}

impl FieldGate {
    /// `(U₀ v, U₁ v)` for ancilla states `|0⟩` and `|1⟩`.
    fn branches(&self, d: usize, v: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
        match self {
            FieldGate::Swap(perm) => {
                let mut s = DVector::zeros(v.len());
                for (i, &j) in perm.iter().enumerate() {
                    s[j] = v[i];
                }
                (v.clone(), s)
            }
            FieldGate::Bs { fwd, bwd, parity } => {
                let mixed = fwd.apply(v);
                let u0 = bwd.apply(&mixed);
                let u1 = if *parity {
                    let mut p = v.clone();
                    for k in (1..d).step_by(2) {
                        for l in 0..d {
                            p[k * d + l] = -p[k * d + l];
                        }
                    }
                    fwd.apply(&fwd.apply(&p))
                } else {
                    fwd.apply(&mixed)
                };
                (u0, u1)
            }
        }
    }
}

/// Gate-level simulator of the two-swap-test protocol with an explicit
/// two-level ancilla stored as its two field branches.
#[derive(Debug, Clone)]
pub struct ProtocolRunner {
    plan: ProbePlan,
    spec: GateSpec,
    layout: SpaceLayout,
    input: PureState,
    gate: FieldGate,
}

/// Field truncation that keeps the input and every gate image below the default leakage.
pub fn default_field_dim(plan: &ProbePlan, spec: &GateSpec) -> usize {
    match plan.kind {
        ProbeKind::Noon { n, m } => n.max(m) + 1,
        ProbeKind::Coherent { alpha1, alpha2 } => {
            let bound = match spec.kind {
                GateKind::ControlledSwap => alpha1.norm().max(alpha2.norm()),
                GateKind::ControlledBeamSplitter => alpha1.norm() + alpha2.norm(),
            };
            default_coherent_dim(C64::new(bound, 0.0))
        }
    }
}

impl ProtocolRunner {
    pub fn new(plan: ProbePlan, spec: GateSpec) -> Result<Self> {
        let d = default_field_dim(&plan, &spec);
        Self::with_dim(plan, spec, d)
    }

    /// Runner whose gate follows the plan's gate kind.
    pub fn for_plan(plan: ProbePlan) -> Result<Self> {
        Self::new(plan, GateSpec::for_kind(plan.gate))
    }

    pub fn with_dim(plan: ProbePlan, spec: GateSpec, dim: usize) -> Result<Self> {
        plan.validate()?;
        spec.validate()?;
        let layout = SpaceLayout::new(vec![dim, dim])?;
        let input = match plan.kind {
            ProbeKind::Noon { n, m } => fock_state(&layout, &[n, m])?,
            ProbeKind::Coherent { alpha1, alpha2 } => {
                coherent_product(&layout, &[alpha1, alpha2], DEFAULT_LEAKAGE_TOL)?
            }
        };
        let gate = match spec.kind {
            GateKind::ControlledSwap => FieldGate::Swap(swap_permutation(&layout, 0, 1)?),
            GateKind::ControlledBeamSplitter => FieldGate::Bs {
                fwd: BeamSplitter::new(dim, spec.splitting_angle),
                bwd: BeamSplitter::new(dim, -spec.splitting_angle),
                parity: spec.include_conditional_phase,
            },
        };
        Ok(ProtocolRunner {
            plan,
            spec,
            layout,
            input,
            gate,
        })
    }

    pub fn plan(&self) -> &ProbePlan {
        &self.plan
    }

    pub fn spec(&self) -> &GateSpec {
        &self.spec
    }

    pub fn field_dim(&self) -> usize {
        self.layout.dim(0)
    }

    pub fn leakage(&self) -> f64 {
        self.input.leakage()
    }

    /// One swap test on a normalized field vector: unnormalized post-measurement
    /// field states for outcomes `+` and `−`.
    fn swap_test(&self, v: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
        let (u0, u1) = self.gate.branches(self.field_dim(), v);
        let half = C64::new(0.5, 0.0);
        ((&u0 + &u1) * half, (&u0 - &u1) * half)
    }

    /// Postselected outcome of the first swap test and its probability.
    pub fn first_test(&self, branch: Branch) -> Result<(PureState, f64)> {
        let (plus, minus) = self.swap_test(self.input.amplitudes());
        let v = match branch {
            Branch::Symmetric => plus,
            Branch::Antisymmetric => minus,
        };
        let p = v.norm_squared();
        if p < NULL_OUTCOME_FLOOR {
            return Err(Error::InfeasibleBranch { probability: p });
        }
        let post = PureState::new(self.layout.clone(), v / C64::new(p.sqrt(), 0.0))?;
        Ok((post, p))
    }

    /// `(p₊, p₋)` of the second swap test after the phase `e^{−iφ a†a}`.
    pub fn second_test(&self, state: &PureState, phi: f64) -> (f64, f64) {
        let d = self.field_dim();
        let mut v = state.amplitudes().clone();
        for k in 1..d {
            let ph = C64::from_polar(1.0, -phi * k as f64);
            for l in 0..d {
                v[k * d + l] *= ph;
            }
        }
        let (plus, minus) = self.swap_test(&v);
        let (pp, pm) = (plus.norm_squared(), minus.norm_squared());
        let s = pp + pm;
        (pp / s, pm / s)
    }

    fn trace(&self, branch: Branch, post: PureState, prob: f64, phi: f64, pp: f64, pm: f64) -> ProtocolTrace {
        ProtocolTrace {
            branch1: branch,
            prob1: prob,
            post1: post,
            phi,
            p_plus: pp,
            p_minus: pm,
            delta: pp - pm,
            leakage: self.leakage(),
        }
    }

    pub fn run(&self, phi: f64, postselect: Branch) -> Result<ProtocolTrace> {
        let (post, prob) = self.first_test(postselect)?;
        let (pp, pm) = self.second_test(&post, phi);
        Ok(self.trace(postselect, post, prob, phi, pp, pm))
    }

    /// Run with phase flips: the first test leaves the mixture
    /// `(1−p₁)|Ψ_b⟩⟨Ψ_b| + p₁|Ψ_b̄⟩⟨Ψ_b̄|`, and each second-test outcome is
    /// relabelled with probability `p₂`.
    pub fn run_with_flips(&self, phi: f64, postselect: Branch, flips: FlipProbs) -> Result<ProtocolTrace> {
        flips.validate()?;
        let (post, prob) = self.first_test(postselect)?;
        let (mut pp, mut pm) = self.second_test(&post, phi);
        if flips.p1 > 0.0 {
            let (other, _) = self.first_test(postselect.flipped())?;
            let (op, om) = self.second_test(&other, phi);
            pp = (1.0 - flips.p1) * pp + flips.p1 * op;
            pm = (1.0 - flips.p1) * pm + flips.p1 * om;
        }
        let (fp, fm) = (
            (1.0 - flips.p2) * pp + flips.p2 * pm,
            (1.0 - flips.p2) * pm + flips.p2 * pp,
        );
        Ok(self.trace(postselect, post, prob, phi, fp, fm))
    }

    /// Parallel sweep over phases; the first test is computed once.
    pub fn sweep(&self, phis: &[f64], postselect: Branch, flips: FlipProbs) -> Result<Vec<ProtocolTrace>> {
        flips.validate()?;
        let (post, prob) = self.first_test(postselect)?;
        let other = if flips.p1 > 0.0 {
            Some(self.first_test(postselect.flipped())?.0)
        } else {
            None
        };
        Ok(phis
            .par_iter()
            .map(|&phi| {
                let (mut pp, mut pm) = self.second_test(&post, phi);
                if let Some(o) = &other {
                    let (op, om) = self.second_test(o, phi);
                    pp = (1.0 - flips.p1) * pp + flips.p1 * op;
                    pm = (1.0 - flips.p1) * pm + flips.p1 * om;
                }
                let (fp, fm) = (
                    (1.0 - flips.p2) * pp + flips.p2 * pm,
                    (1.0 - flips.p2) * pm + flips.p2 * pp,
                );
                self.trace(postselect, post.clone(), prob, phi, fp, fm)
            })
            .collect())
    }
}

/// Single protocol run with the default truncation.
pub fn run_protocol(plan: &ProbePlan, spec: &GateSpec, phi: f64, postselect: Branch) -> Result<ProtocolTrace> {
    ProtocolRunner::new(*plan, *spec)?.run(phi, postselect)
}

pub fn run_protocol_with_flips(plan: &ProbePlan, spec: &GateSpec, phi: f64, flips: FlipProbs) -> Result<ProtocolTrace> {
    ProtocolRunner::new(*plan, *spec)?.run_with_flips(phi, plan.branch, flips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{linspace, witness_cbs_alpha0, witness_general, witness_with_flips};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn noon_two_matches_cosine() {
        let plan = ProbePlan::noon(2, 0).unwrap();
        let r = ProtocolRunner::for_plan(plan).unwrap();
        for phi in linspace(-PI, PI, 41) {
            let t = r.run(phi, Branch::Antisymmetric).unwrap();
            assert_abs_diff_eq!(t.delta, -(2.0 * phi).cos(), epsilon = 1e-10);
            assert_abs_diff_eq!(t.p_plus + t.p_minus, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_test_probability_for_coherent_pair() {
        let plan = ProbePlan::coherent_real(1.0, -1.0).unwrap();
        let t = run_protocol(&plan, &GateSpec::controlled_swap(), 0.0, Branch::Antisymmetric).unwrap();
        assert_abs_diff_eq!(t.prob1, 0.5 * (1.0 - (-4.0f64).exp()), epsilon = 1e-9);
    }

    #[test]
    fn cat_pair_matches_closed_form() {
        let plan = ProbePlan::coherent_real(1.5, -1.5).unwrap();
        let r = ProtocolRunner::for_plan(plan).unwrap();
        let tol = (10.0 * r.leakage()).max(1e-8);
        for t in r
            .sweep(&linspace(-PI, PI, 41), Branch::Antisymmetric, FlipProbs::NONE)
            .unwrap()
        {
            assert_abs_diff_eq!(t.delta, witness_general(&plan, t.phi).unwrap(), epsilon = tol);
        }
    }

    #[test]
    fn beam_splitter_variant_matches_cosh_formula() {
        let a = 1.8;
        let plan = ProbePlan::coherent_real(a, 0.0).unwrap();
        let r = ProtocolRunner::new(plan, GateSpec::controlled_bs(false)).unwrap();
        for t in r
            .sweep(&linspace(-1.0, 1.0, 21), Branch::Antisymmetric, FlipProbs::NONE)
            .unwrap()
        {
            assert_abs_diff_eq!(t.delta, witness_cbs_alpha0(a, t.phi), epsilon = 1e-7);
        }
    }

    #[test]
    fn conditional_phase_restores_swap() {
        let plan = ProbePlan::coherent_real(1.2, 0.0).unwrap();
        let with = ProtocolRunner::new(plan, GateSpec::controlled_bs(true)).unwrap();
        let ideal = ProtocolRunner::new(plan, GateSpec::controlled_swap()).unwrap();
        for phi in [-0.7, 0.0, 0.4] {
            let a = with.run(phi, Branch::Antisymmetric).unwrap().delta;
            let b = ideal.run(phi, Branch::Antisymmetric).unwrap().delta;
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
        }
    }

    #[test]
    fn symmetric_input_has_no_antisymmetric_branch() {
        let plan = ProbePlan::coherent_real(0.6, 0.6).unwrap();
        let err = run_protocol(&plan, &GateSpec::controlled_swap(), 0.1, Branch::Antisymmetric).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBranch { .. }));
    }

    #[test]
    fn noon_flip_probabilities() {
        let plan = ProbePlan::noon(4, 0).unwrap();
        let flips = FlipProbs::new(0.05, 0.0).unwrap();
        for phi in [0.0, 0.2, 0.9] {
            let t = run_protocol_with_flips(&plan, &GateSpec::controlled_swap(), phi, flips).unwrap();
            let expect = 0.5 + (2.0 * 0.05 - 1.0) / 2.0 * (4.0 * phi).cos();
            assert_abs_diff_eq!(t.p_plus, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_flips_match_closed_form() {
        let a = 2.0;
        let plan = ProbePlan::coherent_real(a, 0.0).unwrap();
        let flips = FlipProbs::new(0.05, 0.02).unwrap();
        let r = ProtocolRunner::for_plan(plan).unwrap();
        for t in r.sweep(&linspace(-1.0, 1.0, 11), Branch::Antisymmetric, flips).unwrap() {
            assert_abs_diff_eq!(
                t.delta,
                witness_with_flips(&plan, flips, t.phi).unwrap(),
                epsilon = 1e-7
            );
        }
    }

    #[test]
    fn zero_flips_identical_to_plain_run() {
        let plan = ProbePlan::coherent_real(1.0, -0.3).unwrap();
        let r = ProtocolRunner::for_plan(plan).unwrap();
        let a = r.run(0.3, Branch::Antisymmetric).unwrap();
        let b = r.run_with_flips(0.3, Branch::Antisymmetric, FlipProbs::NONE).unwrap();
        assert_eq!(a.delta, b.delta);
    }
}

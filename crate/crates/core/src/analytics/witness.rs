use super::closed;
use super::plan::{Branch, FlipProbs, GateKind, OverlapSet, ProbeKind, ProbePlan};
use crate::error::{Error, Result};

/// `Δ(φ) = −cos[(n−m)φ]` for the NOON-like state prepared from `|n⟩|m⟩`.
pub fn witness_noon(n: usize, m: usize, phi: f64) -> Result<f64> {
    if n == m {
        return Err(Error::DegenerateInput(format!("NOON witness needs n != m (got {n})")));
    }
    Ok(-((n as f64 - m as f64) * phi).cos())
}

/// Probability of the postselected outcome of the first swap test.
pub fn first_test_probability(plan: &ProbePlan, branch: Branch) -> Result<f64> {
    plan.validate()?;
    let o = OverlapSet::new(plan)?;
    match plan.gate {
        GateKind::ControlledSwap => Ok(match branch {
            Branch::Symmetric => 0.5 * (1.0 + o.s_sq()),
            Branch::Antisymmetric => 0.5 * o.one_minus_s_sq(),
        }),
        GateKind::ControlledBeamSplitter => match plan.kind {
            // ⟨n,m|W|n,m⟩ = 0 for n ≠ m
            ProbeKind::Noon { .. } => Ok(0.5),
            ProbeKind::Coherent { alpha1, alpha2 } => {
                // W|α₁,α₂⟩ = |α₂,−α₁⟩
                let w = super::plan::coherent_overlap(alpha1, alpha2) * super::plan::coherent_overlap(alpha2, -alpha1);
                Ok(0.5 * (1.0 + branch.sign() * w.re))
            }
        },
    }
}

/// Witness and phase derivative of one postselected branch of a controlled-swap
/// protocol, from `Δ = (X ∓ Y) / (2(1 ∓ |s|²))`.
pub(crate) fn cswap_branch(o: &OverlapSet, branch: Branch, phi: f64) -> Result<(f64, f64)> {
    let (x, dx) = o.x_term(phi);
    let (y, dy) = o.y_term(phi);
    let sg = branch.sign();
    let norm = match branch {
        Branch::Antisymmetric => 2.0 * o.one_minus_s_sq(),
        Branch::Symmetric => 2.0 * (1.0 + o.s_sq()),
    };
    if norm < 2.0 * crate::fock::NULL_OUTCOME_FLOOR {
        return Err(Error::UndefinedBranch(
            "inputs are identical, the singlet-like state does not exist".into(),
        ));
    }
    Ok(((x + sg * y) / norm, (dx + sg * dy) / norm))
}

/// NOON witness for the beam-splitter gate: the relative photon-number parity
/// decides whether the fringe survives.
fn cbs_noon_branch(n: usize, m: usize, branch: Branch, phi: f64) -> (f64, f64) {
    if (n + m) % 2 == 1 {
        return (0.0, 0.0);
    }
    let k = n as f64 - m as f64;
    let sg = branch.sign();
    (sg * (k * phi).cos(), -sg * k * (k * phi).sin())
}

/// Witness and derivative of a branch, if a closed form exists for this plan.
pub(crate) fn branch_witness(plan: &ProbePlan, branch: Branch, phi: f64) -> Result<(f64, f64)> {
    plan.validate()?;
    match plan.gate {
        GateKind::ControlledSwap => {
            let o = OverlapSet::new(plan)?;
            cswap_branch(&o, branch, phi)
        }
        GateKind::ControlledBeamSplitter => match plan.kind {
            ProbeKind::Noon { n, m } => Ok(cbs_noon_branch(n, m, branch, phi)),
            _ => match (plan.as_alpha_vacuum(), branch) {
                (Some(a), Branch::Antisymmetric) if a != 0.0 => Ok((
                    closed::witness_cbs_alpha0(a, phi),
                    closed::cbs_alpha0_derivative(a, phi),
                )),
                _ => Err(Error::NotDerived(
                    "beam-splitter gate: closed form only for NOON and Coherent(α, 0) antisymmetric".into(),
                )),
            },
        },
    }
}

/// Overlap witness `Δ(φ) = p₊ − p₋` of the second swap test for the plan's
/// gate and postselected branch.
pub fn witness_general(plan: &ProbePlan, phi: f64) -> Result<f64> {
    plan.validate()?;
    if plan.gate == GateKind::ControlledSwap && plan.branch == Branch::Antisymmetric {
        if let ProbeKind::Noon { n, m } = plan.kind {
            return witness_noon(n, m, phi);
        }
        if let Some(a) = plan.as_cat_pair() {
            if a != 0.0 {
                return Ok(closed::witness_cat_pair(a, phi));
            }
        }
        if let Some(a) = plan.as_alpha_vacuum() {
            if a != 0.0 {
                return Ok(closed::witness_alpha_vacuum(a, phi));
            }
        }
    }
    if plan.gate == GateKind::ControlledBeamSplitter && plan.branch == Branch::Antisymmetric {
        if let Some(a) = plan.as_alpha_vacuum() {
            if a != 0.0 {
                return Ok(closed::witness_cbs_alpha0(a, phi));
            }
        }
    }
    branch_witness(plan, plan.branch, phi).map(|(d, _)| d)
}

/// Witness with ancilla phase flips: the first test yields the mixture
/// `(1−p₁)|Ψ_b⟩⟨Ψ_b| + p₁|Ψ_b̄⟩⟨Ψ_b̄|` and the second test's outcomes are
/// relabelled with probability `p₂`, so
/// `Δ = (1−2p₂)[(1−p₁)Δ_b + p₁Δ_b̄]`.
pub fn witness_with_flips(plan: &ProbePlan, flips: FlipProbs, phi: f64) -> Result<f64> {
    flips.validate()?;
    if flips.is_zero() {
        return witness_general(plan, phi);
    }
    Ok(witness_and_derivative_with_flips(plan, flips, phi)?.0)
}

pub(crate) fn witness_and_derivative_with_flips(plan: &ProbePlan, flips: FlipProbs, phi: f64) -> Result<(f64, f64)> {
    plan.validate()?;
    let v2 = 1.0 - 2.0 * flips.p2;
    if plan.gate == GateKind::ControlledSwap && plan.branch == Branch::Antisymmetric {
        if let Some(a) = plan.as_alpha_vacuum() {
            if a != 0.0 {
                let d = closed::witness_alpha_vacuum(a, phi) + flips.p1 * closed::flip_correction_alpha_vacuum(a, phi);
                let (d0p, d1p) = closed::alpha_vacuum_derivatives(a, phi);
                return Ok((v2 * d, v2 * (d0p + flips.p1 * d1p)));
            }
        }
    }
    if plan.gate == GateKind::ControlledBeamSplitter {
        if let ProbeKind::Coherent { .. } = plan.kind {
            if flips.p1 > 0.0 {
                return Err(Error::NotDerived(
                    "beam-splitter gate with first-test flips on coherent inputs".into(),
                ));
            }
        }
    }
    let (db, dbp) = branch_witness(plan, plan.branch, phi)?;
    let (dn, dnp) = if flips.p1 > 0.0 {
        branch_witness(plan, plan.branch.flipped(), phi)?
    } else {
        (0.0, 0.0)
    };
    let w = 1.0 - flips.p1;
    Ok((v2 * (w * db + flips.p1 * dn), v2 * (w * dbp + flips.p1 * dnp)))
}

/// Grid of `len` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    match len {
        0 => vec![],
        1 => vec![lo],
        _ => (0..len).map(|i| lo + (hi - lo) * i as f64 / (len - 1) as f64).collect(),
    }
}

use num_complex::Complex64 as C64;

use super::closed;
use super::plan::{coherent_overlap, Branch, FlipProbs, GateKind, ProbeKind, ProbePlan};
use super::witness::witness_and_derivative_with_flips;
use crate::error::{Error, Result};

/// When `1 − |Δ|` drops below this, the binary-outcome Fisher information is
/// evaluated as its limit `|Δ''|`.
const EDGE_THRESHOLD: f64 = 1e-8;

/// Central-difference step for derivative cross-checks.
pub const FD_STEP: f64 = 1e-5;

/// Quantum Fisher information of the state prepared by the first swap test,
/// for a phase imprinted on the first mode.
pub fn qfi(plan: &ProbePlan) -> Result<f64> {
    plan.validate()?;
    match plan.kind {
        ProbeKind::Noon { n, m } => {
            let k = n as f64 - m as f64;
            Ok(k * k)
        }
        ProbeKind::Coherent { alpha1, alpha2 } => {
            if plan.branch == Branch::Antisymmetric {
                if alpha1 == alpha2 {
                    return Err(Error::UndefinedBranch(
                        "identical coherent inputs leave no antisymmetric component".into(),
                    ));
                }
                // The beam-splitter variant has the same photon statistics on
                // mode a for Coherent(α, 0).
                if let Some(a) = plan.as_alpha_vacuum() {
                    return Ok(closed::qfi_alpha_vacuum(a));
                }
                if plan.gate == GateKind::ControlledSwap {
                    if let Some(a) = plan.as_cat_pair() {
                        return Ok(closed::qfi_cat_pair(a));
                    }
                    if alpha1.im == 0.0 && alpha2.im == 0.0 {
                        if let Some(f) = closed::qfi_real_pair(alpha1.re, alpha2.re) {
                            return Ok(f);
                        }
                    }
                }
            }
            let second = match plan.gate {
                GateKind::ControlledSwap => (alpha2, alpha1),
                GateKind::ControlledBeamSplitter => (alpha2, -alpha1),
            };
            two_component_qfi((alpha1, alpha2), second, plan.branch.sign())
        }
    }
}

/// `4 Var(a†a)` for the normalized superposition `|u⟩ + σ|v⟩` of two coherent
/// product states `|u⟩ = |u₀,u₁⟩`, `|v⟩ = |v₀,v₁⟩`.
pub fn two_component_qfi(u: (C64, C64), v: (C64, C64), sigma: f64) -> Result<f64> {
    // ⟨a|n^k|b⟩ / ⟨a|b⟩ for k = 0, 1, 2
    let moments = |a: C64, b: C64| {
        let z = a.conj() * b;
        [C64::new(1.0, 0.0), z, z + z * z]
    };
    let cross = coherent_overlap(u.0, v.0) * coherent_overlap(u.1, v.1);
    let norm = 2.0 + 2.0 * sigma * cross.re;
    if norm < 2.0 * crate::fock::NULL_OUTCOME_FLOOR {
        return Err(Error::UndefinedBranch("superposition components cancel".into()));
    }
    let mu = moments(u.0, u.0);
    let mv = moments(v.0, v.0);
    let muv = moments(u.0, v.0);
    let mut e = [0.0; 3];
    for k in 0..3 {
        e[k] = (mu[k].re + mv[k].re + 2.0 * sigma * (muv[k] * cross).re) / norm;
    }
    Ok(4.0 * (e[2] - e[1] * e[1]))
}

/// `Δ'² / (1 − Δ²)`, switching to the limit `|Δ''|` at the fringe extremes.
fn binary_cfi(d: f64, dp: f64, second: impl Fn() -> f64) -> f64 {
    let edge = (1.0 - d).min(1.0 + d);
    if edge < EDGE_THRESHOLD {
        return second().abs();
    }
    dp * dp / ((1.0 - d) * (1.0 + d))
}

/// Classical Fisher information of the second swap test,
/// `F_C = Σ± p± (∂φ ln p±)²`.
pub fn cfi(plan: &ProbePlan, flips: FlipProbs, phi: f64) -> Result<f64> {
    plan.validate()?;
    flips.validate()?;
    if let ProbeKind::Noon { n, m } = plan.kind {
        if plan.gate == GateKind::ControlledBeamSplitter && (n + m) % 2 == 1 {
            return Ok(0.0);
        }
        let k = n as f64 - m as f64;
        let v = flips.contrast();
        if v == 1.0 {
            return Ok(k * k);
        }
        let v2 = v * v;
        let sn = (k * phi).sin();
        let cs = (k * phi).cos();
        return Ok(v2 * k * k * sn * sn / (1.0 - v2 * cs * cs));
    }
    if plan.branch == Branch::Antisymmetric {
        match plan.gate {
            GateKind::ControlledSwap => {
                if let Some(a) = plan.as_alpha_vacuum() {
                    if a != 0.0 {
                        return Ok(closed::cfi_alpha_vacuum(a, flips.p1, flips.p2, phi));
                    }
                }
                if flips.is_zero() {
                    if let Some(a) = plan.as_cat_pair() {
                        if a != 0.0 {
                            return Ok(closed::cfi_cat_pair(a, phi));
                        }
                    }
                }
            }
            GateKind::ControlledBeamSplitter => {
                if let Some(a) = plan.as_alpha_vacuum() {
                    if a != 0.0 && flips.is_zero() {
                        return Ok(closed::cfi_cbs_alpha0(a, phi));
                    }
                    if a != 0.0 && flips.p1 == 0.0 {
                        let v2 = 1.0 - 2.0 * flips.p2;
                        let d = v2 * closed::witness_cbs_alpha0(a, phi);
                        let dp = v2 * closed::cbs_alpha0_derivative(a, phi);
                        return Ok(dp * dp / ((1.0 - d) * (1.0 + d)));
                    }
                }
            }
        }
    }
    let (d, dp) = witness_and_derivative_with_flips(plan, flips, phi)?;
    Ok(binary_cfi(d, dp, || {
        let h = FD_STEP;
        let up = witness_and_derivative_with_flips(plan, flips, phi + h).map(|x| x.1);
        let dn = witness_and_derivative_with_flips(plan, flips, phi - h).map(|x| x.1);
        match (up, dn) {
            (Ok(u), Ok(l)) => (u - l) / (2.0 * h),
            _ => f64::NAN,
        }
    }))
}

/// Generic `Σ p (∂φ ln p)²` by central differences of an outcome-probability
/// function returning `(p₊, p₋)`.
pub fn cfi_from_probabilities<F>(probs: F, phi: f64, h: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (pp, pm) = probs(phi);
    let (up, um) = probs(phi + h);
    let (lp, lm) = probs(phi - h);
    let dp = (up - lp) / (2.0 * h);
    let dm = (um - lm) / (2.0 * h);
    let mut f = 0.0;
    if pp > 0.0 {
        f += dp * dp / pp;
    }
    if pm > 0.0 {
        f += dm * dm / pm;
    }
    f
}

/// Maximum of `f` on `[lo, hi]`: a grid scan followed by golden-section
/// refinement around the best grid point. Returns `(argmax, max)`.
pub fn maximize_over_phase<F>(f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let grid = grid.max(3);
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..grid {
        let x = lo + step * i as f64;
        let v = f(x);
        if v.is_finite() && v > best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-13 * (1.0 + best.0.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    if v.is_finite() && v >= best.1 {
        (x, v)
    } else {
        best
    }
}

/// Largest classical Fisher information over `φ ∈ [lo, hi]`.
pub fn max_cfi(plan: &ProbePlan, flips: FlipProbs, lo: f64, hi: f64, grid: usize) -> Result<(f64, f64)> {
    cfi(plan, flips, 0.5 * (lo + hi))?;
    Ok(maximize_over_phase(
        |phi| cfi(plan, flips, phi).unwrap_or(f64::NAN),
        lo,
        hi,
        grid,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::witness::{linspace, witness_with_flips};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn probs(plan: ProbePlan, flips: FlipProbs) -> impl Fn(f64) -> (f64, f64) {
        move |phi| {
            let d = witness_with_flips(&plan, flips, phi).unwrap();
            (0.5 * (1.0 + d), 0.5 * (1.0 - d))
        }
    }

    #[test]
    fn noon_examples() {
        assert_eq!(qfi(&ProbePlan::noon(5, 0).unwrap()).unwrap(), 25.0);
        let p = ProbePlan::noon(4, 0).unwrap();
        for phi in [0.0, 0.3, 1.0] {
            assert_eq!(cfi(&p, FlipProbs::NONE, phi).unwrap(), 16.0);
        }
        let f = FlipProbs::new(0.05, 0.05).unwrap();
        assert_abs_diff_eq!(cfi(&p, f, PI / 8.0).unwrap(), 10.4976, epsilon = 1e-10);
        assert_abs_diff_eq!(cfi(&p, f, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cat_pair_zero_phase_limit() {
        let p = ProbePlan::coherent_real(1.0, -1.0).unwrap();
        assert_relative_eq!(
            cfi(&p, FlipProbs::NONE, 0.0).unwrap(),
            2.0 / 2f64.tanh(),
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(2.0 / 2f64.tanh(), 2.0746, epsilon = 1e-4);
    }

    #[test]
    fn closed_forms_match_finite_difference_definition() {
        let cases = [
            (ProbePlan::coherent_real(1.0, -1.0).unwrap(), FlipProbs::NONE),
            (ProbePlan::coherent_real(1.5, 0.0).unwrap(), FlipProbs::NONE),
            (
                ProbePlan::coherent_real(1.5, 0.0).unwrap(),
                FlipProbs::new(0.05, 0.02).unwrap(),
            ),
            (
                ProbePlan::coherent_real(0.8, -0.3).unwrap(),
                FlipProbs::new(0.03, 0.0).unwrap(),
            ),
            (ProbePlan::noon(3, 0).unwrap(), FlipProbs::new(0.05, 0.05).unwrap()),
            (
                ProbePlan::coherent_real(1.7, 0.0)
                    .unwrap()
                    .with_gate(GateKind::ControlledBeamSplitter),
                FlipProbs::NONE,
            ),
        ];
        for (plan, flips) in cases {
            let pr = probs(plan, flips);
            for phi in linspace(-PI + 0.013, PI - 0.011, 101) {
                let closed = cfi(&plan, flips, phi).unwrap();
                let fd = cfi_from_probabilities(&pr, phi, FD_STEP);
                let scale = closed.abs().max(1e-3);
                assert!(
                    (closed - fd).abs() / scale < 1e-6,
                    "{plan:?} {flips:?} phi {phi}: {closed} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn cfi_bounded_by_qfi() {
        let plans = [
            ProbePlan::coherent_real(1.0, -1.0).unwrap(),
            ProbePlan::coherent_real(2.0, 0.0).unwrap(),
            ProbePlan::coherent_real(1.2, 0.4).unwrap(),
            ProbePlan::coherent_real(2.0, 0.0)
                .unwrap()
                .with_gate(GateKind::ControlledBeamSplitter),
        ];
        for plan in plans {
            let fq = qfi(&plan).unwrap();
            for phi in linspace(-PI, PI, 201) {
                assert!(cfi(&plan, FlipProbs::NONE, phi).unwrap() <= fq + 1e-8);
            }
        }
    }

    #[test]
    fn moment_qfi_matches_closed_forms() {
        for &a in &[0.3, 1.0, 2.0] {
            let z = C64::new(0.0, 0.0);
            let r = C64::new(a, 0.0);
            let pair = two_component_qfi((r, -r), (-r, r), -1.0).unwrap();
            let vac = two_component_qfi((r, z), (z, r), -1.0).unwrap();
            assert_relative_eq!(pair, closed::qfi_cat_pair(a), max_relative = 1e-10);
            assert_relative_eq!(vac, closed::qfi_alpha_vacuum(a), max_relative = 1e-10);
            let cbs = two_component_qfi((r, z), (z, -r), -1.0).unwrap();
            assert_relative_eq!(cbs, vac, max_relative = 1e-12);
        }
    }

    #[test]
    fn small_amplitude_qfi_limit() {
        let a = 1e-4;
        assert_abs_diff_eq!(
            qfi(&ProbePlan::coherent_real(a, -a).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            qfi(&ProbePlan::coherent_real(a, 0.0).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-7
        );
        assert!(qfi(&ProbePlan::coherent_real(0.5, 0.5).unwrap()).is_err());
    }

    #[test]
    fn edge_partition_beats_balanced() {
        let edge = qfi(&ProbePlan::coherent_real(5f64.sqrt(), 0.0).unwrap()).unwrap();
        let bal = qfi(&ProbePlan::coherent_real(2.5f64.sqrt(), -(2.5f64.sqrt())).unwrap()).unwrap();
        assert!(edge > bal);
    }

    #[test]
    fn generic_limit_branch() {
        // Coherent(α₁, α₂) with real amplitudes reaches Δ = −1 at φ = 0.
        let p = ProbePlan::coherent_real(1.1, -0.6).unwrap();
        let at0 = cfi(&p, FlipProbs::NONE, 0.0).unwrap();
        let near = cfi(&p, FlipProbs::NONE, 1e-3).unwrap();
        assert_relative_eq!(at0, near, max_relative = 1e-5);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = maximize_over_phase(|t| -(t - 0.123).powi(2) + 2.0, -1.0, 1.0, 11);
        assert_abs_diff_eq!(x, 0.123, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }
}

//! Named closed forms, written to stay finite for large photon numbers.
//!
//! Throughout, `x = α²`, `c = cos φ`, `s = sin φ`.

/// `1 − e^y cos z` for `y ≤ 0` without cancellation near `y = z = 0`.
pub(crate) fn one_minus_exp_cos(y: f64, z: f64) -> f64 {
    let h = (0.5 * z).sin();
    -y.exp_m1() + 2.0 * y.exp() * h * h
}

/// `cos φ − 1` without cancellation near `φ = 0`.
fn cos_m1(phi: f64) -> f64 {
    let h = (0.5 * phi).sin();
    -2.0 * h * h
}

/// `sinh(a)/sinh(b)` for `|a| ≤ b`, safe for large arguments.
fn sinh_ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    if b < 20.0 {
        return a.sinh() / b.sinh();
    }
    let sgn = a.signum();
    let aa = a.abs();
    sgn * (aa - b).exp() * (-(-2.0 * aa).exp_m1()) / (-(-2.0 * b).exp_m1())
}

/// `−cos φ`, the vanishing-amplitude limit of both coherent witnesses.
fn small_amplitude_limit(phi: f64) -> f64 {
    -phi.cos()
}

/// Overlap witness for `Coherent(α, −α)`: `−sinh(2α² cos φ) / sinh(2α²)`.
pub fn witness_cat_pair(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return small_amplitude_limit(phi);
    }
    -sinh_ratio(2.0 * x * phi.cos(), 2.0 * x)
}

/// Overlap witness for `Coherent(α, 0)`:
/// `(1 − e^{α² cos φ} cos(α² sin φ)) / (e^{α²} − 1)`.
pub fn witness_alpha_vacuum(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return small_amplitude_limit(phi);
    }
    let s = phi.sin();
    ((-x).exp() - (x * cos_m1(phi)).exp() * (x * s).cos()) / -(-x).exp_m1()
}

/// Change of the `Coherent(α, 0)` witness per unit first-test flip probability:
/// `−2(1 − e^{α²(1+cos φ)} cos(α² sin φ)) / (e^{2α²} − 1)`.
pub fn flip_correction_alpha_vacuum(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 2.0 * phi.cos();
    }
    let s = phi.sin();
    -2.0 * ((-2.0 * x).exp() - (x * cos_m1(phi)).exp() * (x * s).cos()) / -(-2.0 * x).exp_m1()
}

/// Phase derivatives of [`witness_alpha_vacuum`] and [`flip_correction_alpha_vacuum`].
pub(crate) fn alpha_vacuum_derivatives(alpha: f64, phi: f64) -> (f64, f64) {
    let x = alpha * alpha;
    if x == 0.0 {
        return (phi.sin(), -2.0 * phi.sin());
    }
    let s = phi.sin();
    let core = x * (x * cos_m1(phi)).exp() * (phi + x * s).sin();
    (core / -(-x).exp_m1(), -2.0 * core / -(-2.0 * x).exp_m1())
}

/// Witness of `Coherent(α, 0)` when the swap tests use the controlled beam
/// splitter without the conditional phase:
/// `−(1 − cosh(α² cos φ) cos(α² sin φ)) / (1 − e^{α²})`.
///
/// Defined as `0` at `α = 0`.
pub fn witness_cbs_alpha0(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 0.0;
    }
    let (ch, _) = scaled_cosh_cos(x, phi);
    ((-x).exp() - ch) / -(-x).exp_m1()
}

/// Phase derivative of [`witness_cbs_alpha0`].
pub(crate) fn cbs_alpha0_derivative(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 0.0;
    }
    let (_, dch) = scaled_cosh_cos(x, phi);
    -dch / -(-x).exp_m1()
}

/// `e^{−x} cosh(x c) cos(x s)` and its phase derivative.
fn scaled_cosh_cos(x: f64, phi: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    let ep = (x * cos_m1(phi)).exp();
    let em = (-x * (c + 1.0)).exp();
    let ch = 0.5 * (ep + em);
    let sh = 0.5 * (ep - em);
    let (sn, cs) = (x * s).sin_cos();
    let val = ch * cs;
    let der = -x * (s * sh * cs + c * ch * sn);
    (val, der)
}

/// Classical Fisher information of the beam-splitter variant for `Coherent(α, 0)`.
pub fn cfi_cbs_alpha0(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 0.0;
    }
    let (ch, dch) = scaled_cosh_cos(x, phi);
    let den = (1.0 - ch) * (1.0 - 2.0 * (-x).exp() + ch);
    if dch == 0.0 {
        return 0.0;
    }
    if den <= 0.0 {
        return f64::NAN;
    }
    dch * dch / den
}

/// Classical Fisher information for `Coherent(α, −α)` without flips.
///
/// Uses `F = 4x² sin²φ cosh²(2x cos φ) / (sinh(2x(1+cos φ)) sinh(2x(1−cos φ)))`
/// with exponentials factored out; the `φ → 0, π` limit is `2α² coth(2α²)`.
pub fn cfi_cat_pair(alpha: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 1.0;
    }
    let (s, c) = phi.sin_cos();
    let up = 4.0 * x * (0.5 * phi).cos().powi(2);
    let dn = 4.0 * x * (0.5 * phi).sin().powi(2);
    if s == 0.0 || up == 0.0 || dn == 0.0 {
        return cat_pair_cfi_limit(x);
    }
    let ac = (4.0 * x * c).abs();
    // cosh²(2xc) / (sinh(up) sinh(dn)), each factor scaled by its leading exponential
    let num = 0.25 * (1.0 + (-ac).exp()).powi(2);
    let den = 0.25 * (-(-2.0 * up).exp_m1()) * (-(-2.0 * dn).exp_m1());
    let expo = ac - up - dn;
    let ratio = (expo + num.ln() - den.ln()).exp();
    4.0 * x * x * s * s * ratio
}

fn cat_pair_cfi_limit(x: f64) -> f64 {
    let y = 2.0 * x;
    if y < 1e-4 {
        return 1.0 + y * y / 3.0;
    }
    y / y.tanh()
}

/// Classical Fisher information for `Coherent(α, 0)` with flip probabilities.
pub fn cfi_alpha_vacuum(alpha: f64, p1: f64, p2: f64, phi: f64) -> f64 {
    let x = alpha * alpha;
    let v2 = 1.0 - 2.0 * p2;
    let (d0p, d1p) = alpha_vacuum_derivatives(alpha, phi);
    let dp = v2 * (d0p + p1 * d1p);
    if p1 == 0.0 && x > 0.0 {
        // 1 + Δ₀ is a product of small factors near φ = 0; keep it exact.
        let s = phi.sin();
        let m = -(-x).exp_m1();
        let one_plus_d0 = one_minus_exp_cos(x * cos_m1(phi), x * s) / m;
        let d0 = witness_alpha_vacuum(alpha, phi);
        let one_minus = 1.0 - v2 * d0;
        let one_plus = if p2 == 0.0 {
            one_plus_d0
        } else {
            1.0 - v2 + v2 * one_plus_d0
        };
        if one_plus == 0.0 {
            if p2 == 0.0 {
                return x * (1.0 + x) / m;
            }
            return 0.0;
        }
        return dp * dp / (one_minus * one_plus);
    }
    let d = v2 * (witness_alpha_vacuum(alpha, phi) + p1 * flip_correction_alpha_vacuum(alpha, phi));
    let den = (1.0 - d) * (1.0 + d);
    if dp == 0.0 {
        return 0.0;
    }
    dp * dp / den
}

/// `F_C` for `Coherent(α, 0)` at `φ = 0` without flips: `e^{α²}(α² + α⁴) / (e^{α²} − 1)`.
pub fn cfi_alpha_vacuum_at_zero(alpha: f64) -> f64 {
    let x = alpha * alpha;
    if x == 0.0 {
        return 1.0;
    }
    x * (1.0 + x) / -(-x).exp_m1()
}

/// `F_Q` for `Coherent(α, −α)`: `2α² csch²(2α²) [sinh(4α²) − 2α²]`.
pub fn qfi_cat_pair(alpha: f64) -> f64 {
    let y = 2.0 * alpha * alpha;
    if y < 1e-2 {
        let y2 = y * y;
        return 1.0 + y2 - y2 * y2 / 9.0;
    }
    // 2y coth(y) − y² csch²(y)
    let e = (-2.0 * y).exp();
    let csch2 = 4.0 * e / (1.0 - e).powi(2);
    2.0 * y / y.tanh() - y * y * csch2
}

/// `F_Q` for `Coherent(α, 0)`:
/// `α² e^{α²} [e^{α²}(2+α²) − 2(1+α²)] / (1 − e^{α²})²`.
pub fn qfi_alpha_vacuum(alpha: f64) -> f64 {
    let x = alpha * alpha;
    if x < 1e-5 {
        return 1.0 + 2.0 * x + 0.75 * x * x;
    }
    let m = (-x).exp_m1();
    x * (-x - 2.0 * m * (1.0 + x)) / (m * m)
}

/// `F_Q` for real amplitudes `(α₁, α₂)` on the antisymmetric branch.
pub fn qfi_real_pair(a1: f64, a2: f64) -> Option<f64> {
    let d2 = (a1 - a2).powi(2);
    if d2 == 0.0 {
        return None;
    }
    let q = (-d2).exp();
    let omq = -(-d2).exp_m1();
    let first = 2.0 * (a1 * a1 + a1.powi(4) + a2 * a2 + a2.powi(4) - 2.0 * q * a1 * a2 * (1.0 + a1 * a2)) / omq;
    let second = (a1 * a1 + a2 * a2 - 2.0 * q * a1 * a2).powi(2) / (omq * omq);
    Some(first - second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn naive_cat_pair(alpha: f64, phi: f64) -> f64 {
        let x = alpha * alpha;
        -(2.0 * x * phi.cos()).sinh() / (2.0 * x).sinh()
    }

    fn naive_alpha_vacuum(alpha: f64, phi: f64) -> f64 {
        let x = alpha * alpha;
        -(1.0 - (x * phi.cos()).exp() * (x * phi.sin()).cos()) / (1.0 - x.exp())
    }

    #[test]
    fn stable_witnesses_match_direct_evaluation() {
        for &a in &[0.3, 1.0, 2.2, 4.0] {
            for k in 0..=20 {
                let phi = -PI + 2.0 * PI * k as f64 / 20.0;
                assert_abs_diff_eq!(witness_cat_pair(a, phi), naive_cat_pair(a, phi), epsilon = 1e-12);
                assert_abs_diff_eq!(
                    witness_alpha_vacuum(a, phi),
                    naive_alpha_vacuum(a, phi),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn large_amplitude_stays_finite() {
        let a = 30.0;
        for phi in [0.0, 1e-3, 0.5, PI] {
            assert!(witness_cat_pair(a, phi).is_finite());
            assert!(witness_alpha_vacuum(a, phi).is_finite());
            assert!(witness_cbs_alpha0(a, phi).is_finite());
            assert!(cfi_cat_pair(a, phi).is_finite());
            assert!(cfi_alpha_vacuum(a, 0.0, 0.0, phi).is_finite());
        }
        assert_abs_diff_eq!(witness_cat_pair(a, 0.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn small_amplitude_limits() {
        for phi in [0.0, 0.4, 2.0] {
            assert_abs_diff_eq!(witness_cat_pair(1e-5, phi), -phi.cos(), epsilon = 1e-8);
            assert_abs_diff_eq!(witness_alpha_vacuum(1e-4, phi), -phi.cos(), epsilon = 1e-6);
            assert_abs_diff_eq!(witness_cbs_alpha0(0.0, phi), 0.0);
        }
        assert_abs_diff_eq!(qfi_cat_pair(1e-4), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(qfi_alpha_vacuum(1e-4), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(qfi_alpha_vacuum(0.0), 1.0);
    }

    #[test]
    fn qfi_series_branch_is_continuous() {
        let x: f64 = 1e-5;
        let a = x.sqrt();
        let m = (-x).exp_m1();
        let direct = x * (-x - 2.0 * m * (1.0 + x)) / (m * m);
        assert_relative_eq!(qfi_alpha_vacuum(a * 1.0000001), direct, max_relative = 1e-9);
    }

    #[test]
    fn general_qfi_reduces_to_special_cases() {
        for &a in &[0.4, 1.0, 1.7, 2.5] {
            assert_relative_eq!(qfi_real_pair(a, -a).unwrap(), qfi_cat_pair(a), max_relative = 1e-10);
            assert_relative_eq!(
                qfi_real_pair(a, 0.0).unwrap(),
                qfi_alpha_vacuum(a),
                max_relative = 1e-10
            );
        }
        assert!(qfi_real_pair(1.0, 1.0).is_none());
    }

    #[test]
    fn cat_pair_qfi_matches_hyperbolic_form() {
        for &a in &[0.5f64, 1.0, 2.0] {
            let x = a * a;
            let direct = 2.0 * x / (2.0 * x).sinh().powi(2) * ((4.0 * x).sinh() - 2.0 * x);
            assert_relative_eq!(qfi_cat_pair(a), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn alpha_vacuum_qfi_matches_exponential_form() {
        for &a in &[0.5f64, 1.0, 2.0] {
            let x = a * a;
            let e = x.exp();
            let direct = x * e * (e * (2.0 + x) - 2.0 * (1.0 + x)) / (1.0 - e).powi(2);
            assert_relative_eq!(qfi_alpha_vacuum(a), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn cfi_zero_phase_limits() {
        assert_relative_eq!(cfi_cat_pair(1.0, 0.0), 2.0 / 2f64.tanh(), max_relative = 1e-14);
        assert_relative_eq!(cfi_cat_pair(1.0, 1e-7), 2.0 / 2f64.tanh(), max_relative = 1e-9);
        assert_relative_eq!(cfi_cat_pair(1.0, PI), 2.0 / 2f64.tanh(), max_relative = 1e-14);
        let a: f64 = 1.3;
        let x = a * a;
        let expect = x.exp() * (x + x * x) / (x.exp() - 1.0);
        assert_relative_eq!(cfi_alpha_vacuum(a, 0.0, 0.0, 0.0), expect, max_relative = 1e-13);
        assert_relative_eq!(cfi_alpha_vacuum(a, 0.0, 0.0, 1e-7), expect, max_relative = 1e-8);
        assert_relative_eq!(cfi_alpha_vacuum_at_zero(a), expect, max_relative = 1e-14);
    }

    #[test]
    fn cbs_witness_bounds() {
        assert_abs_diff_eq!(witness_cbs_alpha0(5.0, 0.0), -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(cfi_cbs_alpha0(2.0, 0.0), 0.0);
        // matches the direct formula
        let (a, phi): (f64, f64) = (1.5, 0.7);
        let x = a * a;
        let direct = -(1.0 - (x * phi.cos()).cosh() * (x * phi.sin()).cos()) / (1.0 - x.exp());
        assert_abs_diff_eq!(witness_cbs_alpha0(a, phi), direct, epsilon = 1e-13);
        let num = (x * phi.cos()).cosh() * (x * phi.sin()).sin() * phi.cos()
            + (x * phi.cos()).sinh() * (x * phi.sin()).cos() * phi.sin();
        let c = (x * phi.cos()).cosh() * (x * phi.sin()).cos();
        let direct_f = x * x * num * num / ((x.exp() - c) * (-2.0 + x.exp() + c));
        assert_relative_eq!(cfi_cbs_alpha0(a, phi), direct_f, max_relative = 1e-12);
    }

    #[test]
    fn helper_is_accurate_near_zero() {
        let (y, z) = (-1e-9, 2e-5);
        let exact = 1e-9 - 0.5e-18 + 0.5 * 4e-10;
        assert_relative_eq!(one_minus_exp_cos(y, z), exact, max_relative = 1e-6);
    }
}

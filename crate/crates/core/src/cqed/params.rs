use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::analytics::ProbePlan;
use crate::error::{Error, Result};
use crate::lindblad::DEFAULT_RTOL;

const TWO_PI: f64 = 2.0 * PI;

/// Kerr-cat circuit parameters. Rates are angular frequencies (rad/s), times
/// are seconds.
///
/// Complex couplings use the phases `ζ₁ = −i·zeta1` and `ζ₂ = −i·zeta2`:
/// with `c → β` the CPBS then rotates the fields as `exp(ζ₁β t (a†b − ab†))`
/// and the BS segment applies the inverse rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqedParams {
    pub kerr: f64,
    pub epsilon: f64,
    pub chi: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub kappa: f64,
    pub n_thermal: f64,
    pub kappa2: f64,
    /// CPBS gate time.
    pub tau: f64,
    /// `N` in the cross-Kerr term; `None` uses the plan's input photon number.
    pub n_offset: Option<f64>,
    /// `|α|²` in the cross-Kerr term; `None` uses `β²`.
    pub alpha_sq: Option<f64>,
    /// Ancilla truncation; `None` uses [`CqedParams::default_cat_dim`].
    pub cat_dim: Option<usize>,
    /// Ancilla relaxation window before each CPBS segment.
    pub stabilization: f64,
    /// Include single-photon loss and heating during the relaxation window;
    /// otherwise only the confining terms (`H₀` cat part and `κ₂D[c²]`) act.
    pub stabilization_losses: bool,
    /// BS segment length; `None` gives a balanced splitter, `π/(4·zeta2)`.
    pub bs_duration: Option<f64>,
    pub rtol: f64,
}

impl CqedParams {
    pub fn table_one() -> Self {
        CqedParams {
            kerr: TWO_PI * 6.7e6,
            epsilon: TWO_PI * 20.1e6,
            chi: TWO_PI * 603e3,
            zeta1: TWO_PI * 120e3,
            zeta2: TWO_PI * 210e3,
            kappa: TWO_PI * 1.35e3,
            n_thermal: 0.06,
            kappa2: TWO_PI * 135e3,
            tau: 600e-9,
            n_offset: None,
            alpha_sq: None,
            cat_dim: None,
            stabilization: 100e-9,
            stabilization_losses: false,
            bs_duration: None,
            rtol: DEFAULT_RTOL,
        }
    }

    /// Losses and thermal occupation switched off.
    pub fn lossless(mut self) -> Self {
        self.kappa = 0.0;
        self.kappa2 = 0.0;
        self.n_thermal = 0.0;
        self
    }

    /// `β = √(ε/K)`.
    pub fn beta(&self) -> f64 {
        (self.epsilon / self.kerr).sqrt()
    }

    pub fn beta_sq(&self) -> f64 {
        self.epsilon / self.kerr
    }

    /// `⌈β² + 7β + 8⌉`.
    pub fn default_cat_dim(&self) -> usize {
        let b = self.beta();
        (b * b + 7.0 * b + 8.0).ceil() as usize
    }

    pub fn cat_dim(&self) -> usize {
        self.cat_dim.unwrap_or_else(|| self.default_cat_dim())
    }

    /// Phase-flip probability per swap test, `κβ²τ`.
    pub fn flip_probability(&self) -> f64 {
        self.kappa * self.beta_sq() * self.tau
    }

    pub fn bs_duration(&self) -> f64 {
        self.bs_duration.unwrap_or(FRAC_PI_4 / self.zeta2)
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq.unwrap_or_else(|| self.beta_sq())
    }

    /// Fills `n_offset` from the plan when unset.
    pub fn resolved_for(mut self, plan: &ProbePlan) -> Self {
        if self.n_offset.is_none() {
            self.n_offset = Some(plan.mean_photons());
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("kerr", self.kerr),
            ("epsilon", self.epsilon),
            ("chi", self.chi),
            ("zeta1", self.zeta1),
            ("zeta2", self.zeta2),
            ("kappa", self.kappa),
            ("n_thermal", self.n_thermal),
            ("kappa2", self.kappa2),
            ("tau", self.tau),
            ("stabilization", self.stabilization),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(self.kerr > 0.0) {
            return Err(Error::InvalidParameter("kerr must be positive".into()));
        }
        if !(self.zeta2 > 0.0) && self.bs_duration.is_none() {
            return Err(Error::InvalidParameter(
                "zeta2 must be positive for a balanced BS".into(),
            ));
        }
        if let Some(t) = self.bs_duration {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "bs_duration must be non-negative, got {t}"
                )));
            }
        }
        if !(self.rtol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rtol must be positive, got {}",
                self.rtol
            )));
        }
        if self.cat_dim() < 4 {
            return Err(Error::InvalidParameter(format!(
                "cat_dim {} is too small",
                self.cat_dim()
            )));
        }
        Ok(())
    }
}

impl Default for CqedParams {
    fn default() -> Self {
        Self::table_one()
    }
}

/// Configuration form of [`CqedParams`] with frequencies in Hz (divided by 2π)
/// and times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CqedParamsHz {
    pub kerr_hz: f64,
    pub epsilon_hz: f64,
    pub chi_hz: f64,
    pub zeta1_hz: f64,
    pub zeta2_hz: f64,
    pub kappa_hz: f64,
    pub n_thermal: f64,
    pub kappa2_hz: f64,
    pub tau: f64,
    pub n_offset: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub cat_dim: Option<usize>,
    pub stabilization: f64,
    pub stabilization_losses: bool,
    pub bs_duration: Option<f64>,
    pub rtol: f64,
}

impl Default for CqedParamsHz {
    fn default() -> Self {
        CqedParamsHz::from(&CqedParams::table_one())
    }
}

impl From<&CqedParams> for CqedParamsHz {
    fn from(p: &CqedParams) -> Self {
        CqedParamsHz {
            kerr_hz: p.kerr / TWO_PI,
            epsilon_hz: p.epsilon / TWO_PI,
            chi_hz: p.chi / TWO_PI,
            zeta1_hz: p.zeta1 / TWO_PI,
            zeta2_hz: p.zeta2 / TWO_PI,
            kappa_hz: p.kappa / TWO_PI,
            n_thermal: p.n_thermal,
            kappa2_hz: p.kappa2 / TWO_PI,
            tau: p.tau,
            n_offset: p.n_offset,
            alpha_sq: p.alpha_sq,
            cat_dim: p.cat_dim,
            stabilization: p.stabilization,
            stabilization_losses: p.stabilization_losses,
            bs_duration: p.bs_duration,
            rtol: p.rtol,
        }
    }
}

impl From<&CqedParamsHz> for CqedParams {
    fn from(p: &CqedParamsHz) -> Self {
        CqedParams {
            kerr: p.kerr_hz * TWO_PI,
            epsilon: p.epsilon_hz * TWO_PI,
            chi: p.chi_hz * TWO_PI,
            zeta1: p.zeta1_hz * TWO_PI,
            zeta2: p.zeta2_hz * TWO_PI,
            kappa: p.kappa_hz * TWO_PI,
            n_thermal: p.n_thermal,
            kappa2: p.kappa2_hz * TWO_PI,
            tau: p.tau,
            n_offset: p.n_offset,
            alpha_sq: p.alpha_sq,
            cat_dim: p.cat_dim,
            stabilization: p.stabilization,
            stabilization_losses: p.stabilization_losses,
            bs_duration: p.bs_duration,
            rtol: p.rtol,
        }
    }
}

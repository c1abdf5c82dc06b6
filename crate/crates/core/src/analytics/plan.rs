use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Input states of the two field modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProbeKind {
    /// `|ψ⟩ = |n⟩`, `|φ⟩ = |m⟩`; the antisymmetric branch prepares a NOON-like state.
    Noon { n: usize, m: usize },
    /// `|ψ⟩ = |α₁⟩`, `|φ⟩ = |α₂⟩`.
    Coherent { alpha1: C64, alpha2: C64 },
}

/// Which controlled gate realizes the swap tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    #[default]
    ControlledSwap,
    /// Balanced controlled-phase beam splitter combined with a deterministic
    /// beam splitter, without the compensating conditional phase.
    ControlledBeamSplitter,
}

/// Postselected outcome of the first swap test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Antisymmetric,
    Symmetric,
}

impl Branch {
    /// `-1` for the antisymmetric branch, `+1` for the symmetric one.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Antisymmetric => -1.0,
            Branch::Symmetric => 1.0,
        }
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::Antisymmetric => Branch::Symmetric,
            Branch::Symmetric => Branch::Antisymmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePlan {
    pub kind: ProbeKind,
    #[serde(default)]
    pub gate: GateKind,
    #[serde(default)]
    pub branch: Branch,
}

impl ProbePlan {
    pub fn noon(n: usize, m: usize) -> Result<Self> {
        ProbePlan {
            kind: ProbeKind::Noon { n, m },
            gate: GateKind::ControlledSwap,
            branch: Branch::Antisymmetric,
        }
        .validated()
    }

    pub fn coherent(alpha1: C64, alpha2: C64) -> Result<Self> {
        ProbePlan {
            kind: ProbeKind::Coherent { alpha1, alpha2 },
            gate: GateKind::ControlledSwap,
            branch: Branch::Antisymmetric,
        }
        .validated()
    }

    /// Real-amplitude shorthand for [`coherent`](Self::coherent).
    pub fn coherent_real(alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::coherent(C64::new(alpha1, 0.0), C64::new(alpha2, 0.0))
    }

    pub fn with_gate(mut self, gate: GateKind) -> Self {
        self.gate = gate;
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ProbeKind::Noon { n, m } if n == m => Err(Error::DegenerateInput(format!(
                "NOON plan needs n != m (got n = m = {n})"
            ))),
            ProbeKind::Coherent { alpha1, alpha2 }
                if !(alpha1.re.is_finite()
                    && alpha1.im.is_finite()
                    && alpha2.re.is_finite()
                    && alpha2.im.is_finite()) =>
            {
                Err(Error::InvalidParameter("coherent amplitudes must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Mean photon number of the product input `|ψ⟩|φ⟩`.
    pub fn mean_photons(&self) -> f64 {
        match self.kind {
            ProbeKind::Noon { n, m } => (n + m) as f64,
            ProbeKind::Coherent { alpha1, alpha2 } => alpha1.norm_sqr() + alpha2.norm_sqr(),
        }
    }

    /// `Some(α)` when the plan is `Coherent(α, 0)` with real `α`.
    pub(crate) fn as_alpha_vacuum(&self) -> Option<f64> {
        match self.kind {
            ProbeKind::Coherent { alpha1, alpha2 } if alpha2 == C64::new(0.0, 0.0) && alpha1.im == 0.0 => {
                Some(alpha1.re)
            }
            _ => None,
        }
    }

    /// `Some(α)` when the plan is `Coherent(α, −α)` with real `α`.
    pub(crate) fn as_cat_pair(&self) -> Option<f64> {
        match self.kind {
            ProbeKind::Coherent { alpha1, alpha2 }
                if alpha1.im == 0.0 && alpha2.im == 0.0 && alpha2.re == -alpha1.re =>
            {
                Some(alpha1.re)
            }
            _ => None,
        }
    }
}

/// Phase-flip probabilities of the ancilla during the first and second swap test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct FlipProbs {
    pub p1: f64,
    pub p2: f64,
}

impl FlipProbs {
    pub const NONE: FlipProbs = FlipProbs { p1: 0.0, p2: 0.0 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let f = FlipProbs { p1, p2 };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "flip probability {name} = {p} must lie in [0, 1/2)"
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    /// `(1−2p₁)(1−2p₂)`, the contrast factor for NOON fringes.
    pub fn contrast(&self) -> f64 {
        (1.0 - 2.0 * self.p1) * (1.0 - 2.0 * self.p2)
    }
}

/// Scalar products of the input states and their phase-shifted copies.
///
/// `s = ⟨ψ|φ⟩`, `s(φ) = ⟨φ|ψ(φ)⟩` and `s_χ(φ) = ⟨χ|χ(φ)⟩` with
/// `|χ(φ)⟩ = e^{−iφ a†a}|χ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSet {
    kind: ProbeKind,
}

impl OverlapSet {
    pub fn new(plan: &ProbePlan) -> Result<Self> {
        plan.validate()?;
        Ok(OverlapSet { kind: plan.kind })
    }

    pub fn s(&self) -> C64 {
        match self.kind {
            ProbeKind::Noon { .. } => C64::new(0.0, 0.0),
            ProbeKind::Coherent { alpha1, alpha2 } => coherent_overlap(alpha1, alpha2),
        }
    }

    /// `|s|²`.
    pub fn s_sq(&self) -> f64 {
        match self.kind {
            ProbeKind::Noon { .. } => 0.0,
            ProbeKind::Coherent { alpha1, alpha2 } => (-(alpha1 - alpha2).norm_sqr()).exp(),
        }
    }

    /// `1 − |s|²` without cancellation for nearly orthogonal or nearly equal inputs.
    pub fn one_minus_s_sq(&self) -> f64 {
        match self.kind {
            ProbeKind::Noon { .. } => 1.0,
            ProbeKind::Coherent { alpha1, alpha2 } => -(-(alpha1 - alpha2).norm_sqr()).exp_m1(),
        }
    }

    pub fn s_phi(&self, phi: f64) -> C64 {
        match self.kind {
            ProbeKind::Noon { .. } => C64::new(0.0, 0.0),
            ProbeKind::Coherent { alpha1, alpha2 } => coherent_overlap(alpha2, alpha1 * C64::from_polar(1.0, -phi)),
        }
    }

    pub fn s_psi_self(&self, phi: f64) -> C64 {
        match self.kind {
            ProbeKind::Noon { n, .. } => C64::from_polar(1.0, -(n as f64) * phi),
            ProbeKind::Coherent { alpha1, .. } => self_overlap(alpha1, phi),
        }
    }

    pub fn s_phi_self(&self, phi: f64) -> C64 {
        match self.kind {
            ProbeKind::Noon { m, .. } => C64::from_polar(1.0, -(m as f64) * phi),
            ProbeKind::Coherent { alpha2, .. } => self_overlap(alpha2, phi),
        }
    }

    /// `X(φ) = |s(φ)|² + |s(−φ)|²` and its phase derivative.
    pub(crate) fn x_term(&self, phi: f64) -> (f64, f64) {
        match self.kind {
            ProbeKind::Noon { .. } => (0.0, 0.0),
            ProbeKind::Coherent { alpha1, alpha2 } => {
                let part = |ph: f64| {
                    let rot = alpha2.conj() * alpha1 * C64::from_polar(1.0, -ph);
                    let g = (alpha1 * C64::from_polar(1.0, -ph) - alpha2).norm_sqr();
                    let e = (-g).exp();
                    // d/dφ of exp(−|α₁e^{−iφ} − α₂|²)
                    (e, 2.0 * rot.im * e)
                };
                let (a, da) = part(phi);
                let (b, db) = part(-phi);
                (a + b, da - db)
            }
        }
    }

    /// `Y(φ) = 2 Re[s_ψ(φ) s_φ(−φ)]` and its phase derivative.
    pub(crate) fn y_term(&self, phi: f64) -> (f64, f64) {
        match self.kind {
            ProbeKind::Noon { n, m } => {
                let k = n as f64 - m as f64;
                (2.0 * (k * phi).cos(), -2.0 * k * (k * phi).sin())
            }
            ProbeKind::Coherent { alpha1, alpha2 } => {
                let (x1, x2) = (alpha1.norm_sqr(), alpha2.norm_sqr());
                let em = C64::from_polar(1.0, -phi);
                let ep = C64::from_polar(1.0, phi);
                let e = (x1 * (em - 1.0) + x2 * (ep - 1.0)).exp();
                let de = e * (C64::new(0.0, -x1) * em + C64::new(0.0, x2) * ep);
                (2.0 * e.re, 2.0 * de.re)
            }
        }
    }
}

/// `⟨a|b⟩` for coherent states.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

fn self_overlap(alpha: C64, phi: f64) -> C64 {
    (alpha.norm_sqr() * (C64::from_polar(1.0, -phi) - 1.0)).exp()
}

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::{FlipProbs, ProbePlan};
use crate::cqed::{CqedParams, CqedParamsHz};
use crate::error::{Error, Result};
use crate::toymodel::ToyParams;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Gatesim,
    Toymodel,
    Cqed,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Fig2a,
        Experiment::Fig2b,
        Experiment::Fig3a,
        Experiment::Fig3b,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
        Experiment::Fig7,
        Experiment::Fig8,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig3a => "fig3a",
            Experiment::Fig3b => "fig3b",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::Fig7 => "fig7",
            Experiment::Fig8 => "fig8",
            Experiment::Custom => "custom",
        }
    }

    /// Supported engines; the first is the default.
    pub fn engines(self) -> &'static [Engine] {
        use Engine::*;
        match self {
            Experiment::Fig2a | Experiment::Fig2b => &[Analytic, Gatesim],
            Experiment::Fig3a | Experiment::Fig3b | Experiment::Fig4 | Experiment::Fig5 | Experiment::Fig8 => {
                &[Analytic]
            }
            Experiment::Fig6 => &[Cqed, Toymodel],
            Experiment::Fig7 => &[Gatesim],
            Experiment::Custom => &[Analytic, Gatesim, Toymodel, Cqed],
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig2a => "witness for Coherent(α, −α): phi,p_plus,p_minus,delta",
            Experiment::Fig2b => "witness for Coherent(α, 0): phi,p_plus,p_minus,delta",
            Experiment::Fig3a => "QFI vs total photon number: n,qfi_noon,qfi_cat_pair,qfi_alpha_vacuum",
            Experiment::Fig3b => "QFI vs photon partition at fixed total: n1,qfi",
            Experiment::Fig4 => "CFI and QFI vs phase (α, −α) and (α, 0); extra table 'limit': φ→0 CFI vs n",
            Experiment::Fig5 => {
                "(α, 0) witness and CFI with phase flips; extra tables 'noon' (n = 4, 5, 6 CFI) and 'max'"
            }
            Experiment::Fig6 => "open-system NOON fringe with ideal and phase-flip references; fit in metadata",
            Experiment::Fig7 => "controlled swap vs beam-splitter circuit with and without the conditional phase",
            Experiment::Fig8 => "beam-splitter vs swap witness and CFI for (α, 0); extra table 'max'",
            Experiment::Custom => "any plan and engine: phi,p_plus,p_minus,delta plus fisher_c or leakage",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Gatesim => "gatesim",
            Engine::Toymodel => "toymodel",
            Engine::Cqed => "cqed",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "gatesim" => Ok(Engine::Gatesim),
            "toymodel" => Ok(Engine::Toymodel),
            "cqed" => Ok(Engine::Cqed),
            other => Err(Error::Config(format!(
                "unknown engine '{other}' (expected analytic, gatesim, toymodel or cqed)"
            ))),
        }
    }
}

/// Evenly spaced grid, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Grid { start, stop, count }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Config(format!(
                "{name}.count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("{name} bounds must be finite")));
        }
        if !(self.stop > self.start) {
            return Err(Error::Config(format!(
                "{name}.stop ({}) must exceed {name}.start ({})",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        crate::analytics::linspace(self.start, self.stop, self.count)
    }
}

/// Two-level ancilla rates in Hz (divided by 2π); `tau` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyParamsHz {
    pub zeta1_beta_hz: f64,
    pub zeta2_hz: f64,
    pub gamma_z_hz: f64,
    pub gamma_x_hz: f64,
    /// `None` gives a balanced CPBS, `π/(4·ζ₁β)`.
    pub tau: Option<f64>,
}

impl Default for ToyParamsHz {
    fn default() -> Self {
        let p = ToyParams::table_one();
        ToyParamsHz {
            zeta1_beta_hz: p.zeta1_beta / TWO_PI,
            zeta2_hz: p.zeta2 / TWO_PI,
            gamma_z_hz: p.gamma_z / TWO_PI,
            gamma_x_hz: p.gamma_x / TWO_PI,
            tau: None,
        }
    }
}

impl From<&ToyParamsHz> for ToyParams {
    fn from(p: &ToyParamsHz) -> Self {
        let zeta1_beta = p.zeta1_beta_hz * TWO_PI;
        ToyParams {
            zeta1_beta,
            zeta2: p.zeta2_hz * TWO_PI,
            gamma_z: p.gamma_z_hz * TWO_PI,
            gamma_x: p.gamma_x_hz * TWO_PI,
            tau: p.tau.unwrap_or(FRAC_PI_4 / zeta1_beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance of the master-equation integrator.
    pub rtol: Option<f64>,
}

/// Batch-run description, read from TOML. Rates are in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    /// Amplitude of the coherent-state family plotted by fig2a, fig2b, fig4, fig5 and fig8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Fixed total photon number for fig3b.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_photons: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<ProbePlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flips: Option<FlipProbs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_grid: Option<Grid>,
    /// Photon-number axis of fig3a, fig3b, fig4, fig5 and fig8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cqed: Option<CqedParamsHz>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyParamsHz>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
    #[serde(default)]
    pub tolerance: Tolerances,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            engine: None,
            alpha: None,
            total_photons: None,
            plan: None,
            flips: None,
            phi_grid: None,
            n_grid: None,
            cqed: None,
            toy: None,
            output_path: None,
            svg: false,
            tolerance: Tolerances::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Copy with every experiment default filled in, validated.
    pub fn resolved(&self) -> Result<Self> {
        let mut c = self.clone();
        let e = c.experiment;
        let engine = c.engine.unwrap_or(e.engines()[0]);
        if !e.engines().contains(&engine) {
            let ok: Vec<&str> = e.engines().iter().map(|x| x.name()).collect();
            return Err(Error::Config(format!(
                "experiment {e} cannot run on the {engine} engine (supported: {})",
                ok.join(", ")
            )));
        }
        c.engine = Some(engine);

        let uses_alpha = matches!(
            e,
            Experiment::Fig2a | Experiment::Fig2b | Experiment::Fig4 | Experiment::Fig5 | Experiment::Fig8
        );
        if c.alpha.is_some() && !uses_alpha {
            return Err(Error::Config(format!("experiment {e} does not take 'alpha'")));
        }
        if uses_alpha {
            let a = *c.alpha.get_or_insert(5.0);
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        if e == Experiment::Fig3b {
            let n = *c.total_photons.get_or_insert(5.0);
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::Config(format!("total_photons must be positive, got {n}")));
            }
        } else if c.total_photons.is_some() {
            return Err(Error::Config(format!("experiment {e} does not take 'total_photons'")));
        }

        match e {
            Experiment::Fig2a | Experiment::Fig2b | Experiment::Fig6 | Experiment::Fig7 | Experiment::Custom => {
                if c.plan.is_none() {
                    c.plan = c.figure_plan()?;
                }
                match &c.plan {
                    Some(p) => p.validate().map_err(|err| Error::Config(format!("plan: {err}")))?,
                    None => return Err(Error::Config("custom experiments need a [plan] section".into())),
                }
            }
            _ => {
                if c.plan.is_some() {
                    return Err(Error::Config(format!(
                        "experiment {e} fixes its input states; use 'alpha' or a custom experiment"
                    )));
                }
            }
        }

        let default_flips = match e {
            Experiment::Fig5 => FlipProbs { p1: 0.05, p2: 0.05 },
            _ => FlipProbs::NONE,
        };
        let flips = *c.flips.get_or_insert(default_flips);
        flips.validate().map_err(|err| Error::Config(format!("flips: {err}")))?;
        if !flips.is_zero() && !matches!(engine, Engine::Analytic | Engine::Gatesim) {
            return Err(Error::Config(format!(
                "the {engine} engine models its own noise; explicit flips need the analytic or gatesim engine"
            )));
        }

        let default_phi = match e {
            Experiment::Fig6 => Some(Grid::new(-PI, PI, 81)),
            Experiment::Fig3a | Experiment::Fig3b => None,
            _ => Some(Grid::new(-PI, PI, 401)),
        };
        if c.phi_grid.is_none() {
            c.phi_grid = default_phi;
        }
        if let Some(g) = &c.phi_grid {
            g.validate("phi_grid")?;
        }
        let default_n = match e {
            Experiment::Fig3a => Some(Grid::new(0.05, 10.0, 200)),
            Experiment::Fig3b => Some(Grid::new(0.0, c.total_photons.unwrap_or(5.0), 101)),
            Experiment::Fig4 => Some(Grid::new(0.05, 10.0, 200)),
            Experiment::Fig5 => Some(Grid::new(0.25, 10.0, 40)),
            Experiment::Fig8 => Some(Grid::new(1.0, 30.0, 59)),
            _ => None,
        };
        if c.n_grid.is_none() {
            c.n_grid = default_n;
        }
        if let Some(g) = &c.n_grid {
            g.validate("n_grid")?;
            if g.start < 0.0 {
                return Err(Error::Config("n_grid must be non-negative".into()));
            }
            if e == Experiment::Fig3b && g.stop > c.total_photons.unwrap_or(5.0) {
                return Err(Error::Config("fig3b n_grid must stay within [0, total_photons]".into()));
            }
        }

        match engine {
            Engine::Cqed => {
                c.cqed.get_or_insert_with(CqedParamsHz::default);
                self.cqed_params_of(&c)?;
            }
            Engine::Toymodel => {
                c.toy.get_or_insert_with(ToyParamsHz::default);
                self.toy_params_of(&c)?;
            }
            _ => {}
        }
        if let Some(r) = c.tolerance.rtol {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Config(format!("tolerance.rtol must lie in (0, 1), got {r}")));
            }
        }
        Ok(c)
    }

    /// Input plan of a figure: the configured one, else the figure's default.
    pub fn figure_plan(&self) -> Result<Option<ProbePlan>> {
        if self.plan.is_some() {
            return Ok(self.plan);
        }
        let alpha = self.alpha.unwrap_or(5.0);
        Ok(match self.experiment {
            Experiment::Fig2a => Some(ProbePlan::coherent_real(alpha, -alpha)?),
            Experiment::Fig2b | Experiment::Fig5 | Experiment::Fig8 => Some(ProbePlan::coherent_real(alpha, 0.0)?),
            Experiment::Fig6 => Some(ProbePlan::noon(2, 0)?),
            Experiment::Fig7 => Some(ProbePlan::noon(3, 0)?),
            _ => None,
        })
    }

    fn cqed_params_of(&self, c: &ExperimentConfig) -> Result<CqedParams> {
        let mut p = CqedParams::from(&c.cqed.unwrap_or_default());
        if let Some(r) = c.tolerance.rtol {
            p.rtol = r;
        }
        p.validate().map_err(|e| Error::Config(format!("cqed: {e}")))?;
        Ok(p)
    }

    fn toy_params_of(&self, c: &ExperimentConfig) -> Result<ToyParams> {
        let p = ToyParams::from(&c.toy.unwrap_or_default());
        p.validate().map_err(|e| Error::Config(format!("toy: {e}")))?;
        Ok(p)
    }

    /// Circuit parameters in angular units, with the tolerance override applied.
    pub fn cqed_params(&self) -> Result<CqedParams> {
        self.cqed_params_of(self)
    }

    pub fn toy_params(&self) -> Result<ToyParams> {
        self.toy_params_of(self)
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or(self.experiment.engines()[0])
    }

    /// File the primary table is written to.
    pub fn output_file(&self, out_dir: Option<&Path>) -> PathBuf {
        let name = self
            .output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment)));
        match out_dir {
            Some(d) if name.is_relative() => d.join(name),
            _ => name,
        }
    }
}

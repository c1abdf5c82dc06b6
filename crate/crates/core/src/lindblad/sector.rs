//! Two-swap-test protocol on an ancilla coupled to two field modes, resolved
//! by total field excitation `N = a†a + b†b`.
//!
//! Every Hamiltonian here conserves `N` and dissipation acts on the ancilla
//! only, so the ancilla statistics depend on the sector-diagonal blocks of
//! the field state alone. States are stored as those blocks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::integrate::{Integrator, StepStats};
use super::sparse::{Generator, Liouvillian};
use crate::analytics::{Branch, ProbeKind, ProbePlan};
use crate::error::{Error, Result};
use crate::fock::{
    coherent_product, default_coherent_dim, fock_state, PureState, SpaceLayout, DEFAULT_LEAKAGE_TOL, NULL_OUTCOME_FLOOR,
};
use crate::sweep::WitnessPoint;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Field basis states `|k, N−k⟩` inside a `[d, d]` truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub total: usize,
    pub ks: Vec<usize>,
}

impl Sector {
    pub fn new(dim: usize, total: usize) -> Self {
        let lo = total.saturating_sub(dim - 1);
        let hi = total.min(dim - 1);
        Sector {
            total,
            ks: (lo..=hi).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    /// `a†b` restricted to the sector.
    pub fn hop(&self) -> DMatrix<C64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (col, &k) in self.ks.iter().enumerate() {
            if col + 1 < n && k < self.total {
                m[(col + 1, col)] = C64::new(((k + 1) as f64 * (self.total - k) as f64).sqrt(), 0.0);
            }
        }
        m
    }

    /// `e^{−iφ a†a}` as a diagonal.
    pub fn phase(&self, phi: f64) -> DVector<C64> {
        DVector::from_iterator(
            self.len(),
            self.ks.iter().map(|&k| C64::from_polar(1.0, -phi * k as f64)),
        )
    }
}

/// Field state reduced to its sector-diagonal blocks.
#[derive(Debug, Clone)]
pub struct SectorState {
    pub dim: usize,
    pub blocks: Vec<(Sector, DMatrix<C64>)>,
}

/// Blocks whose weight falls below this are dropped from inputs.
pub const SECTOR_WEIGHT_FLOOR: f64 = 1e-14;

impl SectorState {
    /// From a pure state on a `[d, d]` field layout.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        let dims = state.layout().dims();
        if dims.len() != 2 || dims[0] != dims[1] {
            return Err(Error::Layout(format!(
                "expected a two-mode field layout with equal dimensions, got {dims:?}"
            )));
        }
        let d = dims[0];
        let amps = state.amplitudes();
        let mut blocks = Vec::new();
        for total in 0..=2 * (d - 1) {
            let s = Sector::new(d, total);
            let v = DVector::from_iterator(s.len(), s.ks.iter().map(|&k| amps[k * d + (total - k)]));
            if v.norm_squared() > SECTOR_WEIGHT_FLOOR {
                let rho = &v * v.adjoint();
                blocks.push((s, rho));
            }
        }
        Ok(SectorState { dim: d, blocks })
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|(_, b)| b.trace().re).sum()
    }

    pub fn scaled(mut self, f: f64) -> Self {
        for (_, b) in &mut self.blocks {
            *b *= C64::new(f, 0.0);
        }
        self
    }

    pub fn with_phase(&self, phi: f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(s, b)| {
                let p = s.phase(phi);
                let m = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| p[i] * b[(i, j)] * p[j].conj());
                (s.clone(), m)
            })
            .collect();
        SectorState { dim: self.dim, blocks }
    }

    /// Population of the block with total excitation `n`.
    pub fn sector_weight(&self, n: usize) -> f64 {
        self.blocks
            .iter()
            .filter(|(s, _)| s.total == n)
            .map(|(_, b)| b.trace().re)
            .sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, b)| b.clone().symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Ancilla description for the sector engine.
///
/// The CPBS segment Hamiltonian on sector `N` is
/// `h + f(N)·Q + a†b ⊗ A + ab† ⊗ A†`, with `f(N) = cross_coeff·(N − n_offset)`.
#[derive(Debug, Clone)]
pub struct AncillaModel {
    pub dim: usize,
    pub h: DMatrix<C64>,
    pub cross: Option<CrossTerm>,
    pub coupling: DMatrix<C64>,
    /// Jump operators including `√rate`.
    pub jumps: Vec<DMatrix<C64>>,
    /// Ancilla density at the start of each CPBS segment.
    pub initial: DMatrix<C64>,
    pub plus: DMatrix<C64>,
    pub minus: DMatrix<C64>,
}

#[derive(Debug, Clone)]
pub struct CrossTerm {
    pub coeff: f64,
    pub n_offset: f64,
    pub op: DMatrix<C64>,
}

impl AncillaModel {
    fn check(&self) -> Result<()> {
        let d = self.dim;
        for (name, m) in [
            ("h", &self.h),
            ("coupling", &self.coupling),
            ("initial", &self.initial),
            ("plus", &self.plus),
            ("minus", &self.minus),
        ] {
            if m.shape() != (d, d) {
                return Err(Error::Layout(format!(
                    "ancilla operator {name} has shape {:?}, expected {d}x{d}",
                    m.shape()
                )));
            }
        }
        if self.jumps.iter().any(|j| j.shape() != (d, d)) {
            return Err(Error::Layout("ancilla jump operator has wrong shape".into()));
        }
        Ok(())
    }

    /// CPBS-segment generator on one sector; ordering is field-major.
    pub fn cpbs_generator(&self, sector: &Sector) -> Result<Generator> {
        self.check()?;
        let f = sector.len();
        let id_f = DMatrix::<C64>::identity(f, f);
        let hop = sector.hop();
        let mut h =
            id_f.kronecker(&self.h) + hop.kronecker(&self.coupling) + hop.adjoint().kronecker(&self.coupling.adjoint());
        if let Some(ct) = &self.cross {
            let w = ct.coeff * (sector.total as f64 - ct.n_offset);
            if w != 0.0 {
                h += id_f.kronecker(&ct.op) * C64::new(w, 0.0);
            }
        }
        let jumps: Vec<_> = self.jumps.iter().map(|j| id_f.kronecker(j)).collect();
        Generator::new(&h, &jumps)
    }
}

/// `Tr_anc[(I ⊗ op) X]` for field-major `X`.
pub fn reduce_ancilla(op: &DMatrix<C64>, x: &DMatrix<C64>, field_len: usize) -> DMatrix<C64> {
    let a = op.nrows();
    DMatrix::from_fn(field_len, field_len, |f, g| {
        let mut s = zero();
        for i in 0..a {
            for j in 0..a {
                let o = op[(i, j)];
                if o != zero() {
                    s += o * x[(f * a + j, g * a + i)];
                }
            }
        }
        s
    })
}

/// Field-only deterministic beam-splitter segment `H = ζ a†b + ζ* ab†`.
#[derive(Debug, Clone, Copy)]
pub struct BsSegment {
    pub zeta: C64,
    pub duration: f64,
}

impl BsSegment {
    pub fn generator(&self, sector: &Sector) -> Result<Generator> {
        let hop = sector.hop();
        let h = &hop * self.zeta + hop.adjoint() * self.zeta.conj();
        Generator::new(&h, &[])
    }
}

/// Result of one swap test on a sector state.
#[derive(Debug, Clone)]
pub struct FirstTest {
    pub p_plus: f64,
    pub p_minus: f64,
    pub leakage: f64,
    /// Normalized field state after postselection and the BS segment.
    pub post: SectorState,
    pub stats: StepStats,
    /// Smallest eigenvalue seen in the joint ancilla–field blocks after the CPBS segment.
    pub min_eigenvalue: f64,
    /// Largest `|Tr ρ − 1|` after the CPBS segment.
    pub trace_error: f64,
}

/// Measurement effects of the second swap test pulled back through the CPBS
/// segment and reduced against the initial ancilla state, one pair per sector.
#[derive(Debug, Clone)]
pub struct SecondTest {
    effects: Vec<(usize, DMatrix<C64>, DMatrix<C64>)>,
}

impl SecondTest {
    /// `(p₊, p₋)` for a field state entering the second test.
    pub fn probabilities(&self, state: &SectorState) -> Result<(f64, f64)> {
        let mut pp = 0.0;
        let mut pm = 0.0;
        for (s, b) in &state.blocks {
            let (_, ep, em) = self
                .effects
                .iter()
                .find(|(n, _, _)| *n == s.total)
                .ok_or_else(|| Error::Layout(format!("no effect computed for sector {}", s.total)))?;
            pp += (ep * b).trace().re;
            pm += (em * b).trace().re;
        }
        Ok((pp, pm))
    }
}

/// Sequencing of the two-swap-test protocol with an open ancilla.
#[derive(Debug, Clone)]
pub struct SectorEngine {
    pub model: AncillaModel,
    pub cpbs_duration: f64,
    pub bs: BsSegment,
    pub integrator: Integrator,
}

impl SectorEngine {
    /// CPBS segment, ancilla measurement, BS segment on the postselected branch.
    pub fn first_test(&self, input: &SectorState, branch: Branch) -> Result<FirstTest> {
        let results: Vec<_> = input
            .blocks
            .par_iter()
            .map(|(s, rho)| -> Result<_> {
                let gen = self.model.cpbs_generator(s)?;
                let x0 = rho.kronecker(&self.model.initial);
                let (x, stats) = self
                    .integrator
                    .integrate(&Liouvillian::new(&gen), x0, self.cpbs_duration)?;
                let min_eig = x.clone().symmetric_eigenvalues().min();
                let tr = x.trace().re;
                let fp = reduce_ancilla(&self.model.plus, &x, s.len());
                let fm = reduce_ancilla(&self.model.minus, &x, s.len());
                Ok((s.clone(), fp, fm, stats, min_eig, tr - rho.trace().re))
            })
            .collect::<Result<_>>()?;
        let mut stats = StepStats::default();
        let (mut pp, mut pm, mut min_eig, mut trace_err) = (0.0, 0.0, f64::INFINITY, 0.0f64);
        for (_, fp, fm, st, me, te) in &results {
            pp += fp.trace().re;
            pm += fm.trace().re;
            stats.accepted += st.accepted;
            stats.rejected += st.rejected;
            stats.evaluations += st.evaluations;
            min_eig = min_eig.min(*me);
            trace_err = trace_err.max(te.abs());
        }
        let total = input.trace();
        let prob = match branch {
            Branch::Symmetric => pp,
            Branch::Antisymmetric => pm,
        };
        if prob < NULL_OUTCOME_FLOOR {
            return Err(Error::InfeasibleBranch { probability: prob });
        }
        let blocks = results
            .into_iter()
            .map(|(s, fp, fm, _, _, _)| {
                let f = match branch {
                    Branch::Symmetric => fp,
                    Branch::Antisymmetric => fm,
                };
                (s, f * C64::new(1.0 / prob, 0.0))
            })
            .collect();
        let post = self.bs_segment(&SectorState { dim: input.dim, blocks })?;
        Ok(FirstTest {
            p_plus: pp / total,
            p_minus: pm / total,
            leakage: 1.0 - (pp + pm) / total,
            post,
            stats,
            min_eigenvalue: min_eig,
            trace_error: trace_err,
        })
    }

    pub fn bs_segment(&self, state: &SectorState) -> Result<SectorState> {
        let blocks = state
            .blocks
            .iter()
            .map(|(s, b)| -> Result<_> {
                let gen = self.bs.generator(s)?;
                let (x, _) = self
                    .integrator
                    .integrate(&Liouvillian::new(&gen), b.clone(), self.bs.duration)?;
                Ok((s.clone(), x))
            })
            .collect::<Result<_>>()?;
        Ok(SectorState { dim: state.dim, blocks })
    }

    /// Pulls the ancilla effects back through the CPBS segment for every
    /// sector present in `state`.
    pub fn second_test(&self, state: &SectorState) -> Result<SecondTest> {
        let effects = state
            .blocks
            .par_iter()
            .map(|(s, _)| -> Result<_> {
                let adj = self.model.cpbs_generator(s)?.adjoint();
                let id_f = DMatrix::<C64>::identity(s.len(), s.len());
                let pull = |p: &DMatrix<C64>| -> Result<DMatrix<C64>> {
                    let (e, _) =
                        self.integrator
                            .integrate(&Liouvillian::new(&adj), id_f.kronecker(p), self.cpbs_duration)?;
                    // M[f', f] = Σ σ[i, j] E[(f', j), (f, i)] so that p = Tr[M ρ]
                    let m = reduce_ancilla(&self.model.initial, &e, s.len());
                    Ok(m)
                };
                Ok((s.total, pull(&self.model.plus)?, pull(&self.model.minus)?))
            })
            .collect::<Result<_>>()?;
        Ok(SecondTest { effects })
    }
}

/// Per-mode truncation that holds every populated excitation sector whole.
pub fn open_field_dim(plan: &ProbePlan) -> usize {
    match plan.kind {
        ProbeKind::Noon { n, m } => n + m + 1,
        ProbeKind::Coherent { .. } => default_coherent_dim(C64::new(plan.mean_photons().sqrt(), 0.0)),
    }
}

/// Field input of a plan on a `[d, d]` truncation.
pub fn plan_input(plan: &ProbePlan, dim: usize) -> Result<SectorState> {
    plan.validate()?;
    let layout = SpaceLayout::new(vec![dim, dim])?;
    let state = match plan.kind {
        ProbeKind::Noon { n, m } => fock_state(&layout, &[n, m])?,
        ProbeKind::Coherent { alpha1, alpha2 } => coherent_product(&layout, &[alpha1, alpha2], DEFAULT_LEAKAGE_TOL)?,
    };
    SectorState::from_pure(&state)
}

/// Outcome of a full open-system phase sweep.
#[derive(Debug, Clone)]
pub struct OpenSweep {
    pub first: FirstTest,
    pub points: Vec<WitnessPoint>,
}

impl SectorEngine {
    /// Both swap tests for every phase; `leakage` holds the second-test
    /// probability outside the two measured outcomes.
    pub fn sweep(&self, plan: &ProbePlan, phis: &[f64]) -> Result<OpenSweep> {
        let input = plan_input(plan, open_field_dim(plan))?;
        self.sweep_from(&input, plan.branch, phis)
    }

    pub fn sweep_from(&self, input: &SectorState, branch: Branch, phis: &[f64]) -> Result<OpenSweep> {
        let first = self.first_test(input, branch)?;
        let second = self.second_test(&first.post)?;
        let points = phis
            .iter()
            .map(|&phi| -> Result<_> {
                let (pp, pm) = second.probabilities(&first.post.with_phase(phi))?;
                let mut w = WitnessPoint::new(phi, pp, pm);
                w.leakage = Some((1.0 - pp - pm).max(0.0));
                Ok(w)
            })
            .collect::<Result<_>>()?;
        Ok(OpenSweep { first, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_state, SpaceLayout};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ideal_qubit(theta: f64, tau: f64) -> SectorEngine {
        let rate = theta / tau;
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let plus = DMatrix::from_element(2, 2, c(0.5));
        let minus = DMatrix::from_row_slice(2, 2, &[c(0.5), c(-0.5), c(-0.5), c(0.5)]);
        SectorEngine {
            model: AncillaModel {
                dim: 2,
                h: DMatrix::zeros(2, 2),
                cross: None,
                coupling: z * C64::new(0.0, rate),
                jumps: vec![],
                initial: plus.clone(),
                plus,
                minus,
            },
            cpbs_duration: tau,
            bs: BsSegment {
                zeta: C64::new(0.0, -rate),
                duration: tau,
            },
            integrator: Integrator::default(),
        }
    }

    #[test]
    fn sector_hop_is_a_dagger_b() {
        let s = Sector::new(3, 2);
        assert_eq!(s.ks, vec![0, 1, 2]);
        let h = s.hop();
        // a†b |0,2⟩ = √1·√2 |1,1⟩
        assert_abs_diff_eq!(h[(1, 0)].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(h[(2, 1)].re, 2f64.sqrt(), epsilon = 1e-15);
        let t = Sector::new(3, 3);
        assert_eq!(t.ks, vec![1, 2]);
        assert_abs_diff_eq!(t.hop()[(1, 0)].re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn ideal_noon_protocol() {
        let n = 2;
        let eng = ideal_qubit(std::f64::consts::FRAC_PI_4, 1.0);
        let lay = SpaceLayout::new(vec![n + 1, n + 1]).unwrap();
        let input = SectorState::from_pure(&fock_state(&lay, &[n, 0]).unwrap()).unwrap();
        let first = eng.first_test(&input, Branch::Antisymmetric).unwrap();
        assert_abs_diff_eq!(first.p_minus, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(first.leakage, 0.0, epsilon = 1e-12);
        let second = eng.second_test(&first.post).unwrap();
        for phi in [0.0, 0.3, 1.1] {
            let (pp, pm) = second.probabilities(&first.post.with_phase(phi)).unwrap();
            assert_abs_diff_eq!(pp - pm, -(n as f64 * phi).cos(), epsilon = 1e-6);
            assert_abs_diff_eq!(pp + pm, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn sectors_drop_empty_blocks() {
        let lay = SpaceLayout::new(vec![4, 4]).unwrap();
        let s = SectorState::from_pure(&fock_state(&lay, &[3, 1]).unwrap()).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].0.total, 4);
        assert_abs_diff_eq!(s.sector_weight(4), 1.0, epsilon = 1e-15);
    }
}

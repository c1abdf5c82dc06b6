use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::basis::CatBasis;
use super::params::CqedParams;
use crate::analytics::ProbePlan;
use crate::error::{Error, Result};
use crate::fock::{annihilation, creation, number, DensityState, Operator, SpaceLayout};
use crate::lindblad::{
    open_field_dim, plan_input, AncillaModel, BsSegment, CrossTerm, Generator, Integrator, Liouvillian, MatrixRhs,
    SectorEngine, Segment,
};
use crate::sweep::WitnessPoint;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_layout(layout: &SpaceLayout) -> Result<()> {
    let d = layout.dims();
    if d.len() != 3 || d[1] != d[2] {
        return Err(Error::Layout(format!(
            "cQED layout must be [cat, d, d] (ancilla, a, b), got {d:?}"
        )));
    }
    Ok(())
}

/// Single-mode ancilla matrices `(c, c†)`.
fn ladder(dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut a = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = c((k as f64).sqrt());
    }
    let ad = a.adjoint();
    (a, ad)
}

/// `−K c†²c² + ε(c†² + c²)` on the ancilla alone.
fn cat_hamiltonian(p: &CqedParams, dim: usize) -> DMatrix<C64> {
    let (a, ad) = ladder(dim);
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    (&ad2 * &a2) * c(-p.kerr) + (&ad2 + &a2) * c(p.epsilon)
}

fn ancilla_jumps(p: &CqedParams, dim: usize) -> Vec<DMatrix<C64>> {
    let (a, ad) = ladder(dim);
    let mut j = Vec::new();
    let down = p.kappa * (1.0 + p.n_thermal);
    if down > 0.0 {
        j.push(&a * c(down.sqrt()));
    }
    let up = p.kappa * p.n_thermal;
    if up > 0.0 {
        j.push(&ad * c(up.sqrt()));
    }
    if p.kappa2 > 0.0 {
        j.push((&a * &a) * c(p.kappa2.sqrt()));
    }
    j
}

/// `(H₀, H_CPBS, H_BS)` on a `[cat, d, d]` layout.
///
/// `H₀ = −Kc†²c² + εc†² + εc² − χ(a†a + b†b − N)(c†c − |α|²)`,
/// `H_CPBS = −ζ₁a†bc† − ζ₁*ab†c`, `H_BS = ζ₂a†b + ζ₂*ab†`, with `N` and `|α|²`
/// from [`CqedParams::n_offset`] (zero when unset) and [`CqedParams::alpha_sq`].
pub fn build_hamiltonians(p: &CqedParams, layout: &SpaceLayout) -> Result<(Operator, Operator, Operator)> {
    check_layout(layout)?;
    p.validate()?;
    let cat = Operator::embed(layout, 0, &cat_hamiltonian(p, layout.dim(0)))?;
    let nc = number(layout, 0)?;
    let nf = number(layout, 1)?.add(&number(layout, 2)?)?;
    let id = Operator::identity(layout);
    let shifted_f = nf.sub(&id.scale(c(p.n_offset.unwrap_or(0.0))))?;
    let shifted_c = nc.sub(&id.scale(c(p.alpha_sq())))?;
    let h0 = cat.add(&shifted_f.compose(&shifted_c)?.scale(c(-p.chi)))?;

    let hop = creation(layout, 1)?.compose(&annihilation(layout, 2)?)?;
    let cd = creation(layout, 0)?;
    let zeta1 = C64::new(0.0, -p.zeta1);
    let t = hop.compose(&cd)?.scale(-zeta1);
    let h_cpbs = t.add(&t.adjoint())?;
    let zeta2 = C64::new(0.0, -p.zeta2);
    let h_bs = hop.scale(zeta2).add(&hop.adjoint().scale(zeta2.conj()))?;
    Ok((h0, h_cpbs, h_bs))
}

fn full_generator(p: &CqedParams, layout: &SpaceLayout, segment: Segment) -> Result<Generator> {
    let (h0, hc, hb) = build_hamiltonians(p, layout)?;
    let h = match segment {
        Segment::Cpbs => h0.add(&hc)?,
        Segment::Bs => h0.add(&hb)?,
    };
    let jumps: Vec<_> = ancilla_jumps(p, layout.dim(0))
        .iter()
        .map(|j| Operator::embed(layout, 0, j).map(Operator::into_matrix))
        .collect::<Result<_>>()?;
    Generator::new(h.matrix(), &jumps)
}

/// `ρ̇` of the master equation with the given coupling switched on.
pub fn lindblad_rhs(rho: &DensityState, p: &CqedParams, segment: Segment) -> Result<DMatrix<C64>> {
    let gen = full_generator(p, rho.layout(), segment)?;
    let mut out = DMatrix::zeros(rho.matrix().nrows(), rho.matrix().ncols());
    Liouvillian::new(&gen).eval(rho.matrix(), &mut out);
    Ok(out)
}

pub fn integrate(
    rho: &DensityState,
    p: &CqedParams,
    segment: Segment,
    duration: f64,
    tol: f64,
) -> Result<DensityState> {
    let gen = full_generator(p, rho.layout(), segment)?;
    let (m, _) = Integrator::with_rtol(tol).integrate(&Liouvillian::new(&gen), rho.matrix().clone(), duration)?;
    DensityState::new(rho.layout().clone(), m)
}

/// Outcome of projecting the ancilla onto the cat states.
#[derive(Debug, Clone)]
pub struct CatMeasurement {
    pub p_plus: f64,
    pub p_minus: f64,
    /// Probability outside span{|C₊⟩, |C₋⟩}.
    pub leakage: f64,
    pub post_plus: Option<DensityState>,
    pub post_minus: Option<DensityState>,
    pub diagnostic: Option<String>,
}

/// Leakage above this attaches a diagnostic.
pub const LEAKAGE_WARNING: f64 = 0.01;

/// Projects mode 0 of `rho` onto `|C±⟩⟨C±| ⊗ I`; the remainder of the
/// identity is the leakage outcome.
pub fn measure_cat_x(rho: &DensityState, basis: &CatBasis) -> Result<CatMeasurement> {
    let layout = rho.layout();
    if layout.dim(0) != basis.dim() {
        return Err(Error::Layout(format!(
            "cat basis has dimension {}, state ancilla has {}",
            basis.dim(),
            layout.dim(0)
        )));
    }
    let project = |p: &DMatrix<C64>| -> Result<(f64, Option<DensityState>)> {
        let op = Operator::embed(layout, 0, p)?;
        let m = op.matrix() * rho.matrix() * op.matrix();
        let pr = m.trace().re;
        let post = if pr > crate::fock::NULL_OUTCOME_FLOOR {
            Some(DensityState::new(layout.clone(), m / c(pr))?)
        } else {
            None
        };
        Ok((pr, post))
    };
    let (pp, post_plus) = project(&basis.plus_projector())?;
    let (pm, post_minus) = project(&basis.minus_projector())?;
    let leakage = (rho.trace().re - pp - pm).max(0.0);
    let diagnostic = (leakage > LEAKAGE_WARNING).then(|| {
        let msg = format!("cat-manifold leakage {leakage:.3e} exceeds {LEAKAGE_WARNING}");
        log::warn!("{msg}");
        msg
    });
    Ok(CatMeasurement {
        p_plus: pp,
        p_minus: pm,
        leakage,
        post_plus,
        post_minus,
        diagnostic,
    })
}

/// `|C₊⟩` relaxed under the cat Hamiltonian for the stabilization window,
/// with two-photon loss and, if enabled, single-photon loss and heating.
pub fn stabilized_ancilla(p: &CqedParams, basis: &CatBasis) -> Result<DMatrix<C64>> {
    let dim = basis.dim();
    let mut q = *p;
    if !p.stabilization_losses {
        q.kappa = 0.0;
        q.n_thermal = 0.0;
    }
    let gen = Generator::new(&cat_hamiltonian(p, dim), &ancilla_jumps(&q, dim))?;
    let v = basis.plus_cat.amplitudes();
    let (rho, _) =
        Integrator::with_rtol(p.rtol).integrate(&Liouvillian::new(&gen), v * v.adjoint(), p.stabilization)?;
    let top = rho[(dim - 1, dim - 1)].re;
    if top > 1e-6 {
        return Err(Error::EnlargeDimension(format!(
            "stabilized cat populates the top Fock level with {top:.2e}; increase cat_dim beyond {dim}"
        )));
    }
    Ok(rho)
}

/// Sector-resolved engine for the Kerr-cat ancilla.
pub fn cqed_engine(p: &CqedParams) -> Result<SectorEngine> {
    p.validate()?;
    let dim = p.cat_dim();
    let basis = CatBasis::new(p.beta(), dim)?;
    let (a, ad) = ladder(dim);
    let cross = (p.chi != 0.0).then(|| CrossTerm {
        coeff: -p.chi,
        n_offset: p.n_offset.unwrap_or(0.0),
        op: (&ad * &a) - DMatrix::identity(dim, dim) * c(p.alpha_sq()),
    });
    Ok(SectorEngine {
        model: AncillaModel {
            dim,
            h: cat_hamiltonian(p, dim),
            cross,
            // −ζ₁ c† with ζ₁ = −i·zeta1
            coupling: ad * C64::new(0.0, p.zeta1),
            jumps: ancilla_jumps(p, dim),
            initial: stabilized_ancilla(p, &basis)?,
            plus: basis.plus_projector(),
            minus: basis.minus_projector(),
        },
        cpbs_duration: p.tau,
        bs: BsSegment {
            zeta: C64::new(0.0, -p.zeta2),
            duration: p.bs_duration(),
        },
        integrator: Integrator::with_rtol(p.rtol),
    })
}

/// One protocol run at a single phase.
#[derive(Debug, Clone)]
pub struct CqedTrace {
    pub phi: f64,
    pub prob1: f64,
    pub leakage1: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub delta: f64,
    pub leakage: f64,
}

/// Full sweep with diagnostics.
#[derive(Debug, Clone)]
pub struct CqedSweep {
    pub params: CqedParams,
    pub points: Vec<WitnessPoint>,
    pub prob1: f64,
    pub leakage1: f64,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub field_dim: usize,
}

pub fn run_cqed_sweep(plan: &ProbePlan, params: &CqedParams, phis: &[f64]) -> Result<CqedSweep> {
    let p = params.resolved_for(plan);
    log::info!(
        "cQED run: K/2π = {:.4e} Hz, β² = {:.4}, κβ²τ = {:.4e}, N = {:?}, |α|² = {:.4}, cat_dim = {}",
        p.kerr / (2.0 * std::f64::consts::PI),
        p.beta_sq(),
        p.flip_probability(),
        p.n_offset,
        p.alpha_sq(),
        p.cat_dim()
    );
    let engine = cqed_engine(&p)?;
    let dim = open_field_dim(plan);
    let input = plan_input(plan, dim)?;
    let out = engine.sweep_from(&input, plan.branch, phis)?;
    let prob1 = match plan.branch {
        crate::analytics::Branch::Symmetric => out.first.p_plus,
        crate::analytics::Branch::Antisymmetric => out.first.p_minus,
    };
    Ok(CqedSweep {
        params: p,
        points: out.points,
        prob1,
        leakage1: out.first.leakage,
        min_eigenvalue: out.first.min_eigenvalue.min(out.first.post.min_eigenvalue()),
        trace_error: out.first.trace_error,
        field_dim: dim,
    })
}

pub fn run_cqed_protocol(plan: &ProbePlan, params: &CqedParams, phi: f64) -> Result<CqedTrace> {
    let s = run_cqed_sweep(plan, params, &[phi])?;
    let w = s.points[0];
    Ok(CqedTrace {
        phi,
        prob1: s.prob1,
        leakage1: s.leakage1,
        p_plus: w.p_plus,
        p_minus: w.p_minus,
        delta: w.delta,
        leakage: w.leakage.unwrap_or(0.0),
    })
}

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Engine, Experiment, ExperimentConfig, Grid};
use super::table::{Metadata, SweepResult, Table};
use crate::analytics::{cfi, closed, max_cfi, qfi, witness_with_flips, FlipProbs, GateKind, ProbeKind, ProbePlan};
use crate::cqed::run_cqed_sweep;
use crate::error::{Error, Result};
use crate::gatesim::{GateSpec, ProtocolRunner};
use crate::sweep::{fit_fringe, FringeFit, WitnessPoint};

/// Phase grid used when maximizing the classical Fisher information.
const MAX_CFI_GRID: usize = 4001;

struct Ctx {
    plan: Option<ProbePlan>,
    flips: FlipProbs,
    phis: Vec<f64>,
    ns: Vec<f64>,
    alpha: f64,
    values: BTreeMap<String, f64>,
    fit: Option<FringeFit>,
}

/// Runs an experiment. The config is resolved (defaults filled, validated) first.
pub fn run(config: &ExperimentConfig) -> Result<SweepResult> {
    let start = Instant::now();
    let cfg = config.resolved()?;
    let engine = cfg.engine();
    log::info!("running {} on the {} engine", cfg.experiment, engine);
    if cfg.cqed.is_some() || cfg.toy.is_some() {
        log::info!("config rates are in Hz; engines use angular rates 2π × Hz");
    }
    let mut ctx = Ctx {
        plan: cfg.figure_plan()?,
        flips: cfg.flips.unwrap_or(FlipProbs::NONE),
        phis: cfg.phi_grid.as_ref().map(Grid::points).unwrap_or_default(),
        ns: cfg.n_grid.as_ref().map(Grid::points).unwrap_or_default(),
        alpha: cfg.alpha.unwrap_or(5.0),
        values: BTreeMap::new(),
        fit: None,
    };
    let name = cfg.experiment.name();
    let (points, tables) = match cfg.experiment {
        Experiment::Fig2a | Experiment::Fig2b => {
            let plan = ctx.plan.expect("resolved");
            let mut pts = match engine {
                Engine::Gatesim => gatesim_points(&mut ctx, &plan)?,
                _ => analytic_points(&plan, ctx.flips, &ctx.phis, false)?,
            };
            for p in &mut pts {
                p.leakage = None;
            }
            let t = Table::from_points(name, &pts, &[]);
            (pts, vec![t])
        }
        Experiment::Fig3a => (Vec::new(), vec![fig3a(&ctx)]),
        Experiment::Fig3b => (Vec::new(), vec![fig3b(&ctx, cfg.total_photons.unwrap_or(5.0))?]),
        Experiment::Fig4 => (Vec::new(), fig4(&ctx)?),
        Experiment::Fig5 => fig5(&ctx)?,
        Experiment::Fig6 => {
            let plan = ctx.plan.expect("resolved");
            let pts = open_points(&mut ctx, &cfg, &plan)?;
            let p = ctx.values["flip_probability"];
            let noisy = FlipProbs::new(p, p)?;
            let ideal = column(&ctx.phis, |phi| witness_with_flips(&plan, FlipProbs::NONE, phi))?;
            let flipped = column(&ctx.phis, |phi| witness_with_flips(&plan, noisy, phi))?;
            ctx.fit = fringe(&plan, &pts);
            let t = Table::from_points(name, &pts, &[("delta_ideal", ideal), ("delta_phase_flip", flipped)]);
            (pts, vec![t])
        }
        Experiment::Fig7 => (Vec::new(), vec![fig7(&mut ctx)?]),
        Experiment::Fig8 => (Vec::new(), fig8(&ctx)?),
        Experiment::Custom => {
            let plan = ctx.plan.expect("resolved");
            let pts = match engine {
                Engine::Analytic => analytic_points(&plan, ctx.flips, &ctx.phis, true)?,
                Engine::Gatesim => gatesim_points(&mut ctx, &plan)?,
                Engine::Toymodel | Engine::Cqed => open_points(&mut ctx, &cfg, &plan)?,
            };
            ctx.fit = fringe(&plan, &pts);
            let t = Table::from_points(name, &pts, &[]);
            (pts, vec![t])
        }
    };
    if let Some(f) = &ctx.fit {
        log::info!(
            "fringe fit (harmonic {}): visibility {:.6}, offset {:.3e}, residual {:.2e}",
            f.harmonic,
            f.visibility,
            f.offset,
            f.residual
        );
    }
    let metadata = Metadata {
        experiment: name.to_string(),
        engine: engine.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.to_toml(),
        units: "phases in rad; config rates in Hz, converted to angular rates (× 2π) internally; times in s".into(),
        fit: ctx.fit,
        values: ctx.values,
    };
    Ok(SweepResult {
        points,
        tables,
        metadata,
    })
}

fn column<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

fn analytic_points(plan: &ProbePlan, flips: FlipProbs, phis: &[f64], with_cfi: bool) -> Result<Vec<WitnessPoint>> {
    phis.par_iter()
        .map(|&phi| {
            let mut w = WitnessPoint::from_delta(phi, witness_with_flips(plan, flips, phi)?);
            if with_cfi {
                w.fisher_c = Some(cfi(plan, flips, phi)?);
            }
            Ok(w)
        })
        .collect()
}

fn gatesim_sweep(plan: &ProbePlan, spec: GateSpec, flips: FlipProbs, phis: &[f64]) -> Result<(Vec<WitnessPoint>, f64)> {
    let runner = ProtocolRunner::new(*plan, spec)?;
    let leak = runner.leakage();
    let pts = runner
        .sweep(phis, plan.branch, flips)?
        .into_iter()
        .map(|t| {
            let mut w = WitnessPoint::new(t.phi, t.p_plus, t.p_minus);
            w.leakage = Some(t.leakage);
            w
        })
        .collect();
    Ok((pts, leak))
}

fn gatesim_points(ctx: &mut Ctx, plan: &ProbePlan) -> Result<Vec<WitnessPoint>> {
    let (pts, leak) = gatesim_sweep(plan, GateSpec::for_kind(plan.gate), ctx.flips, &ctx.phis)?;
    ctx.values.insert("input_leakage".into(), leak);
    Ok(pts)
}

fn open_points(ctx: &mut Ctx, cfg: &ExperimentConfig, plan: &ProbePlan) -> Result<Vec<WitnessPoint>> {
    match cfg.engine() {
        Engine::Cqed => {
            let p = cfg.cqed_params()?;
            let s = run_cqed_sweep(plan, &p, &ctx.phis)?;
            ctx.values.insert("flip_probability".into(), p.flip_probability());
            ctx.values.insert("beta_sq".into(), p.beta_sq());
            ctx.values.insert("cat_dim".into(), p.cat_dim() as f64);
            ctx.values.insert("field_dim".into(), s.field_dim as f64);
            ctx.values.insert("prob1".into(), s.prob1);
            ctx.values.insert("leakage1".into(), s.leakage1);
            ctx.values.insert("min_eigenvalue".into(), s.min_eigenvalue);
            ctx.values.insert("trace_error".into(), s.trace_error);
            Ok(s.points)
        }
        Engine::Toymodel => {
            let p = cfg.toy_params()?;
            let mut engine = crate::toymodel::toy_engine(&p)?;
            if let Some(r) = cfg.tolerance.rtol {
                engine.integrator = crate::lindblad::Integrator::with_rtol(r);
            }
            let s = engine.sweep(plan, &ctx.phis)?;
            let prob1 = match plan.branch {
                crate::analytics::Branch::Symmetric => s.first.p_plus,
                crate::analytics::Branch::Antisymmetric => s.first.p_minus,
            };
            ctx.values.insert("flip_probability".into(), p.flip_probability());
            ctx.values.insert("prob1".into(), prob1);
            ctx.values.insert("leakage1".into(), s.first.leakage);
            ctx.values.insert("min_eigenvalue".into(), s.first.min_eigenvalue);
            ctx.values.insert("trace_error".into(), s.first.trace_error);
            Ok(s.points)
        }
        e => Err(Error::Config(format!("{e} is not an open-system engine"))),
    }
}

/// Fringe fit at the NOON harmonic `|n − m|`; coherent plans have no single harmonic.
fn fringe(plan: &ProbePlan, pts: &[WitnessPoint]) -> Option<FringeFit> {
    let ProbeKind::Noon { n, m } = plan.kind else {
        return None;
    };
    let k = n.abs_diff(m) as u32;
    let phis: Vec<f64> = pts.iter().map(|p| p.phi).collect();
    let d: Vec<f64> = pts.iter().map(|p| p.delta).collect();
    match fit_fringe(&phis, &d, k) {
        Ok(f) => Some(f),
        Err(e) => {
            log::warn!("no fringe fit: {e}");
            None
        }
    }
}

fn fig3a(ctx: &Ctx) -> Table {
    let mut t = Table::new("fig3a", &["n", "qfi_noon", "qfi_cat_pair", "qfi_alpha_vacuum"]);
    for &n in &ctx.ns {
        t.push(vec![
            n,
            n * n,
            closed::qfi_cat_pair((0.5 * n).sqrt()),
            closed::qfi_alpha_vacuum(n.sqrt()),
        ]);
    }
    t
}

fn fig3b(ctx: &Ctx, total: f64) -> Result<Table> {
    let q = column(&ctx.ns, |n1| {
        qfi(&ProbePlan::coherent_real(n1.sqrt(), -(total - n1).max(0.0).sqrt())?)
    })?;
    let mut t = Table::new("fig3b", &["n1", "qfi"]);
    for (n1, f) in ctx.ns.iter().zip(q) {
        t.push(vec![*n1, f]);
    }
    Ok(t)
}

fn fig4(ctx: &Ctx) -> Result<Vec<Table>> {
    let a = ctx.alpha;
    let pair = ProbePlan::coherent_real(a, -a)?;
    let vac = ProbePlan::coherent_real(a, 0.0)?;
    let f_pair = column(&ctx.phis, |phi| cfi(&pair, FlipProbs::NONE, phi))?;
    let f_vac = column(&ctx.phis, |phi| cfi(&vac, FlipProbs::NONE, phi))?;
    let (q_pair, q_vac) = (qfi(&pair)?, qfi(&vac)?);
    let mut t = Table::new(
        "fig4",
        &[
            "phi",
            "cfi_cat_pair",
            "qfi_cat_pair",
            "cfi_alpha_vacuum",
            "qfi_alpha_vacuum",
        ],
    );
    for (i, &phi) in ctx.phis.iter().enumerate() {
        t.push(vec![phi, f_pair[i], q_pair, f_vac[i], q_vac]);
    }
    let mut lim = Table::new(
        "limit",
        &[
            "n",
            "cfi0_cat_pair",
            "qfi_cat_pair",
            "cfi0_alpha_vacuum",
            "qfi_alpha_vacuum",
        ],
    );
    for &n in &ctx.ns {
        let (ap, av) = ((0.5 * n).sqrt(), n.sqrt());
        lim.push(vec![
            n,
            closed::cfi_cat_pair(ap, 0.0),
            closed::qfi_cat_pair(ap),
            closed::cfi_alpha_vacuum_at_zero(av),
            closed::qfi_alpha_vacuum(av),
        ]);
    }
    Ok(vec![t, lim])
}

fn max_table(
    ctx: &Ctx,
    columns: &[&str],
    plans: impl Fn(f64) -> Result<Vec<(ProbePlan, FlipProbs)>> + Sync,
) -> Result<Table> {
    let rows: Vec<Vec<f64>> = ctx
        .ns
        .par_iter()
        .map(|&n| {
            let mut row = vec![n];
            let cases = plans(n.sqrt())?;
            for (plan, flips) in &cases {
                row.push(max_cfi(plan, *flips, 0.0, PI, MAX_CFI_GRID)?.1);
            }
            row.push(qfi(&cases[0].0)?);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("max", columns);
    t.rows = rows;
    Ok(t)
}

fn fig5(ctx: &Ctx) -> Result<(Vec<WitnessPoint>, Vec<Table>)> {
    let plan = ctx.plan.expect("resolved");
    let flips = ctx.flips;
    let pts = analytic_points(&plan, flips, &ctx.phis, true)?;
    let ideal = analytic_points(&plan, FlipProbs::NONE, &ctx.phis, true)?;
    let d0: Vec<f64> = ideal.iter().map(|p| p.delta).collect();
    let f0: Vec<f64> = ideal.iter().map(|p| p.fisher_c.unwrap_or(f64::NAN)).collect();
    let main = Table::from_points("fig5", &pts, &[("delta_ideal", d0), ("fisher_c_ideal", f0)]);

    let mut noon = Table::new("noon", &["phi", "cfi_n4", "cfi_n5", "cfi_n6"]);
    let plans = [ProbePlan::noon(4, 0)?, ProbePlan::noon(5, 0)?, ProbePlan::noon(6, 0)?];
    for &phi in &ctx.phis {
        let mut row = vec![phi];
        for p in &plans {
            row.push(cfi(p, flips, phi)?);
        }
        noon.push(row);
    }

    let max = max_table(ctx, &["n", "max_cfi_ideal", "max_cfi_flip", "qfi"], |a| {
        let p = ProbePlan::coherent_real(a, 0.0)?;
        Ok(vec![(p, FlipProbs::NONE), (p, flips)])
    })?;
    Ok((pts, vec![main, noon, max]))
}

fn fig7(ctx: &mut Ctx) -> Result<Table> {
    let plan = ctx.plan.expect("resolved");
    let specs = [
        GateSpec::controlled_swap(),
        GateSpec::controlled_bs(true),
        GateSpec::controlled_bs(false),
    ];
    let mut cols = Vec::new();
    let mut leak = 0f64;
    for spec in specs {
        let (pts, l) = gatesim_sweep(&plan, spec, ctx.flips, &ctx.phis)?;
        leak = leak.max(l);
        cols.push(pts.into_iter().map(|p| p.delta).collect::<Vec<_>>());
    }
    ctx.values.insert("input_leakage".into(), leak);
    let mut t = Table::new("fig7", &["phi", "delta_cswap", "delta_cbs_circuit", "delta_cbs"]);
    for (i, &phi) in ctx.phis.iter().enumerate() {
        t.push(vec![phi, cols[0][i], cols[1][i], cols[2][i]]);
    }
    Ok(t)
}

fn fig8(ctx: &Ctx) -> Result<Vec<Table>> {
    let swap = ctx.plan.expect("resolved").with_gate(GateKind::ControlledSwap);
    let cbs = swap.with_gate(GateKind::ControlledBeamSplitter);
    let flips = ctx.flips;
    let d_cbs = column(&ctx.phis, |phi| witness_with_flips(&cbs, flips, phi))?;
    let d_swap = column(&ctx.phis, |phi| witness_with_flips(&swap, flips, phi))?;
    let f_cbs = column(&ctx.phis, |phi| cfi(&cbs, flips, phi))?;
    let f_swap = column(&ctx.phis, |phi| cfi(&swap, flips, phi))?;
    let mut t = Table::new("fig8", &["phi", "delta_cbs", "delta_cswap", "cfi_cbs", "cfi_cswap"]);
    for (i, &phi) in ctx.phis.iter().enumerate() {
        t.push(vec![phi, d_cbs[i], d_swap[i], f_cbs[i], f_swap[i]]);
    }
    let max = max_table(ctx, &["n", "max_cfi_cbs", "max_cfi_cswap", "qfi"], |a| {
        let p = ProbePlan::coherent_real(a, 0.0)?;
        Ok(vec![(p.with_gate(GateKind::ControlledBeamSplitter), flips), (p, flips)])
    })?;
    Ok(vec![t, max])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fig2a_default_grid() {
        let r = run(&ExperimentConfig::new(Experiment::Fig2a)).unwrap();
        let t = r.primary();
        assert_eq!(t.rows.len(), 401);
        assert_eq!(t.columns, ["phi", "p_plus", "p_minus", "delta"]);
        assert_abs_diff_eq!(t.rows[200][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.rows[200][3], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn fig3a_noon_is_n_squared() {
        let r = run(&ExperimentConfig::new(Experiment::Fig3a)).unwrap();
        for row in &r.primary().rows {
            assert_eq!(row[1], row[0] * row[0]);
            assert!(row[2] >= 1.0 && row[3] >= 1.0);
        }
    }

    #[test]
    fn fig3b_endpoints_match_named_forms() {
        let r = run(&ExperimentConfig::new(Experiment::Fig3b)).unwrap();
        let rows = &r.primary().rows;
        let last = rows.last().unwrap();
        assert_abs_diff_eq!(last[1], closed::qfi_alpha_vacuum(5f64.sqrt()), epsilon = 1e-9);
    }

    #[test]
    fn fig7_circuit_matches_controlled_swap() {
        let r = run(&ExperimentConfig::new(Experiment::Fig7)).unwrap();
        for row in &r.primary().rows {
            assert_abs_diff_eq!(row[1], row[2], epsilon = 1e-10);
            assert_abs_diff_eq!(row[1], -(3.0 * row[0]).cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn custom_toymodel_reports_fit() {
        let mut c = ExperimentConfig::new(Experiment::Custom);
        c.engine = Some(Engine::Toymodel);
        c.plan = Some(ProbePlan::noon(2, 0).unwrap());
        c.phi_grid = Some(Grid::new(-PI, PI, 9));
        let r = run(&c).unwrap();
        let fit = r.metadata.fit.unwrap();
        let p = r.metadata.values["flip_probability"];
        assert_abs_diff_eq!(fit.visibility, (1.0 - 2.0 * p).powi(2), epsilon = 1e-5);
    }
}

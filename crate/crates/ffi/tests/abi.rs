use std::ffi::{CStr, CString};
use std::ptr;

use swaptest_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(swaptest_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn noon_witness_and_fisher() {
    unsafe {
        let mut plan = ptr::null_mut();
        assert_eq!(swaptest_plan_noon(3, 0, &mut plan), SwaptestStatus::Ok);
        let mut d = 0.0;
        assert_eq!(swaptest_witness(plan, 0.0, 0.0, 0.4, &mut d), SwaptestStatus::Ok);
        assert!((d + (1.2f64).cos()).abs() < 1e-12);
        let mut q = 0.0;
        assert_eq!(swaptest_qfi(plan, &mut q), SwaptestStatus::Ok);
        assert_eq!(q, 9.0);
        let mut f = 0.0;
        assert_eq!(swaptest_cfi(plan, 0.0, 0.0, 0.4, &mut f), SwaptestStatus::Ok);
        assert!((f - 9.0).abs() < 1e-10);
        swaptest_plan_free(plan);
    }
}

#[test]
fn runner_matches_closed_form() {
    unsafe {
        let mut plan = ptr::null_mut();
        assert_eq!(
            swaptest_plan_coherent(1.0, 0.0, -1.0, 0.0, &mut plan),
            SwaptestStatus::Ok
        );
        let mut runner = ptr::null_mut();
        assert_eq!(swaptest_runner_new(plan, &mut runner), SwaptestStatus::Ok);
        let phis = [0.0, 0.5, 1.0, 2.0];
        let (mut pp, mut pm) = ([0.0; 4], [0.0; 4]);
        let s = swaptest_runner_sweep(runner, phis.as_ptr(), 4, 0.0, 0.0, pp.as_mut_ptr(), pm.as_mut_ptr());
        assert_eq!(s, SwaptestStatus::Ok);
        for i in 0..4 {
            let mut d = 0.0;
            swaptest_witness(plan, 0.0, 0.0, phis[i], &mut d);
            assert!((pp[i] - pm[i] - d).abs() < 1e-8, "{i}");
        }
        let mut leak = -1.0;
        assert_eq!(swaptest_runner_leakage(runner, &mut leak), SwaptestStatus::Ok);
        assert!((0.0..1e-8).contains(&leak));
        swaptest_runner_free(runner);
        swaptest_plan_free(plan);
    }
}

#[test]
fn gate_and_branch_setters() {
    unsafe {
        let mut plan = ptr::null_mut();
        swaptest_plan_coherent(2.0, 0.0, 0.0, 0.0, &mut plan);
        assert_eq!(
            swaptest_plan_set_gate(plan, SwaptestGate::ControlledBeamSplitter),
            SwaptestStatus::Ok
        );
        let mut d = 0.0;
        assert_eq!(swaptest_witness(plan, 0.0, 0.0, 0.3, &mut d), SwaptestStatus::Ok);
        assert!((d - swaptest::analytics::witness_cbs_alpha0(2.0, 0.3)).abs() < 1e-12);
        assert_eq!(
            swaptest_plan_set_branch(plan, SwaptestBranch::Symmetric),
            SwaptestStatus::Ok
        );
        assert_eq!(swaptest_witness(plan, 0.0, 0.0, 0.3, &mut d), SwaptestStatus::Undefined);
        assert!(last_error().contains("closed form"), "{}", last_error());
        swaptest_plan_free(plan);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut plan = ptr::null_mut();
        assert_eq!(swaptest_plan_noon(2, 2, &mut plan), SwaptestStatus::Undefined);
        assert!(plan.is_null());
        assert_eq!(swaptest_plan_noon(2, 0, ptr::null_mut()), SwaptestStatus::NullPointer);
        assert!(last_error().contains("out_plan"));
        swaptest_plan_noon(2, 0, &mut plan);
        let mut d = 0.0;
        assert_eq!(
            swaptest_witness(plan, 0.7, 0.0, 0.1, &mut d),
            SwaptestStatus::InvalidArgument
        );
        assert_eq!(
            swaptest_witness(ptr::null(), 0.0, 0.0, 0.1, &mut d),
            SwaptestStatus::NullPointer
        );
        let mut fit = SwaptestFringe::default();
        let x = [0.0, 1.0];
        assert_eq!(
            swaptest_fit_fringe(x.as_ptr(), x.as_ptr(), 2, 1, &mut fit),
            SwaptestStatus::InvalidArgument
        );
        swaptest_plan_free(plan);
        swaptest_plan_free(ptr::null_mut());
        swaptest_runner_free(ptr::null_mut());
        swaptest_result_free(ptr::null_mut());
    }
}

#[test]
fn fit_fringe_recovers_visibility() {
    let phis: Vec<f64> = (0..101).map(|i| -3.0 + 6.0 * i as f64 / 100.0).collect();
    let d: Vec<f64> = phis.iter().map(|p| 0.1 - 0.8 * (2.0 * p).cos()).collect();
    let mut fit = SwaptestFringe::default();
    let s = unsafe { swaptest_fit_fringe(phis.as_ptr(), d.as_ptr(), phis.len(), 2, &mut fit) };
    assert_eq!(s, SwaptestStatus::Ok);
    assert!((fit.visibility - 0.8).abs() < 1e-12);
    assert!((fit.offset - 0.1).abs() < 1e-12);
}

#[test]
fn config_run_exposes_tables() {
    let cfg = CString::new("experiment = \"fig3b\"\n[n_grid]\nstart = 0.0\nstop = 5.0\ncount = 6\n").unwrap();
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(swaptest_run_config(cfg.as_ptr(), &mut res), SwaptestStatus::Ok);
        assert_eq!(swaptest_result_table_count(res), 1);
        let (mut rows, mut cols) = (0, 0);
        assert_eq!(swaptest_result_shape(res, 0, &mut rows, &mut cols), SwaptestStatus::Ok);
        assert_eq!((rows, cols), (6, 2));
        let name = CStr::from_ptr(swaptest_result_column_name(res, 0, 1));
        assert_eq!(name.to_str().unwrap(), "qfi");
        assert!(swaptest_result_column_name(res, 0, 2).is_null());
        let mut buf = [0.0; 6];
        assert_eq!(
            swaptest_result_column(res, 0, 0, buf.as_mut_ptr(), 6),
            SwaptestStatus::Ok
        );
        assert_eq!(buf, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(
            swaptest_result_column(res, 0, 0, buf.as_mut_ptr(), 3),
            SwaptestStatus::InvalidArgument
        );
        assert_eq!(
            swaptest_result_column(res, 1, 0, buf.as_mut_ptr(), 6),
            SwaptestStatus::OutOfRange
        );
        let mut fit = SwaptestFringe::default();
        assert_eq!(swaptest_result_fit(res, &mut fit), SwaptestStatus::Undefined);
        swaptest_result_free(res);
    }
}

#[test]
fn bad_config_is_a_config_error() {
    let cfg = CString::new("experiment = \"fig3a\"\nengine = \"cqed\"\n").unwrap();
    let mut res = ptr::null_mut();
    let s = unsafe { swaptest_run_config(cfg.as_ptr(), &mut res) };
    assert_eq!(s, SwaptestStatus::Config);
    assert!(res.is_null());
    assert!(last_error().contains("cqed"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(swaptest_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

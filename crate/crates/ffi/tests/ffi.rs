use std::ffi::{CStr, CString};
use std::ptr;

use levicore_ffi::*;

fn last_error() -> String {
    let p = lc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn c(re: f64, im: f64) -> LcComplex {
    LcComplex { re, im }
}

#[test]
fn ball_pipeline_round_trip() {
    let cfg = CString::new(r#"{"domain": {"kind": "ball"}, "sampling": {"n_z": 16, "n_theta": 8}}"#).unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(lc_pipeline_new(cfg.as_ptr(), &mut h), LcStatus::Ok);
        let mut n = 0;
        assert_eq!(lc_pipeline_sample_count(h, &mut n), LcStatus::Ok);
        assert!(n > 0);
        let mut weak = 7;
        assert_eq!(lc_pipeline_weak_count(h, &mut weak), LcStatus::NotReady);
        assert!(last_error().contains("run_core"));
        assert_eq!(lc_pipeline_run_core(h), LcStatus::Ok);
        assert_eq!(lc_pipeline_weak_count(h, &mut weak), LcStatus::Ok);
        assert_eq!(weak, 0);
        let mut stages = 0;
        assert_eq!(lc_pipeline_stage_count(h, &mut stages), LcStatus::Ok);
        assert_eq!(stages, 1);
        let mut labels = vec![9i64; n];
        assert_eq!(lc_pipeline_partition(h, labels.as_mut_ptr(), n), LcStatus::Ok);
        assert!(labels.iter().all(|&l| l == -1));
        assert_eq!(lc_pipeline_partition(h, labels.as_mut_ptr(), n - 1), LcStatus::InvalidArgument);
        lc_pipeline_free(h);
    }
}

#[test]
fn circle_pipeline_drops_the_torus() {
    let cfg = CString::new(
        r#"{"domain": {"kind": "hartogs", "k": {"kind": "circle", "center": [0, 0], "radius": 0.25}},
            "sampling": {"n_z": 32, "n_theta": 64, "k_sites": 128}, "seed": 2}"#,
    )
    .unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(lc_pipeline_new(cfg.as_ptr(), &mut h), LcStatus::Ok);
        assert_eq!(lc_pipeline_run_core(h), LcStatus::Ok);
        let (mut s0, mut s1, mut n) = (0, 7, 0);
        assert_eq!(lc_pipeline_stage_size(h, 0, &mut s0), LcStatus::Ok);
        assert_eq!(lc_pipeline_stage_size(h, 1, &mut s1), LcStatus::Ok);
        assert!(s0 > 0);
        assert_eq!(s1, 0);
        assert_eq!(lc_pipeline_stage_size(h, 2, &mut s1), LcStatus::InvalidArgument);
        lc_pipeline_sample_count(h, &mut n);
        let mut labels = vec![0i64; n];
        lc_pipeline_partition(h, labels.as_mut_ptr(), n);
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), s0);
        lc_pipeline_free(h);
    }
}

#[test]
fn bad_config_reports_precondition() {
    let cfg = CString::new(r#"{"domain": {"kind": "ball"}, "sampling": {"n_z": 10, "n_theta": 8}}"#).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { lc_pipeline_new(cfg.as_ptr(), &mut h) };
    assert_eq!(s, LcStatus::Precondition);
    assert!(h.is_null());
    assert!(last_error().contains("powers of two"));
    assert_eq!(unsafe { lc_pipeline_new(ptr::null(), &mut h) }, LcStatus::NullPointer);
    unsafe { lc_pipeline_free(ptr::null_mut()) };
}

#[test]
fn levi_eigenvalue_of_the_sphere() {
    let (z, w) = (c(0.6, 0.0), c(0.0, 0.8));
    let point = [z, w];
    let grad = [c(0.6, 0.0), c(0.0, -0.8)];
    let hess = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let mut eig = [0.0f64];
    let s = unsafe { lc_levi_eigenvalues(2, point.as_ptr(), 0.0, grad.as_ptr(), hess.as_ptr(), eig.as_mut_ptr()) };
    assert_eq!(s, LcStatus::Ok);
    assert!((eig[0] - 1.0).abs() < 1e-12);
    // off the boundary
    let s = unsafe { lc_levi_eigenvalues(2, point.as_ptr(), 0.5, grad.as_ptr(), hess.as_ptr(), eig.as_mut_ptr()) };
    assert_eq!(s, LcStatus::Precondition);
}

#[test]
fn finite_witness_through_the_abi() {
    let pts = [c(0.0, 0.0), c(0.25, 0.0)];
    let mut pass = -1;
    assert_eq!(unsafe { lc_finite_witness_verify(pts.as_ptr(), 2, 64.0, 1e-3, &mut pass) }, LcStatus::Ok);
    assert_eq!(pass, 1);
    assert_eq!(unsafe { lc_finite_witness_verify(pts.as_ptr(), 2, 50.0, 1e-3, &mut pass) }, LcStatus::Precondition);
    assert!(last_error().contains("M >= 64"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/levicore.h")).unwrap();
    for name in [
        "LEVICORE_H",
        "typedef struct LcPipeline LcPipeline",
        "LC_STATUS_NOT_STABILIZED = 3",
        "lc_pipeline_new",
        "lc_pipeline_free",
        "lc_pipeline_run_core",
        "lc_pipeline_partition",
        "lc_levi_eigenvalues",
        "lc_finite_witness_verify",
        "lc_last_error_message",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    assert!(!unsafe { CStr::from_ptr(lc_version()) }.to_bytes().is_empty());
}

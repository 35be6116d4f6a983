use std::ffi::CStr;
use std::ptr;

use cavity_cps_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cps_last_error()) }.to_string_lossy().into_owned()
}

fn equal_params(g: f64, omega: f64) -> *mut CpsParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cps_params_new_equal(g, omega, &mut p) }, CpsStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn kraus_roundtrip_and_completeness() {
    let p = equal_params(1.0, 10.0);
    let mut dim = 0usize;
    assert_eq!(unsafe { cps_params_field_dim(p, &mut dim) }, CpsStatus::Ok);
    assert_eq!(dim, 8);

    let mut k = ptr::null_mut();
    assert_eq!(unsafe { cps_kraus_compute(p, 3.7, &mut k) }, CpsStatus::Ok);
    let mut residual = f64::NAN;
    assert_eq!(unsafe { cps_kraus_completeness(k, &mut residual) }, CpsStatus::Ok);
    assert!(residual < 1e-10, "{residual}");

    let mut buf = vec![CpsComplex::default(); 64];
    assert_eq!(unsafe { cps_kraus_get(k, 1, buf.as_mut_ptr(), buf.len()) }, CpsStatus::Ok);
    // |000⟩ never couples to the excited manifold.
    assert!((buf[0].re - 1.0).abs() < 1e-12 && buf[0].im.abs() < 1e-12);

    let mut diag = vec![0.0; 8];
    assert_eq!(unsafe { cps_k1_analytic_diag(p, 3.7, diag.as_mut_ptr(), 8) }, CpsStatus::Ok);
    for s in 0..8 {
        assert!((diag[s] - buf[s * 8 + s].re).abs() < 1e-10);
    }

    assert_eq!(unsafe { cps_kraus_get(k, 1, buf.as_mut_ptr(), 10) }, CpsStatus::BufferTooSmall);
    assert_eq!(unsafe { cps_kraus_get(k, 7, buf.as_mut_ptr(), 64) }, CpsStatus::Domain);
    assert!(!last_error().is_empty());

    unsafe {
        cps_kraus_free(k);
        cps_params_free(p);
    }
}

#[test]
fn gate_and_epr_reports() {
    let p = equal_params(1.0, 10.0);
    let mut t_int = 0.0;
    assert_eq!(unsafe { cps_interaction_time(p, 0, &mut t_int) }, CpsStatus::Ok);
    assert!((t_int - 2f64.sqrt() * std::f64::consts::PI * 10.0).abs() < 1e-12);
    let mut report = CpsGateReport::default();
    assert_eq!(unsafe { cps_gate_report(p, t_int, ptr::null(), &mut report) }, CpsStatus::Ok);
    assert!(report.fidelity > 0.999);
    assert!(report.probability > 0.98 && report.probability < 1.0);

    let mut epr = CpsEprReport::default();
    assert_eq!(unsafe { cps_epr_protocol(p, &mut epr) }, CpsStatus::Regime);
    assert!(last_error().contains("|g_a|"), "{}", last_error());
    unsafe { cps_params_free(p) };

    let q = equal_params(1.0, 1.0);
    assert_eq!(unsafe { cps_epr_protocol(q, &mut epr) }, CpsStatus::Ok);
    assert!(epr.fidelity > 0.99 && epr.probability > 0.15);
    assert_eq!(last_error(), "");
    unsafe { cps_params_free(q) };
}

#[test]
fn general_params_and_errors() {
    let g = [CpsComplex { re: 1.0, im: 0.0 }, CpsComplex { re: 0.0, im: 0.5 }, CpsComplex { re: 2.0, im: 0.0 }];
    let omega = [CpsComplex { re: 3.0, im: 1.0 }; 2];
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cps_params_new(g.as_ptr(), omega.as_ptr(), ptr::null(), 2, &mut p) }, CpsStatus::Ok);
    let mut dim = 0;
    unsafe { cps_params_field_dim(p, &mut dim) };
    assert_eq!(dim, 27);
    // Not in the equal-magnitude gate regime.
    let mut t = 0.0;
    assert_eq!(unsafe { cps_interaction_time(p, 0, &mut t) }, CpsStatus::Regime);
    unsafe { cps_params_free(p) };

    let detuned = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cps_params_new(g.as_ptr(), omega.as_ptr(), detuned.as_ptr(), 1, &mut p) }, CpsStatus::Ok);
    let mut diag = [0.0; 8];
    assert_eq!(unsafe { cps_k1_analytic_diag(p, 1.0, diag.as_mut_ptr(), 8) }, CpsStatus::Regime);
    unsafe { cps_params_free(p) };

    assert_eq!(unsafe { cps_params_new(ptr::null(), omega.as_ptr(), ptr::null(), 1, &mut p) }, CpsStatus::NullPointer);
    assert_eq!(unsafe { cps_params_new_equal(1.0, 1.0, ptr::null_mut()) }, CpsStatus::NullPointer);
    assert_eq!(unsafe { cps_params_new_equal(f64::NAN, 1.0, &mut p) }, CpsStatus::Domain);
    assert_eq!(unsafe { cps_kraus_compute(ptr::null(), 1.0, &mut ptr::null_mut()) }, CpsStatus::NullPointer);
    unsafe {
        cps_params_free(ptr::null_mut());
        cps_kraus_free(ptr::null_mut());
    }
}

#[test]
fn status_messages_cover_all_codes() {
    for code in 0..=10 {
        let msg = unsafe { CStr::from_ptr(cps_status_message(code)) };
        assert!(!msg.to_bytes().is_empty());
        assert_ne!(msg.to_str().unwrap(), "unknown status");
    }
    let msg = unsafe { CStr::from_ptr(cps_status_message(99)) };
    assert_eq!(msg.to_str().unwrap(), "unknown status");
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cavity_cps.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for sym in ["cps_params_new", "cps_kraus_get", "cps_gate_report", "CPS_STATUS_REGIME"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler available; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

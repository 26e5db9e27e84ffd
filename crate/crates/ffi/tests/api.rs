use std::ffi::{CStr, CString};
use std::ptr;

use congest_ffi::*;

fn last_error() -> String {
    let p = congest_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn scenario(name: &str) -> *mut CongestScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { congest_scenario_preset(name.as_ptr(), &mut s) }, CongestStatus::Ok);
    s
}

fn config_text(s: *mut CongestScenario) -> String {
    let mut needed = 0;
    unsafe { congest_scenario_to_config(s, ptr::null_mut(), 0, &mut needed) };
    let mut buf = vec![0u8; needed];
    assert_eq!(
        unsafe { congest_scenario_to_config(s, buf.as_mut_ptr().cast(), needed, &mut needed) },
        CongestStatus::Ok
    );
    unsafe { congest_scenario_free(s) };
    CStr::from_bytes_with_nul(&buf).unwrap().to_str().unwrap().to_owned()
}

#[test]
fn preset_round_trip_through_config_text() {
    let s = scenario("corridor-evac");
    let mut needed = 0;
    let status = unsafe { congest_scenario_to_config(s, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(status, CongestStatus::BufferTooSmall);
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(unsafe { congest_scenario_to_config(s, buf.as_mut_ptr(), needed, &mut needed) }, CongestStatus::Ok);
    let mut parsed = ptr::null_mut();
    assert_eq!(unsafe { congest_scenario_parse(buf.as_ptr(), &mut parsed) }, CongestStatus::Ok);
    unsafe {
        congest_scenario_free(parsed);
        congest_scenario_free(s);
    }
}

#[test]
fn unknown_preset_sets_the_last_error() {
    let name = CString::new("nowhere").unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { congest_scenario_preset(name.as_ptr(), &mut s) };
    assert_eq!(status, CongestStatus::InvalidParams);
    assert!(s.is_null());
    assert!(last_error().contains("unknown preset 'nowhere'"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { congest_scenario_preset(ptr::null(), &mut s) }, CongestStatus::NullPointer);
    assert!(last_error().contains("name is null"));
    assert_eq!(unsafe { congest_scenario_validate(ptr::null(), ptr::null_mut()) }, CongestStatus::NullPointer);
    assert!(unsafe { congest_simulation_time(ptr::null()) }.is_nan());
    unsafe { congest_scenario_free(ptr::null_mut()) };
}

#[test]
fn malformed_config_is_a_parse_error() {
    let text = CString::new("[grid]\nnx = many\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { congest_scenario_parse(text.as_ptr(), &mut s) }, CongestStatus::Parse);
}

#[test]
fn validation_reports_admissibility_and_hypotheses() {
    let s = scenario("two-gate-2d");
    let mut adm = CongestAdmissibility::NoGuarantee;
    assert_eq!(unsafe { congest_scenario_validate(s, &mut adm) }, CongestStatus::Ok);
    assert_eq!(adm, CongestAdmissibility::PositiveFlux);

    let c = scenario("closed-end");
    assert_eq!(unsafe { congest_scenario_set_horizon(c, 20.0) }, CongestStatus::Ok);
    assert_eq!(unsafe { congest_scenario_validate(c, &mut adm) }, CongestStatus::Ok);
    assert_eq!(adm, CongestAdmissibility::NoGuarantee);

    let text = config_text(scenario("equilibrium")).replace("rho = const(0.4)", "rho = const(1.0)");
    let text = CString::new(text).unwrap();
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { congest_scenario_parse(text.as_ptr(), &mut bad) }, CongestStatus::Ok);
    assert_eq!(unsafe { congest_scenario_validate(bad, ptr::null_mut()) }, CongestStatus::Hypothesis);
    assert!(last_error().contains("Ass2"));
    unsafe {
        congest_scenario_free(s);
        congest_scenario_free(c);
        congest_scenario_free(bad);
    }
}

#[test]
fn invalid_epsilon_leaves_the_scenario_unchanged() {
    let s = scenario("equilibrium");
    assert_eq!(unsafe { congest_scenario_set_epsilon(s, -1.0, 0.1) }, CongestStatus::InvalidParams);
    assert_eq!(unsafe { congest_scenario_set_cells(s, 0) }, CongestStatus::InvalidParams);
    assert_eq!(unsafe { congest_scenario_set_epsilon(s, 1e-3, 1e-3) }, CongestStatus::Ok);
    unsafe { congest_scenario_free(s) };
}

#[test]
fn simulation_steps_and_exposes_fields() {
    let s = scenario("proportional");
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { congest_simulation_new(s, &mut sim) }, CongestStatus::Ok);
    unsafe { congest_scenario_free(s) };

    let n = unsafe { congest_simulation_cell_count(sim) };
    assert_eq!(n, 200);
    assert_eq!(unsafe { congest_simulation_run_until(sim, 0.25) }, CongestStatus::Ok);
    assert_eq!(unsafe { congest_simulation_time(sim) }, 0.25);
    assert_eq!(unsafe { congest_simulation_run_until(sim, 10.0) }, CongestStatus::Ok);
    assert_eq!(unsafe { congest_simulation_time(sim) }, 0.5);

    let mut rho = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut rhostar = vec![0.0; n];
    unsafe {
        assert_eq!(congest_simulation_copy_field(sim, CongestField::Rho, rho.as_mut_ptr(), n), CongestStatus::Ok);
        assert_eq!(congest_simulation_copy_field(sim, CongestField::Z, z.as_mut_ptr(), n), CongestStatus::Ok);
        assert_eq!(
            congest_simulation_copy_field(sim, CongestField::Rhostar, rhostar.as_mut_ptr(), n),
            CongestStatus::Ok
        );
        assert_eq!(
            congest_simulation_copy_field(sim, CongestField::Pressure, z.as_mut_ptr(), n - 1),
            CongestStatus::BufferTooSmall
        );
    }
    for c in 0..n {
        assert!((z[c] - 0.5 * rho[c]).abs() <= 1e-12);
        assert_eq!(rhostar[c], 2.0);
    }

    let mut summary = CongestSummary::default();
    assert_eq!(unsafe { congest_simulation_summary(sim, &mut summary) }, CongestStatus::Ok);
    assert_eq!(summary.time, 0.5);
    assert!(summary.steps > 0);
    assert!(summary.max_z < 1.0);
    assert!(summary.max_rho_closure <= 1e-12);
    unsafe { congest_simulation_free(sim) };
}

#[test]
fn run_to_dir_writes_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("equilibrium");
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { congest_run_to_dir(s, path.as_ptr()) }, CongestStatus::Ok);
    assert!(dir.path().join("diagnostics.csv").exists());
    std::fs::write(dir.path().join(".congest.lock"), "").unwrap();
    assert_eq!(unsafe { congest_run_to_dir(s, path.as_ptr()) }, CongestStatus::Io);
    unsafe { congest_scenario_free(s) };
}

#[test]
fn pressure_functions() {
    let p = CongestPressureParams { epsilon: 0.1, delta: 0.0, alpha: 2.0, beta: 3.0, gamma: 6.0 };
    let mut v = 0.0;
    assert_eq!(unsafe { congest_pressure(0.5, &p, &mut v) }, CongestStatus::Ok);
    // 0.1 * 0.25 / 0.125
    assert!((v - 0.2).abs() < 1e-15);
    assert_eq!(unsafe { congest_pressure(1.0, &p, &mut v) }, CongestStatus::Domain);
    assert_eq!(unsafe { congest_pressure_potential(0.5, &p, &mut v) }, CongestStatus::Ok);
    // 0.1 * 0.5 * ((1 - 0.5)^-2 - 1) / 2
    assert!((v - 0.075).abs() < 1e-15);

    let truncated = CongestPressureParams { delta: 0.1, ..p };
    assert_eq!(unsafe { congest_pressure(1.2, &truncated, &mut v) }, CongestStatus::Ok);
    // pi_eps(0.9) + 0.1 * 0.3^6
    assert!((v - (81.0 + 0.1 * 0.3f64.powi(6))).abs() < 1e-11);

    let bad = CongestPressureParams { alpha: 0.5, ..p };
    assert_eq!(unsafe { congest_pressure(0.5, &bad, &mut v) }, CongestStatus::InvalidParams);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(congest_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

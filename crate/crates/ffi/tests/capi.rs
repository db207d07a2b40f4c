use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pmcf_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    unsafe {
        pmcf_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn disk(h: f64) -> *mut PmcfMesh {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pmcf_mesh_disk(1.0, h, &mut m) }, PmcfStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn mesh_queries() {
    let m = disk(0.25);
    let (mut nv, mut nt, mut nd, mut h, mut c) = (0usize, 0usize, 0usize, 0.0, 0.0);
    unsafe {
        assert_eq!(pmcf_mesh_vertex_count(m, &mut nv), PmcfStatus::Ok);
        assert_eq!(pmcf_mesh_triangle_count(m, &mut nt), PmcfStatus::Ok);
        assert_eq!(pmcf_mesh_dof_count(m, &mut nd), PmcfStatus::Ok);
        assert_eq!(pmcf_mesh_h(m, &mut h), PmcfStatus::Ok);
        assert_eq!(pmcf_mesh_sandwich_constant(m, &mut c), PmcfStatus::Ok);
        pmcf_mesh_free(m);
    }
    // Euler: dofs = vertices + edges, edges = vertices + triangles - 1
    assert_eq!(nd, nv + (nv + nt - 1));
    assert!(h > 0.0 && h <= 0.25);
    // boundary edges are at most h long, so the sagitta bound is h^2 / 8
    assert!(c > 0.0 && c <= 0.125, "{c}");
}

#[test]
fn solve_and_compare_with_profile() {
    let m = disk(0.2);
    let schedule = [2.0, 1.0, 0.5];
    let mut sol = ptr::null_mut();
    let mut prof = ptr::null_mut();
    let mut rep = PmcfSolveReport {
        epsilon: 0.0,
        h: 0.0,
        k: 0.0,
        iterations: 0,
        final_residual: 0.0,
        contraction_max: 0.0,
        lambda_min: 0.0,
        lambda_max: 0.0,
    };
    let (mut n, mut centre, mut v0, mut est) = (0usize, 0.0, 0.0, 0.0);
    unsafe {
        let opts = pmcf_solve_options_default();
        assert_eq!(
            pmcf_solve(m, 2.0, schedule.as_ptr(), schedule.len(), &opts, &mut sol),
            PmcfStatus::Ok
        );
        assert_eq!(pmcf_solution_report(sol, &mut rep), PmcfStatus::Ok);
        assert_eq!(pmcf_solution_dof_count(sol, &mut n), PmcfStatus::Ok);
        let mut coeffs = vec![f64::NAN; n];
        assert_eq!(
            pmcf_solution_coefficients(sol, coeffs.as_mut_ptr(), n - 1),
            PmcfStatus::BufferTooSmall
        );
        assert!(coeffs.iter().all(|c| c.is_nan()), "failed copy leaves the buffer alone");
        assert_eq!(pmcf_solution_coefficients(sol, coeffs.as_mut_ptr(), n), PmcfStatus::Ok);
        assert!(coeffs.iter().all(|c| c.is_finite() && *c >= -1e-9));
        assert_eq!(pmcf_solution_evaluate(sol, 0.0, 0.0, &mut centre), PmcfStatus::Ok);
        assert_eq!(coeffs[0], centre, "vertex 0 is the centre of the polar mesh");
        let mut outside = f64::NAN;
        assert_eq!(
            pmcf_solution_evaluate(sol, 2.0, 0.0, &mut outside),
            PmcfStatus::OutsideDomain
        );
        assert!(outside.is_nan());

        assert_eq!(pmcf_profile_solve(2.0, 0.5, 1.0, 1e-10, &mut prof), PmcfStatus::Ok);
        assert_eq!(pmcf_profile_value(prof, 0.0, &mut v0), PmcfStatus::Ok);
        assert_eq!(pmcf_profile_error_estimate(prof, &mut est), PmcfStatus::Ok);
        assert_eq!(pmcf_profile_value(prof, 1.5, &mut est), PmcfStatus::OutsideDomain);
        pmcf_profile_free(prof);
        pmcf_solution_free(sol);
        pmcf_mesh_free(m);
    }
    assert_eq!(rep.epsilon, 0.5);
    assert!(rep.final_residual <= 1e-10);
    assert!(rep.lambda_min > 0.0 && rep.lambda_max >= rep.lambda_min);
    assert!((centre - v0).abs() < 5e-3, "{centre} vs {v0}");
}

#[test]
fn rates_and_exact_solution() {
    let (mut b1, mut b2) = (0.0, 0.0);
    let mut t = 0.0;
    let mut rates = std::mem::MaybeUninit::<PmcfRates>::uninit();
    unsafe {
        assert_eq!(
            pmcf_beta_exponents(2.0, 14.0 / 13.0, 7.0, 2.0 / 13.0, &mut b1, &mut b2),
            PmcfStatus::Ok
        );
        assert_eq!(pmcf_rates_optimize(2.0, 7.0, 1e-3, rates.as_mut_ptr()), PmcfStatus::Ok);
        assert_eq!(pmcf_exact_disk_arrival_time(2.0, 1.0, 0.0, 0.0, &mut t), PmcfStatus::Ok);
    }
    let rates = unsafe { rates.assume_init() };
    assert!((b1 - 9.0 / 26.0).abs() < 1e-12 && (b2 - 9.0 / 26.0).abs() < 1e-12);
    assert!(rates.r > 0.14 && rates.r < 2.0 / 13.0);
    assert!(rates.gamma_gap > 0.0 && rates.beta_gap > 0.0 && rates.r_gap > 0.0);
    // k = 2: the circle of radius R vanishes at R^3 / 3
    assert!((t - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn errors_are_reported_per_call() {
    let mut m = ptr::null_mut();
    let mut x = 0.0;
    unsafe {
        assert_eq!(pmcf_mesh_disk(1.0, 5.0, &mut m), PmcfStatus::Mesh);
        assert!(m.is_null(), "out-pointer untouched on failure");
        assert!(last_error().contains("resolve the boundary"), "{}", last_error());
        assert_eq!(pmcf_mesh_disk(1.0, 0.5, ptr::null_mut()), PmcfStatus::NullPointer);
        assert_eq!(pmcf_mesh_h(ptr::null(), &mut x), PmcfStatus::NullPointer);
        assert_eq!(
            pmcf_rates_optimize(0.5, 7.0, 1e-3, ptr::null_mut()),
            PmcfStatus::NullPointer
        );
        let mut rates = std::mem::MaybeUninit::<PmcfRates>::uninit();
        assert_ne!(pmcf_rates_optimize(0.5, 7.0, 1e-3, rates.as_mut_ptr()), PmcfStatus::Ok);
        assert_eq!(
            pmcf_exact_disk_arrival_time(2.0, 1.0, 3.0, 0.0, &mut x),
            PmcfStatus::OutsideDomain
        );
        assert_eq!(
            pmcf_beta_exponents(2.0, 1.0, 7.0, 0.1, ptr::null_mut(), &mut x),
            PmcfStatus::NullPointer
        );

        let md = disk(0.4);
        let mut sol = ptr::null_mut();
        assert_eq!(
            pmcf_solve(md, 2.0, ptr::null(), 0, ptr::null(), &mut sol),
            PmcfStatus::InvalidParameter
        );
        let opts = PmcfSolveOptions {
            max_iter: 1,
            ..pmcf_solve_options_default()
        };
        let sched = [0.1];
        assert_eq!(
            pmcf_solve(md, 2.0, sched.as_ptr(), 1, &opts, &mut sol),
            PmcfStatus::NoConvergence
        );
        assert!(last_error().contains("stage 0"), "{}", last_error());
        pmcf_mesh_free(md);

        // a successful call clears the message
        assert_eq!(pmcf_exact_disk_arrival_time(2.0, 1.0, 0.0, 0.0, &mut x), PmcfStatus::Ok);
        assert_eq!(pmcf_last_error_message(ptr::null_mut(), 0), 0);
        pmcf_mesh_free(ptr::null_mut());
        pmcf_solution_free(ptr::null_mut());
        pmcf_profile_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_message_is_terminated() {
    let mut m = ptr::null_mut();
    let mut buf = [1 as std::ffi::c_char; 8];
    unsafe {
        pmcf_mesh_disk(-1.0, 0.1, &mut m);
        let full = pmcf_last_error_message(buf.as_mut_ptr(), buf.len());
        assert!(full > 7);
        assert_eq!(buf[7], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);
    }
}

#[test]
fn status_names_are_static_strings() {
    for s in [
        PmcfStatus::Ok,
        PmcfStatus::Mesh,
        PmcfStatus::Panic,
        PmcfStatus::BufferTooSmall,
    ] {
        let name = unsafe { CStr::from_ptr(pmcf_status_name(s)) };
        assert!(!name.to_bytes().is_empty());
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/pmcf.h");
    assert!(header.exists(), "build script writes the header");
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libpmcf_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("eps 0.5 "));
}

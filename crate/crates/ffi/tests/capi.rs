use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use lowrank_recovery_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lr_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut LrMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { lr_matrix_new(rows, cols, data.as_ptr(), &mut m) },
        LrStatus::Ok
    );
    m
}

fn read(m: *const LrMatrix) -> Vec<f64> {
    let len = unsafe { lr_matrix_rows(m) * lr_matrix_cols(m) };
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { lr_matrix_copy_data(m, buf.as_mut_ptr(), len) }, LrStatus::Ok);
    buf
}

#[test]
fn matrix_round_trip_and_norms() {
    let m = matrix(2, 2, &[3.0, 0.0, 0.0, 4.0]);
    assert_eq!(unsafe { (lr_matrix_rows(m), lr_matrix_cols(m)) }, (2, 2));
    assert_eq!(read(m), vec![3.0, 0.0, 0.0, 4.0]);
    let mut v = 0.0;
    assert_eq!(
        unsafe { lr_matrix_norm(m, LrNormKind::Frobenius, &mut v) },
        LrStatus::Ok
    );
    assert!((v - 5.0).abs() < 1e-14);
    assert_eq!(unsafe { lr_matrix_norm(m, LrNormKind::Nuclear, &mut v) }, LrStatus::Ok);
    assert!((v - 7.0).abs() < 1e-12);
    let mut small = [0.0; 3];
    assert_eq!(
        unsafe { lr_matrix_copy_data(m, small.as_mut_ptr(), 3) },
        LrStatus::DimensionMismatch
    );
    assert!(last_error().contains("3"));
    unsafe { lr_matrix_free(m) };
}

#[test]
fn invalid_inputs_report_status() {
    let mut m = ptr::null_mut();
    let bad = [1.0, f64::NAN];
    assert_eq!(
        unsafe { lr_matrix_new(1, 2, bad.as_ptr(), &mut m) },
        LrStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { lr_matrix_new(1, 2, ptr::null(), ptr::null_mut()) },
        LrStatus::NullPointer
    );
    assert!(last_error().contains("out"));

    let rows = [0usize, 0];
    let cols = [1usize, 1];
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { lr_support_new(2, 2, rows.as_ptr(), cols.as_ptr(), 2, &mut s) },
        LrStatus::InvalidArgument
    );
    assert_eq!(unsafe { lr_matrix_rows(ptr::null()) }, 0);
    unsafe {
        lr_matrix_free(ptr::null_mut());
        lr_support_free(ptr::null_mut());
    }
}

#[test]
fn mc_bound_and_solve_through_handles() {
    // Rank one, fully observed.
    let u = [1.0, 2.0, -1.0];
    let v = [0.5, -1.0, 2.0, 1.0];
    let data: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    let obs = matrix(3, 4, &data);
    let rows: Vec<usize> = (0..12).map(|k| k / 4).collect();
    let cols: Vec<usize> = (0..12).map(|k| k % 4).collect();
    let mut omega = ptr::null_mut();
    assert_eq!(
        unsafe { lr_support_new(3, 4, rows.as_ptr(), cols.as_ptr(), 12, &mut omega) },
        LrStatus::Ok
    );
    assert_eq!(unsafe { lr_support_len(omega) }, 12);

    let mut tau = 0.0;
    assert_eq!(unsafe { lr_mc_tau_bound_data(obs, omega, &mut tau) }, LrStatus::Ok);
    let fro = data.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((tau - 4.0 * fro).abs() < 1e-12);

    let mut x = ptr::null_mut();
    let mut info = LrSolveInfo::default();
    assert_eq!(
        unsafe { lr_mc_solve(obs, omega, tau, 0, 1e-12, &mut x, &mut info) },
        LrStatus::Ok
    );
    assert!(info.converged);
    assert_eq!(info.final_rank, 1);
    let err: f64 = read(x)
        .iter()
        .zip(&data)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(err <= 1e-8 * fro);

    let mut partial = ptr::null_mut();
    assert_eq!(
        unsafe { lr_mc_solve(obs, omega, tau, 1, 0.0, &mut partial, ptr::null_mut()) },
        LrStatus::NotConverged
    );
    assert!(!partial.is_null());
    assert!(last_error().contains("1 iterations"));
    assert_eq!(
        unsafe { lr_mc_solve(obs, omega, -1.0, 0, 0.0, &mut x, ptr::null_mut()) },
        LrStatus::InvalidArgument
    );

    unsafe {
        lr_matrix_free(partial);
        lr_matrix_free(x);
        lr_matrix_free(obs);
        lr_support_free(omega);
    }
}

#[test]
fn rpca_entry_points() {
    assert!((lr_default_lambda(400, 400) - 0.05).abs() < 1e-15);
    let d = matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let mut tau = 0.0;
    assert_eq!(
        unsafe { lr_rpca_tau_bound_data(d, 1.0, &mut tau) },
        LrStatus::InvalidArgument
    );
    assert_eq!(unsafe { lr_rpca_tau_bound_data(d, 0.5, &mut tau) }, LrStatus::Ok);

    let (mut l, mut s) = (ptr::null_mut(), ptr::null_mut());
    let mut info = LrSolveInfo::default();
    let status = unsafe { lr_rpca_solve(d, 0.5, tau, 0, 0.0, &mut l, &mut s, &mut info) };
    assert_eq!(status, LrStatus::Ok, "{}", last_error());
    let sum: Vec<f64> = read(l).iter().zip(read(s)).map(|(a, b)| a + b).collect();
    assert!((sum[0] - 1.0).abs() < 1e-6);

    let (mut eps, mut t) = (0.0, 0.0);
    assert_eq!(
        unsafe { lr_optimal_epsilon(0.0, 2.0, 0.3, &mut eps, &mut t) },
        LrStatus::Ok
    );
    assert!((eps - 0.5).abs() < 1e-15);
    assert_eq!(
        unsafe { lr_optimal_epsilon(0.0, 0.0, 0.3, &mut eps, ptr::null_mut()) },
        LrStatus::InvalidArgument
    );
    unsafe {
        lr_matrix_free(l);
        lr_matrix_free(s);
        lr_matrix_free(d);
    }
}

#[test]
fn header_declares_every_entry_point_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lowrank_recovery.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "lr_matrix_new",
        "lr_matrix_free",
        "lr_matrix_copy_data",
        "lr_support_new",
        "lr_mc_tau_bound_data",
        "lr_mc_solve",
        "lr_rpca_solve",
        "lr_rpca_tau_bound_data",
        "lr_optimal_epsilon",
        "lr_last_error_message",
        "typedef struct LrMatrix LrMatrix",
        "LR_STATUS_NOT_CONVERGED",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // A C compiler is optional in the build environment.
    if let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    {
        assert!(status.success(), "header does not compile as C99");
    }
}

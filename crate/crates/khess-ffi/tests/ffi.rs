//! Exercises the C entry points through the Rust rlib: status codes, null
//! handling, the opaque solution handle, and the last-error channel.

use khess_ffi::*;

#[test]
fn sigma_entry_points() {
    let values = [3.0, 2.0, 1.0];
    let mut out = 0.0;
    unsafe {
        assert_eq!(khess_sigma(values.as_ptr(), 3, 2, &mut out), KhessStatus::Ok);
        assert_eq!(out, 11.0);
        assert_eq!(
            khess_sigma_d1(values.as_ptr(), 3, 2, 0, &mut out),
            KhessStatus::Ok
        );
        assert_eq!(out, 3.0);
        assert_eq!(
            khess_sigma_d2(values.as_ptr(), 3, 2, 0, 1, &mut out),
            KhessStatus::Ok
        );
        assert_eq!(out, 1.0);
        assert_eq!(
            khess_sigma(values.as_ptr(), 3, 9, &mut out),
            KhessStatus::DomainError
        );
        assert!(!khess_last_error_message().is_null());
        assert_eq!(
            khess_sigma(std::ptr::null(), 3, 1, &mut out),
            KhessStatus::InvalidArgument
        );
        assert_eq!(
            khess_sigma(values.as_ptr(), 3, 1, std::ptr::null_mut()),
            KhessStatus::InvalidArgument
        );
    }
}

#[test]
fn cone_and_gap_entry_points() {
    let values = [1.0, 1.0, -0.5];
    let mut level = 99usize;
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            khess_cone_max_level(values.as_ptr(), 3, &mut level),
            KhessStatus::Ok
        );
        assert_eq!(level, 1);
        assert_eq!(khess_shift_bound(1.0, 3, 2, &mut out), KhessStatus::Ok);
        assert_eq!(out, 3.0);
        assert_eq!(
            khess_shift_bound(-1.0, 3, 2, &mut out),
            KhessStatus::DomainError
        );
        let iso = [1.0, 1.0, 1.0];
        assert_eq!(
            khess_newton_maclaurin_gap(iso.as_ptr(), 3, 2, &mut out),
            KhessStatus::Ok
        );
        assert!(out.abs() < 1e-12);
        assert_eq!(
            khess_newton_maclaurin_gap(iso.as_ptr(), 3, 1, &mut out),
            KhessStatus::DomainError
        );
    }
}

#[test]
fn solve_handle_round_trip() {
    let mut handle: *mut KhessSolution = std::ptr::null_mut();
    unsafe {
        let status = khess_solve_box_dirichlet(2, 0.0, 1.0, 17, 2, 1.0, 1e-10, 60, &mut handle);
        assert_eq!(status, KhessStatus::Ok);
        assert!(!handle.is_null());
        let n = khess_solution_node_count(handle);
        assert_eq!(n, 17 * 17);
        assert!(khess_solution_final_residual(handle) <= 1e-10);
        assert!(khess_solution_iterations(handle) > 0);

        let mut values = vec![0.0; n];
        assert_eq!(
            khess_solution_values(handle, values.as_mut_ptr(), n),
            KhessStatus::Ok
        );
        assert!(values.iter().all(|v| *v <= 1e-12));
        assert_eq!(
            khess_solution_values(handle, values.as_mut_ptr(), n - 1),
            KhessStatus::InvalidArgument
        );

        let dir = tempfile::tempdir().unwrap();
        let path =
            std::ffi::CString::new(dir.path().join("u.field").to_str().unwrap().to_owned())
                .unwrap();
        assert_eq!(
            khess_solution_write_field(handle, path.as_ptr()),
            KhessStatus::Ok
        );
        assert!(dir.path().join("u.field").exists());
        khess_solution_free(handle);
        khess_solution_free(std::ptr::null_mut());
    }
}

#[test]
fn solve_rejects_bad_arguments() {
    let mut handle: *mut KhessSolution = std::ptr::null_mut();
    unsafe {
        assert_eq!(
            khess_solve_box_dirichlet(4, 0.0, 1.0, 17, 2, 1.0, 1e-10, 60, &mut handle),
            KhessStatus::DomainError
        );
        assert!(handle.is_null());
        assert_eq!(
            khess_solve_box_dirichlet(2, 0.0, 1.0, 17, 2, -1.0, 1e-10, 60, &mut handle),
            KhessStatus::DomainError
        );
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/khess.h"
    ))
    .expect("cbindgen header exists");
    for symbol in [
        "khess_sigma",
        "khess_sigma_d1",
        "khess_sigma_d2",
        "khess_cone_max_level",
        "khess_shift_bound",
        "khess_newton_maclaurin_gap",
        "khess_solve_box_dirichlet",
        "khess_solution_values",
        "khess_solution_write_field",
        "khess_solution_free",
        "khess_last_error_message",
        "KHESS_STATUS_OK",
        "typedef struct KhessSolution KhessSolution",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}

use std::ffi::{CStr, CString};
use std::ptr;

use chargeflow_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        cf_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn hermite_certificate_through_handle() {
    let indices = [2usize, 4, 6];
    let mut cert = ptr::null_mut();
    unsafe {
        assert_eq!(cf_certificate_hermite(indices.as_ptr(), 3, -2, 1, &mut cert), CfStatus::Ok);
        let (mut p, mut q) = (0, 0);
        assert_eq!(cf_certificate_degrees(cert, &mut p, &mut q), CfStatus::Ok);
        assert_eq!((p, q), (9, 5));
        assert_eq!(cf_certificate_is_exact(cert), 1);

        let n = cf_certificate_site_count(cert);
        let mut net = 0;
        for i in 0..n {
            let (mut re, mut im, mut c) = (0.0, 0.0, 0);
            assert_eq!(cf_certificate_site(cert, i, &mut re, &mut im, &mut c), CfStatus::Ok);
            net += c;
        }
        assert_eq!(net, 4);
        let (mut re, mut im, mut c) = (0.0, 0.0, 0);
        assert_eq!(cf_certificate_site(cert, n, &mut re, &mut im, &mut c), CfStatus::OutOfRange);

        let mut needed = 0;
        assert_eq!(
            cf_certificate_to_json(cert, ptr::null_mut(), 0, &mut needed),
            CfStatus::BufferTooSmall
        );
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(cf_certificate_to_json(cert, buf.as_mut_ptr(), needed, &mut needed), CfStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(cf_certificate_from_json(buf.as_ptr(), &mut again), CfStatus::Ok);
        assert_eq!(cf_certificate_is_exact(again), 1);
        cf_certificate_free(again);
        cf_certificate_free(cert);
    }
}

#[test]
fn recipe_json_and_errors() {
    let mut cert = ptr::null_mut();
    let good = CString::new(r#"{"kind":"adler_moser","k":2,"ts":["0","1/2"]}"#).unwrap();
    let bad_k = CString::new(r#"{"kind":"laguerre_wronskian","indices":[1,2],"b":"1"}"#).unwrap();
    let junk = CString::new("{").unwrap();
    unsafe {
        assert_eq!(cf_certificate_from_recipe(good.as_ptr(), &mut cert), CfStatus::Ok);
        let (mut p, mut q) = (0, 0);
        cf_certificate_degrees(cert, &mut p, &mut q);
        assert_eq!((p, q), (6, 3));
        cf_certificate_free(cert);

        assert_eq!(cf_certificate_from_recipe(bad_k.as_ptr(), &mut cert), CfStatus::InvalidInput);
        assert!(last_error().contains("multiple of 4"));
        assert_eq!(cf_certificate_from_recipe(junk.as_ptr(), &mut cert), CfStatus::InvalidInput);
        assert_eq!(cf_certificate_from_recipe(ptr::null(), &mut cert), CfStatus::NullPointer);
        assert_eq!(cf_certificate_hermite([1usize].as_ptr(), 1, 1, 0, &mut cert), CfStatus::InvalidInput);
        cf_certificate_free(ptr::null_mut());
    }
}

#[test]
fn rational_omega_returns_after_one_period() {
    let re = [1.0, -0.5, 0.3];
    let im = [0.0, 0.8, -0.9];
    let t = 2.0 * std::f64::consts::PI;
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(
            cf_simulate_rational_omega(1.0, 1.0, 2, 1, re.as_ptr(), im.as_ptr(), t, 1e-11, 1e-13, 64, &mut traj),
            CfStatus::Ok
        );
        assert_eq!(cf_trajectory_len(traj), 65);
        assert_eq!(cf_trajectory_particles(traj), 3);
        // Λ = 1 with rational ω: the multiset of positions returns at 2π/ω.
        let mut end = Vec::new();
        for p in 0..3 {
            let (mut tt, mut x, mut y) = (0.0, 0.0, 0.0);
            assert_eq!(cf_trajectory_sample(traj, 64, p, &mut tt, &mut x, &mut y), CfStatus::Ok);
            assert!((tt - t).abs() < 1e-12);
            end.push((x, y));
        }
        for (a, b) in re.iter().zip(&im) {
            let best = end.iter().map(|(x, y)| (x - a).hypot(y - b)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "no return for ({a}, {b}): {best}");
        }
        let (mut tt, mut x, mut y) = (0.0, 0.0, 0.0);
        assert_eq!(cf_trajectory_sample(traj, 65, 0, &mut tt, &mut x, &mut y), CfStatus::OutOfRange);
        cf_trajectory_free(traj);

        assert_eq!(
            cf_simulate_rational_omega(1.0, 1.0, 1, 0, re.as_ptr(), im.as_ptr(), -1.0, 1e-9, 1e-9, 8, &mut traj),
            CfStatus::InvalidInput
        );
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(cf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chargeflow.h")).unwrap();
    for sym in ["cf_certificate_hermite", "cf_simulate_rational_omega", "CfCertificate", "CF_STATUS_OK"] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"chargeflow.h\"\nint main(void) { CfCertificate *c = 0; size_t n = cf_certificate_site_count(c); return (int)n; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler found; skipping"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("chargeflow-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

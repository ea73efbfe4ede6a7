use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use symentropy_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    unsafe {
        se_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn point(e: &[f64]) -> *mut SePoint {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { se_point_new(e.as_ptr(), e.len(), &mut p) }, SeStatus::Ok);
    p
}

#[test]
fn closed_form_values() {
    let p = point(&[1.0, 0.25]);
    let (mut h, mut q, mut d) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(se_entropy(p, ptr::null(), &mut h), SeStatus::Ok);
        assert_eq!(se_subentropy(p, ptr::null(), &mut q), SeStatus::Ok);
        assert_eq!(se_dh(p, [1usize, 1].as_ptr(), 2, ptr::null(), &mut d), SeStatus::Ok);
        se_point_free(p);
    }
    assert!((h - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((q - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-12);
    assert!((d + 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn explicit_config_and_probabilities() {
    let mut cfg = ptr::null_mut();
    let mut p = ptr::null_mut();
    let x = [0.6, 0.4];
    let (mut h, mut hd, mut qd) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(se_config_new(1e-13, 1e-15, 2000, &mut cfg), SeStatus::Ok);
        assert_eq!(se_point_from_probabilities(x.as_ptr(), 2, &mut p), SeStatus::Ok);
        assert_eq!(se_point_dim(p), 2);
        assert_eq!(se_entropy(p, cfg, &mut h), SeStatus::Ok);
        assert_eq!(se_entropy_direct(x.as_ptr(), 2, &mut hd, &mut qd), SeStatus::Ok);
        se_point_free(p);
        se_config_free(cfg);
    }
    assert!((h - hd).abs() < 1e-12);
    assert!((qd - 0.186_453_537_279_459_2).abs() < 1e-12);
}

#[test]
fn divergence_reports_signed_infinity() {
    let p = point(&[1.0, 0.0]);
    let mut d = 0.0;
    let status = unsafe { se_dh(p, [2usize].as_ptr(), 1, ptr::null(), &mut d) };
    unsafe { se_point_free(p) };
    assert_eq!(status, SeStatus::Divergent);
    assert_eq!(d, f64::INFINITY);
    assert!(last_error().contains("diverges"));
}

#[test]
fn errors_and_null_handles() {
    let mut p = ptr::null_mut();
    let bad = [1.0, -0.5];
    unsafe {
        assert_eq!(se_point_new(bad.as_ptr(), 2, &mut p), SeStatus::Domain);
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        let mut h = 0.0;
        assert_eq!(se_entropy(ptr::null(), ptr::null(), &mut h), SeStatus::NullPointer);
        assert_eq!(se_point_dim(ptr::null()), 0);
        se_point_free(ptr::null_mut());

        let good = point(&[1.0, 0.25]);
        assert_eq!(se_entropy(good, ptr::null(), ptr::null_mut()), SeStatus::NullPointer);
        assert_eq!(se_dh(good, [3usize].as_ptr(), 1, ptr::null(), &mut h), SeStatus::Domain);
        assert_eq!(se_entropy(good, ptr::null(), &mut h), SeStatus::Ok);
        assert_eq!(se_last_error_message(ptr::null_mut(), 0), 0);
        se_point_free(good);
    }
}

#[test]
fn error_message_truncates() {
    let mut b = SeUpperBounds::default();
    assert_eq!(unsafe { se_upper_bounds(1.0, 0.3, 2, &mut b) }, SeStatus::Domain);
    let full = unsafe { se_last_error_message(ptr::null_mut(), 0) };
    let mut buf = [1 as std::ffi::c_char; 8];
    let n = unsafe { se_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full);
    assert_eq!(buf[7], 0);
}

#[test]
fn bounds_and_haar() {
    let mut b = SeUpperBounds::default();
    assert_eq!(unsafe { se_upper_bounds(1.0, 0.24, 2, &mut b) }, SeStatus::Ok);
    assert!((b.a - 0.4).abs() < 1e-12 && (b.b - 0.6).abs() < 1e-12);

    let eigs = [0.5, 0.5];
    let mut est = SeHaarEstimate::default();
    assert_eq!(unsafe { se_haar_estimate(eigs.as_ptr(), 2, 100, 0, &mut est) }, SeStatus::Ok);
    assert_eq!(est.std_error, 0.0);
    assert!((est.implied_q - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-12);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(se_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/capi-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libsymentropy_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out_dir = std::env::temp_dir().join(format!("symentropy-capi-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("0.693147180560"));
    std::fs::remove_dir_all(&out_dir).unwrap();
}

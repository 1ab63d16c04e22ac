use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use toruslab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        tl_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn count_matches_known_band() {
    let mut n = 0u64;
    assert_eq!(unsafe { tl_count_band(2, 5.0, 0.1, &mut n) }, TlStatus::Ok);
    assert_eq!(n, 20);
    assert_eq!(unsafe { tl_count_band(0, 5.0, 0.1, &mut n) }, TlStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { tl_count_band(2, 5.0, 0.1, ptr::null_mut()) }, TlStatus::NullPointer);
}

#[test]
fn cluster_handle_roundtrip() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tl_cluster_new(2, 5.0, 0.1, &mut c) }, TlStatus::Ok);
    assert!(!c.is_null());
    unsafe {
        assert_eq!(tl_cluster_len(c), 20);
        assert_eq!(tl_cluster_dim(c), 2);
        for i in 0..20 {
            let mut k = [0i64; 2];
            assert_eq!(tl_cluster_frequency(c, i, k.as_mut_ptr(), 2), TlStatus::Ok);
            let r2 = k[0] * k[0] + k[1] * k[1];
            assert!(r2 == 25 || r2 == 26, "{k:?}");
        }
        let mut k = [0i64; 3];
        assert_eq!(tl_cluster_frequency(c, 0, k.as_mut_ptr(), 3), TlStatus::InvalidArgument);
        assert!(last_error().contains("shape"));
        assert_eq!(tl_cluster_frequency(c, 20, k.as_mut_ptr(), 2), TlStatus::InvalidArgument);
        tl_cluster_free(c);
        tl_cluster_free(ptr::null_mut());
        assert_eq!(tl_cluster_len(ptr::null()), 0);
    }
}

#[test]
fn schatten_capacity_code() {
    let mut c = ptr::null_mut();
    let mut v = 0.0;
    unsafe {
        assert_eq!(tl_cluster_new(3, 40.0, 1.0, &mut c), TlStatus::Ok);
        assert!(tl_cluster_len(c) > 4000);
        assert_eq!(tl_cluster_schatten_norm(c, 3, 2, 0, 3.0, &mut v), TlStatus::CapacityExceeded);
        tl_cluster_free(c);
        assert_eq!(tl_cluster_new(2, 5.0, 0.1, &mut c), TlStatus::Ok);
        let (mut s1, mut s3) = (0.0, 0.0);
        assert_eq!(tl_cluster_schatten_norm(c, 3, 2, 7, 1.0, &mut s1), TlStatus::Ok);
        assert_eq!(tl_cluster_schatten_norm(c, 3, 2, 7, 3.0, &mut s3), TlStatus::Ok);
        assert!(s3 > 0.0 && s3 <= s1);
        assert_eq!(tl_cluster_schatten_norm(c, 0, 2, 7, 1.0, &mut v), TlStatus::InvalidArgument);
        tl_cluster_free(c);
    }
}

#[test]
fn mollifier_and_kernel() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(tl_mollifier_new(-1.0, &mut m), TlStatus::InvalidArgument);
        assert!(m.is_null());
        assert_eq!(tl_mollifier_new(1.0, &mut m), TlStatus::Ok);
        assert!((tl_mollifier_a(m, 0.0) - 1.0).abs() < 1e-12);
        assert_eq!(tl_mollifier_a_hat(m, 1.5), 0.0);
        assert!(tl_mollifier_a(ptr::null(), 0.0).is_nan());
        let mut r = TlKernelReport::default();
        assert_eq!(tl_kernel_diagonal(m, 2, 50.0, 0.5, &mut r), TlStatus::Ok);
        assert!(r.total > 0.0);
        assert!((r.total - r.total_reassembled).abs() < 1e-8 * r.total);
        assert_eq!(tl_kernel_diagonal(m, 2, 50.0, 2.0, &mut r), TlStatus::InvalidArgument);
        tl_mollifier_free(m);
    }
}

#[test]
fn exponent_values() {
    let (mut s, mut a) = (0.0, 0.0);
    unsafe {
        assert_eq!(tl_exponents(2, 6.0, &mut s, &mut a), TlStatus::Ok);
        assert!((s - 1.0 / 6.0).abs() < 1e-14 && (a - 1.5).abs() < 1e-14);
        assert_eq!(tl_exponents(2, f64::INFINITY, &mut s, &mut a), TlStatus::Ok);
        assert!((s - 0.5).abs() < 1e-14 && a.is_infinite());
        assert_eq!(tl_exponents(2, 1.0, &mut s, &mut a), TlStatus::InvalidArgument);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(tl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_symbol_and_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/toruslab.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
        }
    }
    let Ok(cc) = which_cc() else { return };
    let tmp = std::env::temp_dir().join(format!("toruslab_hdr_{}.c", std::process::id()));
    std::fs::write(
        &tmp,
        "#include \"toruslab.h\"\nint main(void) { uint64_t n; return (int)tl_count_band(2, 5.0, 0.1, &n); }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(&tmp)
        .status()
        .unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use nof_lab_ffi::*;

fn last_error() -> String {
    let p = nof_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn handles_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(nof_matrix_random(3, 16, 2, 7, &mut m), NofStatus::Ok);
        let (mut k, mut n, mut d) = (0, 0, 0);
        assert_eq!(nof_matrix_dims(m, &mut k, &mut n, &mut d), NofStatus::Ok);
        assert_eq!((k, n, d), (16, 2, 3));
        let mut v = 9;
        assert_eq!(nof_matrix_get(m, 15, 1, &mut v), NofStatus::Ok);
        assert!(v < 3);

        let name = CString::new("maj-maj").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(nof_spec_named(name.as_ptr(), 3, 16, 2, &mut s), NofStatus::Ok);
        let (mut direct, mut proto, mut bits) = (false, false, 0u64);
        assert_eq!(nof_direct_eval(s, m, &mut direct), NofStatus::Ok);
        assert_eq!(nof_eqsolve_eval(s, m, true, &mut proto, &mut bits), NofStatus::Ok);
        assert_eq!(direct, proto);
        // 16 · C(18,2) · ⌈log₂ 3⌉
        assert_eq!(bits, 16 * 153 * 2);
        nof_spec_free(s);
        nof_matrix_free(m);
    }
}

#[test]
fn full_protocol_matches_direct() {
    unsafe {
        for seed in 0..5 {
            let (mut m, mut s) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(nof_matrix_random(2, 16, 2, seed, &mut m), NofStatus::Ok);
            assert_eq!(nof_spec_random(2, 16, 2, true, seed, &mut s), NofStatus::Ok);
            let (mut direct, mut proto, mut bits) = (false, false, 0u64);
            assert_eq!(nof_direct_eval(s, m, &mut direct), NofStatus::Ok);
            assert_eq!(nof_full_eval(s, m, 0, true, &mut proto, &mut bits), NofStatus::Ok);
            assert_eq!(direct, proto);
            assert_eq!(bits, 17 * 16 * 17 * 3);
            let mut e = false;
            assert_eq!(nof_eqsolve_eval(s, m, true, &mut e, &mut bits), NofStatus::InvalidArgument);
            nof_spec_free(s);
            nof_matrix_free(m);
        }
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(nof_matrix_random(1, 2, 2, 0, &mut m), NofStatus::InvalidArgument);
        assert!(m.is_null());
        assert_eq!(nof_matrix_random(2, 2, 2, 0, ptr::null_mut()), NofStatus::NullPointer);
        assert_eq!(last_error(), "null pointer argument");

        let bad = [0u32, 5, 1, 1];
        assert_eq!(nof_matrix_new(2, 2, 2, bad.as_ptr(), &mut m), NofStatus::InvalidArgument);
        assert!(last_error().contains('5'));

        assert_eq!(nof_matrix_random(2, 2, 4, 0, &mut m), NofStatus::Ok);
        let name = CString::new("GIP").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(nof_spec_named(name.as_ptr(), 2, 2, 4, &mut s), NofStatus::Ok);
        let (mut v, mut bits) = (false, 0u64);
        assert_eq!(nof_eqsolve_eval(s, m, true, &mut v, &mut bits), NofStatus::HypothesisViolated);

        let mut wrong = ptr::null_mut();
        assert_eq!(nof_matrix_random(2, 3, 4, 0, &mut wrong), NofStatus::Ok);
        assert_eq!(nof_direct_eval(s, wrong, &mut v), NofStatus::DimensionMismatch);
        assert_eq!(nof_direct_eval(ptr::null(), m, &mut v), NofStatus::NullPointer);
        assert!(nof_last_error().is_null() || !last_error().is_empty());
        assert_eq!(nof_direct_eval(s, m, &mut v), NofStatus::Ok);
        assert!(nof_last_error().is_null());

        nof_matrix_free(wrong);
        nof_matrix_free(m);
        nof_spec_free(s);
        nof_matrix_free(ptr::null_mut());
        nof_spec_free(ptr::null_mut());
    }
    let s = |c: i32| unsafe { CStr::from_ptr(nof_status_str(c)) }.to_str().unwrap();
    assert_eq!(s(NofStatus::Ambiguous as i32), "ambiguous");
    assert_eq!(s(42), "unknown status");
}

#[test]
fn c_smoke_program() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/nof_lab.h");
    assert!(header.exists(), "header not generated");
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    // the test binary lives in target/<profile>/deps; the library one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    assert!(lib_dir.join("libnof_lab_ffi.so").exists() || lib_dir.join("libnof_lab_ffi.a").exists());
    let out_dir = tempfile_dir();
    let bin = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lnof_lab_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C smoke program did not compile");
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nof-lab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

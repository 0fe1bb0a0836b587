use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use pleatray_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn last_error() -> String {
    CStr::from_ptr(pleatray_last_error()).to_string_lossy().into_owned()
}

unsafe fn surface(name: &str) -> *mut PleatraySurface {
    let mut s = ptr::null_mut();
    assert_eq!(pleatray_surface_builtin(cs(name).as_ptr(), &mut s), PleatrayStatus::Ok);
    s
}

#[test]
fn surface_handles() {
    unsafe {
        let s = surface("s12");
        assert_eq!(pleatray_surface_xi(s), 2);
        pleatray_surface_free(s);

        let mut s = ptr::null_mut();
        assert_eq!(pleatray_surface_builtin(cs("s99").as_ptr(), &mut s), PleatrayStatus::Parse);
        assert!(s.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(pleatray_surface_builtin(ptr::null(), &mut s), PleatrayStatus::NullPointer);
        assert_eq!(pleatray_surface_xi(ptr::null()), 0);

        let json = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/surfaces/s04.json")).unwrap();
        assert_eq!(pleatray_surface_from_json(cs(&json).as_ptr(), &mut s), PleatrayStatus::Ok);
        assert_eq!(pleatray_surface_xi(s), 1);
        pleatray_surface_free(s);
        assert_eq!(pleatray_surface_from_json(cs("{").as_ptr(), &mut s), PleatrayStatus::Parse);
    }
}

#[test]
fn validation_and_pairing() {
    unsafe {
        let s = surface("s12");
        let mut valid = false;
        let good = [1i64, 0, 1, 0];
        assert_eq!(pleatray_validate_dt(s, good.as_ptr(), 2, &mut valid), PleatrayStatus::Ok);
        assert!(valid);
        let bad = [0i64, -1, 1, 0];
        assert_eq!(pleatray_validate_dt(s, bad.as_ptr(), 2, &mut valid), PleatrayStatus::Ok);
        assert!(!valid);
        pleatray_surface_free(s);

        let a = [1i64, 0];
        let b = [0i64, 1];
        let mut v = 0;
        assert_eq!(pleatray_pairing(a.as_ptr(), b.as_ptr(), 1, &mut v), PleatrayStatus::Ok);
        assert_eq!(v, 1);
        assert_eq!(pleatray_pairing(a.as_ptr(), ptr::null(), 1, &mut v), PleatrayStatus::NullPointer);
    }
}

#[test]
fn polynomials() {
    unsafe {
        let s = surface("s11");
        let mut p = ptr::null_mut();
        assert_eq!(pleatray_trace_poly(s, cs("c2").as_ptr(), &mut p), PleatrayStatus::Ok);
        let j = pleatray_polynomial_to_json(p);
        let text = CStr::from_ptr(j).to_str().unwrap().to_owned();
        pleatray_string_free(j);
        assert!(text.starts_with("[{\"exp\":"));
        // On its line, c2 has trace t^2 - 1.
        let (re, im) = ([-1.0], [3.0]);
        let (mut ore, mut oim) = (0.0, 0.0);
        assert_eq!(pleatray_polynomial_eval(p, re.as_ptr(), im.as_ptr(), 1, &mut ore, &mut oim), PleatrayStatus::Ok);
        assert!((ore.abs() - 8.0).abs() < 1e-12 && oim.abs() < 1e-12, "{ore} {oim}");
        assert_eq!(pleatray_polynomial_eval(p, re.as_ptr(), im.as_ptr(), 0, &mut ore, &mut oim), PleatrayStatus::Parse);
        pleatray_polynomial_free(p);

        let mut pass = false;
        assert_eq!(pleatray_verify_top(s, cs("c3").as_ptr(), &mut pass), PleatrayStatus::Ok);
        assert!(pass);
        let word = r#"{"name":"w","tokens":[{"cross":1,"dir":1}]}"#;
        assert_eq!(pleatray_trace_poly(s, cs(word).as_ptr(), &mut p), PleatrayStatus::Ok);
        pleatray_polynomial_free(p);
        assert_eq!(pleatray_trace_poly(s, cs("missing").as_ptr(), &mut p), PleatrayStatus::Parse);
        assert!(last_error().contains("missing"));
        pleatray_surface_free(s);
    }
}

#[test]
fn rays() {
    unsafe {
        let s = surface("s12");
        let lam = [1i64, 0, 1, 0];
        let sched = [40.0, 20.0, 10.0];
        let mut r = ptr::null_mut();
        assert_eq!(pleatray_ray_trace(s, lam.as_ptr(), 2, sched.as_ptr(), 3, &mut r), PleatrayStatus::Ok);
        assert_eq!(pleatray_ray_sample_count(r), 3);
        let (mut t, mut res) = (0.0, 1.0);
        let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
        assert_eq!(
            pleatray_ray_sample(r, 2, 2, &mut t, re.as_mut_ptr(), im.as_mut_ptr(), &mut res),
            PleatrayStatus::Ok
        );
        assert_eq!(t, 10.0);
        assert!(res < 1e-10 && (im[0] - 10.0).abs() < 1e-6);
        assert_eq!(pleatray_ray_sample(r, 3, 2, &mut t, re.as_mut_ptr(), im.as_mut_ptr(), &mut res), PleatrayStatus::OutOfRange);
        assert_eq!(pleatray_ray_sample(r, 0, 1, &mut t, re.as_mut_ptr(), im.as_mut_ptr(), &mut res), PleatrayStatus::OutOfRange);
        let csv = pleatray_ray_to_csv(r);
        assert!(CStr::from_ptr(csv).to_str().unwrap().starts_with("t,re_tau_1"));
        pleatray_string_free(csv);
        pleatray_ray_free(r);

        let bad = [0i64, 1, 1, 0];
        assert_eq!(pleatray_ray_trace(s, bad.as_ptr(), 2, sched.as_ptr(), 3, &mut r), PleatrayStatus::Semantic);
        let up = [10.0, 20.0];
        assert_eq!(pleatray_ray_trace(s, lam.as_ptr(), 2, up.as_ptr(), 2, &mut r), PleatrayStatus::Semantic);
        pleatray_surface_free(s);
    }
}

#[test]
fn null_frees_are_harmless() {
    unsafe {
        pleatray_surface_free(ptr::null_mut());
        pleatray_polynomial_free(ptr::null_mut());
        pleatray_ray_free(ptr::null_mut());
        pleatray_string_free(ptr::null_mut());
        assert!(pleatray_polynomial_to_json(ptr::null()).is_null());
        assert!(pleatray_ray_to_csv(ptr::null()).is_null());
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pleatray.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "pleatray_last_error",
        "pleatray_string_free",
        "pleatray_surface_builtin",
        "pleatray_surface_from_json",
        "pleatray_surface_xi",
        "pleatray_surface_free",
        "pleatray_validate_dt",
        "pleatray_pairing",
        "pleatray_trace_poly",
        "pleatray_polynomial_to_json",
        "pleatray_polynomial_eval",
        "pleatray_polynomial_free",
        "pleatray_verify_top",
        "pleatray_ray_trace",
        "pleatray_ray_sample_count",
        "pleatray_ray_sample",
        "pleatray_ray_to_csv",
        "pleatray_ray_free",
        "PLEATRAY_STATUS_OK",
        "typedef struct PleatraySurface PleatraySurface",
    ] {
        assert!(h.contains(f), "header lacks {f}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    // deps/<test binary> -> target profile directory holding the static library.
    let exe = std::env::current_exe().unwrap();
    let profile = exe.parent().unwrap().parent().unwrap();
    let lib = profile.join("libpleatray_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), r#"[{"exp":[1],"re":"0/1","im":"-1/1"}]"#);
    assert!(lines.next().unwrap().starts_with("10 -0.497"));
    assert!(lines.next().unwrap().starts_with("error: "));
}

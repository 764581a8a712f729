use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kmkit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kmkit_last_error()) }.to_str().unwrap().to_string()
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { kmkit_string_free(s) };
    text
}

fn datum(json: &str) -> *mut KmkitDatum {
    let j = CString::new(json).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { kmkit_datum_from_json(j.as_ptr(), &mut d) }, KmkitStatus::Ok);
    d
}

#[test]
fn datum_roots_and_algebra() {
    let d = datum(r#"{"matrix": [[2, -1], [-3, 2]]}"#);
    let mut n = 0;
    let mut roots = 0;
    unsafe {
        assert_eq!(kmkit_datum_rank(d, &mut n), KmkitStatus::Ok);
        assert_eq!(kmkit_real_root_count(d, 10, &mut roots), KmkitStatus::Ok);
    }
    assert_eq!((n, roots), (2, 6));

    let ring = CString::new("Q").unwrap();
    let mut a = ptr::null_mut();
    let mut dim = 0;
    let mut dump = ptr::null_mut();
    unsafe {
        assert_eq!(kmkit_algebra_new(d, 6, ring.as_ptr(), &mut a), KmkitStatus::Ok);
        assert_eq!(kmkit_algebra_dim(a, &mut dim), KmkitStatus::Ok);
        assert_eq!(kmkit_algebra_dump(a, &mut dump), KmkitStatus::Ok);
    }
    assert_eq!(dim, 14);
    let v: serde_json::Value = serde_json::from_str(&take(dump)).unwrap();
    assert!(v["basis"].as_array().unwrap().len() == 14);
    unsafe {
        kmkit_algebra_free(a);
        kmkit_datum_free(d);
    }
}

#[test]
fn over_restricted_through_handles() {
    let d = datum(r#"{"matrix": [[2]]}"#);
    for (p, expect) in [(3u64, false), (5, true)] {
        let ring = CString::new(format!("F{p}")).unwrap();
        let mut a = ptr::null_mut();
        let mut holds = !expect;
        unsafe {
            assert_eq!(kmkit_algebra_new(d, 2, ring.as_ptr(), &mut a), KmkitStatus::Ok);
            assert_eq!(kmkit_adjoint_over_restricted(a, p, &mut holds), KmkitStatus::Ok);
            kmkit_algebra_free(a);
        }
        assert_eq!(holds, expect);
    }
    unsafe { kmkit_datum_free(d) };
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new(r#"{"matrix": [[2, 1], [-1, 2]]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { kmkit_datum_from_json(bad.as_ptr(), &mut d) }, KmkitStatus::Invalid);
    assert!(d.is_null());
    assert!(last_error().contains("(1,2)"), "{}", last_error());

    assert_eq!(unsafe { kmkit_datum_from_json(ptr::null(), &mut d) }, KmkitStatus::Invalid);
    let mut n = 0;
    assert_eq!(unsafe { kmkit_datum_rank(ptr::null(), &mut n) }, KmkitStatus::Invalid);

    let affine = datum(r#"{"matrix": [[2, -2], [-2, 2]]}"#);
    let ring = CString::new("F5").unwrap();
    let mut a = ptr::null_mut();
    let mut holds = false;
    unsafe {
        assert_eq!(kmkit_algebra_new(affine, 3, ring.as_ptr(), &mut a), KmkitStatus::Ok);
        assert_eq!(kmkit_adjoint_over_restricted(a, 5, &mut holds), KmkitStatus::Unsupported);
        kmkit_algebra_free(a);
        kmkit_datum_free(affine);
    }
    assert!(!last_error().is_empty());
    unsafe { kmkit_datum_rank(ptr::null(), ptr::null_mut()) };
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { kmkit_field_new(2, 1, &mut f) }, KmkitStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { kmkit_field_free(f) };
}

#[test]
fn field_arithmetic() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { kmkit_field_new(2, 3, &mut f) }, KmkitStatus::Ok);
    let mut q = 0;
    unsafe { kmkit_field_order(f, &mut q) };
    assert_eq!(q, 8);
    for a in 1..8 {
        let mut inv = 0;
        let mut one = 0;
        unsafe {
            assert_eq!(kmkit_field_inv(f, a, &mut inv), KmkitStatus::Ok);
            assert_eq!(kmkit_field_mul(f, a, inv, &mut one), KmkitStatus::Ok);
        }
        assert_eq!(one, 1);
    }
    let mut x = 0;
    unsafe {
        assert_eq!(kmkit_field_add(f, 5, 5, &mut x), KmkitStatus::Ok);
        assert_eq!(x, 0);
        assert_eq!(kmkit_field_inv(f, 0, &mut x), KmkitStatus::Invalid);
        assert_eq!(kmkit_field_mul(f, 9, 1, &mut x), KmkitStatus::Invalid);
        kmkit_field_free(f);
    }
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { kmkit_field_new(6, 1, &mut g) }, KmkitStatus::Invalid);
    assert!(g.is_null());
}

#[test]
fn homology_and_command_line() {
    let circle = CString::new(r#"{"faces": [[0, 1], [1, 2], [0, 2]]}"#).unwrap();
    let ring = CString::new("Z").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kmkit_homology_json(circle.as_ptr(), ring.as_ptr(), &mut out) }, KmkitStatus::Ok);
    let h: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(h["degrees"][1]["rank"], 1);

    let args: Vec<CString> = ["overrestricted", "--gcm", "a1", "--prime", "3"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let argv: Vec<*const std::ffi::c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut report = ptr::null_mut();
    let mut code = -1;
    assert_eq!(unsafe { kmkit_run(argv.as_ptr(), argv.len(), &mut report, &mut code) }, KmkitStatus::Ok);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(r["result"]["holds"], false);
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/kmkit.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["kmkit_datum_from_json", "kmkit_run", "kmkit_last_error", "KMKIT_STATUS_INTERNAL = 6"] {
        assert!(text.contains(f), "header lacks {f}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"kmkit.h\"\nint main(void) { KmkitDatum *d = 0; KmkitStatus s = kmkit_datum_from_json(\"{}\", &d); kmkit_datum_free(d); return s == KMKIT_STATUS_OK; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .expect("a C compiler");
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libkmkit_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("roots.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "kmkit.h"
int main(void) {
    KmkitDatum *d = NULL;
    size_t n = 0;
    if (kmkit_datum_from_json("{\"matrix\": [[2, -1], [-1, 2]]}", &d) != KMKIT_STATUS_OK) return 1;
    if (kmkit_real_root_count(d, 10, &n) != KMKIT_STATUS_OK || n != 3) return 2;
    kmkit_datum_free(d);
    if (kmkit_datum_from_json("not json", &d) != KMKIT_STATUS_INVALID || d != NULL) return 3;
    if (strlen(kmkit_last_error()) == 0) return 4;
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("roots");
    let status = Command::new("cc")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

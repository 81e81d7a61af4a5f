use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hypermat_ffi::*;

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    hm_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(hm_last_error_message())
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn exact_tensor_roundtrip() {
    unsafe {
        let entries: [i64; 8] = [1, 0, 0, 0, 0, 0, 0, 1];
        let mut t = ptr::null_mut();
        assert_eq!(
            hm_tensor_from_integers(2, 2, 2, entries.as_ptr(), &mut t),
            HmStatus::Ok
        );

        let mut dims = [0usize; 3];
        assert_eq!(hm_tensor_dims(t, dims.as_mut_ptr()), HmStatus::Ok);
        assert_eq!(dims, [2, 2, 2]);

        let mut det = ptr::null_mut();
        assert_eq!(hm_det222_exact(t, &mut det), HmStatus::Ok);
        assert_eq!(take_string(det), "1");

        let mut solvable = true;
        assert_eq!(hm_bilinear_solvable_222(t, &mut solvable), HmStatus::Ok);
        assert!(!solvable);

        let mut ranks = [0usize; 3];
        assert_eq!(hm_flattening_ranks(t, ranks.as_mut_ptr()), HmStatus::Ok);
        assert_eq!(ranks, [2, 2, 2]);

        let mut json = ptr::null_mut();
        assert_eq!(hm_tensor_to_json(t, &mut json), HmStatus::Ok);
        let text = CString::new(take_string(json)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(hm_tensor_parse(text.as_ptr(), &mut back), HmStatus::Ok);
        let mut is_exact = false;
        assert_eq!(hm_tensor_is_exact(back, &mut is_exact), HmStatus::Ok);
        assert!(is_exact);

        hm_tensor_free(back);
        hm_tensor_free(t);
    }
}

#[test]
fn spectral_and_rank1() {
    unsafe {
        // 2 e0⊗e0⊗e0 + e1⊗e1⊗e1
        let entries = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let mut t = ptr::null_mut();
        assert_eq!(
            hm_tensor_new(2, 2, 2, entries.as_ptr(), &mut t),
            HmStatus::Ok
        );
        let cfg = HmSearchConfig {
            restarts: 8,
            ..hm_search_config_default()
        };
        let mut res = HmSpectralResult {
            sigma: 0.0,
            residual: 0.0,
            converged: false,
            best_restart: 0,
            iterations: 0,
        };
        assert_eq!(hm_spectral_norm(t, &cfg, &mut res), HmStatus::Ok);
        assert!((res.sigma - 2.0).abs() < 1e-9);
        assert!(res.converged);

        let (mut sigma, mut err) = (0.0, 0.0);
        let (mut u, mut v, mut w) = ([0.0; 2], [0.0; 2], [0.0; 2]);
        let status = hm_best_rank1(
            t,
            ptr::null(),
            &mut sigma,
            u.as_mut_ptr(),
            v.as_mut_ptr(),
            w.as_mut_ptr(),
            &mut err,
        );
        assert_eq!(status, HmStatus::Ok);
        assert!((sigma.abs() - 2.0).abs() < 1e-9);
        assert!((err - 1.0).abs() < 1e-9);
        assert!((u[0].abs() - 1.0).abs() < 1e-9);

        let mut norm = 0.0;
        assert_eq!(hm_tensor_frobenius_norm(t, &mut norm), HmStatus::Ok);
        assert!((norm - 5f64.sqrt()).abs() < 1e-12);
        hm_tensor_free(t);
    }
}

#[test]
fn graph_functions() {
    unsafe {
        let edges: [usize; 10] = [0, 1, 1, 2, 2, 3, 3, 4, 4, 0];
        let mut g = ptr::null_mut();
        assert_eq!(hm_graph_new(5, edges.as_ptr(), 5, &mut g), HmStatus::Ok);
        let mut omega = 0;
        assert_eq!(hm_graph_clique_number(g, &mut omega), HmStatus::Ok);
        assert_eq!(omega, 2);
        let mut value = ptr::null_mut();
        assert_eq!(hm_graph_motzkin_straus(g, &mut value), HmStatus::Ok);
        assert_eq!(take_string(value), "1/4");
        let mut colorable = false;
        assert_eq!(hm_graph_three_colorable(g, &mut colorable), HmStatus::Ok);
        assert!(colorable);

        let mut t = ptr::null_mut();
        assert_eq!(hm_clique_tensor(g, 2, &mut t), HmStatus::Ok);
        let mut dims = [0usize; 3];
        hm_tensor_dims(t, dims.as_mut_ptr());
        assert_eq!(dims, [5, 5, 12]);
        hm_tensor_free(t);

        assert_eq!(hm_tqf_tensor(g, &mut t), HmStatus::Ok);
        hm_tensor_dims(t, dims.as_mut_ptr());
        assert_eq!(dims, [75, 11, 11]);
        hm_tensor_free(t);
        hm_graph_free(g);

        let text = CString::new("3 3\n1 2\n2 3\n1 3\n").unwrap();
        assert_eq!(hm_graph_parse(text.as_ptr(), &mut g), HmStatus::Ok);
        assert_eq!(hm_graph_clique_number(g, &mut omega), HmStatus::Ok);
        assert_eq!(omega, 3);
        hm_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(
            hm_tensor_new(2, 2, 2, ptr::null(), &mut t),
            HmStatus::NullPointer
        );
        assert!(last_error().contains("entries"));

        let bad = CString::new("{\"dims\":[2,2]").unwrap();
        assert_eq!(hm_tensor_parse(bad.as_ptr(), &mut t), HmStatus::Parse);
        assert!(last_error().contains("line"));

        let entries = [1.0; 8];
        assert_eq!(
            hm_tensor_new(2, 2, 2, entries.as_ptr(), &mut t),
            HmStatus::Ok
        );
        let mut s = ptr::null_mut();
        assert_eq!(hm_det222_exact(t, &mut s), HmStatus::NotExact);
        let mut det = 1.0;
        assert_eq!(hm_det222(t, &mut det), HmStatus::Ok);
        assert_eq!(det, 0.0);
        hm_tensor_free(t);

        let cube = [0i64; 12];
        assert_eq!(
            hm_tensor_from_integers(2, 3, 2, cube.as_ptr(), &mut t),
            HmStatus::Ok
        );
        assert_eq!(hm_det222(t, &mut det), HmStatus::DimensionMismatch);
        hm_tensor_free(t);

        let loops: [usize; 2] = [1, 1];
        let mut g = ptr::null_mut();
        assert_eq!(
            hm_graph_new(3, loops.as_ptr(), 1, &mut g),
            HmStatus::InvalidInput
        );
        assert_eq!(
            hm_graph_clique_number(ptr::null(), &mut 0),
            HmStatus::NullPointer
        );

        hm_tensor_free(ptr::null_mut());
        hm_graph_free(ptr::null_mut());
        hm_string_free(ptr::null_mut());
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hypermat.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).expect("header is generated by the build script");
    for name in [
        "typedef struct HmTensor HmTensor;",
        "typedef struct HmGraph HmGraph;",
        "HM_STATUS_NOT_CUBICAL",
        "hm_tensor_new(",
        "hm_det222_exact(",
        "hm_spectral_norm(",
        "hm_graph_motzkin_straus(",
        "hm_last_error_message(",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

/// Compile and run a small C program against the static library. Skipped
/// when no C compiler or static archive is around.
#[test]
fn c_program_links_and_runs() {
    let Some(dir) = std::env::current_exe()
        .ok()
        .and_then(|p| p.parent()?.parent().map(PathBuf::from))
    else {
        return;
    };
    let lib = dir.join("libhypermat_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C toolchain or static library");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "hypermat.h"
int main(void) {
    int64_t e[8] = {1, 0, 0, 0, 0, 0, 0, 1};
    HmTensor *t = NULL;
    if (hm_tensor_from_integers(2, 2, 2, e, &t) != HM_STATUS_OK) return 2;
    char *det = NULL;
    if (hm_det222_exact(t, &det) != HM_STATUS_OK) return 3;
    printf("%s\n", det);
    hm_string_free(det);
    HmStatus s = hm_tensor_parse("{", &t);
    printf("%d %s\n", (int)s, hm_last_error_message() ? "msg" : "none");
    hm_tensor_free(t);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("demo");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1\n5 msg\n");
}

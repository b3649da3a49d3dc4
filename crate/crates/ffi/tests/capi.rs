use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use relsim_ffi::*;

const DATA: &str = "\
vertex_type object Attr1:discrete
vertex_type element
edge_type R 2
target object
v object a1 Attr1=x
v object a2 Attr1=x
v object b1 Attr1=y
v object b2 Attr1=y
v element e
e R a1 e
";

fn last_error() -> String {
    let p = relsim_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut RelsimDataset {
    let c = CString::new(text).unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(
        unsafe { relsim_dataset_parse(c.as_ptr(), &mut ds) },
        RelsimStatus::Ok
    );
    ds
}

#[test]
fn distances_and_clustering_through_handles() {
    let ds = parse(DATA);
    unsafe {
        assert_eq!(relsim_dataset_target_count(ds), 4);
        let w = [1.0, 0.0, 0.0, 0.0, 0.0];
        let mut m = ptr::null_mut();
        assert_eq!(
            relsim_distances(ds, w.as_ptr(), 1, 0, &mut m),
            RelsimStatus::Ok
        );
        assert_eq!(relsim_matrix_dim(m), 4);
        let id = CStr::from_ptr(relsim_matrix_id(m, 3)).to_str().unwrap();
        assert_eq!(id, "b2");
        assert!(relsim_matrix_id(m, 4).is_null());

        let mut buf = vec![0.0; 16];
        assert_eq!(
            relsim_matrix_copy(m, buf.as_mut_ptr(), 16),
            RelsimStatus::Ok
        );
        assert_eq!(buf[1], 0.0); // a1, a2 share Attr1
        assert_eq!(buf[2], 1.0);
        assert_eq!(
            relsim_matrix_copy(m, buf.as_mut_ptr(), 15),
            RelsimStatus::BufferTooSmall
        );

        let mut x = 0.0;
        assert_eq!(relsim_matrix_get(m, 3, 0, &mut x), RelsimStatus::Ok);
        assert_eq!(x, 1.0);
        assert_eq!(
            relsim_matrix_get(m, 4, 0, &mut x),
            RelsimStatus::InvalidArgument
        );

        let mut labels = [9usize; 4];
        assert_eq!(
            relsim_cluster_agglomerative(m, 2, RelsimLinkage::Average, labels.as_mut_ptr(), 4),
            RelsimStatus::Ok
        );
        assert_eq!(labels, [0, 0, 1, 1]);
        assert_eq!(
            relsim_cluster_spectral(
                m,
                2,
                RelsimAffinity::OneMinus,
                0.0,
                5,
                0,
                labels.as_mut_ptr(),
                4
            ),
            RelsimStatus::Ok
        );
        assert_eq!(
            relsim_ari(labels.as_ptr(), [1usize, 1, 0, 0].as_ptr(), 4),
            1.0
        );
        assert_eq!(
            relsim_cluster_agglomerative(m, 5, RelsimLinkage::Single, labels.as_mut_ptr(), 4),
            RelsimStatus::InvalidArgument
        );
        relsim_matrix_free(m);
        relsim_dataset_free(ds);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let bad = CString::new("vertex_type T\ntarget T\nv T a\ne Missing a\n").unwrap();
        let mut ds = ptr::null_mut();
        assert_eq!(
            relsim_dataset_parse(bad.as_ptr(), &mut ds),
            RelsimStatus::ParseError
        );
        assert!(ds.is_null());
        assert!(last_error().contains("line 4"), "{}", last_error());

        assert_eq!(
            relsim_dataset_parse(ptr::null(), &mut ds),
            RelsimStatus::NullPointer
        );

        let ds = parse(DATA);
        let w = [0.5, 0.0, 0.0, 0.0, 0.0];
        let mut m = ptr::null_mut();
        assert_eq!(
            relsim_distances(ds, w.as_ptr(), 1, 0, &mut m),
            RelsimStatus::InvalidArgument
        );
        assert!(last_error().contains("sum"));
        let w = [0.2; 5];
        assert_eq!(
            relsim_distances(ds, w.as_ptr(), 0, 0, &mut m),
            RelsimStatus::InvalidArgument
        );
        relsim_dataset_free(ds);
        relsim_dataset_free(ptr::null_mut());
        assert!(relsim_ari(ptr::null(), ptr::null(), 0).is_nan());
    }
}

#[test]
fn matrix_text_round_trip() {
    let text = CString::new("x,y\n0,0.25\n0.25,0\n").unwrap();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(relsim_matrix_parse(text.as_ptr(), &mut m), RelsimStatus::Ok);
        let mut v = 0.0;
        relsim_matrix_get(m, 0, 1, &mut v);
        assert_eq!(v, 0.25);
        relsim_matrix_free(m);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/relsim.h")).unwrap();
    for symbol in [
        "typedef struct RelsimDataset RelsimDataset;",
        "typedef struct RelsimMatrix RelsimMatrix;",
        "RELSIM_STATUS_OK = 0",
        "relsim_dataset_parse(const char *text, struct RelsimDataset **out)",
        "relsim_distances(",
        "relsim_cluster_spectral(",
        "relsim_last_error_message(void)",
    ] {
        assert!(header.contains(symbol), "header lacks `{symbol}`");
    }
}

/// `target/<profile>` for the running test binary (`.../deps/capi-*`).
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = profile_dir().join("librelsim_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "compiling the C smoke test failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

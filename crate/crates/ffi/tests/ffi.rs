use std::ffi::{CStr, CString};
use std::ptr;

use hk_ffi::*;

const HEIS: &str = r#"
format = 1
backend = "chart"
base_point = ["0", "0", "0"]

[chart]
coordinates = ["x", "y", "z"]
frame = [
  { name = "X", components = ["1", "0", "0"] },
  { name = "Y", components = ["0", "1", "x"] },
  { name = "Z", components = ["0", "0", "1"] },
]

[split]
d = ["X", "Y"]
v = ["Z"]
"#;

fn toml_model(text: &str) -> *mut HkModel {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hk_model_from_toml(c.as_ptr(), &mut m) }, HkStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = hk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn heisenberg_round() {
    let m = toml_model(HEIS);
    unsafe {
        let (mut dim, mut nu) = (0, 0);
        assert_eq!(hk_model_dims(m, &mut dim, &mut nu), HkStatus::Ok);
        assert_eq!((dim, nu), (3, 1));

        let mut buf = [0usize; 4];
        let mut len = 0;
        assert_eq!(hk_growth_vector(m, buf.as_mut_ptr(), buf.len(), &mut len), HkStatus::Ok);
        assert_eq!(&buf[..len], &[2, 3]);
        assert_eq!(hk_growth_vector(m, buf.as_mut_ptr(), 1, &mut len), HkStatus::BufferTooSmall);
        assert_eq!(len, 2);

        let mut stabilized = -1;
        assert_eq!(hk_holonomy_dim(m, &mut dim, &mut stabilized), HkStatus::Ok);
        assert_eq!((dim, stabilized), (0, 1));

        let mut json = ptr::null_mut();
        let mut outcome = HkOutcome::Inconclusive;
        assert_eq!(hk_run(m, HkCommand::DecideTg, &mut json, &mut outcome), HkStatus::Ok);
        assert_eq!(outcome, HkOutcome::Success);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        hk_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["report"]["verdict"]["kind"], "yes");

        assert_eq!(hk_model_set_seed(m, 9), HkStatus::Ok);
        assert_eq!(hk_run(m, HkCommand::Flag, ptr::null_mut(), ptr::null_mut()), HkStatus::Ok);
        hk_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(hk_model_from_toml(ptr::null(), &mut m), HkStatus::NullPointer);
        let bad = CString::new("format = 1\nbogus = 2\n").unwrap();
        assert_eq!(hk_model_from_toml(bad.as_ptr(), &mut m), HkStatus::Parse);
        assert!(m.is_null());
        assert!(last_error().starts_with("parse:"));

        let unimodular = HEIS.replace("\"0\", \"0\", \"1\"] }", "\"0\", \"0\", \"2*x\"] }");
        let c = CString::new(unimodular).unwrap();
        assert_eq!(hk_model_from_toml(c.as_ptr(), &mut m), HkStatus::InvalidModel);
        assert!(last_error().contains("unimodular"));

        let path = CString::new("/nonexistent/model.toml").unwrap();
        assert_eq!(hk_model_load(path.as_ptr(), &mut m), HkStatus::Io);

        let mut dim = 0;
        let mut nu = 0;
        assert_eq!(hk_model_dims(ptr::null(), &mut dim, &mut nu), HkStatus::NullPointer);
        hk_model_free(ptr::null_mut());
        hk_string_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_errors_map_to_pipeline_status() {
    let m = toml_model(HEIS);
    unsafe {
        // The one-dimensional criterion works here; free algebras of rank ν > 1 refuse it.
        assert_eq!(hk_run(m, HkCommand::DecideOneDim, ptr::null_mut(), ptr::null_mut()), HkStatus::Ok);
        hk_model_free(m);

        let mut json = ptr::null_mut();
        assert_eq!(hk_free_nilpotent_json(2, 4, &mut json), HkStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(hk_model_from_json(json, &mut m), HkStatus::Ok);
        hk_string_free(json);
        let mut outcome = HkOutcome::Inconclusive;
        assert_eq!(hk_run(m, HkCommand::DecideTg, ptr::null_mut(), &mut outcome), HkStatus::Ok);
        assert_eq!(outcome, HkOutcome::Success);
        assert_eq!(hk_run(m, HkCommand::DecideOneDim, ptr::null_mut(), ptr::null_mut()), HkStatus::Pipeline);
        assert!(last_error().contains("ν = 3"));
        hk_model_free(m);

        assert_eq!(hk_free_nilpotent_json(1, 3, &mut json), HkStatus::Pipeline);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(hk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hk.h")).unwrap();
    for name in [
        "typedef struct HkModel HkModel;",
        "hk_model_from_toml",
        "hk_model_from_json",
        "hk_model_load",
        "hk_model_free",
        "hk_run",
        "hk_last_error",
        "hk_string_free",
        "HK_STATUS_OK = 0",
        "HK_OUTCOME_INCONCLUSIVE = 2",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
    // Compile the header as C when a compiler is around.
    if let Ok(cc) = which_cc() {
        let dir = tempfile_dir();
        let src = dir.join("use_hk.c");
        std::fs::write(&src, "#include \"hk.h\"\nint main(void) { HkModel *m = 0; hk_model_free(m); return HK_STATUS_OK; }\n").unwrap();
        let status = std::process::Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
            .arg(&src)
            .status()
            .unwrap();
        assert!(status.success());
    }
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("hk-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

use std::path::PathBuf;

use hk_core::model_file::ModelFile;

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn every_shipped_model_builds() {
    let files = shipped();
    assert!(files.len() >= 8);
    for p in files {
        let f = ModelFile::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        f.build().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn canonical_form_is_a_fixed_point() {
    for p in shipped() {
        let f = ModelFile::load(&p).unwrap().canonical().unwrap();
        let (once, again) = if p.extension().unwrap() == "toml" {
            let t = f.to_toml().unwrap();
            let u = ModelFile::from_toml(&t).unwrap().canonical().unwrap().to_toml().unwrap();
            (t, u)
        } else {
            let t = f.to_json().unwrap();
            let u = ModelFile::from_json(&t).unwrap().canonical().unwrap().to_json().unwrap();
            (t, u)
        };
        assert_eq!(once, again, "{}", p.display());
        // Both serializations describe the same model.
        let via_json = ModelFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(via_json, f, "{}", p.display());
    }
}

use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(env::var("OUT_DIR").unwrap());
    let generated = out_dir.join("logcave.h");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml should parse");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation should succeed")
        .write_to_file(&generated);

    // keep the checked-in copy fresh; a unit test fails if they ever drift
    let committed = crate_dir.join("include").join("logcave.h");
    let new_text = std::fs::read_to_string(&generated).unwrap();
    let old_text = std::fs::read_to_string(&committed).unwrap_or_default();
    if new_text != old_text {
        std::fs::create_dir_all(committed.parent().unwrap()).unwrap();
        std::fs::write(&committed, &new_text).unwrap();
    }

    println!("cargo:rustc-env=LOGCAVE_GENERATED_HEADER={}", generated.display());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}

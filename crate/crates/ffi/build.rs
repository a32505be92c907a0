// Generates include/zicount.h from the exported functions.

use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("ZICOUNT_H".into()),
        documentation: true,
        cpp_compat: true,
        usize_is_size_t: true,
        style: cbindgen::Style::Both,
        enumeration: cbindgen::EnumConfig {
            prefix_with_name: true,
            rename_variants: cbindgen::RenameRule::ScreamingSnakeCase,
            ..Default::default()
        },
        ..Default::default()
    };
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("unable to generate C header")
        .write_to_file(crate_dir.join("include/zicount.h"));

    println!("cargo:rerun-if-changed=build.rs");
    println!("cargo:rerun-if-changed=src/lib.rs");
}

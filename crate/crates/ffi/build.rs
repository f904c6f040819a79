use std::env;
use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config =
        cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("readable cbindgen.toml");
    match cbindgen::generate_with_config(&dir, config) {
        Ok(b) => {
            std::fs::create_dir_all(dir.join("include")).expect("writable crate directory");
            b.write_to_file(dir.join("include").join("toricres.h"));
        }
        Err(e) => println!("cargo:warning=header not regenerated: {e}"),
    }
}

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR is set");
    let bindings = cbindgen::generate(&crate_dir).expect("cbindgen header generation");
    bindings.write_to_file(format!("{crate_dir}/include/fika.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}

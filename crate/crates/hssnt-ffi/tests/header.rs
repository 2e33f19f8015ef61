//! The generated header must be self-contained valid C.

use std::process::Command;

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/hssnt.h");
    assert!(
        std::path::Path::new(header).exists(),
        "header missing: {header}"
    );
    let dir = std::env::temp_dir().join("hssnt-header-check");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("check.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ return HSSNT_OK; }}\n"
        ),
    )
    .unwrap();
    let compiler = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok());
    let Some(cc) = compiler else {
        eprintln!("no C compiler found; skipping header syntax check");
        return;
    };
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .output()
        .expect("compiler invocation");
    assert!(
        out.status.success(),
        "header failed to compile:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

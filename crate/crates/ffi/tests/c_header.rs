//! Compiles the generated header (and, when the static library is present,
//! a small program against it) with the system C compiler. Skipped when no
//! compiler is installed.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "lambda_engine.h"

int main(void) {
    LeParams *p = le_params_new();
    if (le_params_set(p, "eta", 0.1) != LE_STATUS_OK) return 1;
    if (le_params_set(p, "eta", -1.0) != LE_STATUS_INVALID_ARGUMENT) return 2;
    if (le_last_error()[0] == '\0') return 3;

    LeComplex plus, minus;
    if (le_gain(p, &plus, &minus) != LE_STATUS_OK) return 4;

    LeFloquet *fc = NULL;
    if (le_harmonic_balance(p, 3, &fc) != LE_STATUS_OK || fc == NULL) return 5;
    LeFluxes f;
    if (le_floquet_fluxes(fc, &f) != LE_STATUS_OK) return 6;
    if (fabs(f.p_c - f.qdot_c) > 1e-8 * fabs(f.p_c)) return 7;
    LeComplex rho;
    if (le_floquet_get(fc, LE_LEVEL_G, LE_LEVEL_E, 0, &rho) != LE_STATUS_OK) return 8;
    if (le_floquet_lmax(fc) != 3) return 9;

    printf("%s %.6e %.6e\n", le_version(), plus.re, f.p_c);
    le_floquet_free(fc);
    le_params_free(p);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc)
        .arg("--version")
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|_| cc)
}

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

/// target/<profile>/ holds the static library next to the deps/ directory
/// this test binary lives in. `cargo test` only builds the rlib, so the
/// static library is built on demand with the same cargo and profile.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("liblambda_engine_ffi.a");
    if !lib.exists() {
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let mut cmd = Command::new(cargo);
        cmd.args(["build", "--lib", "--manifest-path"])
            .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("Cargo.toml"))
            .arg("--target-dir")
            .arg(profile_dir.parent()?);
        if profile_dir.file_name()? == "release" {
            cmd.arg("--release");
        }
        let built = cmd.status().ok()?.success();
        if !built {
            return None;
        }
    }
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(
        &src,
        "#include \"lambda_engine.h\"\nint main(void) { return 0; }\n",
    )
    .unwrap();
    for lang in [&["-x", "c", "-std=c99"][..], &["-x", "c++"][..]] {
        let status = Command::new(&cc)
            .args(lang)
            .args(["-fsyntax-only", "-Wall", "-Wextra", "-Werror", "-I"])
            .arg(include_dir())
            .arg(&src)
            .status()
            .unwrap();
        assert!(status.success(), "header failed to compile with {lang:?}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (compiler(), static_lib()) else {
        eprintln!("compiler or static library missing; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "program exited with {:?}",
        out.status.code()
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}

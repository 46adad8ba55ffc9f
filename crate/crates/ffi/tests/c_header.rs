//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "quasimetric.h"

int main(void) {
    const double w3[9] = {0, 3, 4.5, 1, 0, 2.5, 3.5, 3.5, 0};
    QmSpace *s = NULL;
    if (qm_space_new(w3, 3, 1e-9, false, &s) != QM_STATUS_OK) return 10;
    double w[3];
    if (qm_space_recover_weight(s, 0, 1e-9, w, 3) != QM_STATUS_OK) return 11;
    if (w[0] != 0 || w[1] != 2 || w[2] != 1) return 12;
    size_t a[1] = {0}, b[2] = {1, 2};
    double fwd = 0;
    if (qm_quasi_hausdorff(s, a, 1, b, 2, &fwd, NULL, NULL) != QM_STATUS_OK || fwd != 3) return 13;
    qm_space_free(s);

    const double bad[4] = {0, -1, 1, 0};
    if (qm_space_new(bad, 2, 1e-9, false, &s) != QM_STATUS_INVALID_SPACE) return 14;
    char msg[256];
    if (qm_last_error_message(msg, sizeof msg) == 0) return 15;

    QmRandersGraph *g = NULL;
    const char *sc = "{\"domain\": {\"bbox\": [0, 1, 0, 1], \"resolution\": 11}}";
    if (qm_randers_graph_new(sc, &g) != QM_STATUS_OK) return 16;
    size_t corner = 0, far = 0;
    qm_randers_graph_nearest_node(g, 0, 0, &corner);
    qm_randers_graph_nearest_node(g, 1, 0, &far);
    QmDistanceField *f = NULL;
    if (qm_distance_field_new(g, corner, QM_DIRECTION_FORWARD, &f) != QM_STATUS_OK) return 17;
    double d = 0;
    qm_distance_field_value(f, far, &d);
    if (fabs(d - 1.0) > 1e-12) return 18;
    qm_distance_field_free(f);
    qm_randers_graph_free(g);
    printf("ok %s\n", qm_version());
    return 0;
}
"#;

/// `target/<profile>` for this test binary (`target/<profile>/deps/...`).
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libquasimetric_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    let bin = tmp.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program exited with {:?}",
        out.status.code()
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

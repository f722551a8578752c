#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

/// Points the cache at a per-process temporary directory, once.
pub fn isolated_cache() -> PathBuf {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    let dir = DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        std::env::set_var("ROTSYS_CACHE_DIR", d.path());
        d
    });
    dir.path().to_path_buf()
}

pub fn solver_script() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scripts/sdpa_solve.py")
}

/// Command template for the bundled solver adapter, or the one in
/// `ROTSYS_SOLVER`.
pub fn solver_template() -> String {
    std::env::var("ROTSYS_SOLVER")
        .unwrap_or_else(|_| format!("python3 {} {{in}} {{out}} --eps 1e-8", solver_script().display()))
}

pub fn solver_available() -> bool {
    if std::env::var("ROTSYS_SOLVER").is_ok() {
        return true;
    }
    Command::new("python3")
        .args(["-c", "import numpy, scipy, scs"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

pub fn run_solver(problem: &std::path::Path, solution: &std::path::Path) {
    run_template(&solver_template(), problem, solution);
}

/// Like `solver_template`, but with the first-order mode the E_7 problems
/// need; `ROTSYS_SOLVER` still takes precedence.
pub fn large_solver_template() -> String {
    std::env::var("ROTSYS_SOLVER")
        .unwrap_or_else(|_| format!("python3 {} {{in}} {{out}} --smoothed", solver_script().display()))
}

pub fn run_template(template: &str, problem: &std::path::Path, solution: &std::path::Path) {
    let cmd = template
        .replace("{in}", &problem.display().to_string())
        .replace("{out}", &solution.display().to_string());
    let out = Command::new("sh").arg("-c").arg(&cmd).output().unwrap();
    assert!(out.status.success(), "solver failed: {}", String::from_utf8_lossy(&out.stderr));
}

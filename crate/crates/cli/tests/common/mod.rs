#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hybridflow"));
    c.env_remove("HYBRIDFLOW_SEED");
    c
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Writes `json` to a fresh temp file and returns the guard.
pub fn config(json: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    std::fs::write(f.path(), json).unwrap();
    f
}

pub fn run(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn canonical_with(floor: &str, fast: &str, trader: &str, extra: &str) -> String {
    format!(
        r#"{{"floor": {floor}, "fast": {fast}, "trader": {trader}{extra}}}"#
    )
}

pub const FLOOR: &str = r#"{"a": 4, "mu": 2, "sigma": 1}"#;
pub const FAST: &str = r#"{"lambda_fast": 2}"#;
pub const TRADER: &str = r#"{"eta": 1, "delta_p": 1}"#;

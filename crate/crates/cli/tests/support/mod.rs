#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

/// Runs the binary from the workspace root so fixture paths stay relative.
pub fn gpembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpembed")).args(args).current_dir(workspace_root()).output().unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Embeds a fixture and returns the output path.
pub fn embed_fixture(dir: &Path, fixture: &str, m: &str, delta: &str, seed: &str) -> PathBuf {
    let out = dir.join(format!("{fixture}.embedded.json"));
    let input = format!("fixtures/{fixture}.json");
    let run = gpembed(&["embed", &input, "--m", m, "--delta", delta, "--seed", seed, "--out", path_str(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    out
}

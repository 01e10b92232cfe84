#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn config(name: &str) -> PathBuf {
    configs_dir().join(name)
}

/// Fresh scratch directory under the system temp dir.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qrlab-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn qrlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrlab")).current_dir(dir).args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Every subcommand paired with the shipped config that drives it.
pub const RUNS: [(&str, &str); 11] = [
    ("comass", "comass.cfg"),
    ("distortion", "distortion.cfg"),
    ("growth", "fy.cfg"),
    ("rhi", "rhi.cfg"),
    ("prop4", "prop4.cfg"),
    ("higherint", "higherint.cfg"),
    ("equi", "equi.cfg"),
    ("density", "rational.cfg"),
    ("density", "irrational.cfg"),
    ("signed", "signed.cfg"),
    ("signed", "signed-torus.cfg"),
];

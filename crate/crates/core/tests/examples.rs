//! Runs every example binary with small arguments. `cargo test` builds the
//! examples next to the test binaries.

use std::path::PathBuf;
use std::process::{Command, Output};

fn example(name: &str) -> Command {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_resdta"));
    let path = bin.parent().unwrap().join("examples").join(name);
    assert!(path.exists(), "{} is not built; run `cargo test` or `cargo build --examples`", path.display());
    let mut cmd = Command::new(path);
    cmd.env_remove("RESDTA_DATA_DIR");
    cmd
}

fn ok(mut cmd: Command) -> String {
    let o: Output = cmd.output().unwrap();
    assert!(o.status.success(), "{:?}\n{}", cmd, String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn encode_sequences() {
    let mut cmd = example("encode_sequences");
    cmd.args(["CN=C=O", "MKV"]);
    let out = ok(cmd);
    assert!(out.contains("CN=C=O -> [1, 3, 63, 1, 63, 5] (+94 pad)"), "{out}");
}

#[test]
fn architecture_shapes() {
    let out = ok(example("architecture_shapes"));
    assert!(out.contains("[93, 86, 79]") && out.contains("[993, 986, 979]"), "{out}");
    assert!(out.contains("96 channels x 1058") && out.contains("FC input              1024"), "{out}");
}

#[test]
fn metrics_walkthrough() {
    let out = ok(example("metrics_walkthrough"));
    assert!(out.contains("CI perfect  1\n") && out.contains("CI reversed 0\n"), "{out}");
}

#[test]
fn kfold_splits() {
    let out = ok(example("kfold_splits"));
    assert!(out.contains("[19709, 19709, 19709, 19709, 19709, 19709]"), "{out}");
    assert!(out.contains("identical = true"), "{out}");
}

#[test]
fn synthetic_dataset_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = example("synthetic_dataset");
    cmd.args([dir.path().to_str().unwrap(), "8", "5", "1"]);
    assert!(ok(cmd).contains("8 drugs, 5 proteins"));
    assert!(dir.path().join("affinity.txt").exists());
    assert!(ok(example("checkpoint_roundtrip")).contains("identical: true"));
}

#[test]
fn training_examples() {
    let mut cmd = example("train_synthetic");
    cmd.arg("2");
    assert!(ok(cmd).contains("test: CI"));
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = example("cross_validation");
    cmd.args([dir.path().to_str().unwrap(), "1"]);
    assert!(ok(cmd).contains("test over 5 folds"));
    assert!(dir.path().join("run/report/scatter.svg").exists());
}

#[test]
fn null_model() {
    let mut cmd = example("null_model");
    cmd.arg("8");
    assert_eq!(ok(cmd).matches("CI").count(), 3);
}

#[test]
fn reproduce_kiba_needs_data() {
    let o = example("reproduce_kiba").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("RESDTA_DATA_DIR"));
}

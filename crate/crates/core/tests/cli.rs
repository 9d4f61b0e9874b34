//! The command-line contract: exit codes, byte-identical output and the
//! seed environment variable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn promc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_promc")).args(args).env_remove("PROMC_SEED").output().unwrap()
}

fn promc_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_promc")).args(args).env("PROMC_SEED", seed).output().unwrap()
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn constructions_are_byte_identical_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    for instance in ["set-bij", "chain-f2"] {
        for (kind, extra) in [("factor", vec!["--mode", "L1"]), ("lift", vec![]), ("cocell", vec![]), ("two-of-three", vec!["--side", "left"])] {
            let s = promc(&["sample", "--kind", kind, "--instance", instance, "--seed", "17"]);
            assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
            let input = write(dir.path(), "in.json", &s.stdout);
            let mut args = vec![kind];
            args.extend(&extra);
            args.push(input.to_str().unwrap());
            let a = promc(&args);
            let b = promc(&args);
            assert_eq!(a.status.code(), Some(0), "{kind} {instance}: {}", String::from_utf8_lossy(&a.stderr));
            assert_eq!(a.stdout, b.stdout);
            let cert = doc(&a);
            assert_eq!(cert["schema"], "promc-certificate/1");
            let path = write(dir.path(), "cert.json", &a.stdout);
            let v = promc(&["verify", path.to_str().unwrap()]);
            assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
        }
    }
}

#[test]
fn the_seed_defaults_to_the_environment() {
    let by_flag = promc(&["sample", "--kind", "factor", "--instance", "chain-f2", "--seed", "42"]);
    let by_env = promc_env(&["sample", "--kind", "factor", "--instance", "chain-f2"], "42");
    let other = promc_env(&["sample", "--kind", "factor", "--instance", "chain-f2"], "43");
    assert_eq!(by_flag.stdout, by_env.stdout);
    assert_ne!(by_flag.stdout, other.stdout);
}

#[test]
fn check_axioms_is_reproducible() {
    let args = ["check-axioms", "--trials", "6", "--seed", "3", "--depth", "8", "--instance", "both"];
    let a = promc(&args);
    let b = promc(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "axioms.json", &a.stdout);
    assert_eq!(promc(&["verify", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "garbage.json", b"{ not json");
    let out = promc(&["hom", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(doc(&out)["status"], "invalid");

    let unknown = write(dir.path(), "unknown.json", json!({ "instance": "groups", "map": {} }).to_string().as_bytes());
    assert_eq!(promc(&["factor", "--mode", "L1", unknown.to_str().unwrap()]).status.code(), Some(2));

    let old = write(dir.path(), "old.json", json!({ "schema": "promc-certificate/0", "kind": "lift", "instance": "set-bij", "input": {}, "result": {} }).to_string().as_bytes());
    assert_eq!(promc(&["verify", old.to_str().unwrap()]).status.code(), Some(2));

    let bad_map = json!({
        "instance": "set-bij",
        "map": {
            "source": { "index": "omega", "values": [["a"]], "structure": [] },
            "target": { "index": "omega", "values": [["x"]], "structure": [] },
            "level": [{ "a": "nowhere" }]
        }
    });
    let path = write(dir.path(), "bad_map.json", bad_map.to_string().as_bytes());
    let out = promc(&["detect-special", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
}

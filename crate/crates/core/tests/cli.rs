use std::path::PathBuf;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ptvertex")).args(args).output().expect("spawn ptvertex");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = run(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("ptvertex-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn specialized_single_box_vertex() {
    let out = ok(&["vertex", "--mu", "1", "--a", "1", "--qmax", "8"]);
    assert!(out.contains("q + q^2"), "{out}");
    let out = ok(&["vertex", "--mu", "1", "--a", "2", "--qmax", "8"]);
    assert!(out.contains("q + 2*q^2 + q^3"), "{out}");
}

#[test]
fn small_commands() {
    assert!(ok(&["count-perms", "--a", "0,1,1", "--format", "json"]).contains("\"formula\": 2"));
    assert!(ok(&["hilb-pairing", "--c", "2"]).contains("1/2"));
    assert!(ok(&["glue", "--d", "2"]).contains("unit law: ok"));
    let st = ok(&["selftest"]);
    assert!(!st.contains("FAIL"), "{st}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["count-perms", "--a", "0,2"]).code, 1);
    assert_eq!(run(&["vertex"]).code, 1);
    assert_eq!(run(&["no-such-command"]).code, 1);
    let r = run(&["func-eq", "--d", "2", "--delta", "3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("falsified"), "{}", r.stderr);
    assert_eq!(run(&["func-eq", "--d", "2"]).code, 0);
    assert_eq!(run(&["fit", "--d", "1", "--qmax", "4", "--num-degree", "3"]).code, 3);
}

#[test]
fn output_is_reproducible_across_workers() {
    let base = ["cancel-check", "--mu", "2,1", "--a", "2", "--format", "json"];
    let one = ok(&[&base[..], &["--jobs", "1"]].concat());
    let four = ok(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one, four);
    assert_eq!(four, ok(&[&base[..], &["--jobs", "4"]].concat()));
    assert_eq!(one, ok(&base));
}

#[test]
fn config_file_supplies_and_flags_override() {
    let cfg = scratch("cfg.toml", "mu = \"1\"\na = 2\nqmax = 8\nformat = \"csv\"\n");
    let cfg = cfg.to_str().unwrap();
    let from_file = ok(&["vertex", "--config", cfg]);
    assert_eq!(from_file, ok(&["vertex", "--mu", "1", "--a", "2", "--qmax", "8", "--format", "csv"]));
    let overridden = ok(&["vertex", "--config", cfg, "--a", "1"]);
    assert_eq!(overridden, ok(&["vertex", "--mu", "1", "--a", "1", "--qmax", "8", "--format", "csv"]));
    assert_ne!(from_file, overridden);
}

#[test]
fn bad_config_is_a_usage_error() {
    let cfg = scratch("bad.toml", "mu = [\n");
    assert_eq!(run(&["vertex", "--config", cfg.to_str().unwrap()]).code, 1);
}

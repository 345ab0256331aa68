use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levy-edgeworth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_CLT: &str = "experiment = \"clt-rate\"\nmaster_seed = 3\n[sweep]\nm = [4, 16, 64]\nn_samples = 200\nreplicates = 2\nbootstrap = 20\n";

#[test]
fn reruns_are_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&["clt-rate", "--config", &cfg, "--out", out.to_str().unwrap(), "--no-timestamp"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# experiment=clt-rate\n# config_hash="));
    assert!(!text.contains("# generated="));
    assert!(text.contains("kind,law,m,p,mode,replicate,distance,certified"));
}

#[test]
fn timestamp_line_is_present_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    let o = run(&["clt-rate", "--config", &cfg, "--out", "-"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("# generated="));
}

#[test]
fn mismatched_hash_is_refused_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    let out = dir.path().join("o.csv");
    let out_s = out.to_str().unwrap();
    assert!(run(&["clt-rate", "--config", &cfg, "--out", out_s]).status.success());
    // same config: overwrite allowed
    assert!(run(&["clt-rate", "--config", &cfg, "--out", out_s]).status.success());
    // different seed changes the hash
    let o = run(&["clt-rate", "--config", &cfg, "--out", out_s, "--seed", "99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));
    let o = run(&["clt-rate", "--config", &cfg, "--out", out_s, "--seed", "99", "--force"]);
    assert!(o.status.success());
}

#[test]
fn foreign_files_are_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    let out = write(dir.path(), "notes.txt", "precious\n");
    let o = run(&["clt-rate", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_to_string(&out).unwrap(), "precious\n");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = write(dir.path(), "l.toml", "experiment = \"clt-rate\"\n[clt]\nlaw = \"rademacher\"\n");
    let o = run(&["clt-rate", "--config", &lattice]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Cramér"));

    let odd_p = write(dir.path(), "p.toml", "experiment = \"clt-rate\"\n[sweep]\np = 3\n");
    assert_eq!(run(&["clt-rate", "--config", &odd_p]).status.code(), Some(2));

    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    assert_eq!(run(&["jump-coupling", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(&["clt-rate", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(run(&["clt-rate"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "singular.cum", "2 0 1\n3 0 1\n");
    let cfg = write(dir.path(), "b.toml", "experiment = \"edgeworth-build\"\n[build]\ncumulants = \"singular.cum\"\n");
    let o = run(&["edgeworth-build", "--config", &cfg, "--out", "-"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn edgeworth_build_dumps_relative_cumulant_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "exp.cum", "2 1\n3 2\n4 6\n");
    let cfg = write(dir.path(), "b.toml", "experiment = \"edgeworth-build\"\n[build]\ncumulants = \"exp.cum\"\norder = 2\n");
    let o = run(&["edgeworth-build", "--config", &cfg, "--out", "-", "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("u_1 = 1/9*x1^3 - 1/3*x1"), "{text}");
    assert!(text.contains("residual_2 zero") && !text.contains("MISMATCH"));
}

#[test]
fn threads_flag_keeps_results_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_CLT);
    let a = run(&["clt-rate", "--config", &cfg, "--out", "-", "--no-timestamp", "--threads", "1"]);
    let b = run(&["clt-rate", "--config", &cfg, "--out", "-", "--no-timestamp", "--threads", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = levy_edgeworth::experiments::ExperimentConfig::load(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

#[test]
fn shipped_text_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for (sub, file) in [("edgeworth-build", "edgeworth-build.toml"), ("probe-cramer", "probe-cramer-atom.toml")] {
        let cfg = dir.join(file);
        let o = run(&[sub, "--config", cfg.to_str().unwrap(), "--no-timestamp"]);
        assert!(o.status.success(), "{file}: {}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(!text.contains("NONZERO") && !text.contains("MISMATCH"), "{text}");
    }
}

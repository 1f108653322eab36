use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracq"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"{
  "identities": ["stokes_classical", "bp_fractional", "prop_fact_4", "cte_rule"],
  "f": {"name": "random-quadratic"},
  "g": {"name": "coord", "exponents": [0, 1, 0, 0]},
  "ladder": [6, 8, 10],
  "frac_nodes": 16
}"#;

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "4", "1"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}.csv"));
        let st = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--jobs", jobs, "--seed", "11"])
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
        assert!(out.with_extension("json").exists());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("identity_id,N,delta,abs_residual,rel_residual,order_estimate,elapsed_s,notes\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn seed_changes_random_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"identities": ["stokes_classical"], "ladder": [4]}"#);
    let run = |seed: &str| {
        let o = bin().args(["run", "--config"]).arg(&cfg).args(["--seed", seed]).output().unwrap();
        String::from_utf8(o.stdout).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn bad_order_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"suite": "classical", "alpha": [[1.2, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]}"#,
    );
    let o = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("order gate"));
}

#[test]
fn malformed_config_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ not json");
    assert_eq!(bin().args(["run", "--config"]).arg(&cfg).status().unwrap().code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(bin().args(["run", "--config"]).arg(&missing).status().unwrap().code(), Some(2));
}

#[test]
fn registries_are_listed() {
    let o = bin().arg("list-identities").output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    for id in [
        "stokes_classical",
        "bp_classical",
        "stokes_fractional",
        "bp_fractional",
        "bp_fractional_diag",
        "stokes_complex_1",
        "stokes_complex_2",
        "bp_complex",
        "fund_theorem_1d",
        "cte_rule",
        "prop_fact_4",
        "prop32_fact_8",
    ] {
        assert!(text.contains(id), "{id}");
    }
    let o = bin().arg("list-fields").output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    for f in ["const", "coord", "z1z2-polynomial", "exp"] {
        assert!(text.contains(f), "{f}");
    }
}

#[test]
fn failed_hard_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"identities": ["prop_fact_2"], "f": {"name": "z1z2-polynomial"}, "ladder": [8]}"#,
    );
    let o = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

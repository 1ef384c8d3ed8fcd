use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn glab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(args)
        .current_dir(dir)
        .env_remove("GLAB_VOLUME_CAP")
        .output()
        .expect("glab runs")
}

fn records(stdout: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["record"].clone())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn variance_scan_in_one_dimension() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "v.toml", "d = 1\nn_grid = [2, 4, 8]\n");
    let out = glab(&["variance-scan", "--config", "v.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let vars: Vec<f64> = records(&out.stdout)
        .iter()
        .map(|r| r["var_phi"].as_f64().unwrap())
        .collect();
    for (got, want) in vars.iter().zip([3.0, 5.0, 9.0]) {
        assert!((got - want).abs() < 1e-10, "{vars:?}");
    }
}

#[test]
fn bounded_constants_omit_the_alpha_sum() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"d": 5, "tail": {"variant": "bounded", "range": 1.0}}"#,
    );
    let out = glab(&["constants", "--config", "c.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = &records(&out.stdout)[0];
    assert!(rec.get("G_star_alpha").is_none());
    let g = rec["G_star"]["value"].as_f64().unwrap();
    let m = rec["M_star"]["value"].as_f64().unwrap();
    let r = rec["R_star"]["value"].as_f64().unwrap();
    assert!((m - (10.0 * g).sqrt()).abs() < 1e-12);
    assert!((r - 2.0 * g).abs() < 1e-12);
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.toml",
        "d = 2\nn = 5\nsamples = 4\n[tail]\nvariant = \"gaussian\"\nsigma2 = 1.0\n",
    );
    for out in ["a.jsonl", "b.jsonl"] {
        let o = glab(
            &["sample-field", "--config", "s.toml", "--seed", "9", "--out", out],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(a, b);

    let o = glab(
        &["sample-field", "--config", "s.toml", "--seed", "10", "--out", "c.jsonl"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_ne!(a, std::fs::read(dir.path().join("c.jsonl")).unwrap());
}

#[test]
fn run_record_hash_is_recomputable() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "v.toml", "d = [3, 4]\nn_grid = [2, 3]\nseed = 4\n");
    let o = glab(&["variance-scan", "--config", "v.toml", "--out", "v.jsonl"], dir.path());
    assert!(o.status.success());
    let run: Value = serde_json::from_slice(&std::fs::read(dir.path().join("v.jsonl.run.json")).unwrap()).unwrap();
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(&run["config"]).unwrap()));
    assert_eq!(run["config_hash"], Value::String(hash.clone()));
    assert_eq!(run["seed"], 4);
    assert_eq!(run["records"], 4);
    assert_eq!(run["partial"], false);
    let lines = std::fs::read_to_string(dir.path().join("v.jsonl")).unwrap();
    for l in lines.lines() {
        let v: Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["config_hash"], Value::String(hash.clone()));
    }
}

#[test]
fn schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.toml", "d = 1\nn_grid = [2, \"x\"]\n");
    write(dir.path(), "b.toml", "d = 1\nn_grid = [2]\nradius = 3\n");
    write(dir.path(), "c.toml", "n_grid = [2]\n");
    write(dir.path(), "d.toml", "kind = \"constants\"\nd = 1\nn_grid = [2]\n");
    for (file, field) in [
        ("a.toml", "n_grid[1]"),
        ("b.toml", "radius"),
        ("c.toml", "`d`"),
        ("d.toml", "kind"),
    ] {
        let o = glab(&["variance-scan", "--config", file], dir.path());
        assert!(!o.status.success());
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(field), "{file}: {err}");
    }
}

#[test]
fn tail_schema_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "t.json",
        r#"{"d": 5, "tail": {"variant": "stretched_exp", "alpha": 3.0, "c_alpha": 1.0}}"#,
    );
    let o = glab(&["constants", "--config", "t.json"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn raw_dumps_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.toml", "d = 3\nn = 2\nsamples = 2\ndump = \"raw/phi\"\n");
    std::fs::create_dir(dir.path().join("raw")).unwrap();
    let o = glab(&["sample-field", "--config", "s.toml"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = records(&o.stdout);
    for (i, rec) in recs.iter().enumerate() {
        let path = dir.path().join(format!("raw/phi.{i}.f64"));
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 125 * 8);
        let (field, header) = glab_core::sampler::read_raw_field(&path).unwrap();
        assert_eq!(header.field_seed, rec["field_seed"].as_u64().unwrap());
        assert_eq!(field.max(), rec["max"].as_f64().unwrap());
        assert_eq!(
            field.values()[field.geometry().origin_index()],
            rec["origin"].as_f64().unwrap()
        );
    }
}

#[test]
fn csv_projection_expands_deviation_cells() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "d.toml",
        "d = 3\nl = 1\nn_grid = [4, 8]\nb_grid = [0.5, 1.0]\nreplicates = 2000\nk = 1.0\n\
         [tail]\nvariant = \"gaussian\"\nsigma2 = 1.0\n",
    );
    let o = glab(
        &["deviation", "--config", "d.toml", "--out", "dev.jsonl", "--csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("dev.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"cells.n") && header.contains(&"cells.p"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn volume_cap_failures_mark_the_run_partial() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.toml",
        "d = 3\nn_grid = [2, 6]\nsamples = 3\n[tail]\nvariant = \"bounded\"\nrange = 1.0\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(["max-sweep", "--config", "m.toml"])
        .current_dir(dir.path())
        .env("GLAB_VOLUME_CAP", "200")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let recs = records(&o.stdout);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["samples"], 3);
    assert!(recs[1]["error"].as_str().unwrap().contains("volume cap"));
}

#[test]
fn unknown_suite_lists_the_available_ones() {
    let dir = tempfile::tempdir().unwrap();
    let o = glab(&["verify", "--suite", "everything"], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    for s in ["oracles", "variance", "repulsion", "acceptance"] {
        assert!(err.contains(s), "{err}");
    }
}

#[test]
fn variance_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = glab(&["verify", "--suite", "variance", "--out", "v.jsonl"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let table = std::fs::read_to_string(dir.path().join("v.jsonl")).unwrap();
    let checks: Vec<Value> = table.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}

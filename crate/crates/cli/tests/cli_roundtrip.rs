//! End-to-end tests of the `cmlab` binary: sweep/report round trips,
//! determinism of emitted tables, cache recovery, and config validation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmlab"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cmlab-test-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create workdir");
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).expect("write config");
    path
}

const SMALL: &str = r#"
seed = 7
jobs = 1

[space]
scale_base = 3
copies_schedule = [12, 36]
max_level = 1

[cover]
n_min = 1
n_max = 1

[modulus]
p_grid = [1.5, 2.0]
tol = 1e-4
max_iters = 100

[family]
kind = "endpoint-separation"
delta_prime = 0.35

[recursion]
p = 1.5
depth = 6
"#;

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn sweep_report_roundtrip_is_deterministic() {
    let dir = workdir("roundtrip");
    let cfg = write_config(&dir, SMALL);
    for sub in ["run1", "run2"] {
        let out = run(bin()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(sub))
            .arg("--cache")
            .arg(dir.join("cache")));
        assert!(out.status.success(), "sweep failed: {out:?}");
        assert!(dir.join(sub).join("run.toml").exists());
        let out = run(bin().arg("report").arg("--out").arg(dir.join(sub)));
        assert!(out.status.success(), "report failed: {out:?}");
    }
    for table in ["modulus.csv", "acceptance.csv", "weights.csv"] {
        let a = std::fs::read(dir.join("run1").join(table)).expect("table");
        let b = std::fs::read(dir.join("run2").join(table)).expect("table");
        assert_eq!(a, b, "{table} differs between identical runs");
    }
    // recursion configured and two p-values solved: both plots exist
    assert!(dir.join("run1").join("modulus_vs_n.svg").exists());
    assert!(dir.join("run1").join("recursion.svg").exists());
}

#[test]
fn empty_p_grid_yields_stats_only_record() {
    let dir = workdir("empty-grid");
    let cfg = write_config(
        &dir,
        r#"
[space]
scale_base = 3
copies_schedule = [12, 36]
max_level = 1

[cover]
n_min = 1
n_max = 1
"#,
    );
    let out = run(bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("run")));
    assert!(out.status.success(), "sweep failed: {out:?}");
    let record = std::fs::read_to_string(dir.join("run").join("run.toml")).expect("record");
    assert!(record.contains("[space]"));
    assert!(record.contains("[[covers]]"));
    assert!(!record.contains("[[cells]]"));
    let out = run(bin().arg("report").arg("--out").arg(dir.join("run")));
    assert!(out.status.success());
    let modulus = std::fs::read_to_string(dir.join("run").join("modulus.csv")).expect("csv");
    assert_eq!(modulus.lines().count(), 1, "header only");
}

#[test]
fn single_cell_gives_one_row_and_a_plot() {
    let dir = workdir("one-cell");
    let cfg = write_config(
        &dir,
        r#"
[space]
scale_base = 3
copies_schedule = [12, 36]
max_level = 1

[cover]
n_min = 1
n_max = 1

[modulus]
p_grid = [2.0]
"#,
    );
    let out = run(bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("run")));
    assert!(out.status.success(), "sweep failed: {out:?}");
    let out = run(bin().arg("report").arg("--out").arg(dir.join("run")));
    assert!(out.status.success());
    let modulus = std::fs::read_to_string(dir.join("run").join("modulus.csv")).expect("csv");
    assert_eq!(modulus.lines().count(), 2, "header plus one row");
    assert!(modulus.lines().nth(1).unwrap().ends_with("converged"));
    assert!(dir.join("run").join("modulus_vs_n.svg").exists());
}

#[test]
fn corrupt_cache_entry_is_rebuilt() {
    let dir = workdir("cache");
    let cfg = write_config(&dir, SMALL);
    let cache = dir.join("cache");
    let out = run(bin()
        .args(["space", "--config"])
        .arg(&cfg)
        .arg("--cache")
        .arg(&cache));
    assert!(out.status.success());
    let entry = std::fs::read_dir(&cache)
        .expect("cache dir")
        .next()
        .expect("one entry")
        .expect("entry")
        .path();
    std::fs::write(&entry, b"not json").expect("corrupt entry");
    let out = run(bin()
        .args(["space", "--config"])
        .arg(&cfg)
        .arg("--cache")
        .arg(&cache));
    assert!(out.status.success(), "rebuild after corruption failed");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("13 circles"), "unexpected stats: {text}");
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = workdir("invalid");
    for (name, body) in [
        (
            "low-p",
            "[space]\nscale_base = 3\ncopies_schedule = [12]\nmax_level = 1\n\n[cover]\nn_min = 1\nn_max = 1\n\n[modulus]\np_grid = [0.9]\n",
        ),
        (
            "bad-range",
            "[space]\nscale_base = 3\ncopies_schedule = [12]\nmax_level = 1\n\n[cover]\nn_min = 1\nn_max = 3\n",
        ),
    ] {
        let path = dir.join(format!("{name}.toml"));
        std::fs::write(&path, body).unwrap();
        let out = run(bin()
            .args(["sweep", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(dir.join(name)));
        assert_eq!(out.status.code(), Some(2), "{name} should be rejected");
    }
}

#[test]
fn cylinders_subcommand_reports_bipartite_forest() {
    let dir = workdir("cylinders");
    let cfg = write_config(
        &dir,
        r#"
[space]
scale_base = 3
copies_schedule = [12]
max_level = 1

[cover]
n_min = 1
n_max = 1

[cylinders]
base = "A"
depth = 2
branching_cap = 4

[cylinders.graph]
vertices = [
  ["A", { kind = { NonElementary = {} }, confdim = 1.0, attains_confdim = false, virtually_fuchsian = false }],
  ["B", { kind = { NonElementary = {} }, confdim = 1.0, attains_confdim = false, virtually_fuchsian = false }],
]

[[cylinders.graph.edges]]
id = "C"
from = "A"
to = "B"
tag = { kind = "TwoEnded", attains_confdim = false, virtually_fuchsian = false }
index_from = "Infinite"
index_to = "Infinite"

[[cylinders.graph.axis_rules]]
vertex = "B"
edge = "C"
multiplicity = 2
"#,
    );
    let out = run(bin()
        .args(["cylinders", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("run")));
    assert!(out.status.success(), "cylinders failed: {out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bipartite: true"), "{text}");
    assert!(text.contains("forest: true"), "{text}");
    let csv = std::fs::read_to_string(dir.join("run").join("cylinders.csv")).expect("csv");
    assert!(csv.lines().count() > 1);
    assert!(csv.contains("cylinder"));
}

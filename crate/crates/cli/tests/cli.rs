use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bifurc_cli::formats::{read_grid, read_measure_jsonl};

fn bifurc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifurc")).args(args).current_dir(cwd).env_remove("BIFURC_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.trim_end().split(',').map(str::to_string).collect()).collect()
}

#[test]
fn per_roots_quadratic_period_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["per-roots", "--d", "2", "--n", "2", "--k", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    let mut pts: Vec<(f64, f64, u32)> =
        rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!((pts[0].0 + 1.0).abs() < 1e-12 && pts[0].1.abs() < 1e-12 && pts[0].2 == 1);
    assert!(pts[1].0.abs() < 1e-12 && pts[1].1.abs() < 1e-12 && pts[1].2 == 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("command = \"per-roots\""));
}

#[test]
fn per_roots_double_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["per-roots", "--n", "2", "--k", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "2");
    assert!(rows[0][0].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn per_roots_writes_measure_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["per-roots", "--n", "3", "--out", "run"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let run = dir.path().join("run");
    let m = read_measure_jsonl(fs::read(run.join("measure.jsonl")).unwrap().as_slice()).unwrap();
    assert_eq!(m.atoms.len(), 4);
    // weights 1/(2^3 + 1)
    assert!((m.total_mass - 4.0 / 9.0).abs() < 1e-15);
    let manifest: toml::Table = fs::read_to_string(run.join("manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["command"].as_str(), Some("per-roots"));
    assert_eq!(manifest["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(manifest["config"]["n"].as_integer(), Some(3));
    assert_eq!(manifest["config"]["d"].as_integer(), Some(2));
    assert_eq!(csv_rows(&fs::read_to_string(run.join("roots.csv")).unwrap()).len(), 4);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bifurc(&["per-roots", "--d", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(bifurc(&["render", "--res", "0", "--out", "x.pgm"], dir.path()).status.code(), Some(2));
    assert_eq!(bifurc(&["per-roots", "--n", "3", "--precision-bits", "128"], dir.path()).status.code(), Some(2));
    assert_eq!(bifurc(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(bifurc(&["kneading", "--d", "3", "--k", "2", "--alpha", "1/7"], dir.path()).status.code(), Some(2));
    assert!(!dir.path().join("x.pgm").exists());
}

#[test]
fn resource_limit_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bifurc(&["per-roots", "--n", "30"], dir.path()).status.code(), Some(4));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "threads = 2\n[per-roots]\nn = 3\nk = 1\n").unwrap();
    let o = bifurc(&["per-roots", "--config", "run.toml", "--k", "0", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let manifest: toml::Table = fs::read_to_string(dir.path().join("o/manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["config"]["n"].as_integer(), Some(3));
    assert_eq!(manifest["config"]["k"].as_integer(), Some(0));
    assert_eq!(manifest["threads"].as_integer(), Some(2));
    fs::write(dir.path().join("bad.toml"), "[per-roots]\nn = 3\nwat = 1\n").unwrap();
    assert_eq!(bifurc(&["per-roots", "--config", "bad.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn render_is_deterministic_and_records_value_map() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, threads: &str| {
        vec!["render", "--res", "96", "--bounds=-2.5,1.5,-2,2", "--out", out, "--threads", threads]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |out: &str, threads: &str| {
        let a = args(out, threads);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(bifurc(&a, dir.path()).status.code(), Some(0));
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("a.pgm", "1");
    let b = run("b.pgm", "1");
    let c = run("c.pgm", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8_lossy(&a);
    let lines: Vec<&str> = text.splitn(4, '\n').collect();
    assert_eq!(lines[0], "P5");
    assert!(lines[1].starts_with("# value-map"));
    assert_eq!(lines[2], "96 96");
    assert!(dir.path().join("a.manifest.toml").exists());
}

#[test]
fn render_grid_binary_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        bifurc(&["render", "--field", "gap", "--n", "6", "--res", "32", "--out", "g.pgm", "--grid", "g.bin", "--csv", "g.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let g = read_grid(&mut fs::File::open(dir.path().join("g.bin")).unwrap()).unwrap();
    assert_eq!((g.spec.nx, g.spec.ny), (32, 32));
    assert_eq!(g.spec.bounds.re_min, -2.5);
    let c = g.spec.point(5, 7);
    assert_eq!(g.get(5, 7), bifurc_core::measure::h_value(2, 6, 0, c));
    assert_eq!(csv_rows(&fs::read_to_string(dir.path().join("g.csv")).unwrap()).len(), 32 * 32);
}

#[test]
fn portrait_sampling_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = bifurc(&["portrait", "--d", "2", "--sample", "10", "--seed", "7"], dir.path());
    let b = bifurc(&["portrait", "--d", "2", "--sample", "10", "--seed", "7"], dir.path());
    let c = bifurc(&["portrait", "--d", "2", "--sample", "10", "--seed", "8"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let lines: Vec<String> = stdout(&a).lines().map(String::from).collect();
    assert_eq!(lines.len(), 10);
    for l in &lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
    }
}

#[test]
fn portrait_validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["portrait", "--d", "3", "--validate", r#"[["0","1/3"],["1/2","5/6"]]"#], dir.path());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["valid"], true);
    let o = bifurc(&["portrait", "--d", "3", "--validate", "0,1/2;1/4,3/4"], dir.path());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["valid"], false);
}

#[test]
fn kneading_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["kneading", "--d", "3", "--k", "1", "--alpha", "1/7", "--steps", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["word"], "00111");
    assert_eq!(v["boundary_hit_at"], 6);
    let o = bifurc(&["kneading", "--d", "3", "--k", "1", "--cover", "0"], dir.path());
    assert_eq!(stdout(&o), "lo,hi\r\n0/1,1/6\r\n1/2,2/3\r\n");
    let o = bifurc(&["kneading", "--d", "3", "--k", "1", "--counting", "6"], dir.path());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["levels"].as_array().unwrap().len(), 6);
}

#[test]
fn stretch_lands_on_misiurewicz_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["stretch", "--portrait", "1/12,7/12", "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s/verdict.json")).unwrap()).unwrap();
    assert_eq!(v["landed"], true);
    assert_eq!(v["misiurewicz"], true);
    assert_eq!(v["classification"]["kind"], "misiurewicz");
    let c = &v["landing"]["unicritical_c"];
    assert!(c[0].as_f64().unwrap().abs() < 1e-6 && (c[1].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let path = fs::read_to_string(dir.path().join("s/path.csv")).unwrap();
    assert!(path.starts_with("r,A_re,A_im"));
    assert_eq!(csv_rows(&path).len(), v["steps"].as_u64().unwrap() as usize);
}

#[test]
fn stretch_without_landing_is_undecided() {
    let dir = tempfile::tempdir().unwrap();
    // r_lo too coarse for the landing test over the last few steps
    let o = bifurc(&["stretch", "--portrait", "1/12,7/12", "--r-lo", "0.5", "--tol", "1e-12"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["landed"], false);
}

#[test]
fn equidist_modes_report_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = bifurc(&["equidist", "--mode", "gap", "--res", "48", "--n", "6,8,10", "--out", "gap"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("gap/verdict.json")).unwrap()).unwrap();
    assert_eq!(v["sups"].as_array().unwrap().len(), 3);
    assert_eq!(v["pass"], true);
    let o = bifurc(&["equidist", "--mode", "mass", "--res", "200"], dir.path());
    let last = stdout(&o).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert!((v["signed_mass"].as_f64().unwrap() - 1.0).abs() < 0.02);
    let o = bifurc(&["equidist", "--mode", "rate", "--n", "5,7,9", "--reference", "per:11"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(v["slopes"].as_array().unwrap().len(), 3);
    assert_eq!(bifurc(&["equidist", "--mode", "rate", "--reference", "bogus"], dir.path()).status.code(), Some(2));
}

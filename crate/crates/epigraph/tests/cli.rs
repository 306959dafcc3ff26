use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn epigraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epigraph"))
        .args(args)
        .output()
        .unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_run(out: &Path, seed: &str) -> Output {
    epigraph(&[
        "simulate",
        "--config",
        &config("toy.conf"),
        "--set",
        "population=600",
        "--set",
        "horizon=400",
        "--set",
        "snapshot_intervals=4",
        "--set",
        "gamma=0.003",
        "--seed",
        seed,
        "--out",
        path(out),
    ])
}

#[test]
fn simulate_toy_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = epigraph(&[
        "simulate",
        "--config",
        &config("toy.conf"),
        "--seed",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let days: Vec<&str> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        days,
        ["0", "100", "200", "300", "400", "500", "600", "700", "800", "900", "1000"]
    );
    for f in [
        "vertices_1000.csv",
        "edges_1000.csv",
        "counts.csv",
        "events.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn equal_flags_give_equal_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert_eq!(small_run(a.path(), "9").status.code(), Some(0));
    assert_eq!(small_run(b.path(), "9").status.code(), Some(0));
    assert_eq!(small_run(c.path(), "10").status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("events.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
}

#[test]
fn match_directory_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(small_run(dir.path(), "4").status.code(), Some(0));
    let out = epigraph(&[
        "match",
        "--a",
        path(dir.path()),
        "--b",
        path(dir.path()),
        "--nu",
        "0",
        "--omega",
        "0.5",
        "--xi",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first, "phi_pi\t0");
    assert_eq!(text.lines().filter(|l| l.starts_with("day\t")).count(), 5);
}

#[test]
fn infer_writes_six_posterior_rows() {
    let observed = tempfile::tempdir().unwrap();
    assert_eq!(small_run(observed.path(), "2").status.code(), Some(0));
    let out_dir = tempfile::tempdir().unwrap();
    let out = epigraph(&[
        "infer",
        "--config",
        &config("reduced_infer.conf"),
        "--set",
        "population=600",
        "--set",
        "horizon=400",
        "--set",
        "n_particles=4",
        "--set",
        "epsilon_initial=2",
        "--set",
        "stop_threshold=1.5",
        "--set",
        "curve_points=8",
        "--seed",
        "5",
        "--observed",
        path(observed.path()),
        "--out",
        path(out_dir.path()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let posterior = fs::read_to_string(out_dir.path().join("posterior.csv")).unwrap();
    let rows: Vec<&str> = posterior.lines().collect();
    assert_eq!(rows[0], "parameter,mean,sd,prior_mean,prior_sd");
    assert_eq!(rows.len(), 7);
    for (row, name) in rows[1..].iter().zip([
        "n_initial_infected",
        "alpha",
        "gamma",
        "beta",
        "lambda",
        "sigma",
    ]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], name);
        assert!(fields[1].parse::<f64>().unwrap().is_finite());
    }
    for f in [
        "diagnostics.csv",
        "particles.csv",
        "curves.csv",
        "config.txt",
    ] {
        assert!(out_dir.path().join(f).exists(), "{f}");
    }
    let curves = fs::read_to_string(out_dir.path().join("curves.csv")).unwrap();
    assert!(curves.lines().count() > 1);
}

#[test]
fn unknown_flag_prints_usage_and_exits_1() {
    let out = epigraph(&["simulate", "--bogus", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = epigraph(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = epigraph(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "population = many\n").unwrap();
    let out_dir: PathBuf = dir.path().join("out");
    let out = epigraph(&["simulate", "--config", path(&bad), "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("population"));

    let out = epigraph(&["simulate", "--set", "nonsense=1", "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("missing.conf");
    let out = epigraph(&[
        "simulate",
        "--config",
        path(&missing),
        "--out",
        path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = epigraph(&[
        "match",
        "--a",
        path(&dir.path().join("nowhere")),
        "--b",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let observed = dir.path().join("obs");
    fs::create_dir(&observed).unwrap();
    fs::write(
        observed.join("vertices.csv"),
        "id,detect_day,detect_type,gender,orientation\n1,oops,RAND,M,HETERO\n",
    )
    .unwrap();
    fs::write(observed.join("edges.csv"), "id_a,id_b\n").unwrap();
    let out = epigraph(&[
        "infer",
        "--observed",
        path(&observed),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command as Process;

use anderson_mp_cli::{parse_config_str, run, Command};

const BASE: &str = "\
model.d = 1
model.n = 2
model.h = 1
model.m_list = 4, 6
model.u0 = 1
model.r0 = 1
disorder.distribution = uniform
disorder.seed = 3
disorder.R = 6
task.e_min = 0.5
task.e_max = 6
task.e_points = 12
task.e_spacing = log
task.fit_lo = 1e-3
task.fit_hi = 0.5
task.e_probe = 1.5
task.weyl_m_list = 1, 2
";

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn header(path: &Path) -> String {
    read(path).lines().next().unwrap().to_string()
}

fn column(path: &Path, idx: usize) -> Vec<f64> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn every_table_has_its_golden_header() {
    let cfg = parse_config_str(BASE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let golden = [
        (Command::Spectrum, "spectrum_L4.csv", "index,eigenvalue"),
        (Command::Ids, "ids.csv", "L,E,N_mean,N_stderr,R"),
        (Command::Fit, "fit.csv", "slope,gamma_hat,window_lo,window_hi,residual_rms"),
        (Command::Compare, "compare.csv", "L,E_probe,N_int,N_free,delta,stderr"),
        (Command::Weyl, "weyl.csv", "k,m,quotient,residual,interaction_energy"),
        (Command::Edge, "edge.csv", "L,median_E0,iqr_E0,R"),
    ];
    for (command, file, expected) in golden {
        run(command, &cfg, dir.path()).unwrap_or_else(|e| panic!("{command}: {e}"));
        assert_eq!(header(&dir.path().join(file)), expected, "{command}");
    }
    assert_eq!(read(&dir.path().join("spectrum_L6.csv")).lines().count(), 1 + 36);
    assert_eq!(read(&dir.path().join("ids.csv")).lines().count(), 1 + 2 * 12);
}

#[test]
fn floats_carry_twelve_significant_digits() {
    let cfg = parse_config_str(BASE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(Command::Edge, &cfg, dir.path()).unwrap();
    let row = read(&dir.path().join("edge.csv")).lines().nth(1).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "4.00000000000e0");
    let mantissa = fields[1].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 12);
    assert_eq!(fields[3], "6");
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = parse_config_str(BASE).unwrap();
    for command in [Command::Ids, Command::Compare, Command::Edge, Command::Fit] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let pa = run(command, &cfg, a.path()).unwrap();
        let pb = run(command, &cfg, b.path()).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{command}");
        }
    }
}

#[test]
fn edge_without_disorder_matches_dirichlet_floor() {
    for (d, n) in [(1, 1), (1, 2), (2, 1)] {
        let text = format!(
            "model.d = {d}\nmodel.n = {n}\nmodel.h = 0.5\nmodel.L_list = 1, 2, 3\n\
             disorder.distribution = uniform\ndisorder.v_max = 0\ndisorder.seed = 1\ndisorder.R = 3\ntask.tol = 1e-12\n"
        );
        let cfg = parse_config_str(&text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        run(Command::Edge, &cfg, dir.path()).unwrap();
        let path = dir.path().join("edge.csv");
        let medians = column(&path, 1);
        let iqr = column(&path, 2);
        for (i, side) in [1.0, 2.0, 3.0].iter().enumerate() {
            let m = (side / 0.5) as usize;
            let floor = (n * d) as f64 * (2.0 - 2.0 * (PI / (m + 1) as f64).cos()) / 0.25;
            assert!((medians[i] - floor).abs() <= 1e-9, "d={d} n={n} L={side}: {} vs {floor}", medians[i]);
            assert_eq!(iqr[i], 0.0);
        }
    }
}

#[test]
fn compare_without_interaction_has_zero_delta() {
    let cfg = parse_config_str(&BASE.replace("model.u0 = 1", "model.u0 = 0")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(Command::Compare, &cfg, dir.path()).unwrap();
    let path = dir.path().join("compare.csv");
    assert!(column(&path, 4).iter().all(|&d| d == 0.0));
    assert!(column(&path, 5).iter().all(|&s| s == 0.0));
}

#[test]
fn weyl_rows_follow_the_m_list() {
    let cfg = parse_config_str(BASE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(Command::Weyl, &cfg, dir.path()).unwrap();
    let path = dir.path().join("weyl.csv");
    assert_eq!(column(&path, 1), vec![1.0, 2.0]);
    assert!(column(&path, 4).iter().all(|&u| u == 0.0));
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_anderson-mp"))
}

#[test]
fn binary_applies_seed_and_set_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("base.cfg");
    std::fs::write(&cfg, BASE).unwrap();
    let out = |name: &str, extra: &[&str]| {
        let target = dir.path().join(name);
        let status = binary()
            .args(["ids", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&target)
            .args(extra)
            .env("ANDERSON_MP_THREADS", "2")
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        read(&target.join("ids.csv"))
    };
    let plain = out("plain", &[]);
    let same_seed = out("same", &["--seed", "3"]);
    let other_seed = out("other", &["--seed", "4"]);
    assert_eq!(plain, same_seed);
    assert_ne!(plain, other_seed);
    let prefixed = dir.path().join("prefixed");
    let status = binary()
        .args(["edge", "--config"])
        .arg(&cfg)
        .args(["--set", "output.prefix=x_", "--set", "disorder.R=2", "--out"])
        .arg(&prefixed)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(column(&prefixed.join("x_edge.csv"), 3).iter().all(|&r| r == 2.0));
}

#[test]
fn binary_reports_errors_with_nonzero_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, BASE.replace("model.n = 2", "model.n = 0")).unwrap();
    let output = binary().args(["ids", "--config"]).arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("model.n") && stderr.contains("line 2"), "{stderr}");

    std::fs::write(&cfg, BASE).unwrap();
    let output = binary()
        .args(["compare", "--config"])
        .arg(&cfg)
        .args(["--set", "task.e_probe=auto", "--set", "task.e_max=0.6", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("compare"));

    let output = binary()
        .args(["ids", "--config"])
        .arg(&cfg)
        .env("ANDERSON_MP_THREADS", "many")
        .output()
        .unwrap();
    assert!(!output.status.success());
}

use std::path::Path;
use std::process::{Command, Output};

use walsh_svie::problem::{builtin_source, DEFAULT_AMPLITUDE};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walsh-svie"))
        .args(args)
        .env_remove("WALSH_SVIE_SEED")
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    let o = cli(&full);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn run_writes_table_shaped_stats() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        &[
            "run",
            "--example",
            "1",
            "--m",
            "16",
            "--trials",
            "50",
            "--seed",
            "42",
        ],
    );
    let stats = read(dir.path(), "example1_m16_stats.csv");
    let lines: Vec<&str> = stats.lines().collect();
    assert_eq!(lines[0], "t,mean,sd,ci_lower,ci_upper,n_effective,failures");
    assert_eq!(lines.len(), 6);
    for (line, t) in lines[1..].iter().zip([
        "1.00000000e-1",
        "3.00000000e-1",
        "5.00000000e-1",
        "7.00000000e-1",
        "9.00000000e-1",
    ]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[0], t);
        assert_eq!(cols[5], "50");
        assert_eq!(cols[6], "0");
    }
    assert!(!stats.contains('\r'));

    let solution = read(dir.path(), "example1_m16_solution.csv");
    assert!(solution.starts_with("t_j,x_m,exact\n"));
    assert_eq!(solution.lines().count(), 17);
    let coefs = read(dir.path(), "example1_m16_coefficients.csv");
    assert_eq!(coefs.lines().count(), 51);
    for line in coefs.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}

#[test]
fn oracle_flag_adds_column() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        &[
            "run",
            "--example",
            "2",
            "--m",
            "8",
            "--trials",
            "4",
            "--oracle",
        ],
    );
    let solution = read(dir.path(), "example2_m8_solution.csv");
    assert!(solution.starts_with("t_j,x_m,exact,em_oracle\n"));
    assert!(solution.lines().skip(1).all(|l| l.split(',').count() == 4));
}

#[test]
fn dump_paths_writes_one_file_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        &[
            "run",
            "--example",
            "2",
            "--m",
            "8",
            "--trials",
            "3",
            "--dump-paths",
        ],
    );
    for trial in 1..=3 {
        let p = read(
            dir.path(),
            &format!("example2_m8_paths/trial_{trial:04}.csv"),
        );
        let lines: Vec<&str> = p.lines().collect();
        assert_eq!(lines[0], "t,B");
        assert_eq!(lines.len(), 1 + 17);
        assert_eq!(lines[1], "0.00000000e0,0.00000000e0");
    }
    // the paths command reproduces the same trials
    let other = tempfile::tempdir().unwrap();
    run_in(other.path(), &["paths", "--m", "8", "--count", "3"]);
    for trial in 1..=3 {
        assert_eq!(
            read(
                dir.path(),
                &format!("example2_m8_paths/trial_{trial:04}.csv")
            ),
            read(other.path(), &format!("path_m8_trial_{trial:04}.csv"))
        );
    }
}

#[test]
fn matrices_prints_integration_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["matrices", "--m", "2", "--seed", "7"]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("# p\n2.50000000e-1,5.00000000e-1\n0.00000000e0,2.50000000e-1\n"));
    assert_eq!(read(dir.path(), "m2_tw.csv"), "1,1\n1,-1\n");
    assert_eq!(
        read(dir.path(), "m2_lambda.csv"),
        "5.00000000e-1,-2.50000000e-1\n2.50000000e-1,0.00000000e0\n"
    );
    for name in ["m2_p.csv", "m2_ps.csv", "m2_lambda_s.csv"] {
        assert_eq!(read(dir.path(), name).lines().count(), 2);
    }
}

#[test]
fn unknown_example_names_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run",
        "--example",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("valid ids are 1 and 2"), "{stderr}");
}

#[test]
fn invalid_configurations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--m", "16", "--out", out],
        vec![
            "run",
            "--example",
            "1",
            "--problem",
            "x.problem",
            "--out",
            out,
        ],
        vec!["run", "--example", "1", "--m", "12", "--out", out],
        vec!["run", "--example", "1", "--m", "8192", "--out", out],
        vec!["run", "--example", "1", "--trials", "1", "--out", out],
        vec![
            "converge",
            "--example",
            "1",
            "--resolutions",
            "8,16",
            "--out",
            out,
        ],
        vec![
            "converge",
            "--example",
            "1",
            "--resolutions",
            "16,8,32",
            "--out",
            out,
        ],
        vec!["run", "--problem", "/nonexistent/file", "--out", out],
    ] {
        let o = cli(&args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn seed_environment_variable_sets_default() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_in(a.path(), &["paths", "--m", "4", "--seed", "9"]);
    let o = Command::new(env!("CARGO_BIN_EXE_walsh-svie"))
        .args(["paths", "--m", "4", "--out", b.path().to_str().unwrap()])
        .env("WALSH_SVIE_SEED", "9")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        read(a.path(), "path_m4_trial_0001.csv"),
        read(b.path(), "path_m4_trial_0001.csv")
    );

    let c = tempfile::tempdir().unwrap();
    run_in(c.path(), &["paths", "--m", "4"]);
    assert_ne!(
        read(a.path(), "path_m4_trial_0001.csv"),
        read(c.path(), "path_m4_trial_0001.csv")
    );
}

#[test]
fn problem_file_round_trip_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("example2.problem");
    std::fs::write(&file, builtin_source(2, DEFAULT_AMPLITUDE).unwrap()).unwrap();
    let from_file = dir.path().join("file");
    let builtin = dir.path().join("builtin");
    let args = ["run", "--m", "16", "--trials", "10", "--oracle"];
    let mut a = args.to_vec();
    a.extend(["--problem", file.to_str().unwrap()]);
    run_in(&from_file, &a);
    let mut b = args.to_vec();
    b.extend(["--example", "2"]);
    run_in(&builtin, &b);
    for name in [
        "example2_m16_stats.csv",
        "example2_m16_solution.csv",
        "example2_m16_coefficients.csv",
    ] {
        assert_eq!(read(&from_file, name), read(&builtin, name), "{name}");
    }
}

#[test]
fn problem_without_exact_solution_still_solves() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("damped.problem");
    std::fs::write(
        &file,
        "x0 = 1\nk1 = exp(-(t-s))\nk2 = 0.1\nbeta = -x\nsigma = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run_in(
        &out,
        &[
            "run",
            "--problem",
            file.to_str().unwrap(),
            "--m",
            "16",
            "--trials",
            "2",
        ],
    );
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("no exact solution"));
    let solution = read(&out, "damped_m16_solution.csv");
    assert!(solution.starts_with("t_j,x_m\n"));
    assert_eq!(solution.lines().count(), 17);
    assert!(!out.join("damped_m16_stats.csv").exists());
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.problem");
    std::fs::write(&file, "x0 = 0\nk1 = 1\nk2 = 1\nbeta = foo(x)\nsigma = x\n").unwrap();
    let o = cli(&[
        "run",
        "--problem",
        file.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(
        stderr.contains("foo") && stderr.contains("line 4, column 8"),
        "{stderr}"
    );
}

#[test]
fn converge_writes_table_and_order() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        &[
            "converge",
            "--example",
            "1",
            "--resolutions",
            "8,16,32",
            "--trials",
            "5",
        ],
    );
    let table = read(dir.path(), "example1_converge.csv");
    assert!(table.starts_with("m,h,rms_error,n_effective,failures\n8,1.25000000e-1,"));
    assert_eq!(table.lines().count(), 4);
    let order = read(dir.path(), "example1_order.csv");
    let value = order.lines().nth(1).unwrap();
    assert!(value.parse::<f64>().is_ok(), "{order}");
}

use std::path::Path;
use std::process::Command;

use oscmodes::cli::{run_cli_with, EXIT_OK, EXIT_SOLVER, EXIT_USAGE};
use oscmodes::mmio::{write_matrix_market, HISTORY_HEADER};
use oscmodes::smalldense::{cholesky, DenseSymMatrix};
use oscmodes::{gen_random_spd, SparseSymMatrix};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("oscmodes").chain(args.iter().copied());
    let code = run_cli_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn frequencies(stdout: &str) -> Vec<f64> {
    stdout.lines().map(|l| l.parse().unwrap()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_without_inputs_is_a_usage_error() {
    let (code, out, err) = run(&["solve"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn unknown_subcommand_and_bad_flags() {
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&[]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--gen", "10,4"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--gen", "10,4,1", "--neigs", "0"]).0, EXIT_USAGE);
    assert_eq!(
        run(&[
            "solve",
            "--k-matrix",
            "/nonexistent.mtx",
            "--t-matrix",
            "/nonexistent.mtx"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn identity_history_is_constant_one() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.mtx");
    write_matrix_market(&SparseSymMatrix::identity(10), &id).unwrap();
    let csv = dir.path().join("h.csv");
    let (code, out, _) = run(&[
        "solve",
        "--k-matrix",
        p(&id),
        "--t-matrix",
        p(&id),
        "--start",
        "identical",
        "--history",
        p(&csv),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((frequencies(&out)[0] - 1.0).abs() < 1e-14, "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HISTORY_HEADER));
    for line in lines {
        let omega: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((omega - 1.0).abs() < 1e-14, "{line}");
    }

    // independent starts still land on 1, after a few steps
    let (code, out, _) = run(&["solve", "--k-matrix", p(&id), "--t-matrix", p(&id)]);
    assert_eq!(code, EXIT_OK);
    assert!((frequencies(&out)[0] - 1.0).abs() < 1e-12, "{out}");
}

#[test]
fn frequencies_print_with_seventeen_digits() {
    let (code, out, _) = run(&["solve", "--gen", "200,10,3", "--neigs", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    for l in &lines {
        let mantissa = l.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{l}");
    }
    let f = frequencies(&out);
    assert!(f[0] <= f[1]);
}

#[test]
fn history_csv_is_deterministic_and_converged() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "solve".to_string(),
            "--gen".into(),
            "1000,40,5".into(),
            "--seed".into(),
            "11".into(),
            "--history".into(),
            p(path).to_string(),
        ]
    };
    let argv_a = args(&a);
    let argv_b = args(&b);
    let (ca, oa, _) = run(&argv_a.iter().map(String::as_str).collect::<Vec<_>>());
    let (cb, ob, _) = run(&argv_b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!((ca, cb), (EXIT_OK, EXIT_OK));
    assert_eq!(oa, ob);
    let text_a = std::fs::read(&a).unwrap();
    assert_eq!(text_a, std::fs::read(&b).unwrap());

    let text = String::from_utf8(text_a).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert!(cols[4] <= 1e-8 && cols[5] <= 1e-8, "{last}");
}

#[test]
fn check_matches_oracle_at_two_thousand() {
    let (code, out, _) = run(&["check", "--n", "1000", "--seed", "7", "--neigs", "5"]);
    assert_eq!(code, EXIT_OK);
    let err: f64 = out.trim().parse().unwrap();
    assert!(err <= 1e-8);
}

#[test]
fn gen_writes_readable_pair_that_matches_inline_generation() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.mtx");
    let t = dir.path().join("t.mtx");
    let (code, _, _) = run(&[
        "gen",
        "--n",
        "150",
        "--nnz-per-row",
        "8",
        "--seed",
        "4",
        "--out",
        p(&k),
        "--t-out",
        p(&t),
    ]);
    assert_eq!(code, EXIT_OK);
    let (_, from_files, _) = run(&["solve", "--k-matrix", p(&k), "--t-matrix", p(&t), "--neigs", "2"]);
    let (_, inline, _) = run(&["solve", "--gen", "150,8,4", "--neigs", "2"]);
    assert_eq!(from_files, inline);

    let single = dir.path().join("single.mtx");
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "50",
            "--seed",
            "4",
            "--nnz-per-row",
            "6",
            "--out",
            p(&single)
        ])
        .0,
        EXIT_OK
    );
    let m = oscmodes::read_matrix_market(&single).unwrap();
    assert_eq!(m, gen_random_spd(50, 6, 4).unwrap());
}

#[test]
fn mass_matrix_path_agrees_with_explicit_inverse() {
    const N: usize = 120;
    let dir = tempfile::tempdir().unwrap();
    let k = gen_random_spd(N, 10, 1).unwrap();
    let m = gen_random_spd(N, 10, 2).unwrap();

    let chol = cholesky(&DenseSymMatrix::from_row_major(N, m.to_dense()).unwrap()).unwrap();
    let mut inv = vec![0.0; N * N];
    for j in 0..N {
        let mut e = vec![0.0; N];
        e[j] = 1.0;
        let col = chol.solve(&e).unwrap();
        for i in 0..N {
            inv[i * N + j] = col[i];
        }
    }
    let mut sym = vec![0.0; N * N];
    for i in 0..N {
        for j in 0..N {
            sym[i * N + j] = 0.5 * (inv[i * N + j] + inv[j * N + i]);
        }
    }
    let t = SparseSymMatrix::from_dense(N, &sym).unwrap();

    let (kp, mp, tp) = (
        dir.path().join("k.mtx"),
        dir.path().join("m.mtx"),
        dir.path().join("t.mtx"),
    );
    write_matrix_market(&k, &kp).unwrap();
    write_matrix_market(&m, &mp).unwrap();
    write_matrix_market(&t, &tp).unwrap();
    let (c1, explicit, _) = run(&["solve", "--k-matrix", p(&kp), "--t-matrix", p(&tp), "--neigs", "3"]);
    let (c2, mass, _) = run(&["solve", "--k-matrix", p(&kp), "--mass-matrix", p(&mp), "--neigs", "3"]);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    for (a, b) in frequencies(&explicit).iter().zip(frequencies(&mass)) {
        assert!(((a - b) / a).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn indefinite_input_is_a_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.mtx");
    let t = dir.path().join("t.mtx");
    write_matrix_market(&SparseSymMatrix::from_diagonal(&[1.0, -2.0, 3.0, 4.0]).unwrap(), &k).unwrap();
    write_matrix_market(&SparseSymMatrix::identity(4), &t).unwrap();
    let (code, _, err) = run(&["solve", "--k-matrix", p(&k), "--t-matrix", p(&t), "--max-restarts", "5"]);
    assert_eq!(code, EXIT_SOLVER);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn binary_reports_exit_codes_and_threads() {
    let bin = env!("CARGO_BIN_EXE_oscmodes");
    let status = Command::new(bin).arg("solve").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));

    let serial = Command::new(bin).args(["solve", "--gen", "300,10,2"]).output().unwrap();
    let threaded = Command::new(bin)
        .args(["solve", "--gen", "300,10,2"])
        .env("OSC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(serial.status.code(), Some(EXIT_OK));
    assert_eq!(serial.stdout, threaded.stdout);

    let bad = Command::new(bin)
        .args(["solve", "--gen", "30,4,2"])
        .env("OSC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));

    let bench = Command::new(bin)
        .args(["bench", "--n", "200", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(bench.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(bench.stdout).unwrap();
    assert!(text.contains("op_applies=") && text.contains("solve_s="), "{text}");
}

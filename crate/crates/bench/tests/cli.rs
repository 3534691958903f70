use std::fs;

use sghelm_bench::cli::main_with_args;
use sghelm_bench::config::{ProblemConfig, SolverChoice};
use sghelm_bench::report::{read_csv, write_csv, HEADER};
use sghelm_bench::run::run_case;

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("sghelm").chain(args.iter().copied()))
}

#[test]
fn unknown_flag_exits_with_two() {
    assert_eq!(run(&["solve", "--no-such-flag"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&["solve", "--Np", "1"]), 2);
    assert_eq!(run(&["solve", "--solver", "gmres"]), 2);
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn default_solve_exits_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    assert_eq!(run(&["solve", "--output", out.to_str().unwrap()]), 0);
    let rows = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].n, rows[0].q, rows[0].np), (4, 3, 11));
    assert!(rows[0].converged);
    assert_eq!(rows[0].size_a, 110 * 35);
}

#[test]
fn non_convergence_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let code = run(&[
        "solve", "--N", "2", "--Q", "2", "--Np", "6", "--c-pi", "3.5", "--max-it", "1", "--tol", "1e-12", "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let rows = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert!(!rows[0].converged);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("case.conf");
    let out = dir.path().join("r.csv");
    fs::write(&conf, "# small case\nN=2\nQ=2\nNp=9\nsolver=both\n").unwrap();
    let code = run(&[
        "solve", "--config", conf.to_str().unwrap(), "--Np", "6", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let rows = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.np == 6 && r.n == 2));
    assert_eq!(rows[0].solver, "lowrank");
    assert_eq!(rows[1].solver, "full");
}

#[test]
fn spectrum_command_writes_re_im() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eig.csv");
    let code = run(&[
        "spectrum", "--N", "2", "--Q", "2", "--Np", "21", "--c", "4.712", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im"));
    let eigs: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(eigs.len(), 21 * 20);
    assert!(eigs.iter().all(|&(_, im)| im >= -1e-8));
}

#[test]
fn verify_existence_writes_decay_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    assert_eq!(run(&["verify-existence", "--factor-size", "8", "--k", "4,9,16", "--output", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(&out).unwrap();
    let errs: Vec<f64> = text.lines().skip(1).map(|l| l.split_once(',').unwrap().1.parse().unwrap()).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    let code = run(&[
        "verify-existence", "--splitting", "--N", "2", "--Q", "2", "--Np", "6", "--k", "4,9", "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn bench_sweep_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.txt");
    let out = dir.path().join("r.csv");
    fs::write(&sweep, "N=2 Q=2 Np=6 c_pi=1.5\n# comment\nN=1 Q=1 Np=5\nN=2 Q=1 Np=4 solver=direct\n").unwrap();
    let code = run(&[
        "bench", "--sweep", sweep.to_str().unwrap(), "--jobs", "3", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let rows = read_csv(fs::File::open(&out).unwrap()).unwrap();
    let keys: Vec<_> = rows.iter().map(|r| (r.n, r.np, r.solver.as_str())).collect();
    assert_eq!(keys, [(2, 6, "lowrank"), (1, 5, "lowrank"), (2, 4, "direct")]);
    assert!(rows[2].avg_rank.is_none());
}

#[test]
fn csv_round_trip_reproduces_fields() {
    let cfg = ProblemConfig {
        n: 2,
        q: 2,
        np: 6,
        solver: SolverChoice::Both,
        ..ProblemConfig::default()
    };
    let rep = run_case(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, std::slice::from_ref(&rep)).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), HEADER.join(","));
    let rows = read_csv(buf.as_slice()).unwrap();
    assert_eq!(rows, sghelm_bench::report::rows(std::slice::from_ref(&rep)));
    let sum = rows[0].share_precond + rows[0].share_trunc + rows[0].share_trace + rows[0].share_matvec;
    assert!(sum <= 1.0 + 1e-12);
}

#[test]
fn small_case_both_solvers_agree() {
    let cfg = ProblemConfig {
        n: 2,
        q: 2,
        np: 6,
        solver: SolverChoice::Both,
        ..ProblemConfig::default()
    };
    let rep = run_case(&cfg).unwrap();
    assert!(rep.all_converged());
    assert!(rep.discrepancy.unwrap() <= 1e-3);
}

#[test]
fn reports_are_deterministic() {
    let cfg = ProblemConfig {
        n: 2,
        q: 2,
        np: 6,
        seed: 7,
        ..ProblemConfig::default()
    };
    let a = run_case(&cfg).unwrap();
    let b = run_case(&cfg).unwrap();
    assert_eq!(a.runs[0].report.residual_history, b.runs[0].report.residual_history);
    assert_eq!(a.runs[0].report.rank_history, b.runs[0].report.rank_history);
}

#[test]
fn larger_case_converges() {
    let cfg = ProblemConfig {
        n: 6,
        q: 4,
        np: 11,
        ..ProblemConfig::default()
    };
    let rep = run_case(&cfg).unwrap();
    assert!(rep.all_converged());
    assert!(rep.runs[0].report.iterations > 0);
}

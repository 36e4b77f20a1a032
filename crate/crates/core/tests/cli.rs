use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monopole-yamabe"))
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("MONOPOLE_YAMABE_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn energy_one_point_passes() {
    let o = run(&["energy"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("53.3145952"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn sweep_csv_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("sweep-{threads}.csv"));
        let o = run(
            &["sweep", "--gauge", "scalar-flat", "--min", "0.2", "--max", "3", "--count", "6", "--out", path_arg(&out)],
            Some(threads),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let text = String::from_utf8(csvs.pop().unwrap()).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "distance");
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 6);
    // floats round-trip exactly through {:.16e}
    let d: f64 = records[5][0].parse().unwrap();
    assert_eq!(d, 3.0);
}

#[test]
fn run_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tree.toml");
    let csv_path = dir.path().join("ledger.csv");
    std::fs::write(
        &cfg,
        format!("command = \"tree\"\noutput = {:?}\n\n[tree]\nexample = \"boundary-pair\"\n", path_arg(&csv_path)),
    )
    .unwrap();
    let from_file = run(&["run", path_arg(&cfg)], None);
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let ledger = std::fs::read_to_string(&csv_path).unwrap();
    assert!(ledger.starts_with("path,kind,chi,tau,w2plus,sigma2"), "{ledger}");
    assert!(ledger.contains("LeBrunAF(2)"));

    let from_flags = run(&["tree", "--example", "boundary-pair"], None);
    let a = stdout(&from_file);
    let b = stdout(&from_flags);
    // the file run also reports where the csv went
    assert!(a.starts_with(&b), "{a}\n---\n{b}");
    assert!(b.contains("PASS"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"energy\"\n[quadrature]\ntolerance = 1e-6\n").unwrap();
    let o = run(&["run", path_arg(&cfg)], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance"));
}

#[test]
fn invalid_monopole_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"energy\"\n[[monopole]]\nx = 0.0\ny = 0.0\nz = -1.0\n").unwrap();
    let o = run(&["run", path_arg(&cfg)], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("monopole[0]"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = run(&["budgets"], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budgets_and_bounds_subcommands() {
    let o = run(&["budgets", "--n", "4"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("conservation: 30 + 18 = 48 vs 12n = 48  PASS"), "{}", stdout(&o));

    let o = run(&["bounds", "--multiplicities", "1,2"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(N = 3, threshold 4(N+2)/9 = 2.222222): SolvableByCorollary"), "{}", stdout(&o));
}

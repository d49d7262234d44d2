use std::fs;
use std::process::{Command, Output};

fn congruum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruum"))
        .args(args)
        .env_remove("CONGRUUM_OUT")
        .env_remove("CONGRUUM_CHECKPOINT")
        .output()
        .unwrap()
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    let out = out.to_str().unwrap();
    for args in [
        vec!["scan", "--range", "100..5", "--out", out],
        vec!["scan", "--range", "5..50", "--classes", "EVEN_SIGN", "--out", out],
        vec!["scan", "--range", "5..50", "--prec", "512,256", "--out", out],
        vec!["scan", "--range", "5..50000000", "--out", out],
    ] {
        assert_eq!(congruum(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_input_exits_3() {
    let o = congruum(&["report", "/nonexistent/records.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    fs::write(&cfg, "range = \"5..60\"\nclasses = [\"S7\"]\nheight_bound = 0\n").unwrap();
    let out = dir.path().join("a.txt");
    let o = congruum(&["scan", "--config", cfg.to_str().unwrap(), "--classes", "S5,S7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("range=5..60") && header.contains("classes=S5,S7"), "{header}");
    assert!(text.lines().skip(1).all(|l| l.contains("cls=S5") || l.contains("cls=S7")));
    assert!(text.lines().skip(1).all(|l| l.contains("point=-")));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "rnage = \"5..60\"\n").unwrap();
    let o = congruum(&["scan", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_rejects_gaps_and_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.txt");
    let o = congruum(&["scan", "--range", "1200..1300", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());

    let plots = dir.path().join("plots");
    let o = congruum(&["report", out.to_str().unwrap(), "--plot-dir", plots.to_str().unwrap()]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("class\t") && table.contains("\ntotal\t"), "{table}");
    let i6 = fs::read_to_string(plots.join("cumulative_I6.tsv")).unwrap();
    assert!(i6.lines().any(|l| l == "1254\t1"), "{i6}");

    let text = fs::read_to_string(&out).unwrap();
    let holed: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 5).map(|(_, l)| l).collect();
    let holed_path = dir.path().join("holed.txt");
    fs::write(&holed_path, holed.join("\n") + "\n").unwrap();
    let o = congruum(&["report", holed_path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("gap"));
}

#[test]
fn verify_finds_points_on_torsion_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.txt");
    assert!(congruum(&["scan", "--range", "1250..1260", "--height-bound", "0", "--out", out.to_str().unwrap()])
        .status
        .success());
    let o = congruum(&["verify", out.to_str().unwrap(), "--height-bound", "500"]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    let row = table.lines().find(|l| l.starts_with("1254\t")).unwrap();
    assert!(row.contains("TorsionCandidate") && row.contains("point-found"), "{row}");
}

#[test]
fn env_paths_and_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_congruum"))
        .args(["scan", "--range", "5..30"])
        .env("CONGRUUM_OUT", &out)
        .env_remove("CONGRUUM_CHECKPOINT")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(fs::read_to_string(&out).unwrap().starts_with("#congruum "));

    let o = congruum(&["selftest"]);
    assert!(o.status.success());
    assert!(!String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn indeterminate_records_exit_4() {
    // a nontorsion threshold above every distance leaves nothing decidable as nontorsion
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    let o = congruum(&[
        "scan",
        "--range",
        "5..40",
        "--threshold-nontorsion",
        "0.9",
        "--height-bound",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(fs::read_to_string(&out).unwrap().contains("verdict=Indeterminate"));
}

use std::path::Path;
use std::process::{Command, Output};

fn kroncover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kroncover"))
        .args(args)
        .env_remove("KRONCOVER_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = kroncover(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn basic_queries() {
    assert_eq!(ok(&["kron", "[2,1]", "[2,1]", "[2,1]"]).trim(), "1");
    assert_eq!(ok(&["saxl", "[3,2,1]"]).trim(), "true");
    assert_eq!(ok(&["saxl", "[2,2]"]).trim(), "false");
    assert_eq!(ok(&["dim", "[3,2,1]"]).trim(), "16");
    assert_eq!(ok(&["conj", "[4,2,1]"]).trim(), "[3,2,1,1]");
    assert_eq!(ok(&["hsum", "[2,1]", "[1]"]).trim(), "[3,1]");
    assert_eq!(ok(&["vsum", "[2,1]", "[1]"]).trim(), "[2,1,1]");
    assert_eq!(ok(&["tensor", "[2,1]", "[2,1]"]).trim(), "{[3], [2,1], [1,1,1]}");
    assert_eq!(ok(&["kron-ext", "[2,1]", "[2,1]", "[2,1]", "[2,1]"]).trim(), "3");
    assert_eq!(ok(&["char", "[2,1]", "[3]"]).trim(), "-1");
    assert_eq!(ok(&["hat", "[20,4,2,2,1]"]).trim(), "[5,4,2,2,1] m=15");
    assert!(ok(&["min-power", "[2,2]"]).starts_with("never"));
    assert_eq!(ok(&["covers", "[2,1]", "[2,1]", "[2,1]"]).trim(), "true");
}

#[test]
fn fourth_powers_of_staircases_cover() {
    let out = ok(&["saxl-fourth"]);
    assert_eq!(out.lines().filter(|l| l.contains("fourth_power_covers=true")).count(), 3);
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.txt");
    let f = file.to_str().unwrap();
    ok(&["certify", "pieri", "[3,2,1]", "4", "hook", "--out", f]);
    let report = ok(&["verify", f, "--mode", "full"]);
    assert!(report.contains("root_checked=true"), "{report}");

    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("[4,3,2,1]", "[4,3,3]", 1)).unwrap();
    let o = kroncover(&["verify", f]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn certificates_print_to_stdout() {
    let out = ok(&["certify", "rectsquare", "2", "3", "1"]);
    assert!(out.starts_with("kroncover-certificate\nversion 1\n"));
    assert!(out.contains("\nroot "));
}

#[test]
fn exit_codes() {
    assert_eq!(kroncover(&["kron", "[2,1]"]).status.code(), Some(2));
    assert_eq!(kroncover(&["dim", "[1,2]"]).status.code(), Some(2));
    assert_eq!(kroncover(&["certify", "nosuch"]).status.code(), Some(2));
    assert_eq!(kroncover(&["--cap", "5", "table", "6"]).status.code(), Some(3));
    assert_eq!(kroncover(&["--cap", "5", "kron", "[6]", "[6]", "[6]"]).status.code(), Some(3));
}

fn run_table(cache: Option<&Path>) -> String {
    match cache {
        Some(dir) => ok(&["table", "7", "--cache-dir", dir.to_str().unwrap()]),
        None => ok(&["table", "7"]),
    }
}

#[test]
fn cached_tables_print_identically() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = run_table(None);
    let first = run_table(Some(dir.path()));
    assert!(dir.path().join("chartable-v1-n7.txt").exists());
    let cached = run_table(Some(dir.path()));
    assert_eq!(fresh, first);
    assert_eq!(fresh, cached);
}

#[test]
fn experiments_embed_their_configuration() {
    let out = ok(&["--format", "structured", "--seed", "9", "--trials", "4", "sample", "uniform", "20"]);
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["record"], "meta");
    assert_eq!(lines[0]["seed"], 9);
    assert_eq!(lines[0]["rng"], "chacha20-stream/v1");
    assert!(lines[0]["version"].is_string());
    assert_eq!(lines[0]["config"]["trials"], 4);

    let again = ok(&["--format", "structured", "--seed", "9", "--trials", "4", "sample", "uniform", "20"]);
    assert_eq!(out, again);

    let stats = ok(&["--trials", "50", "stats-distrows", "plancherel", "400", "--shape"]);
    assert!(stats.starts_with("# kroncover "));
    assert!(stats.contains("seed=0") && stats.contains("median_shape_distance="));
}

#[test]
fn measure_experiments() {
    assert!(ok(&["--trials", "200", "pigeonhole", "5"]).contains("failures=0"));
    assert!(ok(&["monotonicity", "5"]).contains("violations=0"));
    let demo = ok(&["affine-demo", "5"]);
    assert!(demo.contains("uniform_total=8/5") && demo.contains("uniform_pigeonhole_fails=true"));
    let cover = ok(&["--trials", "20", "exp-coupled-cover", "plancherel", "2", "8", "--coupling", "identical"]);
    assert!(cover.contains("frequency="));
    assert_eq!(ok(&["measure", "[2,1]"]).trim(), "2/3 ~ 0.666667");
}

#[test]
fn constant_audit_reports_the_trend() {
    let out = ok(&["constant-audit", "--n-max", "8"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("n=")).count(), 4);
    assert!(out.contains("bounded=true"));
}

#[test]
fn decompositions() {
    let out = ok(&["staircase-extract", "[5,3,1]", "2"]);
    assert!(out.contains("mu [1]"), "{out}");
    assert_eq!(ok(&["krect", "[5,4,3,2]", "2"]).lines().count(), 2);
    assert_eq!(ok(&["finish-split", "6"]).trim(), "[3,2,1]");
    assert_eq!(ok(&["distrows", "[4,2,2,1]"]).trim(), "3");
}

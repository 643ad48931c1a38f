use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lefschetz"));
    c.env_remove("LEFSCHETZ_MAX_LETTERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    let v = serde_json::from_str(&stdout(&o)).unwrap_or(serde_json::Value::Null);
    (o.status.code().unwrap(), v)
}

fn column(v: &serde_json::Value, table: &str, col: &str) -> Vec<String> {
    v[table].as_array().unwrap().iter().map(|r| r[col].as_str().map_or_else(|| r[col].to_string(), str::to_string)).collect()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lefschetz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn base_rows() {
    let (code, v) = json(&["base", "--g", "3"]);
    assert_eq!(code, 0);
    let row = &v["base"][0];
    assert_eq!(row["n_twists"], 28);
    assert_eq!(row["sigma"], -16);
    assert_eq!(row["k2"], 8);
    assert_eq!(row["chi_f"], 3);
    assert_eq!(row["lambda"], "8/3");
    assert_eq!(row["lambda_decimal"], "2.666667");

    let (code, v) = json(&["base", "--g", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["base"][0]["k2"], 12);
    assert_eq!(v["base"][0]["chi_f"], 4);
    assert_eq!(v["base"][0]["lambda"], "3/1");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["base", "--g", "1"]).status.code(), Some(2));
    assert_eq!(run(&["base"]).status.code(), Some(2));
    assert_eq!(run(&["base", "--g", "x"]).status.code(), Some(2));
    assert_eq!(run(&["thm124", "--g", "3", "--h", "3", "--r", "1", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["thm12", "--g", "3", "--n", "1", "--mode", "fast"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn thm124_lambda_columns() {
    let (code, v) = json(&["thm124", "--g", "3", "--h", "1", "--r", "1", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(column(&v, "sequence", "lambda"), ["8/3", "18/7", "22/9", "30/13"]);
    assert_eq!(column(&v, "sequence", "i"), ["0", "1", "2", "3"]);
    assert_eq!(column(&v, "sequence", "r_i"), ["1", "4", "16", "64"]);
    assert_eq!(v["checks"]["closed_form"], true);
    assert_eq!(v["checks"]["homology_identity"], true);

    let (code, v) = json(&["thm124", "--g", "3", "--h", "2", "--r", "1", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(column(&v, "sequence", "lambda"), vec!["8/3"; 5]);
}

#[test]
fn thm124_ledger_mode_reaches_the_limit() {
    let (code, v) = json(&["thm124", "--g", "5", "--h", "4", "--r", "1", "--n", "50", "--mode", "ledger"]);
    assert_eq!(code, 0);
    let lambdas = column(&v, "sequence", "lambda");
    assert_eq!(lambdas.len(), 51);
    assert!(lambdas.iter().all(|l| l == "16/5"));
    assert_eq!(v["checks"]["slope_limit"], "16/5 ~ 3.200000");

    let (code, v) = json(&["thm124", "--g", "4", "--h", "1", "--r", "2", "--n", "40", "--mode", "ledger"]);
    assert_eq!(code, 0);
    assert_eq!(column(&v, "sequence", "lambda_decimal").last().unwrap(), "2.000000");
}

#[test]
fn budget_is_reported_distinctly() {
    let o = run(&["thm124", "--g", "5", "--h", "4", "--r", "1", "--n", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("letter budget exceeded"));

    let o = bin().args(["thm12", "--g", "3", "--n", "4"]).env("LEFSCHETZ_MAX_LETTERS", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("letter budget exceeded"));
    let o = bin().args(["thm12", "--g", "3", "--n", "4", "--max-letters", "5000"]).env("LEFSCHETZ_MAX_LETTERS", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn thm12_low_slope() {
    let (code, v) = json(&["thm12", "--g", "3", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["fibration"][0]["lambda"], "46/21");
    for check in ["lambda_closed_form", "lower_bound", "upper_bound", "homology_identity", "chain_presence", "h1_trivial", "simply_connected", "minimal"] {
        assert_eq!(v["checks"][check], true, "{check}");
    }
    let (code, v) = json(&["thm12", "--g", "4", "--n", "9", "--mode", "ledger"]);
    assert_eq!(code, 0);
    assert_eq!(v["fibration"][0]["lambda"], "1046/519");
    assert_eq!(v["checks"]["h1_trivial"], "not_computed");
}

#[test]
fn lantern_walks() {
    let (code, v) = json(&["lantern", "--g", "3", "--dir", "down"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"]["before"], "8/3");
    assert_eq!(v["checks"]["after"], "23/9");
    assert_eq!(v["checks"]["verdict"], "decreased");

    let (code, v) = json(&["lantern", "--g", "3", "--dir", "up"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"]["after"], "11/4");
    assert_eq!(v["checks"]["verdict"], "increased");

    let (code, v) = json(&["lantern", "--g", "3", "--dir", "down", "--from", "thm12", "--n", "2", "--mode", "ledger"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"]["before"], "22/9");
    assert_eq!(v["checks"]["after"], "263/108");
}

#[test]
fn verify_round_trip_and_broken_file() {
    let good = tmp("f2.json");
    let o = run(&["thm12", "--g", "3", "--n", "2", "--out", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    v["letters"].as_array_mut().unwrap().remove(7);
    let bad = tmp("f2-deleted.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let (code, out) = json(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    let rows = out["checks"].as_array().unwrap();
    let status = |name: &str| rows.iter().find(|r| r["check"] == name).unwrap()["status"].clone();
    assert_eq!(status("homology_identity"), "fail");
    assert_eq!(status("ledger_length"), "fail");

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    v["surprise"] = serde_json::json!(true);
    let unknown = tmp("f2-unknown.json");
    std::fs::write(&unknown, v.to_string()).unwrap();
    assert_eq!(run(&["verify", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn lantern_from_file() {
    let path = tmp("base3.json");
    assert_eq!(run(&["base", "--g", "3", "--out", path.to_str().unwrap()]).status.code(), Some(0));
    let (code, v) = json(&["lantern", "--input", path.to_str().unwrap(), "--dir", "down"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"]["after"], "23/9");
    let walked = tmp("walked.json");
    let o = run(&["lantern", "--input", path.to_str().unwrap(), "--dir", "up", "--out", walked.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["verify", walked.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn out_needs_a_word() {
    let path = tmp("none.json");
    let o = run(&["thm124", "--g", "3", "--h", "1", "--r", "1", "--n", "1", "--mode", "ledger", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for format in ["text", "csv", "md", "json"] {
        let args = ["table", "--family", "thm124", "--g", "3..4", "--h", "1..3", "--r", "1,2", "--n", "3", "--format", format];
        let one = run(&args);
        let mut par = args.to_vec();
        par.extend(["--jobs", "4"]);
        let two = run(&par);
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, two.stdout, "{format}");
        assert_eq!(one.stdout, run(&args).stdout);
    }
    let a = run(&["thm12", "--g", "3", "--n", "3", "--format", "md"]);
    assert_eq!(a.stdout, run(&["thm12", "--g", "3", "--n", "3", "--format", "md"]).stdout);
}

#[test]
fn table_families() {
    let (code, v) = json(&["table", "--family", "base", "--g", "3..10"]);
    assert_eq!(code, 0);
    let k2 = column(&v, "base", "k2");
    let expect: Vec<String> = (3..=10).map(|g| (4 * g - 4).to_string()).collect();
    assert_eq!(k2, expect);

    let (code, v) = json(&["table", "--family", "thm12", "--g", "3", "--n", "3"]);
    assert_eq!(code, 0);
    let expect: Vec<String> = (0u32..=3)
        .map(|n| {
            let (p, q) = (2u64.pow(n + 1) + 14, 2u64.pow(n) + 5);
            let d = gcd(p, q);
            format!("{}/{}", p / d, q / d)
        })
        .collect();
    assert_eq!(column(&v, "thm12", "lambda"), expect);

    let (code, v) = json(&["table", "--family", "thm124", "--g", "5", "--h", "4", "--r", "1", "--n", "5", "--mode", "explicit"]);
    assert_eq!(code, 0);
    let modes = column(&v, "thm124", "mode");
    assert!(modes.iter().all(|m| m == "ledger"), "{modes:?}");
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn csv_and_md_shapes() {
    let o = run(&["base", "--g", "3", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("g,n_twists,sigma,e,k2,chi_f,lambda,lambda_decimal\n3,28,-16,20,8,3,8/3,2.666667\n\ncheck,value\n"));
    let o = run(&["base", "--g", "3", "--format", "md"]);
    assert!(stdout(&o).contains("| 3 | 28 | -16 | 20 | 8 | 3 | 8/3 | 2.666667 |"));
}

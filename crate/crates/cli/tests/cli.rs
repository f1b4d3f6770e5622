use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let r = mlvdepth::run(std::iter::once("mlvdepth").chain(args.iter().copied()));
    (r.code, r.document)
}

fn problem_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mlvdepth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn reports_are_byte_identical() {
    let a = mlvdepth::run(["mlvdepth", "chain", "--fixture", "sec32"]).stdout;
    let b = mlvdepth::run(["mlvdepth", "chain", "--fixture", "sec32"]).stdout;
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
}

#[test]
fn parallel_search_matches_sequential() {
    let base = ["search-generators", "--field", "qp:2", "--g", "x^4 + 2", "--radius", "1", "--budget", "40"];
    let (c1, d1) = run(&base);
    let mut more = base.to_vec();
    more.extend(["--parallel", "3"]);
    let (c3, d3) = run(&more);
    assert_eq!((c1, c3), (0, 0));
    assert_eq!(d1["result"], d3["result"]);
    assert_eq!(d1["result"]["examined"], 40);
    assert_eq!(d1["result"]["budget_exhausted"], true);
}

#[test]
fn depth_document() {
    let (code, d) = run(&["depth", "--field", "qp:2", "--g", "x^6 + 108"]);
    assert_eq!(code, 0);
    assert_eq!(d["result"]["depth"], 2);
    assert_eq!(d["result"]["e"], 3);
    assert_eq!(d["result"]["f"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["chain", "--field", "qp:5", "--g", "x^2 + 1"]).0, 3);
    assert_eq!(run(&["chain", "--field", "qp:2", "--g", "2*x^2 + 1"]).0, 2);
    assert_eq!(run(&["chain", "--field", "qp:2", "--g", "x^2 + "]).0, 2);
    assert_eq!(run(&["chain", "--field", "qp:6", "--g", "x"]).0, 2);
    assert_eq!(run(&["chain", "--g", "x^2 + 2"]).0, 2);
    assert_eq!(run(&["series-value", "--b", "i + 1 + 1/2*t", "--t-pr", "2"]).0, 4);
    let cluster = ["branches", "--field", "qp:5", "--g", "(x^2 + 1)^2 - 5^41"];
    let (code, d) = run(&[&cluster[..], &["--max-refinements", "3"]].concat());
    assert_eq!((code, d["error"]["kind"].as_str()), (3, Some("Unresolved")));
    let (code, d) = run(&cluster);
    assert_eq!((code, d["result"]["ef_sum"].as_u64()), (0, Some(4)));
    assert_eq!(run(&["chain", "--field", "qp:5", "--g", "x^2 + 1", "--reject-branching"]).1["error"]["kind"], "Branched");
    assert_eq!(mlvdepth::run(["mlvdepth", "no-such-command"]).code, 2);
}

#[test]
fn binary_passes_exit_status_through() {
    let out = Command::new(env!("CARGO_BIN_EXE_mlvdepth"))
        .args(["chain", "--field", "qp:5", "--g", "x^2 + 1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["error"]["kind"], "LimitSituation");
    let out = Command::new(env!("CARGO_BIN_EXE_mlvdepth")).arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty() && !out.stderr.is_empty());
}

#[test]
fn valuation_literals() {
    let (code, d) = run(&["eval", "--field", "qp:2", "--mu", "x @ 1/3; x^3 + 2 @ 2", "--f", "x^4 + 2*x"]);
    assert_eq!(code, 0);
    assert_eq!(d["result"]["value"], "7/3");
    let (code, d) = run(&["eval", "--field", "qp:2", "--g", "x^3 - 2", "--f", "x^3 - 2 + x"]);
    assert_eq!((code, d["result"]["value"].as_str()), (0, Some("1/3")));
    let (code, d) = run(&["residual", "--field", "qp:2", "--mu", "x @ 1/3", "--f", "x^6 + 108"]);
    assert_eq!(code, 0);
    assert_eq!(d["result"]["residual"], "y^2 + 1");
    let (code, d) = run(&["iskey", "--field", "qp:2", "--mu", "x @ 1/3", "--phi", "x^3 + 2"]);
    assert_eq!(code, 0);
    assert_eq!(d["result"]["key"], true);
    let (_, d) = run(&["iskey", "--field", "qp:2", "--mu", "x @ 1/3", "--phi", "x^2 + 2"]);
    assert_eq!(d["result"]["key"], false);
    let (code, d) = run(&["eval", "--field", "qp:2", "--mu", "x @ 1/3; x^3 + 2 @ 1", "--f", "x"]);
    assert_eq!((code, d["error"]["kind"].as_str()), (3, Some("NonIncreasingValue")));
}

#[test]
fn branches_cover_the_degree() {
    let (code, d) = run(&["branches", "--field", "qp:2", "--g", "(x^2 + x + 1)*(x^2 + 2)*(x - 3)"]);
    assert_eq!(code, 0);
    assert_eq!(d["result"]["ef_sum"], 5);
    assert_eq!(d["result"]["unibranched"], false);
}

#[test]
fn problem_files() {
    let p = problem_file("chain.json", r#"{"task": "chain", "field": "qp:2", "g": "x^3 - 2"}"#);
    let path = p.to_str().unwrap();
    let (code, d) = run(&["--input", path]);
    assert_eq!(code, 0);
    assert_eq!(d["command"], "chain");
    assert_eq!(d["result"]["depth"], 1);
    // Flags override the file.
    let (_, d) = run(&["chain", "--input", path, "--g", "x^6 + 108"]);
    assert_eq!(d["result"]["depth"], 2);
    assert_eq!(run(&["depth", "--input", path]).0, 2);
    let bad = problem_file("bad.json", r#"{"task": "chain", "feild": "qp:2"}"#);
    assert_eq!(run(&["--input", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn okutsu_problem_files() {
    let good = problem_file(
        "okutsu.json",
        r#"{"task": "okutsu", "field": "qp:2", "g": "x^3 - 2",
            "families": [{"degree": 1, "members": [["0", "0"]], "max_exists": true},
                         {"degree": 3, "members": [["theta", "x"]], "max_exists": true}],
            "challengers": [{"label": "1", "elem": "1", "degree": 1}]}"#,
    );
    let (code, d) = run(&["--input", good.to_str().unwrap()]);
    assert_eq!(code, 0, "{d}");
    assert_eq!(d["result"]["chain"]["agrees"], true);
    let swapped = problem_file(
        "swapped.json",
        r#"{"task": "okutsu", "field": "qp:2", "g": "x^3 - 2",
            "families": [{"degree": 3, "members": [["theta", "x"]], "max_exists": true},
                         {"degree": 1, "members": [["0", "0"]], "max_exists": true}]}"#,
    );
    let (code, d) = run(&["--input", swapped.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(d["result"]["passed"], false);
}

#[test]
fn pretty_summary() {
    let r = mlvdepth::run(["mlvdepth", "depth", "--fixture", "sec34", "--pretty"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().any(|l| l.trim() == "depth: 2"));
    assert!(r.stdout.lines().any(|l| l.trim() == "status: ok"));
}

#[test]
fn corpus_is_well_formed() {
    let c = mlvdepth::corpus::ore();
    assert!(c.len() >= 20);
    assert!(c.iter().all(|e| [2, 3, 5].contains(&e.p)));
    assert!(mlvdepth::corpus::parse("2 x^2").is_err());
}

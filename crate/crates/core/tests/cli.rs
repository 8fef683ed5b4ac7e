use std::fs;
use std::path::PathBuf;

use treewidth::cli::{run, EXIT_INVALID, EXIT_OK, EXIT_PARSE};
use treewidth::graph::Graph;
use treewidth::treedec::TreeDecomposition;

fn temp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twsolve-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn twsolve(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("twsolve").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const C4: &str = "p tw 4 4\n1 2\n2 3\n3 4\n4 1\n";

#[test]
fn solve_prints_an_optimal_decomposition() {
    let gr = temp("c4.gr", C4);
    for algorithm in ["linear", "simple", "oracle"] {
        let (code, out, _) = twsolve(&["solve", gr.to_str().unwrap(), "--algorithm", algorithm]);
        assert_eq!(code, EXIT_OK);
        let header = out.lines().next().unwrap();
        let fields: Vec<&str> = header.split_whitespace().collect();
        assert_eq!(&fields[..2], &["s", "td"]);
        assert_eq!(fields[3], "3", "{algorithm}: {header}");
        assert_eq!(fields[4], "4");
        let g = Graph::parse_gr(C4.as_bytes()).unwrap();
        let (td, n) = TreeDecomposition::parse_td(out.as_bytes()).unwrap();
        assert_eq!(n, 4);
        assert!(td.validate(&g).is_valid());
    }
}

#[test]
fn seeded_relabeling_keeps_the_width() {
    let gr = temp("c4-seed.gr", C4);
    let (code, out, _) = twsolve(&["solve", gr.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    let (td, _) = TreeDecomposition::parse_td(out.as_bytes()).unwrap();
    assert_eq!(td.width(), 2);
    assert!(td.validate(&Graph::parse_gr(C4.as_bytes()).unwrap()).is_valid());
}

#[test]
fn edgeless_graph_has_width_zero() {
    let gr = temp("empty.gr", "p tw 3 0\n");
    let (code, out, _) = twsolve(&["solve", gr.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (td, n) = TreeDecomposition::parse_td(out.as_bytes()).unwrap();
    assert_eq!(n, 3);
    assert_eq!(td.width(), 0);
}

#[test]
fn decide_answers_both_ways() {
    let gr = temp("c4-decide.gr", C4);
    let path = gr.to_str().unwrap();
    let (code, out, _) = twsolve(&["solve", path, "--decide", "1"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "NO\n"));
    let (code, out, _) = twsolve(&["solve", path, "--decide", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("YES\ns td"));
    let (_, out, _) = twsolve(&["solve", path, "--decide", "2", "--no-witness"]);
    assert_eq!(out, "YES\n");
}

#[test]
fn validate_reports_status() {
    let gr = temp("c4-validate.gr", C4);
    let good = temp("good.td", "s td 2 3 4\nb 1 1 2 3\nb 2 1 3 4\n1 2\n");
    let bad = temp("bad.td", "s td 2 2 4\nb 1 1 2\nb 2 3 4\n1 2\n");
    let broken = temp("broken.td", "s td 2 3 4\nb 1 1 x 3\n");
    let g = gr.to_str().unwrap();
    assert_eq!(twsolve(&["validate", g, good.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(twsolve(&["validate", g, bad.to_str().unwrap()]).0, EXIT_INVALID);
    let (code, _, err) = twsolve(&["validate", g, broken.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_is_a_parse_failure() {
    assert_eq!(twsolve(&["solve", "/nonexistent/graph.gr"]).0, EXIT_PARSE);
    assert_eq!(twsolve(&["frobnicate"]).0, EXIT_PARSE);
}

#[test]
fn typseq_calculator() {
    assert_eq!(twsolve(&["typseq", "tau", "1,5,3,4,2,7"]).1, "1,7\n");
    assert_eq!(twsolve(&["typseq", "tau", "3,1,2,0,4"]).1, "3,0,4\n");
    assert_eq!(twsolve(&["typseq", "superior", "1,2", "2,3"]).1, "true\n");
    assert_eq!(twsolve(&["typseq", "superior", "3", "1,2"]).1, "false\n");
    let (code, out, _) = twsolve(&["typseq", "merge", "1,3,4", "4,2,5", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().all(|l| !l.is_empty()));
    let (code, _, _) = twsolve(&["typseq", "merge", "1", "1", "9"]);
    assert_eq!(code, EXIT_PARSE);
}

#[test]
fn nice_form_is_printed() {
    let gr = temp("c4-nice.gr", C4);
    let td = temp("c4-nice.td", "s td 2 3 4\nb 1 1 2 3\nb 2 1 3 4\n1 2\n");
    let (code, out, _) = twsolve(&["nice", gr.to_str().unwrap(), td.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("join") || out.contains("introduce"));
}

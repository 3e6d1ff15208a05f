use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagcoh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn square_structures_fail_with_their_circuit() {
    for file in ["square-tensor.net", "square-before.net"] {
        let out = run(&["check", data(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{file}");
        assert_eq!(stdout(&out), "FAIL\nchordless circuit: a, c⊥, c, a⊥, a\n");
    }
}

#[test]
fn chorded_structures_pass() {
    for file in ["chorded-tensor.net", "before-pairs.net"] {
        let out = run(&["check", data(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        assert_eq!(stdout(&out), "PASS\n");
    }
}

#[test]
fn bad_input_exits_with_two() {
    let out = run(&["check", data("missing.net").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let atoms = data("separating.atoms");
    let out = run(&["check", atoms.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn separating_interpretation() {
    let atoms = data("separating.atoms");
    let out = run(&[
        "interpret",
        data("square-tensor.net").to_str().unwrap(),
        "--atoms",
        atoms.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("clique: false\n"));
    let out = run(&[
        "interpret",
        data("chorded-tensor.net").to_str().unwrap(),
        "--atoms",
        atoms.to_str().unwrap(),
    ]);
    assert!(stdout(&out).ends_with("clique: true\n"));
}

#[test]
fn catalog_agrees_with_the_criterion() {
    let out = run(&[
        "interpret",
        data("square-before.net").to_str().unwrap(),
        "--catalog",
    ]);
    let text = stdout(&out);
    assert!(text.contains("separating interpretation: "));
    assert!(text.contains("criterion: FAIL\nagreement: true\n"));
}

#[test]
fn web_cap_bounds_atom_spaces() {
    let atoms = data("separating.atoms");
    let out = run(&[
        "--web-cap",
        "1",
        "interpret",
        data("square-tensor.net").to_str().unwrap(),
        "--atoms",
        atoms.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn no_counit_survives() {
    let out = run(&["props", "--suite", "nomonad"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 surviving"));
    let out = run(&["--format", "lines", "props", "--suite", "nomonad"]);
    let line = stdout(&out);
    let fields: Vec<&str> = line.trim_end().split('\t').collect();
    assert_eq!(fields[..2], ["nomonad/no-counit", "PASS"]);
}

#[test]
fn unknown_suite_is_rejected() {
    let out = run(&["props", "--suite", "monads"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dicograph_dot_ignores_associativity_and_commutativity() {
    let dot = |formula: &str| stdout(&run(&["dicograph", formula, "--dot"]));
    let base = dot("((a*b);c)|d");
    assert!(base.contains("\"a\" -> \"c\";"));
    assert_eq!(dot("d|((b*a);c)"), base);
    assert_eq!(dot("(d|((b*a);c))"), base);
    assert_ne!(dot("(c;(a*b))|d"), base);
}

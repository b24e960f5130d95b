use ramiform::cli::{run, EXIT_INDETERMINATE, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};

fn ramiform(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ramiform").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn form_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("ramiform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(ramiform(&["--help"]).0, EXIT_OK);
    assert_eq!(ramiform(&["--version"]).0, EXIT_OK);
}

#[test]
fn bad_arguments_are_input_errors() {
    assert_eq!(ramiform(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["audit", "L99"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["powers", "--degree", "8"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["powers", "--workers", "0"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["certify", "--extremal", "f"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["solve", "/nonexistent/form.txt"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["audit", "L2.4", "--field", "sqrt(2)"]).0, EXIT_INPUT);
    let bad = form_file("bad.txt", "field Q2(sqrt(3))\ndegree 6\ncoeffs 1, 1\n");
    let (code, out, err) = ramiform(&["solve", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn field_and_degree_must_match_the_file() {
    let path = form_file("match.txt", "field Q2(sqrt(-1))\ndegree 6\ncoeffs 1, 1\n");
    assert_eq!(ramiform(&["normalize", &path, "--field", "sqrt(2)"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["normalize", &path, "--degree", "10"]).0, EXIT_INPUT);
    assert_eq!(ramiform(&["normalize", &path, "--field", "sqrt(-1)"]).0, EXIT_OK);
}

#[test]
fn powers_lists_three_residues() {
    let (code, out, _) = ramiform(&["powers", "--field", "sqrt(-5)"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("1+pi^2+pi^3"), "{out}");
}

#[test]
fn audit_all_is_clean() {
    let (code, out, _) = ramiform(&["audit"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn solve_exit_codes() {
    let (code, out, _) = ramiform(&["solve", "--extremal", "f", "--field", "sqrt(2)"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("NOT_FOUND"), "{out}");

    let path = form_file("iso.txt", "field Q2(sqrt(-1))\ndegree 6\ncoeffs 1, -1\n");
    let (code, out, _) = ramiform(&["solve", &path]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("FOUND") && out.contains("verified"), "{out}");
}

#[test]
fn certify_exit_codes() {
    let (code, out, _) = ramiform(&["certify", "--extremal", "f", "--field", "sqrt(-2)"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("EXHAUSTIVE_MOD(6)"), "{out}");

    let (code, out, _) = ramiform(&["certify", "--extremal", "g", "--field", "sqrt(-1)", "--degree", "10"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("DISTINCT_LEVELS"), "{out}");

    let path = form_file("zero.txt", "field Q2(sqrt(-1))\ndegree 6\ncoeffs 1, -1\n");
    assert_eq!(ramiform(&["certify", &path, "--modulus", "2"]).0, EXIT_NEGATIVE);
    assert_eq!(ramiform(&["certify", &path, "--method", "distinct"]).0, EXIT_NEGATIVE);

    let args = ["certify", "--extremal", "f", "--field", "sqrt(2)", "--budget", "5"];
    assert_eq!(ramiform(&args).0, EXIT_INDETERMINATE);
}

#[test]
fn json_output_parses() {
    for args in [
        &["powers", "--emit-json"][..],
        &["audit", "L2.1", "--emit-json"],
        &["certify", "--extremal", "f", "--field", "sqrt(10)", "--emit-json"],
        &["solve", "--extremal", "g", "--field", "sqrt(-5)", "--emit-json"],
        &["reproduce", "--trials", "3", "--emit-json"],
    ] {
        let (_, out, _) = ramiform(args);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
        assert!(v.is_object());
    }
}

#[test]
fn reproduce_is_deterministic_across_workers() {
    let base = ["reproduce", "--trials", "20", "--seed", "11"];
    let (c1, a, _) = ramiform(&base);
    let (c2, b, _) = ramiform(&base);
    let mut four = base.to_vec();
    four.extend(["--workers", "4"]);
    let (c3, c, _) = ramiform(&four);
    assert_eq!((c1, c2, c3), (EXIT_OK, EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    // only the echoed worker count differs
    assert_eq!(a.replace("workers=1", "workers=4"), c);
}

#[test]
fn seed_changes_trials() {
    let (_, a, _) = ramiform(&["reproduce", "--trials", "2", "--seed", "1"]);
    let (_, b, _) = ramiform(&["reproduce", "--trials", "2", "--seed", "2"]);
    assert_ne!(a, b);
}

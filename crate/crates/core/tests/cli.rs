//! End-to-end behaviour of the command-line front end.

use std::path::PathBuf;

use intransitive::cli::{dispatch, Output, EXIT_ASSERT, EXIT_INPUT, EXIT_OK, EXIT_USAGE};

fn root(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    let mut argv = vec!["intransitive".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    dispatch(argv)
}

#[test]
fn classify_rps() {
    let out = run(&["classify", &root("games/rps.gm")]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("classification=StronglyIntransitive\n"));
    let out = run(&["classify", "--game", &root("games/dice.gm"), "--assert-class", "WeakDomination"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let out = run(&["classify", &root("games/dice.gm"), "--assert-class", "Other"]);
    assert_eq!(out.code, EXIT_ASSERT);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).code, EXIT_USAGE);
    assert_eq!(run(&["classify"]).code, EXIT_USAGE);
    assert_eq!(run(&["cycles", &root("games/rps.gm"), "--max-len", "7"]).code, EXIT_USAGE);
    assert_eq!(run(&["classify", &root("nope.gm")]).code, EXIT_INPUT);
    assert_eq!(run(&["cycles", &root("games/pennies.gm")]).code, EXIT_INPUT);
    assert_eq!(run(&["crosstable", &root("games/rps.gm")]).code, EXIT_INPUT);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
}

#[test]
fn enumerate_and_cycles() {
    assert_eq!(run(&["enumerate", "--rows", "2", "--cols", "2"]).stdout, "count=81\n");
    let out = run(&["cycles", &root("games/rps.gm"), "--max-len", "3"]);
    assert_eq!(out.stdout, "cycle: R -> P -> S -> R\ncycles=1\n");
    assert_eq!(run(&["cycles", &root("games/dice.gm")]).stdout, "cycles=0\n");
}

#[test]
fn demo_ends_without_winner() {
    let out = run(&["demo", "theorem1", "--game", &root("games/rps.gm"), "--fuel", "10000"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.ends_with("universal_winner=none\n"));
}

#[test]
fn arena_and_tournament_are_reproducible() {
    let args = [
        "tournament",
        &root("games/rps.gm"),
        "--learners",
        &root("learners"),
        "--fuel",
        "3000",
    ];
    let a = run(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a, run(&args));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(a.stdout, run(&threaded).stdout);

    let out = run(&[
        "arena",
        &root("games/rps.gm"),
        "--p1",
        &root("learners/const_r.lrn"),
        "--p2",
        &root("learners/defiance.lrn"),
        "--fuel",
        "500",
        "--mode",
        "deadline",
    ]);
    assert!(out.stdout.ends_with("eval1=halted eval2=exhausted result=Win1\n"), "{}", out.stdout);
}

#[test]
fn maxmin_series_crosstable() {
    let out = run(&["maxmin", &root("games/pennies.gm"), "--iters", "50000", "--tol", "0.01"]);
    assert!(out.stdout.starts_with("p1=0.49") && out.stdout.contains("converged=true"), "{}", out.stdout);
    let out = run(&["series", &root("games/rps.gm"), &root("games/rps.gm"), "--aggregate", "lex"]);
    assert!(out.stdout.contains("row 1: 0 -1 +1\n"));
    let out = run(&["crosstable", &root("crosstables/engines.csv"), "--margin", "0.06"]);
    assert!(out.stdout.ends_with("cycles=0\n"));
}

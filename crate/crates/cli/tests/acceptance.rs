//! Acceptance suite, CLI part: every documented subcommand example is run
//! twice and must produce byte-identical output and the documented exit
//! code.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmgroups"))
        .args(args)
        .output()
        .expect("failed to launch the binary")
}

fn deterministic(args: &[&str], expected_code: i32) -> bool {
    let first = run(args);
    let second = run(args);
    first.status.code() == Some(expected_code)
        && second.status.code() == Some(expected_code)
        && first.stdout == second.stdout
        && first.stderr == second.stderr
}

#[test]
fn criterion_12_cli_determinism() {
    let examples: &[(&[&str], i32)] = &[
        (&["euler", "1", "0", "0", "1"], 0),
        (&["act", "1", "1", "0", "1", "2", "3"], 0),
        (&["factor", "0", "1", "-1", "0"], 0),
        (&["factor", "0", "1", "-1", "0", "--format", "machine"], 0),
        (&["factor-pp", "1", "-1", "0", "1"], 0),
        (&["wit", "1", "0", "1", "1", "1", "0"], 0),
        (&["wit", "1", "0", "1", "1", "0", "0"], 1),
        (&["dagger", "2", "3", "1", "2"], 0),
        (&["isometric", "2", "3", "1", "2"], 0),
        (&["xi", "0", "-1", "1", "0"], 0),
        (&["xi", "1", "0", "0", "1"], 1),
        (&["factor-u0", "1", "0", "0", "1"], 0),
        (&["compose-trivial", "id:-:2", "id:-:-4"], 0),
        (&["compose-trivial", "id:-:1", "id:-:0"], 1),
        (&["compose-abelian", "2:-:-:-", "3:-:-:-"], 0),
        (&["split-pic", "-"], 0),
        (&["verify", "--max-bfs-len", "5"], 0),
        (&["verify", "--max-bfs-len", "13"], 2),
        (&["euler", "1", "x", "0", "1"], 2),
        (&["factor", "1", "1", "1", "1"], 1),
        (&["factor", "0", "1", "1", "0"], 1),
    ];
    let mut pass = true;
    for (args, code) in examples {
        let ok = deterministic(args, *code);
        if !ok {
            println!("  nondeterministic or wrong exit code: {args:?} (want {code})");
        }
        pass &= ok;
    }
    println!(
        "{}: criterion 12: CLI determinism ({} examples)",
        if pass { "PASS" } else { "FAIL" },
        examples.len()
    );
    assert!(pass);
}

#[test]
fn documented_example_outputs() {
    // euler 1 0 0 1 -> result 1
    let out = run(&["euler", "1", "0", "0", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result: \"1\""), "{text}");

    // factor 0 1 -1 0 -> the three-letter word with a passing certificate
    let out = run(&["factor", "0", "1", "-1", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains(r#"[{"exp":"1","gen":"PhiTwo"},{"exp":"1","gen":"PhiOne"},{"exp":"1","gen":"PhiTwo"}]"#),
        "{text}"
    );
    assert!(text.contains(r#""ok":true"#), "{text}");

    // xi 1 0 0 1 -> exit 1 naming NotInU0
    let out = run(&["xi", "1", "0", "0", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("NotInU0"), "{err}");
}

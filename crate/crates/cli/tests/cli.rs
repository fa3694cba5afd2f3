use std::fs;
use std::process::Command;

fn sepsys(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sepsys")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn validate_exit_codes() {
    let (code, out, _) = sepsys(&["validate", "path4"]);
    assert_eq!(code, 0);
    assert!(out.contains("elements: 6\n"));
    assert!(out.contains("tree set: yes\n"));

    let dir = tempfile::tempdir().unwrap();
    let crossing = dir.path().join("crossing.sepsys");
    fs::write(&crossing, "sepsys 1\nelements:\n  a\n  a*\n  b\n  b*\ninvolution:\n  a a*\n  b b*\n").unwrap();
    let (code, out, _) = sepsys(&["validate", crossing.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("tree set: no\n"));

    let (code, _, err) = sepsys(&["validate", "no_such_fixture"]);
    assert_eq!(code, 2);
    assert!(err.contains("neither a file nor a known fixture"));
}

#[test]
fn validate_reports_located_syntax_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sepsys");
    fs::write(&bad, "sepsys 1\nelements:\n  a\n  b\ninvolution:\n  a\n").unwrap();
    let (code, _, err) = sepsys(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("`b` has no inverse"), "{err}");
}

#[test]
fn orientations_of_path4() {
    let (code, out, _) = sepsys(&["orientations", "path4"]);
    assert_eq!(code, 0);
    assert!(out.contains("consistent orientations: 4\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with('O')).count(), 4);
}

#[test]
fn stars_of_k13() {
    let (code, out, _) = sepsys(&["stars", "k13"]);
    assert_eq!(code, 0);
    assert!(out.contains("{(1,0), (2,0), (3,0)} size 3 branching"));
    assert!(out.contains("splitting stars: 4\n"));
}

#[test]
fn quotient_exit_codes() {
    let (code, out, _) = sepsys(&["quotient", "ex_non_trans", "--selection", "(1,2),(3,2),(3,4),(5,4)"]);
    assert_eq!(code, 1);
    assert!(out.contains("transitivity violations: 1\n"));
    assert!(out.contains("  [(6,3)] <= [(2,3)] <= [(3,6)] (dual: [(6,3)] <= [(3,2)] <= [(3,6)])\n"));

    let (code, out, _) = sepsys(&["quotient", "path4", "--selection", "(1,2),(3,2)"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("certified tree set: yes\n"));

    let (code, _, err) = sepsys(&["quotient", "path4", "--selection", "(1,2)"]);
    assert_eq!(code, 2);
    assert!(err.contains("meets the selection exactly once"), "{err}");
}

#[test]
fn limit_of_tree_set_and_document() {
    let (code, out, _) = sepsys(&["limit", "path4"]);
    assert_eq!(code, 0);
    assert!(out.contains("phi isomorphism: yes\n"));

    let (code, out, _) = sepsys(&["limit", "path2"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("no selection"));

    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("inv.sepsys");
    let text = "sepsys 1\nkind: inverse-system\npoints:\n  p\n  q\npoint-le:\n  p q\n\
--- point p\ntree:\n  1 2\n--- point q\ntree:\n  1 2\n  2 3\n\
--- bond q p\n  (1,2) (1,2)\n  (2,1) (2,1)\n  (2,3) (1,2)\n  (3,2) (2,1)\n";
    fs::write(&doc, text).unwrap();
    let (code, out, _) = sepsys(&["limit", doc.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("limit elements: 4\n"));
    assert!(out.contains("tree set: yes\n"));
}

#[test]
fn represent_exit_codes() {
    let (code, out, _) = sepsys(&["represent", "path3", "--ground", "splitting"]);
    assert_eq!(code, 0);
    assert!(out.contains("ground: splitting (3 orientations)\n"));

    let (code, out, _) = sepsys(&["represent", "path3", "--ground", "greatest"]);
    assert_eq!(code, 1);
    assert!(out.contains("hypothesis failed"));

    let (code, _, _) = sepsys(&["represent", "path3", "--ground", "sideways"]);
    assert_eq!(code, 2);
}

#[test]
fn check_exit_codes() {
    let (code, out, _) = sepsys(&["check", "k13"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.ends_with(": holds")).count(), 4);

    let (code, out, _) = sepsys(&["check", "ray"]);
    assert_eq!(code, 0);
    assert!(out.contains("chain-complete: unknown up to 20\n"));

    let (code, out, _) = sepsys(&["check", "infinite_star"]);
    assert_eq!(code, 1);
    assert!(out.contains("star-finite: violated"));
}

#[test]
fn gen_round_trips_through_validate() {
    let (code, text, _) = sepsys(&["gen", "path", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("sepsys 1\nname: path3\n"));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.sepsys");
    fs::write(&file, &text).unwrap();
    let (code, out, _) = sepsys(&["validate", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("system: path3\n"));

    let (code, _, _) = sepsys(&["gen", "unknown"]);
    assert_eq!(code, 2);
}

#[test]
fn json_output_parses() {
    let (code, out, _) = sepsys(&["--json", "check", "k13"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 4);
    assert!(verdicts.iter().all(|x| x["verdict"] == "Holds"));

    let (_, out, _) = sepsys(&["--json", "quotient", "ex_trivial", "--selection", "(2,5),(6,5),(3,7),(8,7)"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trivial_classes"][0]["class"], "[(1,2)]");
}

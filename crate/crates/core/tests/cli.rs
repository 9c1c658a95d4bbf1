use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn finsite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsite")).args(args).env_remove("FINSITE_BUDGET_SECS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_topology_on_arr_passes() {
    let o = finsite(&["check", "topology", path(&fixture("arr.site")), "--topology", "TRIV"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn vertical_non_iso_is_not_locally_cartesian() {
    let o = finsite(&["check", "loccart", path(&fixture("gd1.site")), "--arrow", "v_u"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL"));
    // both routes report
    assert!(out.contains("fail locally cartesian:") && out.contains("fail locally cartesian (oracle)"), "{out}");
}

#[test]
fn json_report_carries_both_routes() {
    let o = finsite(&["check", "loccart", path(&fixture("gd1.site")), "--arrow", "v_u", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exit_code"], 1);
    let outcome = &v["outcomes"][0];
    assert_eq!(outcome["kind"], "loccart");
    assert_eq!(outcome["passed"], false);
    assert!(outcome["reports"].as_array().unwrap().len() >= 2);
}

#[test]
fn giraud_output_is_a_topology() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.site");
    let o = finsite(&["giraud", path(&fixture("gd1.site")), "--fibration", "p", "--base", "J", "-o", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = finsite(&["check", "topology", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = finsite(&["check", "topology", path(&out), "--topology", "Giraud"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn comma_site_output_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("comma.site");
    let o = finsite(&["comma-site", path(&fixture("gd1.site")), "--site", "S", "-o", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = finsite(&["run", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn sheafify_output_is_a_sheaf() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("p.site");
    std::fs::write(
        &src,
        "category ARR {\n  objects: a, b\n  arrow f: a -> b\n}\n\n\
         topology K on ARR {\n  cover a with { }\n}\n\n\
         presheaf P on ARR {\n  elements a: x, y\n  elements b: z\n  act f: z -> x\n}\n",
    )
    .unwrap();
    let o = finsite(&["check", "sheaf", path(&src), "--presheaf", "P", "--topology", "K"]);
    assert_eq!(code(&o), 1, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("s.site");
    let o = finsite(&["sheafify", path(&src), "--presheaf", "P", "--topology", "K", "-o", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = finsite(&["run", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn run_executes_embedded_checks() {
    for f in ["arr.site", "gd1_indexed.site"] {
        let o = finsite(&["run", path(&fixture(f))]);
        assert_eq!(code(&o), 0, "{f}: {}", stdout(&o));
    }
    // gd1.site asks whether the lift `fx` is locally cartesian: it is
    let o = finsite(&["run", path(&fixture("gd1.site"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn fmt_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.site");
    let twice = dir.path().join("twice.site");
    for f in ["arr.site", "gd1.site", "gd1_indexed.site"] {
        assert_eq!(code(&finsite(&["fmt", path(&fixture(f)), "-o", path(&once)])), 0);
        assert_eq!(code(&finsite(&["fmt", path(&once), "-o", path(&twice)])), 0);
        assert_eq!(std::fs::read(&once).unwrap(), std::fs::read(&twice).unwrap(), "{f}");
    }
    let o = finsite(&["fmt", path(&fixture("arr.site"))]);
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("arr.site")).unwrap());
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.site");
    std::fs::write(&bad, "category X {\n  objects: a\n  arrow f: a -> b\n}\n").unwrap();
    let (gd1, arr) = (fixture("gd1.site"), fixture("arr.site"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["check", "topology", path(&bad)],
        vec!["check", "loccart", path(&gd1), "--arrow", "nope"],
        vec!["check", "topology", "/nonexistent/file.site"],
        vec!["check", "no-such-kind", path(&arr)],
        vec!["run", path(&bad)],
        vec!["frobnicate"],
        vec!["audit", "--suite", "no-such-suite"],
        vec!["giraud", path(&gd1), "--fibration", "q", "--base", "J"],
    ];
    for args in cases {
        let o = finsite(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = finsite(&["check", "topology", path(&bad)]);
    // diagnostics carry a line:col span
    assert!(String::from_utf8_lossy(&o.stderr).contains("3:"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&finsite(&["--help"])), 0);
    assert_eq!(code(&finsite(&["audit", "--help"])), 0);
}

#[test]
fn audit_exit_codes() {
    let o = finsite(&["audit", "--suite", "giraud-minimality", "--max-objects", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("exhaustive"));

    let o = finsite(&["audit", "--suite", "canonical-collapse", "--endomorphisms", "--max-objects", "2"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("counterexample"), "{out}");
    assert!(out.contains("cover b with { }"), "{out}");

    let o = finsite(&["audit", "--suite", "cartesian-loccart", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r.get("micros").is_some()));
}

#[test]
fn budget_variable_truncates() {
    let o = Command::new(env!("CARGO_BIN_EXE_finsite"))
        .args(["audit", "--suite", "loccart-dual-route", "--budget", "1000"])
        .env("FINSITE_BUDGET_SECS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("budget exhausted"), "{}", stdout(&o));
}

#[test]
fn enumerate_is_deterministic() {
    let a = finsite(&["enumerate", "--max-objects", "2", "--max-arrows", "1", "--seed", "3"]);
    let b = finsite(&["enumerate", "--max-objects", "2", "--max-arrows", "1", "--seed", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let one = stdout(&finsite(&["enumerate", "--max-objects", "1", "--max-arrows", "0"]));
    let first = one.split("# instance 1").next().unwrap();
    assert_eq!(first.trim(), "# instance 0\ncategory C {\n  objects: a\n}");
    let limited = stdout(&finsite(&["enumerate", "--max-objects", "2", "--max-arrows", "1", "--limit", "4"]));
    assert_eq!(limited.matches("# instance").count(), 4);
}

//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use finsite::audit::{run_audit, AuditConfig, AuditReport, Bounds, Mode, Suite};

struct Verdict {
    passed: bool,
    detail: String,
}

fn audit(suite: Suite) -> AuditReport {
    run_audit(&AuditConfig::new(suite))
}

fn summary(r: &AuditReport) -> String {
    let mode = match r.mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Sampled => "sampled",
    };
    let failures: usize = r.properties.iter().map(|p| p.failures).sum();
    format!("{} instances, {} checks, {failures} failures, {mode} {}/{}", r.instances(), r.checks(), r.evaluated, r.population)
}

fn plain(r: AuditReport) -> Verdict {
    Verdict { passed: r.passed && !r.truncated, detail: summary(&r) }
}

fn timed(r: AuditReport, limit: Duration, started: Instant) -> Verdict {
    let elapsed = started.elapsed();
    Verdict {
        passed: r.passed && !r.truncated && elapsed < limit,
        detail: format!("{}; limit {}s", summary(&r), limit.as_secs()),
    }
}

fn criterion_1(started: Instant) -> Verdict {
    let r = audit(Suite::LoccartDualRoute);
    let mut v = timed(r.clone(), Duration::from_secs(60), started);
    v.passed &= r.checks() >= 500 && r.mode == Mode::Exhaustive;
    v
}

/// Every category with at most 3 objects and 3 non-identity arrows,
/// endomorphisms included, on both ends of the comorphism.
fn criterion_3(started: Instant) -> Verdict {
    let mut config = AuditConfig::new(Suite::CanonicalCollapse);
    config.bounds = Bounds { max_objects: 3, max_arrows: 3, endomorphisms: true, ..config.bounds };
    config.ceiling = usize::MAX;
    let r = run_audit(&config);
    let mut v = timed(r.clone(), Duration::from_secs(30), started);
    for note in &r.notes {
        v.detail.push_str(&format!("\n    note: {note}"));
    }
    let smallest = r.counterexamples.iter().min_by_key(|cx| cx.witness.as_ref().map_or(usize::MAX, String::len));
    if let Some(cx) = smallest {
        v.detail.push_str(&format!("\n    counterexample {}: {}", cx.instance, cx.detail));
        for line in cx.witness.iter().flat_map(|w| w.lines()) {
            v.detail.push_str(&format!("\n      {line}"));
        }
    }
    v
}

/// Every enumerated triplet and comma sheaf, no sampling.
fn criterion_11() -> Verdict {
    let mut config = AuditConfig::new(Suite::Correspondence);
    config.ceiling = usize::MAX;
    let r = run_audit(&config);
    let mut v = plain(r.clone());
    v.passed &= r.mode == Mode::Exhaustive;
    v
}

fn criterion_4() -> Verdict {
    let r = audit(Suite::GiraudMinimality);
    let scanned = r.properties.iter().find(|p| p.property == "no smaller topology works").map_or(0, |p| p.instances);
    let mut v = plain(r);
    v.passed &= scanned > 0;
    v.detail.push_str(&format!("; {scanned} lattice scans"));
    v
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn criterion_13() -> Verdict {
    let r = audit(Suite::Dsl);
    let mut v = plain(r);
    let exe = env!("CARGO_BIN_EXE_finsite");
    let status = |args: &[&str]| Command::new(exe).args(args).env_remove("FINSITE_BUDGET_SECS").output().map(|o| o.status.code());
    let (arr, gd1, gd1i) = (fixture("arr.site"), fixture("gd1.site"), fixture("gd1_indexed.site"));
    let p = |x: &PathBuf| x.to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["run".into(), p(&arr)], 0),
        (vec!["run".into(), p(&gd1)], 0),
        (vec!["run".into(), p(&gd1i)], 0),
        (vec!["check".into(), "topology".into(), p(&arr), "--topology".into(), "TRIV".into()], 0),
        (vec!["check".into(), "loccart".into(), p(&gd1), "--arrow".into(), "v_u".into()], 1),
        (vec!["check".into(), "loccart".into(), p(&gd1), "--arrow".into(), "missing".into()], 2),
        (vec!["check".into(), "topology".into(), p(&arr), "--topology".into(), "MISSING".into()], 2),
        (vec!["run".into(), "/nonexistent.site".into()], 2),
    ];
    let mut bad = Vec::new();
    for (args, want) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        match status(&args) {
            Ok(Some(c)) if c == *want => {}
            other => bad.push(format!("{args:?} -> {other:?}, want {want}")),
        }
    }
    v.passed &= bad.is_empty();
    v.detail.push_str(&format!("; {} CLI exit codes", cases.len()));
    if !bad.is_empty() {
        v.detail.push_str(&format!(": {}", bad.join("; ")));
    }
    v
}

type Criterion = (usize, &'static str, Box<dyn Fn(Instant) -> Verdict>);

fn main() -> ExitCode {
    // honour `cargo test -- <filter>` loosely: any argument naming a criterion number restricts the run
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: Vec<Criterion> = vec![
        (1, "dual-route locally-cartesian agreement", Box::new(criterion_1)),
        (2, "cartesian implies locally cartesian", Box::new(|_| plain(audit(Suite::CartesianLoccart)))),
        (3, "canonical collapse on categories with at most 3 objects", Box::new(criterion_3)),
        (4, "Giraud topology soundness and minimality", Box::new(|_| criterion_4())),
        (5, "local factorization", Box::new(|_| plain(audit(Suite::LocalFactorization)))),
        (6, "K-cartesian equivalence", Box::new(|_| plain(audit(Suite::KCartesian)))),
        (7, "cofinality equivalences", Box::new(|_| plain(audit(Suite::Cofinality)))),
        (8, "comparison-cell laws", Box::new(|_| plain(audit(Suite::ComparisonCells)))),
        (9, "criterion equivalences", Box::new(|_| plain(audit(Suite::CriterionEquivalence)))),
        (10, "comma-site soundness", Box::new(|_| plain(audit(Suite::CommaSite)))),
        (11, "triplet and comma-sheaf correspondence", Box::new(|_| criterion_11())),
        (12, "sheafification", Box::new(|_| plain(audit(Suite::Sheafification)))),
        (13, "text format and CLI exit codes", Box::new(|_| criterion_13())),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let v = run(started);
        let verdict = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict} {name} ({:.1}s): {}", started.elapsed().as_secs_f64(), v.detail);
        failed += usize::from(!v.passed);
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}

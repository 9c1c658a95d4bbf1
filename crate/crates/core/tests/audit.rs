use std::sync::Arc;
use std::time::Duration;

use finsite::audit::*;
use finsite::dsl::parse;
use finsite::fibration::is_cartesian_arrow;
use finsite::fincat::{CategoryBuilder, FinFunctor};
use finsite::locfib::{is_locally_cartesian, LocalSite};
use finsite::sites::{canonical_topology, GrothendieckTopology, SitedFunctor};

fn strip_timing(r: &AuditReport) -> Vec<(String, String, bool, usize, String, Option<String>)> {
    r.records
        .iter()
        .map(|x| (x.property.clone(), x.instance.clone(), x.passed, x.checks, x.detail.clone(), x.witness.clone()))
        .collect()
}

#[test]
fn audits_are_deterministic() {
    for suite in [Suite::CartesianLoccart, Suite::GiraudMinimality, Suite::Dsl] {
        let config = AuditConfig::new(suite);
        let (a, b) = (run_audit(&config), run_audit(&config));
        assert_eq!(strip_timing(&a), strip_timing(&b), "{}", suite.name());
        assert_eq!((a.population, a.evaluated, a.passed), (b.population, b.evaluated, b.passed));
    }
}

#[test]
fn sampling_beyond_the_ceiling_is_seeded() {
    let mut config = AuditConfig::new(Suite::CartesianLoccart);
    config.bounds.max_objects = 3;
    config.ceiling = 40;
    let (a, b) = (run_audit(&config), run_audit(&config));
    assert_eq!(a.mode, Mode::Sampled);
    assert_eq!(strip_timing(&a), strip_timing(&b));
    config.seed = 7;
    let c = run_audit(&config);
    assert_eq!(c.mode, Mode::Sampled);
    assert_ne!(strip_timing(&a), strip_timing(&c));
}

#[test]
fn zero_budget_truncates() {
    let mut config = AuditConfig::new(Suite::LoccartDualRoute);
    config.budget = Some(Duration::ZERO);
    let r = run_audit(&config);
    assert!(r.truncated);
    assert!(r.evaluated < r.population);
}

#[test]
fn every_suite_has_a_distinct_name_and_criterion() {
    let mut criteria: Vec<usize> = Suite::ALL.iter().map(|s| s.criterion()).collect();
    criteria.sort_unstable();
    assert_eq!(criteria, (1..=13).collect::<Vec<_>>());
    for s in Suite::ALL {
        assert_eq!(Suite::from_name(s.name()), Some(s));
    }
}

#[test]
fn enumerate_single_object_stream() {
    let bounds = Bounds { max_objects: 1, max_arrows: 0, ..Bounds::default() };
    let docs: Vec<String> = enumerate_instances(bounds, 0).collect();
    let plain: Vec<&String> = docs.iter().filter(|d| !d.contains("topology") && !d.contains("functor")).collect();
    assert_eq!(plain.len(), 1);
    assert!(plain[0].contains("objects: a"));
    // ONE carries two topologies
    let sited = docs.iter().filter(|d| d.contains("topology") && !d.contains("functor")).count();
    assert_eq!(sited, 2);
    assert!(docs.iter().all(|d| parse(d).is_ok()));
    assert_eq!(docs, enumerate_instances(bounds, 0).collect::<Vec<_>>());
}

#[test]
fn enumerate_two_object_categories() {
    let bounds = Bounds { max_objects: 2, max_arrows: 1, endomorphisms: false, ..Bounds::default() };
    let plain = enumerate_instances(bounds, 0).filter(|d| !d.contains("topology") && !d.contains("functor")).count();
    // ONE, DISC2 and ARR
    assert_eq!(plain, 3);
}

/// `f: b -> a` over the idempotent monoid `{id, e}` with `K` canonical and `J` trivial.
fn idempotent_site() -> (LocalSite, finsite::fincat::Arr, FinFunctor) {
    let d = Arc::new(CategoryBuilder::new("D").objects(["a", "b"]).arrow("f", "b", "a").build().unwrap());
    let c = Arc::new(CategoryBuilder::new("C").object("a").arrow("g", "a", "a").compose("g", "g", "g").build().unwrap());
    let p = FinFunctor::from_names("p", d.clone(), c.clone(), &[("a", "a"), ("b", "a")], &[("f", "g")]).unwrap();
    let k = Arc::new(canonical_topology(d.clone()));
    let j = Arc::new(GrothendieckTopology::trivial(c));
    let ls = LocalSite::new(SitedFunctor::new(p.clone(), k, j).unwrap()).unwrap();
    (ls, d.arr("f").unwrap(), p)
}

#[test]
fn canonical_collapse_fails_over_an_idempotent() {
    let (ls, f, p) = idempotent_site();
    let v = is_locally_cartesian(&ls, f);
    assert!(v.agree);
    assert!(v.combinatorial.passed);
    assert!(!is_cartesian_arrow(&p, f));
    // the canonical topology on D covers b by the empty sieve
    let k = ls.k();
    let b = p.source().obj("b").unwrap();
    assert!(k.covering_sieves(b).any(|s| s.is_empty()));
}

#[test]
fn canonical_collapse_audit_with_endomorphisms_finds_and_shrinks_it() {
    let default = run_audit(&AuditConfig::new(Suite::CanonicalCollapse));
    assert!(default.passed);

    let mut config = AuditConfig::new(Suite::CanonicalCollapse);
    config.bounds.endomorphisms = true;
    let wide = run_audit(&config);
    assert!(!wide.passed);
    assert!(!wide.counterexamples.is_empty());
    assert!(wide.notes.iter().any(|n| n.contains("endomorphism")));
    for cx in &wide.counterexamples {
        assert!(cx.instance.contains("shrunk to 2/1 -> 1/1"), "{}", cx.instance);
        let doc = parse(cx.witness.as_ref().unwrap()).unwrap();
        let sited = &doc.sites["S"];
        let ls = LocalSite::new(sited.clone()).unwrap();
        let p = sited.functor();
        let d = p.source();
        assert_eq!((d.object_count(), d.arrow_count()), (2, 3));
        assert_eq!((p.target().object_count(), p.target().arrow_count()), (1, 2));
        assert!(p.target().has_endomorphisms());
        // still a failure: some arrow is locally cartesian without being cartesian
        let bad = d.arrows().filter(|&a| is_locally_cartesian(&ls, a).combinatorial.passed != is_cartesian_arrow(p, a)).count();
        assert_eq!(bad, 1);
        assert!(ls.k().same_covers(&canonical_topology(d.clone())));
        assert!(ls.j().is_trivial());
    }
}

#[test]
fn shrinking_keeps_failures() {
    let (ls, _, p) = idempotent_site();
    let start = SiteInstance { p, k: ls.sited().source_topology().clone(), j: ls.sited().target_topology().clone() };
    let fails = |s: &SiteInstance| {
        let Ok(sited) = SitedFunctor::new(s.p.clone(), s.k.clone(), s.j.clone()) else { return false };
        let Ok(ls) = LocalSite::new(sited) else { return false };
        s.p.source().arrows().any(|a| is_locally_cartesian(&ls, a).combinatorial.passed && !is_cartesian_arrow(&s.p, a))
    };
    assert!(fails(&start));
    let small = shrink_site(&start, fails);
    assert!(fails(&small));
    // already minimal: dropping anything loses the failure
    assert_eq!(small.document(), start.document());
    assert!(site_candidates(&small).iter().all(|c| !fails(c)));
}

#[test]
fn report_renders_as_text_and_json() {
    let r = run_audit(&AuditConfig::new(Suite::CartesianLoccart));
    assert!(r.text().starts_with("PASS suite cartesian-loccart (criterion 2)"));
    let json: serde_json::Value = serde_json::from_str(&r.json()).unwrap();
    assert_eq!(json["suite"], "cartesian-loccart");
    assert_eq!(json["passed"], true);
    assert_eq!(r.exit_code(), 0);
}

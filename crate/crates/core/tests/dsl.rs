use std::fs;

use finsite::dsl::{
    self, category_block, check_block, functor_block, parse, presheaf_block, run_check, serialize, serialize_blocks,
    site_block, topology_block, Decl, DiagnosticKind,
};
use finsite::fincat::enumerate::{enumerate_categories, enumerate_functors};
use finsite::fincat::{find_isomorphism, fixtures};
use finsite::presheaf::yoneda;
use finsite::sites::enumerate_topologies;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

const ARR: &str = "category ARR {\n  objects: a, b\n  arrow f: a -> b\n}\n";

#[test]
fn arr_text_is_one_category_block() {
    let doc = parse(ARR).unwrap();
    assert_eq!(doc.blocks.len(), 1);
    assert!(matches!(doc.blocks[0].decl, Decl::Category(_)));
    let c = &doc.categories["ARR"];
    assert_eq!(c.object_count(), 2);
    assert_eq!(c.arrow_count(), 3);
    assert!(find_isomorphism(c, &fixtures::arr()).is_some());
}

#[test]
fn unknown_arrow_in_compose_is_unresolved() {
    let text = "category C {\n  objects: a, b, c\n  arrow f: a -> b\n  arrow g: b -> c\n  compose g . h = g\n}\n";
    let err = parse(text).unwrap_err();
    let d = err.0.iter().find(|d| d.kind == DiagnosticKind::UnresolvedReference).expect("an unresolved reference");
    assert_eq!((d.span.line, d.span.col), (5, 15));
    assert!(d.message.contains('h'), "{}", d.message);
}

#[test]
fn canonical_text_round_trips_byte_for_byte() {
    for name in ["arr.site", "gd1.site"] {
        let text = fixture(name);
        assert_eq!(serialize(&parse(&text).unwrap()), text, "{name}");
    }
    assert_eq!(serialize(&parse(ARR).unwrap()), ARR);
}

#[test]
fn serialization_is_idempotent_on_accepted_documents() {
    let text = fixture("gd1_indexed.site");
    let once = serialize(&parse(&text).unwrap());
    assert_ne!(once, text);
    assert_eq!(serialize(&parse(&once).unwrap()), once);
}

#[test]
fn permuted_document_canonicalizes() {
    let permuted = "check topology TRIV\ntopology TRIV on ARR { trivial }\n\
                    category ARR { arrow f: a -> b ; objects: a, b }\n";
    assert_eq!(serialize(&parse(permuted).unwrap()), fixture("arr.site"));
}

#[test]
fn broken_associativity_is_a_semantic_error_with_span() {
    let text = "category C {
  objects: a, b, c, d
  arrow f: a -> b
  arrow g: b -> c
  arrow h: c -> d
  arrow gf: a -> c
  arrow hg: b -> d
  arrow k1: a -> d
  arrow k2: a -> d
  compose g . f = gf
  compose h . g = hg
  compose h . gf = k1
  compose hg . f = k2
}
";
    let err = parse(text).unwrap_err();
    assert!(err.0.iter().all(|d| d.kind == DiagnosticKind::SemanticError), "{err}");
    assert!(err.0.iter().all(|d| d.span.line >= 1 && d.span.col >= 1));
}

#[test]
fn unstable_topology_is_reported_by_validate() {
    let text = "category COSPAN {
  objects: a, b, c
  arrow f: a -> c
  arrow g: b -> c
}
topology T on COSPAN {
  cover c with { f }
}
";
    let doc = parse(text).unwrap();
    let reports = dsl::validate(&doc);
    let (span, r) = reports.iter().find(|(_, r)| !r.passed).expect("a failing report");
    assert_eq!(span.line, 6);
    assert_eq!(r.detail, "stability fails");
    assert_eq!(r.witness["sieve"], "{f} on c");
    assert_eq!(r.witness["arrow"], "g");
    assert_eq!(r.witness["pullback"], "{} on b");
}

#[test]
fn fixtures_validate() {
    for name in ["arr.site", "gd1.site", "gd1_indexed.site"] {
        let doc = parse(&fixture(name)).unwrap();
        for (span, r) in dsl::validate(&doc) {
            assert!(r.passed, "{name} {span}: {r}");
        }
    }
}

#[test]
fn every_diagnostic_carries_a_span() {
    let bad = [
        "category {",
        "category C { objects: a ; arrow f: a -> z }",
        "category C { objects: a }\ncategory C { objects: b }",
        "topology T on NOPE { trivial }",
        "functor F: A -> B { obj x -> y }",
        "category C { objects: a, b ; arrow f: a -> b }\ncheck loccart S f",
        "category C { objects: a }\ncheck frobnicate C",
        "site S: p from",
        "\"unterminated",
        "category C { objects: a $ }",
        "category A { objects: a }\ncategory B { objects: b }\nfunctor F: A -> B { obj a -> a }",
        "category A { objects: a, b ; arrow f: a -> b }\ntopology T on A { trivial ; maximal }",
    ];
    for text in bad {
        let err = parse(text).expect_err(text);
        assert!(!err.0.is_empty());
        for d in &err.0 {
            assert!(d.span.line >= 1 && d.span.col >= 1, "{text}: {d}");
            let lines = text.lines().count().max(1);
            assert!(d.span.line <= lines + 1, "{text}: {d}");
        }
    }
}

#[test]
fn parsing_collects_several_errors() {
    let text = "category C { objects: a ; arrow f: a -> z }\ncategory D { objects: a ; arrow g: q -> a }\n";
    let err = parse(text).unwrap_err();
    assert!(err.0.len() >= 2, "{err}");
    assert!(err.0.windows(2).all(|w| w[0].span <= w[1].span));
}

#[test]
fn fixture_checks_run() {
    let doc = parse(&fixture("gd1.site")).unwrap();
    for (c, _) in doc.checks() {
        let o = run_check(&doc, c).unwrap();
        assert!(o.passed, "{:?}", o.reports);
    }
    let vertical = check_block("loccart", "S", &["v_u"]);
    let Decl::Check(c) = &vertical.decl else { unreachable!() };
    let o = run_check(&doc, c).unwrap();
    assert!(!o.passed);
    assert_eq!(o.reports.len(), 2);
    assert!(o.reports.iter().all(|r| !r.passed));
}

#[test]
fn model_builders_round_trip() {
    let g = fixtures::gd1_vertical();
    let arr = fixtures::arr();
    let y = yoneda(&arr, arr.obj("b").unwrap());
    let blocks = vec![
        category_block("ARR", &arr),
        category_block("T", &g.total),
        functor_block("p", "T", "ARR", &g.projection),
        topology_block("J", "ARR", &finsite::sites::GrothendieckTopology::trivial(arr.clone())),
        topology_block("K", "T", &finsite::sites::GrothendieckTopology::maximal(g.total.clone())),
        presheaf_block("Y", "ARR", &y),
        site_block("S", "p", "K", "J"),
        check_block("locfib", "S", &[]),
    ];
    let text = serialize_blocks(&blocks);
    let doc = parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(serialize(&doc), text);
    assert!(find_isomorphism(&doc.categories["T"], &g.total).is_some());
    assert_eq!(doc.presheaves["Y"].size(arr.obj("a").unwrap()), 1);
}

fn small_categories() -> Vec<std::sync::Arc<finsite::fincat::FinCategory>> {
    (1..=3).flat_map(|n| enumerate_categories(n, 3, n < 3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumerated_categories_round_trip(i in 0usize..1000) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        let text = serialize_blocks(&[category_block("C", c)]);
        let doc = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(serialize(&doc), text.clone());
        let back = &doc.categories["C"];
        prop_assert!(find_isomorphism(back, c).is_some(), "{}", text);
    }

    #[test]
    fn enumerated_topologies_round_trip(i in 0usize..1000, k in 0usize..64) {
        let cats: Vec<_> = (1..=2).flat_map(|n| enumerate_categories(n, 2, true)).collect();
        let c = &cats[i % cats.len()];
        let ts = enumerate_topologies(c);
        let t = &ts[k % ts.len()];
        let text = serialize_blocks(&[category_block("C", c), topology_block("T", "C", t)]);
        let doc = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(serialize(&doc), text.clone());
        let back = &doc.topologies["T"];
        prop_assert!(back.is_topology().passed);
        let back_c = &doc.categories["C"];
        for o in c.objects() {
            let o2 = back_c.obj(c.obj_name(o)).unwrap();
            prop_assert_eq!(t.covering_sieves(o).count(), back.covering_sieves(o2).count(), "{}", text);
        }
    }

    #[test]
    fn enumerated_functors_round_trip(i in 0usize..1000, k in 0usize..64) {
        let cats: Vec<_> = (1..=2).flat_map(|n| enumerate_categories(n, 2, false)).collect();
        let (c, d) = (&cats[i % cats.len()], &cats[(i / cats.len()) % cats.len()]);
        let fs = enumerate_functors(c, d);
        prop_assume!(!fs.is_empty());
        let f = &fs[k % fs.len()];
        let text = serialize_blocks(&[category_block("C", c), category_block("D", d), functor_block("F", "C", "D", f)]);
        let doc = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(serialize(&doc), text);
    }
}

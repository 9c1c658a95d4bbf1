use std::sync::Arc;

use finsite::cofinal::*;
use finsite::fincat::{
    fixtures, full_subcategory, slice, FinCategory, FinFunctor, Obj,
};
use finsite::fibration::is_cartesian_arrow;
use finsite::fincat::enumerate::{enumerate_categories, enumerate_functors};
use finsite::locfib::{LocalSite, Obligations};
use finsite::sites::{enumerate_topologies, giraud_topology, GrothendieckTopology, SitedFunctor};

fn trivial_site(p: FinFunctor) -> LocalSite {
    let k = Arc::new(GrothendieckTopology::trivial(p.source().clone()));
    let j = Arc::new(GrothendieckTopology::trivial(p.target().clone()));
    LocalSite::new(SitedFunctor::new(p, k, j).unwrap()).unwrap()
}

fn small_categories() -> Vec<Arc<FinCategory>> {
    (1..=2).flat_map(|n| enumerate_categories(n, 2, false)).collect()
}

/// Every comorphism `p: D → C` between small categories, under every pair of topologies.
fn local_sites() -> Vec<LocalSite> {
    let cats = small_categories();
    let mut out = Vec::new();
    for c in &cats {
        let js: Vec<_> = enumerate_topologies(c).into_iter().map(Arc::new).collect();
        for d in &cats {
            let ks: Vec<_> = enumerate_topologies(d).into_iter().map(Arc::new).collect();
            for p in enumerate_functors(d, c) {
                let obligations = Arc::new(Obligations::compute(&p));
                for k in &ks {
                    for j in &js {
                        let sited = SitedFunctor::new(p.clone(), k.clone(), j.clone()).unwrap();
                        if let Ok(ls) = LocalSite::with_obligations(sited, obligations.clone()) {
                            out.push(ls);
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn identity_factorization_is_present() {
    let g = fixtures::gd1();
    let ls = trivial_site(g.projection.clone());
    for d0 in g.total.objects() {
        let pd = ls.p().obj(d0);
        let fc = build_fact_category(&ls, ls.base().id(pd), d0).unwrap();
        assert!(fc.find((d0, ls.base().id(pd), g.total.id(d0))).is_some());
    }
}

#[test]
fn missing_lifts_give_empty_fact_category() {
    let ls = trivial_site(fixtures::disc2_over_arr());
    let f = ls.base().arr("f").unwrap();
    let db = ls.total().obj("d_b").unwrap();
    let fc = build_fact_category(&ls, f, db).unwrap();
    assert!(fc.is_empty());
    assert!(build_fact_category(&ls, f, ls.total().obj("d_a").unwrap()).is_err());
}

#[test]
fn fact_categories_are_categories_of_elements() {
    let mut checked = 0;
    for ls in local_sites().iter().step_by(7) {
        for d0 in ls.total().objects() {
            for &f in ls.base().arrows_into(ls.p().obj(d0)) {
                let fc = build_fact_category(ls, f, d0).unwrap();
                let r = fact_elements_check(ls, &fc, f, d0);
                assert!(r.passed, "{r}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn cartfact_objects_match_brute_force() {
    for ls in local_sites().iter().step_by(5) {
        let d = ls.total();
        for f in d.arrows() {
            let fc = build_cartfact_category(ls, f);
            let expected = d.arrows_into(d.src(f)).iter().filter(|&&v| ls.is_loccart(d.comp(f, v))).count();
            assert_eq!(fc.triples.len(), expected);
            if ls.is_loccart(f) {
                assert!(fc.find((d.src(f), d.id(d.src(f)), f)).is_some());
            }
        }
    }
    // no locally cartesian post-factor
    let g = fixtures::gd1_vertical();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
    let ls = LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j).unwrap()).unwrap();
    let v = g.total.arr("(id_b,u)").unwrap();
    assert!(build_cartfact_category(&ls, v).is_empty());
}

#[test]
fn identity_of_a_slice_is_cofinal() {
    let c = fixtures::tri();
    for j in enumerate_topologies(&c) {
        for o in c.objects() {
            let sl = slice(&c, o);
            let q = FinFunctor::identity(sl.category.clone());
            assert!(is_j_cofinal(&q, &sl, &j).passed);
            assert!(cofinality_oracle(&q, &sl, &j).passed);
        }
    }
}

#[test]
fn empty_functor_is_not_cofinal_for_the_trivial_topology() {
    let c = fixtures::arr();
    let j = GrothendieckTopology::trivial(c.clone());
    let sl = slice(&c, c.obj("b").unwrap());
    let q = FinFunctor::new("q", fixtures::empty(), sl.category.clone(), vec![], vec![]).unwrap();
    let r = is_j_cofinal(&q, &sl, &j);
    assert!(!r.passed);
    assert!(r.detail.starts_with("condition (1)"));
    assert!(!cofinality_oracle(&q, &sl, &j).passed);
    // the maximal topology covers with the empty sieve
    let max = GrothendieckTopology::maximal(c.clone());
    assert!(cofinality_verdict(&q, &sl, &max).passed());
}

#[test]
fn two_conditions_agree_with_the_colimit_oracle() {
    let mut bases: Vec<Arc<FinCategory>> = (1..=2).flat_map(|n| enumerate_categories(n, 3, false)).collect();
    bases.push(fixtures::tri());
    bases.push(fixtures::split_idempotent());
    let shapes: Vec<Arc<FinCategory>> = (0..=2).flat_map(|n| enumerate_categories(n, 1, false)).collect();
    let mut checked = 0;
    let mut failures = 0;
    for c in &bases {
        let topologies = enumerate_topologies(c);
        for o in c.objects() {
            let sl = slice(c, o);
            let mut functors: Vec<FinFunctor> = Vec::new();
            for e in &shapes {
                functors.extend(enumerate_functors(e, &sl.category));
            }
            // full subcategories of the slice
            let n = sl.category.object_count();
            for mask in 0u32..(1 << n) {
                let keep: Vec<Obj> = (0..n).filter(|i| mask & (1 << i) != 0).map(Obj).collect();
                functors.push(full_subcategory(&sl.category, &keep).1);
            }
            for q in &functors {
                for j in &topologies {
                    let v = cofinality_verdict(q, &sl, j);
                    assert!(v.agree, "{} over {} / {}: {:?}", q.name(), c.name(), j.name(), v);
                    checked += 1;
                    failures += usize::from(!v.combinatorial.passed);
                }
            }
        }
    }
    assert!(checked > 500, "{checked}");
    assert!(failures > 0 && failures < checked);
}

#[test]
fn cartesian_arrows_pass_all_three() {
    for g in [fixtures::gd1(), fixtures::gd1_vertical()] {
        let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
        for k in enumerate_topologies(&g.total) {
            let sited = SitedFunctor::new(g.projection.clone(), Arc::new(k), j.clone()).unwrap();
            let Ok(ls) = LocalSite::new(sited) else { continue };
            for f in g.total.arrows().filter(|&f| is_cartesian_arrow(&g.projection, f)) {
                let v = cofinality_verdicts(&ls, f);
                assert!(v.loccart.passed() && v.cofinal.passed && v.colimit.passed);
            }
        }
    }
}

#[test]
fn vertical_arrow_fails_all_three_under_giraud() {
    let g = fixtures::gd1_vertical();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
    let ls = LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j).unwrap()).unwrap();
    let f = g.total.arr("(id_b,u)").unwrap();
    let r = loccart_cofinality_equiv(&ls, f);
    assert!(r.passed);
    assert_eq!(r.witness["locally cartesian"], "fail");
    assert_eq!(r.witness["cart-fact cofinal"], "fail");
    assert_eq!(r.witness["colimit representation"], "fail");
}

#[test]
fn cofinality_matches_local_cartesianness_on_enumerated_sites() {
    let mut checked = 0;
    for ls in local_sites().iter().filter(|ls| ls.is_local_fibration()) {
        for f in ls.total().arrows() {
            let r = loccart_cofinality_equiv(ls, f);
            assert!(r.passed, "{} / {} / {}: {r}", ls.p().name(), ls.k().name(), ls.j().name());
            checked += 1;
        }
    }
    assert!(checked > 100, "{checked}");
}

/// A split idempotent over the point: the cart-fact category of the
/// retraction is a single object, so its projection is cofinal, yet the
/// retraction is not locally cartesian for the trivial topology.
#[test]
fn split_idempotent_separates_cofinality_from_local_cartesianness() {
    let d = fixtures::split_idempotent();
    let p = FinFunctor::new("p", d.clone(), fixtures::one(), vec![Obj(0); 2], vec![fixtures::one().id(Obj(0)); d.arrow_count()])
        .unwrap();
    let ls = trivial_site(p);
    assert!(ls.is_local_fibration());
    let f = d.arr("f").unwrap();
    let v = cofinality_verdicts(&ls, f);
    assert!(!v.loccart.combinatorial.passed);
    assert!(v.loccart.agree);
    assert!(v.cofinal.passed);
    assert!(v.colimit.passed);
    let fc = build_cartfact_category(&ls, f);
    assert_eq!(fc.triples.len(), 1);
    assert!(!loccart_cofinality_equiv(&ls, f).passed);
}

#[test]
fn topos_level_check() {
    let c = fixtures::tri();
    for j in enumerate_topologies(&c) {
        let ls = LocalSite::new(SitedFunctor::identity(Arc::new(j))).unwrap();
        assert!(topos_level_fibration_check(&ls, false).unwrap().passed);
    }
    let ls = trivial_site(fixtures::disc2_over_arr());
    assert!(ls.is_continuous() && !ls.is_local_fibration());
    let r = topos_level_fibration_check(&ls, true).unwrap();
    assert!(!r.passed);
    assert_eq!(r.witness["arrow"], "f");
}

#[test]
fn continuous_local_fibrations_are_fibrations_at_topos_level() {
    let mut checked = 0;
    for ls in local_sites().iter().filter(|ls| ls.is_local_fibration() && ls.is_continuous()) {
        let r = topos_level_fibration_check(ls, true).unwrap();
        assert!(r.passed, "{} / {} / {}: {r}", ls.p().name(), ls.k().name(), ls.j().name());
        checked += 1;
    }
    assert!(checked > 20, "{checked}");
    let ls = trivial_site(fixtures::disc2_over_arr());
    let maxk = Arc::new(GrothendieckTopology::maximal(ls.total().clone()));
    let sited = SitedFunctor::new(ls.p().clone(), maxk, ls.j().clone()).unwrap();
    let ls = LocalSite::new(sited).unwrap();
    if !ls.is_continuous() {
        assert!(matches!(topos_level_fibration_check(&ls, true), Err(CofinalError::NotContinuous(_))));
    }
}

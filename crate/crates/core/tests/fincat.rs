use std::collections::BTreeSet;
use std::sync::Arc;

use finsite::fincat::enumerate::{enumerate_categories, enumerate_functors, enumerate_indexed};
use finsite::fincat::{
    build_comma, category_of_elements, fixtures, full_subcategory, grothendieck_construction, is_isomorphic, slice,
    validate_category, CategoryBuilder, CategoryError, FinCategory, FinFunctor,
};
use finsite::presheaf::yoneda;
use itertools::Itertools;
use proptest::prelude::*;

/// Naive count of categories with `n` objects and at most `max` non-identity
/// arrows, up to isomorphism: every source/target assignment, every
/// composition table, associativity checked, canonical form minimized over
/// object and arrow permutations.
fn brute_force_count(n: usize, max: usize, endomorphisms: bool) -> usize {
    let mut classes = BTreeSet::new();
    for k in 0..=max {
        let ends: Vec<(usize, usize)> =
            (0..n).cartesian_product(0..n).filter(|&(s, t)| endomorphisms || s != t).collect();
        for sig in (0..k).map(|_| ends.iter().copied()).multi_cartesian_product() {
            // arrows 0..k are generators, k..k+n identities
            let src = |a: usize| if a < k { sig[a].0 } else { a - k };
            let tgt = |a: usize| if a < k { sig[a].1 } else { a - k };
            let pairs: Vec<(usize, usize)> =
                (0..k).cartesian_product(0..k).filter(|&(f, g)| src(f) == tgt(g)).collect();
            let options: Vec<Vec<usize>> = pairs
                .iter()
                .map(|&(f, g)| (0..k + n).filter(|&h| src(h) == src(g) && tgt(h) == tgt(f)).collect())
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let choices: Vec<Vec<usize>> = if pairs.is_empty() {
                vec![vec![]]
            } else {
                options.iter().map(|o| o.iter().copied()).multi_cartesian_product().collect()
            };
            for choice in choices {
                let comp = |f: usize, g: usize| -> usize {
                    if f >= k {
                        return g;
                    }
                    if g >= k {
                        return f;
                    }
                    choice[pairs.iter().position(|&p| p == (f, g)).unwrap()]
                };
                let assoc = (0..k + n).cartesian_product(0..k + n).cartesian_product(0..k + n).all(|((f, g), h)| {
                    src(f) != tgt(g) || src(g) != tgt(h) || comp(comp(f, g), h) == comp(f, comp(g, h))
                });
                if !assoc {
                    continue;
                }
                let mut best: Option<Vec<usize>> = None;
                for op in (0..n).permutations(n) {
                    for ap in (0..k).permutations(k) {
                        let re = |a: usize| if a < k { ap[a] } else { k + op[a - k] };
                        let mut code = vec![0; 2 * k + (k + n) * (k + n)];
                        for a in 0..k {
                            code[2 * ap[a]] = op[src(a)];
                            code[2 * ap[a] + 1] = op[tgt(a)];
                        }
                        for f in 0..k + n {
                            for g in 0..k + n {
                                let v = if src(f) == tgt(g) { re(comp(f, g)) + 1 } else { 0 };
                                code[2 * k + re(f) * (k + n) + re(g)] = v;
                            }
                        }
                        if best.as_ref().is_none_or(|b| code < *b) {
                            best = Some(code);
                        }
                    }
                }
                classes.insert((k, best.unwrap()));
            }
        }
    }
    classes.len()
}

#[test]
fn monoids_of_order_at_most_three() {
    // 1 + 2 + 7 monoids of orders 1, 2, 3
    assert_eq!(enumerate_categories(1, 2, true).len(), 10);
    assert_eq!(brute_force_count(1, 2, true), 10);
}

#[test]
fn category_counts_match_brute_force() {
    for (n, max, endos, frozen) in [(1, 1, true, 3), (2, 1, true, 4), (2, 2, true, 20), (2, 2, false, 4), (2, 3, false, 5), (3, 2, false, 6)] {
        let got = enumerate_categories(n, max, endos).len();
        assert_eq!(got, brute_force_count(n, max, endos), "n={n} max={max} endos={endos}");
        assert_eq!(got, frozen, "n={n} max={max} endos={endos}");
    }
}

#[test]
fn enumerated_categories_are_pairwise_non_isomorphic() {
    let cats = enumerate_categories(2, 2, true);
    for (i, c) in cats.iter().enumerate() {
        for d in &cats[i + 1..] {
            assert!(!is_isomorphic(c, d), "{} ~ {}", c.name(), d.name());
        }
    }
}

#[test]
fn builder_examples() {
    let tri = fixtures::tri();
    assert_eq!((tri.object_count(), tri.arrow_count()), (3, 6));
    let (f, g) = (tri.arr("f").unwrap(), tri.arr("g").unwrap());
    assert_eq!(tri.arr_name(tri.comp(g, f)), "gf");
    assert!(tri.compose(f, g).is_none());

    let missing = CategoryBuilder::new("X").objects(["a", "b", "c"]).arrow("f", "a", "b").arrow("g", "b", "c").build();
    assert!(matches!(missing, Err(CategoryError::MalformedTable { .. })));

    let split = fixtures::split_idempotent();
    assert!(split.has_endomorphisms());
    assert!(!fixtures::arr().has_endomorphisms());
}

#[test]
fn iso_detection() {
    let iso = CategoryBuilder::new("ISO")
        .objects(["a", "b"])
        .arrow("f", "a", "b")
        .arrow("g", "b", "a")
        .compose("g", "f", "id_a")
        .compose("f", "g", "id_b")
        .build()
        .unwrap();
    let f = iso.arr("f").unwrap();
    assert_eq!(iso.inverse(f), iso.arr("g"));
    assert!(!fixtures::pair().non_identity_arrows().any(|a| fixtures::pair().is_iso(a)));
    assert!(!fixtures::arr().non_identity_arrows().any(|a| fixtures::arr().is_iso(a)));
    let two = enumerate_categories(2, 1, false);
    assert_eq!(two.len(), 2);
    assert_eq!(two.iter().filter(|c| is_isomorphic(c, &fixtures::arr())).count(), 1);
    assert_eq!(two.iter().filter(|c| is_isomorphic(c, &fixtures::disc2())).count(), 1);
}

#[test]
fn functor_counts() {
    // monotone maps between chains
    assert_eq!(enumerate_functors(&fixtures::arr(), &fixtures::tri()).len(), 6);
    assert_eq!(enumerate_functors(&fixtures::tri(), &fixtures::arr()).len(), 4);
    assert_eq!(enumerate_functors(&fixtures::disc2(), &fixtures::tri()).len(), 9);
    assert_eq!(enumerate_functors(&fixtures::empty(), &fixtures::tri()).len(), 1);
    assert_eq!(enumerate_functors(&fixtures::one(), &fixtures::empty()).len(), 0);
}

#[test]
fn functor_validation() {
    let (arr, one) = (fixtures::arr(), fixtures::one());
    let ok = FinFunctor::from_names("p", arr.clone(), one.clone(), &[("a", "*"), ("b", "*")], &[("f", "id_*")]);
    assert!(ok.is_ok());
    let bad = FinFunctor::from_names("q", one, arr, &[("*", "a")], &[("id_*", "f")]);
    assert!(bad.is_err());
}

#[test]
fn slice_of_tri_over_last_object() {
    let tri = fixtures::tri();
    let s = slice(&tri, tri.obj("c").unwrap());
    // objects id_c, g, gf; arrows among them form a chain gf -> g -> id_c
    assert_eq!(s.category.object_count(), 3);
    assert_eq!(s.category.arrow_count(), 6);
}

#[test]
fn grothendieck_of_fixture() {
    let g = fixtures::gd1();
    let objects: usize = g.indexed.fibers().iter().map(|f| f.object_count()).sum();
    assert_eq!(g.total.object_count(), objects);
    for a in g.total.arrows() {
        assert_eq!(g.projection.arr(a), g.arrows[a.0].0);
    }
}

fn small_categories() -> Vec<Arc<FinCategory>> {
    (1..=2).flat_map(|n| enumerate_categories(n, 2, true)).chain(enumerate_categories(3, 2, false)).collect()
}

proptest! {
    #[test]
    fn category_laws(i in 0usize..64) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        for f in c.arrows() {
            prop_assert_eq!(c.comp(c.id(c.tgt(f)), f), f);
            prop_assert_eq!(c.comp(f, c.id(c.src(f))), f);
            for &g in c.arrows_into(c.src(f)) {
                let fg = c.comp(f, g);
                prop_assert_eq!((c.src(fg), c.tgt(fg)), (c.src(g), c.tgt(f)));
                for &h in c.arrows_into(c.src(g)) {
                    prop_assert_eq!(c.comp(fg, h), c.comp(f, c.comp(g, h)));
                }
            }
        }
    }

    #[test]
    fn raw_roundtrip_is_isomorphic(i in 0usize..64) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        let back = validate_category(&c.to_raw()).unwrap();
        prop_assert!(is_isomorphic(c, &back));
    }

    #[test]
    fn functor_composition_respects_laws(i in 0usize..64, j in 0usize..64) {
        let cats = small_categories();
        let (c, d) = (&cats[i % cats.len()], &cats[j % cats.len()]);
        for f in enumerate_functors(c, d).into_iter().take(8) {
            let id = FinFunctor::identity(d.clone());
            let composite = id.after(&f).unwrap();
            prop_assert_eq!(composite.arr_map(), f.arr_map());
            for a in c.arrows() {
                for &b in c.arrows_into(c.src(a)) {
                    prop_assert_eq!(f.arr(c.comp(a, b)), d.comp(f.arr(a), f.arr(b)));
                }
            }
        }
    }

    #[test]
    fn slice_has_one_object_per_arrow_into_apex(i in 0usize..64) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        for o in c.objects() {
            let s = slice(c, o);
            prop_assert_eq!(s.category.object_count(), c.arrows_into(o).len());
            for a in s.category.arrows() {
                let v = s.objects[s.category.tgt(a).0];
                let w = s.objects[s.category.src(a).0];
                prop_assert_eq!(c.comp(v, s.arrows[a.0]), w);
            }
        }
    }

    #[test]
    fn full_subcategory_keeps_homs(i in 0usize..64) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        let keep: Vec<_> = c.objects().take(1).collect();
        let (sub, incl) = full_subcategory(c, &keep);
        prop_assert_eq!(sub.arrow_count(), c.hom(keep[0], keep[0]).len());
        for a in sub.arrows() {
            for &b in sub.arrows_into(sub.src(a)) {
                prop_assert_eq!(incl.arr(sub.comp(a, b)), c.comp(incl.arr(a), incl.arr(b)));
            }
        }
    }

    #[test]
    fn grothendieck_projection_is_a_functor(k in 0usize..32) {
        let fibers = [fixtures::one(), fixtures::arr()];
        let all: Vec<_> = [fixtures::arr(), fixtures::pair(), fixtures::split_idempotent()]
            .iter()
            .flat_map(|b| enumerate_indexed(b, &fibers))
            .collect();
        let g = grothendieck_construction(&all[k % all.len()]);
        let (e, b) = (&g.total, g.indexed.base());
        let total: usize = g.indexed.fibers().iter().map(|f| f.object_count()).sum();
        prop_assert_eq!(e.object_count(), total);
        for a in e.arrows() {
            for &c in e.arrows_into(e.src(a)) {
                prop_assert_eq!(g.projection.arr(e.comp(a, c)), b.comp(g.projection.arr(a), g.projection.arr(c)));
            }
        }
        for f in b.arrows() {
            for d in e.objects().filter(|&d| g.projection.obj(d) == b.tgt(f)) {
                let l = g.chosen_lift(f, d);
                prop_assert_eq!((g.projection.arr(l), e.tgt(l)), (f, d));
                prop_assert!(g.is_chosen_lift(l));
            }
        }
    }

    #[test]
    fn comma_projections_reflect_identities(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let small = [fixtures::one(), fixtures::arr(), fixtures::disc2(), fixtures::pair()];
        let target = [fixtures::arr(), fixtures::tri(), fixtures::split_idempotent()];
        let c = &target[i % target.len()];
        let fs = enumerate_functors(&small[j % small.len()], c);
        let gs = enumerate_functors(&small[k % small.len()], c);
        prop_assume!(!fs.is_empty() && !gs.is_empty());
        let (f, g) = (&fs[j % fs.len()], &gs[k % gs.len()]);
        let comma = build_comma(f, g).unwrap();
        let e = &comma.category;
        for a in e.arrows() {
            let ids = f.source().is_identity(comma.left.arr(a)) && g.source().is_identity(comma.right.arr(a));
            prop_assert_eq!(e.is_identity(a), ids);
        }
    }

    #[test]
    fn elements_of_a_representable_is_the_slice(i in 0usize..64) {
        let cats = small_categories();
        let c = &cats[i % cats.len()];
        for o in c.objects() {
            let el = category_of_elements(&yoneda(c, o));
            let sl = slice(c, o);
            prop_assert!(is_isomorphic(&el.category, &sl.category));
        }
    }
}

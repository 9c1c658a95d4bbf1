use std::sync::Arc;

use finsite::fincat::{fixtures, FinFunctor, Obj};
use finsite::sites::*;

fn arr_bottom() -> GrothendieckTopology {
    let c = fixtures::arr();
    let b = c.obj("b").unwrap();
    GrothendieckTopology::generate(c, &[(b, vec![])]).unwrap()
}

#[test]
fn sieve_closure_examples() {
    let c = fixtures::arr();
    let (b, f, idb) = (c.obj("b").unwrap(), c.arr("f").unwrap(), c.arr("id_b").unwrap());
    assert_eq!(Sieve::closure(&c, b, &[f]).unwrap().len(), 1);
    assert!(Sieve::closure(&c, b, &[idb]).unwrap().is_maximal(&c));
    let t = fixtures::tri();
    let s = Sieve::closure(&t, t.obj("c").unwrap(), &[t.arr("g").unwrap()]).unwrap();
    let names: Vec<_> = s.members().map(|a| t.arr_name(a).to_string()).collect();
    assert_eq!(names.len(), 2);
    assert!(names.contains(&"g".to_string()) && names.contains(&"gf".to_string()));
    assert!(Sieve::closure(&c, b, &[c.arr("id_a").unwrap()]).is_err());
}

#[test]
fn pullback_examples() {
    let c = fixtures::arr();
    let (a, b, f) = (c.obj("a").unwrap(), c.obj("b").unwrap(), c.arr("f").unwrap());
    let sf = Sieve::closure(&c, b, &[f]).unwrap();
    assert!(sf.pullback(&c, f).unwrap().is_maximal(&c));
    assert!(Sieve::maximal(&c, b).pullback(&c, f).unwrap().is_maximal(&c));
    assert!(Sieve::empty(&c, b).pullback(&c, f).unwrap().is_empty());
    assert_eq!(Sieve::empty(&c, b).pullback(&c, f).unwrap().object(), a);
}

#[test]
fn is_topology_examples() {
    let c = fixtures::arr();
    assert!(GrothendieckTopology::trivial(c.clone()).is_topology().passed);
    assert!(GrothendieckTopology::maximal(c.clone()).is_topology().passed);
    let b = c.obj("b").unwrap();
    let bad = GrothendieckTopology::from_covers("bad", c.clone(), [Sieve::empty(&c, b)]);
    let r = bad.is_topology();
    assert!(!r.passed);
    assert_eq!(r.detail, "stability fails");
    assert_eq!(r.witness["arrow"], "f");
    assert_eq!(r.witness["pullback"], "{} on a");
}

#[test]
fn generate_examples() {
    let c = fixtures::tri();
    let triv = GrothendieckTopology::trivial(c.clone());
    assert!(GrothendieckTopology::generate(c.clone(), &[]).unwrap().same_covers(&triv));
    let all: Vec<Sieve> = c.objects().flat_map(|o| sieves_on(&c, o)).collect();
    assert!(generate_from_sieves(c.clone(), all).same_covers(&GrothendieckTopology::maximal(c.clone())));

    let t = arr_bottom();
    let a = t.base().obj("a").unwrap();
    let b = t.base().obj("b").unwrap();
    assert!(t.covers(&Sieve::empty(t.base(), a)));
    assert!(t.covers(&Sieve::empty(t.base(), b)));
    assert!(t.is_topology().passed);
}

#[test]
fn canonical_examples() {
    let d = fixtures::disc2();
    assert!(canonical_topology(d.clone()).same_covers(&GrothendieckTopology::trivial(d)));
    let one = fixtures::one();
    let can = canonical_topology(one.clone());
    assert!(can.covers(&Sieve::empty(&one, Obj(0))));
    assert_eq!(can.cover_count(), 2);
    // `a` is initial in ARR, so the empty sieve on `a` is effective-epimorphic;
    // `<f>` on `b` is not (no arrow b -> a to glue the family at e = a)
    let a = fixtures::arr();
    let can = canonical_topology(a.clone());
    let (oa, ob) = (a.obj("a").unwrap(), a.obj("b").unwrap());
    assert!(can.covers(&Sieve::empty(&a, oa)));
    assert!(!can.covers(&Sieve::closure(&a, ob, &[a.arr("f").unwrap()]).unwrap()));
    assert_eq!(can.cover_count(), 3);
}

#[test]
fn canonical_is_largest_subcanonical() {
    use finsite::presheaf::{is_sheaf, yoneda};
    for c in [fixtures::one(), fixtures::arr(), fixtures::pair(), fixtures::tri(), fixtures::disc2(), fixtures::split_idempotent()] {
        let can = canonical_topology(c.clone());
        assert!(can.is_topology().passed);
        let reps: Vec<_> = c.objects().map(|o| yoneda(&c, o)).collect();
        for t in enumerate_topologies(&c) {
            let subcanonical = reps.iter().all(|y| is_sheaf(y, &t).passed);
            assert_eq!(subcanonical, can.contains(&t), "{} on {}", t.describe(), c.name());
        }
    }
}

fn sited(f: FinFunctor, k: GrothendieckTopology, j: GrothendieckTopology) -> SitedFunctor {
    SitedFunctor::new(f, Arc::new(k), Arc::new(j)).unwrap()
}

#[test]
fn comorphism_examples() {
    let t = arr_bottom();
    let one = fixtures::one();
    let bang = FinFunctor::from_names("!", t.base().clone(), one.clone(), &[("a", "*"), ("b", "*")], &[("f", "id_*")]).unwrap();
    let p = sited(bang, t.clone(), GrothendieckTopology::trivial(one.clone()));
    assert!(is_comorphism(&p).passed);
    let fail = is_continuous(&p);
    assert!(!fail.passed, "{fail}");

    let pick_b = FinFunctor::from_names("b", one.clone(), t.base().clone(), &[("*", "b")], &[]).unwrap();
    let q = sited(pick_b, GrothendieckTopology::trivial(one.clone()), t.clone());
    let r = is_comorphism(&q);
    assert!(!r.passed);
    assert_eq!(r.witness["sieve"], "{} on b");

    let id = SitedFunctor::identity(Arc::new(t));
    assert!(is_comorphism(&id).passed);
    assert!(is_morphism_of_sites(&id).passed);
    assert!(is_continuous(&id).passed);
}

#[test]
fn morphism_of_sites_examples() {
    let one = fixtures::one();
    let arr = fixtures::arr();
    let triv = |c: &Arc<finsite::fincat::FinCategory>| GrothendieckTopology::trivial(c.clone());
    let at = |o: &str| FinFunctor::from_names(o, one.clone(), arr.clone(), &[("*", o)], &[]).unwrap();
    // the point at the terminal object is flat; the point at a misses b
    assert!(is_morphism_of_sites(&sited(at("b"), triv(&one), triv(&arr))).passed);
    let r = is_morphism_of_sites(&sited(at("a"), triv(&one), triv(&arr)));
    assert!(!r.passed);
    assert_eq!(r.witness["object"], "b");

    let d = fixtures::disc2();
    let pick = FinFunctor::from_names("a", one.clone(), d.clone(), &[("*", "a")], &[]).unwrap();
    let r = is_morphism_of_sites(&sited(pick, triv(&one), triv(&d)));
    assert!(!r.passed);
    assert_eq!(r.detail, "condition (1) fails");
    assert_eq!(r.witness["object"], "b");
}

#[test]
fn continuity_with_trivial_source_topology() {
    use finsite::fincat::enumerate::enumerate_functors;
    for (s, t) in [(fixtures::arr(), fixtures::tri()), (fixtures::tri(), fixtures::arr()), (fixtures::pair(), fixtures::arr())] {
        for f in enumerate_functors(&s, &t) {
            for j in enumerate_topologies(&t) {
                let p = sited(f.clone(), GrothendieckTopology::trivial(s.clone()), j);
                assert!(is_continuous(&p).passed);
            }
        }
    }
}

#[test]
fn giraud_examples() {
    use finsite::fibration::is_cartesian_arrow;
    let g = fixtures::gd1();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = giraud_topology(&g.projection, &j).unwrap();
    assert!(k.is_topology().passed);
    assert!(k.same_covers(&comorphism_closure(&g.projection, &j)));
    for s in k.all_covers() {
        // every cover contains a cartesian arrow over an identity
        assert!(s.members().any(|a| is_cartesian_arrow(&g.projection, a) && g.indexed.base().is_identity(g.projection.arr(a))));
    }
    let sited = SitedFunctor::new(g.projection.clone(), Arc::new(k.clone()), j.clone()).unwrap();
    assert!(is_comorphism(&sited).passed);
    assert!(giraud_minimality(&g.projection, &j, &k, 64).unwrap().passed);

    for c in [fixtures::arr(), fixtures::tri(), fixtures::pair()] {
        let id = FinFunctor::identity(c.clone());
        for j in enumerate_topologies(&c) {
            assert!(giraud_topology(&id, &j).unwrap().same_covers(&j));
        }
    }
    let err = giraud_topology(&fixtures::disc2_over_arr(), &GrothendieckTopology::trivial(fixtures::arr()));
    assert!(matches!(err, Err(GiraudError::NotAFibration { .. })));
}

#[test]
fn comma_site_examples() {
    let one = fixtures::one();
    let id = SitedFunctor::identity(Arc::new(GrothendieckTopology::trivial(one.clone())));
    let cs = comma_site(&id).unwrap();
    assert_eq!(cs.comma.category.object_count(), 3);
    assert!(cs.topology.is_topology().passed);
    assert!(is_comorphism(&cs.right_projection()).passed);

    let g = fixtures::gd1();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
    let p = SitedFunctor::new(g.projection.clone(), k, j).unwrap();
    let cs = comma_site(&p).unwrap();
    assert!(cs.topology.is_topology().passed);
    assert!(is_comorphism(&cs.right_projection()).passed);

    let t = arr_bottom();
    let pick_b = FinFunctor::from_names("b", one.clone(), t.base().clone(), &[("*", "b")], &[]).unwrap();
    let q = sited(pick_b, GrothendieckTopology::trivial(one), t);
    assert!(matches!(comma_site(&q), Err(CommaError::NotAComorphism { .. })));
}

#[test]
fn comma_correspondence_examples() {
    use finsite::presheaf::{is_sheaf, restrict_along, yoneda, FinPresheaf, PresheafMorphism};
    let g = fixtures::gd1();
    let (d, c) = (g.total.clone(), g.indexed.base().clone());
    let p = SitedFunctor::new(
        g.projection.clone(),
        Arc::new(GrothendieckTopology::trivial(d.clone())),
        Arc::new(GrothendieckTopology::trivial(c.clone())),
    )
    .unwrap();
    let cs = comma_site(&p).unwrap();

    let term = |b: &Arc<finsite::fincat::FinCategory>| Arc::new(FinPresheaf::terminal(b));
    let t = Triplet::new(term(&d), term(&c), &g.projection, &vec![vec![0]; d.object_count()]).unwrap();
    let fwd = comma_forward(&cs, &t).unwrap();
    assert!(cs.comma.category.objects().all(|o| fwd.size(o) == 1));
    assert!(is_sheaf(&fwd, &cs.topology).passed);
    assert!(triplet_roundtrip(&cs, &t).unwrap().passed);

    let empty = Arc::new(FinPresheaf::empty(&d));
    let e = Arc::new(yoneda(&c, c.obj("b").unwrap()));
    let t = Triplet::new(empty, e, &g.projection, &vec![vec![]; d.object_count()]).unwrap();
    let fwd = comma_forward(&cs, &t).unwrap();
    for o in cs.comma.category.objects() {
        let (x, _, _) = cs.comma.objects[o.0];
        assert_eq!(fwd.size(o) == 0, x != cs.d0.initial);
    }

    for x in d.objects() {
        let yd = Arc::new(yoneda(&d, x));
        let px = g.projection.obj(x);
        let yc = Arc::new(yoneda(&c, px));
        let target = Arc::new(restrict_along(&g.projection, &yc).unwrap());
        let comps = d
            .objects()
            .map(|z| (0..yd.size(z)).map(|i| yc.find(g.projection.obj(z), c.arr_name(g.projection.arr(d.hom(z, x)[i]))).unwrap()).collect())
            .collect();
        let unit = PresheafMorphism::new(yd.clone(), target, comps).unwrap();
        let t = Triplet { f: yd, e: yc, alpha: unit };
        assert!(triplet_roundtrip(&cs, &t).unwrap().passed);
        let q = Arc::new(comma_forward(&cs, &t).unwrap());
        let r = sheaf_roundtrip(&cs, &q).unwrap();
        assert!(r.passed, "{r}");
    }
}

fn property_categories() -> Vec<Arc<finsite::fincat::FinCategory>> {
    use finsite::fincat::enumerate::enumerate_categories;
    let mut cats: Vec<_> = (1..=2).flat_map(|n| enumerate_categories(n, 2, true)).collect();
    cats.extend([fixtures::tri(), fixtures::split_idempotent()]);
    cats
}

proptest::proptest! {
    #[test]
    fn pullback_along_a_composite(i in 0usize..1000, s in 0usize..1000) {
        let cats = property_categories();
        let c = &cats[i % cats.len()];
        for o in c.objects() {
            let sieves = sieves_on(c, o);
            let sv = &sieves[s % sieves.len()];
            for &h in c.arrows_into(o) {
                for &k in c.arrows_into(c.src(h)) {
                    let twice = sv.pullback(c, h).unwrap().pullback(c, k).unwrap();
                    proptest::prop_assert_eq!(twice, sv.pullback(c, c.comp(h, k)).unwrap());
                }
            }
        }
    }

    #[test]
    fn generated_topology_is_least(i in 0usize..1000, s in 0usize..1000, t in 0usize..1000) {
        let cats = property_categories();
        let c = &cats[i % cats.len()];
        let all: Vec<Sieve> = c.objects().flat_map(|o| sieves_on(c, o)).collect();
        let gens = vec![all[s % all.len()].clone(), all[t % all.len()].clone()];
        let g = generate_from_sieves(c.clone(), gens.clone());
        proptest::prop_assert!(g.is_topology().passed);
        for top in enumerate_topologies(c) {
            if gens.iter().all(|s| top.covers(s)) {
                proptest::prop_assert!(top.contains(&g), "{} misses part of {}", top.describe(), g.describe());
            }
        }
    }
}

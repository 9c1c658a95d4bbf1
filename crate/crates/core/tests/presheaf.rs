use std::sync::Arc;

use finsite::fincat::{fixtures, FinCategory, FinFunctor};
use finsite::presheaf::*;
use finsite::sites::{enumerate_topologies, GrothendieckTopology, Sieve};
use itertools::Itertools;
use proptest::prelude::*;

/// Naive presheaf count: every size vector and every action table on every
/// arrow, kept when identities act trivially and composition is respected.
fn brute_force_presheaves(c: &FinCategory, max: usize) -> usize {
    let mut count = 0;
    for sizes in (0..c.object_count()).map(|_| 0..=max).multi_cartesian_product() {
        let tables: Vec<Vec<Vec<usize>>> = c
            .arrows()
            .map(|f| (0..sizes[c.tgt(f).0]).map(|_| 0..sizes[c.src(f).0]).multi_cartesian_product().collect())
            .collect();
        if tables.iter().any(Vec::is_empty) {
            continue;
        }
        for action in tables.iter().map(|t| t.iter()).multi_cartesian_product() {
            let ids = c.objects().all(|o| action[c.id(o).0].iter().enumerate().all(|(x, &y)| x == y));
            let functorial = c.arrows().cartesian_product(c.arrows()).all(|(f, g)| match c.compose(f, g) {
                // P(f . g) = P(g) . P(f)
                Some(h) => (0..sizes[c.tgt(f).0]).all(|x| action[h.0][x] == action[g.0][action[f.0][x]]),
                None => true,
            });
            count += usize::from(ids && functorial);
        }
    }
    count
}

/// Sheaf condition straight from the definition: for every covering sieve,
/// restriction from `P(c)` to matching families is a bijection.
fn naive_is_sheaf(p: &FinPresheaf, j: &GrothendieckTopology) -> bool {
    let c = p.base().clone();
    j.all_covers().all(|s| {
        let members: Vec<_> = s.members().collect();
        let families: Vec<Vec<usize>> = if members.is_empty() {
            vec![vec![]]
        } else {
            members.iter().map(|&f| 0..p.size(c.src(f))).multi_cartesian_product().collect()
        };
        let matching: Vec<&Vec<usize>> = families
            .iter()
            .filter(|x| {
                members.iter().enumerate().all(|(i, &f)| {
                    c.arrows_into(c.src(f)).iter().all(|&g| {
                        let k = members.iter().position(|&m| m == c.comp(f, g)).expect("sieves are closed");
                        p.act(g, x[i]) == x[k]
                    })
                })
            })
            .collect();
        let restrict = |x: usize| members.iter().map(|&f| p.act(f, x)).collect::<Vec<_>>();
        let images: Vec<Vec<usize>> = (0..p.size(s.object())).map(restrict).collect();
        images.iter().all_unique() && matching.len() == images.len()
    })
}

#[test]
fn presheaf_counts() {
    let split = fixtures::split_idempotent();
    for (base, max, frozen) in [
        (fixtures::one(), 2, 3),
        (fixtures::arr(), 1, 3),
        (fixtures::arr(), 2, 11),
        (fixtures::tri(), 1, 4),
        (split, 1, 2),
        (fixtures::empty(), 2, 1),
    ] {
        let got = enumerate_presheaves(&base, max).len();
        assert_eq!(got, brute_force_presheaves(&base, max), "{} {max}", base.name());
        assert_eq!(got, frozen, "{} {max}", base.name());
    }
}

#[test]
fn morphisms_between_largest_presheaves_on_arr() {
    let arr = fixtures::arr();
    let all: Vec<_> = enumerate_presheaves(&arr, 2).into_iter().map(Arc::new).collect();
    let last = all.last().unwrap();
    let morphisms = enumerate_morphisms(last, last);
    let f = arr.arr("f").unwrap();
    // components on a and b, filtered by naturality along f
    let naive = (0..2)
        .map(|_| 0..2)
        .multi_cartesian_product()
        .cartesian_product((0..2).map(|_| 0..2).multi_cartesian_product())
        .filter(|(pa, pb)| (0..2).all(|x| pa[last.act(f, x)] == last.act(f, pb[x])))
        .count();
    assert_eq!(morphisms.len(), naive);
    assert_eq!(morphisms.len(), 8);
}

#[test]
fn yoneda_sizes_are_hom_sizes() {
    let tri = fixtures::tri();
    for c in tri.objects() {
        let y = yoneda(&tri, c);
        for d in tri.objects() {
            assert_eq!(y.size(d), tri.hom(d, c).len());
        }
    }
}

#[test]
fn restriction_along_projection() {
    let arr = fixtures::arr();
    let one = fixtures::one();
    let p = FinFunctor::from_names("p", arr.clone(), one.clone(), &[("a", "*"), ("b", "*")], &[("f", "id_*")]).unwrap();
    let q = enumerate_presheaves(&one, 2).pop().unwrap();
    let r = restrict_along(&p, &q).unwrap();
    assert_eq!(r.total_size(), 4);
    assert!(r.action(arr.arr("f").unwrap()).iter().enumerate().all(|(x, &y)| x == y));
}

#[test]
fn trivial_topology_makes_everything_a_sheaf() {
    for base in [fixtures::arr(), fixtures::tri(), fixtures::split_idempotent()] {
        let j = GrothendieckTopology::trivial(base.clone());
        for p in enumerate_presheaves(&base, 1) {
            assert!(is_sheaf(&p, &j).passed);
        }
    }
}

#[test]
fn maximal_topology_sheafifies_to_terminal() {
    let arr = fixtures::arr();
    let j = GrothendieckTopology::maximal(arr.clone());
    for p in enumerate_presheaves(&arr, 2) {
        let s = sheafify(&Arc::new(p), &j);
        assert!(arr.objects().all(|o| s.sheaf.size(o) == 1));
    }
}

#[test]
fn empty_cover_forces_singleton() {
    let arr = fixtures::arr();
    let (a, b) = (arr.obj("a").unwrap(), arr.obj("b").unwrap());
    // nothing maps into a but its identity, so the empty cover stays at a
    let j = GrothendieckTopology::generate(arr.clone(), &[(a, vec![])]).unwrap();
    assert!(!j.covers(&Sieve::empty(&arr, b)));
    for p in enumerate_presheaves(&arr, 2) {
        assert_eq!(is_sheaf(&p, &j).passed, p.size(a) == 1);
    }
    // pulling the empty cover on b back along f covers a too
    let k = GrothendieckTopology::generate(arr.clone(), &[(b, vec![])]).unwrap();
    assert!(k.covers(&Sieve::empty(&arr, a)));
}

fn sites() -> Vec<(Arc<FinCategory>, Vec<GrothendieckTopology>)> {
    [fixtures::one(), fixtures::arr(), fixtures::tri(), fixtures::pair(), fixtures::split_idempotent()]
        .into_iter()
        .map(|c| {
            let ts = enumerate_topologies(&c);
            (c, ts)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sheaf_check_matches_definition(i in 0usize..1000, t in 0usize..1000, k in 0usize..1000) {
        let sites = sites();
        let (c, ts) = &sites[i % sites.len()];
        let j = &ts[t % ts.len()];
        let ps = enumerate_presheaves(c, 2);
        let p = &ps[k % ps.len()];
        prop_assert_eq!(is_sheaf(p, j).passed, naive_is_sheaf(p, j));
    }

    #[test]
    fn sheafification_is_a_sheaf_with_locally_iso_unit(i in 0usize..1000, t in 0usize..1000, k in 0usize..1000) {
        let sites = sites();
        let (c, ts) = &sites[i % sites.len()];
        let j = &ts[t % ts.len()];
        let ps = enumerate_presheaves(c, 2);
        let p = Arc::new(ps[k % ps.len()].clone());
        let s = sheafify(&p, j);
        prop_assert!(naive_is_sheaf(&s.sheaf, j));
        prop_assert!(locality_test(&s.unit, j, LocalityMode::Iso).passed);
        if is_sheaf(&p, j).passed {
            prop_assert!(s.unit.is_iso());
        }
    }

    #[test]
    fn locality_test_matches_sheafified_iso(i in 0usize..1000, t in 0usize..1000, k in 0usize..1000, m in 0usize..1000) {
        let sites = sites();
        let (c, ts) = &sites[i % sites.len()];
        let j = &ts[t % ts.len()];
        let ps: Vec<_> = enumerate_presheaves(c, 1).into_iter().map(Arc::new).collect();
        let (p, q) = (&ps[k % ps.len()], &ps[m % ps.len()]);
        for phi in enumerate_morphisms(p, q) {
            prop_assert_eq!(locality_test(&phi, j, LocalityMode::Iso).passed, sheafified_is_iso(&phi, j));
        }
    }

    #[test]
    fn morphisms_are_natural(i in 0usize..1000, k in 0usize..1000, m in 0usize..1000) {
        let sites = sites();
        let (c, _) = &sites[i % sites.len()];
        let ps: Vec<_> = enumerate_presheaves(c, 2).into_iter().map(Arc::new).collect();
        let (p, q) = (&ps[k % ps.len()], &ps[m % ps.len()]);
        for phi in enumerate_morphisms(p, q) {
            for f in c.arrows() {
                for x in 0..p.size(c.tgt(f)) {
                    prop_assert_eq!(phi.at(c.src(f), p.act(f, x)), q.act(f, phi.at(c.tgt(f), x)));
                }
            }
        }
    }

    #[test]
    fn colimit_cocones_are_jointly_epimorphic(i in 0usize..1000, k in 0usize..1000, m in 0usize..1000, n in 0usize..1000) {
        let bases = [fixtures::one(), fixtures::arr(), fixtures::split_idempotent()];
        let base = &bases[i % bases.len()];
        let ps: Vec<_> = enumerate_presheaves(base, 2).into_iter().map(Arc::new).collect();
        let (p, q) = (&ps[k % ps.len()], &ps[m % ps.len()]);
        let maps = enumerate_morphisms(p, q);
        prop_assume!(!maps.is_empty());
        // coequalizer-shaped diagram p => q with both arms drawn from the enumeration
        let shape = fixtures::pair();
        let (f, g) = (&maps[n % maps.len()], &maps[(n / 7) % maps.len()]);
        let arrows = shape
            .arrows()
            .map(|a| match shape.arr_name(a) {
                "f" => f.clone(),
                "g" => g.clone(),
                "id_a" => PresheafMorphism::identity(p),
                _ => PresheafMorphism::identity(q),
            })
            .collect();
        let d = Diagram { shape: shape.clone(), objects: vec![p.clone(), q.clone()], arrows };
        let col = compute_colimit(base, &d).unwrap();
        for c in base.objects() {
            let hit: std::collections::BTreeSet<usize> =
                col.legs.iter().flat_map(|l| (0..l.source().size(c)).map(move |x| l.at(c, x))).collect();
            prop_assert_eq!(hit.len(), col.apex.size(c));
        }
        // the legs coequalize f and g
        let lq = &col.legs[1];
        prop_assert_eq!(lq.after(f).unwrap().components_all(), lq.after(g).unwrap().components_all());
    }

    #[test]
    fn pullbacks_are_universal(i in 0usize..1000, k in 0usize..1000, m in 0usize..1000, r in 0usize..1000, t in 0usize..1000) {
        let bases = [fixtures::one(), fixtures::arr()];
        let base = &bases[i % bases.len()];
        let ps: Vec<_> = enumerate_presheaves(base, 2).into_iter().map(Arc::new).collect();
        let (p, q, z) = (&ps[k % ps.len()], &ps[m % ps.len()], &ps[r % ps.len()]);
        let (to_z_from_p, to_z_from_q) = (enumerate_morphisms(p, z), enumerate_morphisms(q, z));
        prop_assume!(!to_z_from_p.is_empty() && !to_z_from_q.is_empty());
        let phi = &to_z_from_p[t % to_z_from_p.len()];
        let psi = &to_z_from_q[(t / 3) % to_z_from_q.len()];
        let pb = compute_pullback(phi, psi).unwrap();
        for test in ps.iter().take(6) {
            let apex_maps = enumerate_morphisms(test, &pb.apex);
            for a in enumerate_morphisms(test, p) {
                for b in enumerate_morphisms(test, q) {
                    let commutes = phi.after(&a).unwrap().components_all() == psi.after(&b).unwrap().components_all();
                    let mediating = apex_maps
                        .iter()
                        .filter(|u| {
                            pb.left.after(u).unwrap().components_all() == a.components_all()
                                && pb.right.after(u).unwrap().components_all() == b.components_all()
                        })
                        .count();
                    prop_assert_eq!(mediating, usize::from(commutes));
                    if commutes {
                        let u = pb.mediate(&a, &b).unwrap();
                        prop_assert_eq!(pb.left.after(&u).unwrap().components_all(), a.components_all());
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_is_functorial(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let cats = [fixtures::one(), fixtures::arr(), fixtures::tri(), fixtures::split_idempotent()];
        let (a, b) = (&cats[i % cats.len()], &cats[j % cats.len()]);
        let c = fixtures::tri();
        let fs = finsite::fincat::enumerate::enumerate_functors(a, b);
        let gs = finsite::fincat::enumerate::enumerate_functors(b, &c);
        prop_assume!(!fs.is_empty() && !gs.is_empty());
        let (f, g) = (&fs[k % fs.len()], &gs[k % gs.len()]);
        let ps = enumerate_presheaves(&c, 1);
        let p = &ps[k % ps.len()];
        let along_composite = restrict_along(&g.after(f).unwrap(), p).unwrap();
        let stepwise = restrict_along(f, &restrict_along(g, p).unwrap()).unwrap();
        prop_assert!(along_composite.same_shape(&stepwise));
        let id = FinFunctor::identity(c.clone());
        prop_assert!(restrict_along(&id, p).unwrap().same_shape(p));
    }
}

trait Components {
    fn components_all(&self) -> Vec<Vec<usize>>;
}

impl Components for PresheafMorphism {
    fn components_all(&self) -> Vec<Vec<usize>> {
        self.base().objects().map(|c| self.component(c).to_vec()).collect()
    }
}

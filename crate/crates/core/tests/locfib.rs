use std::sync::Arc;

use finsite::fibration::is_cartesian_arrow;
use finsite::fincat::{fixtures, FinFunctor, NatTransform};
use finsite::locfib::*;
use finsite::sites::{
    canonical_topology, enumerate_topologies, giraud_topology, GrothendieckTopology, SitedFunctor,
};

fn giraud_site(g: &finsite::fincat::GrothendieckFibration) -> LocalSite {
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
    LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j).unwrap()).unwrap()
}

fn identity_site(j: GrothendieckTopology) -> LocalSite {
    LocalSite::new(SitedFunctor::identity(Arc::new(j))).unwrap()
}

#[test]
fn cartesian_arrows_are_locally_cartesian_for_every_topology() {
    let g = fixtures::gd1_vertical();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let obligations = Arc::new(Obligations::compute(&g.projection));
    let mut sites = 0;
    for k in enumerate_topologies(&g.total) {
        let sited = SitedFunctor::new(g.projection.clone(), Arc::new(k), j.clone()).unwrap();
        let Ok(ls) = LocalSite::with_obligations(sited, obligations.clone()) else { continue };
        sites += 1;
        for f in g.total.arrows() {
            let v = is_locally_cartesian(&ls, f);
            assert!(v.agree, "{:?}", v);
            if is_cartesian_arrow(&g.projection, f) {
                assert!(v.passed());
            }
        }
    }
    assert!(sites > 1);
}

#[test]
fn vertical_non_iso_fails_under_giraud() {
    let g = fixtures::gd1_vertical();
    let ls = giraud_site(&g);
    let v = g.total.arr("(id_b,u)").unwrap();
    let verdict = is_locally_cartesian(&ls, v);
    assert!(!verdict.combinatorial.passed);
    assert!(!verdict.oracle.passed);
    assert!(verdict.agree);
    assert_eq!(verdict.combinatorial.witness["arrow"], "(id_b,u)");
    assert!(!relative_site_loccart(&RelativeSite::giraud(g.clone(), ls.j().clone()).unwrap(), v).passed);
}

#[test]
fn canonical_topology_collapses_to_cartesian() {
    for g in [fixtures::gd1(), fixtures::gd1_vertical()] {
        let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
        let k = Arc::new(canonical_topology(g.total.clone()));
        let Ok(ls) = LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j).unwrap()) else { continue };
        for f in g.total.arrows() {
            let v = is_locally_cartesian(&ls, f);
            assert!(v.agree);
            assert_eq!(v.passed(), is_cartesian_arrow(&g.projection, f), "{}", g.total.arr_name(f));
        }
    }
}

#[test]
fn local_fibration_examples() {
    let g = fixtures::gd1_vertical();
    assert!(is_local_fibration(&giraud_site(&g)).passed);
    assert!(is_local_fibration(&identity_site(GrothendieckTopology::trivial(fixtures::tri()))).passed);
    assert!(is_local_fibration(&identity_site(canonical_topology(fixtures::pair()))).passed);

    let p = fixtures::disc2_over_arr();
    let k = Arc::new(GrothendieckTopology::trivial(p.source().clone()));
    let j = Arc::new(GrothendieckTopology::trivial(p.target().clone()));
    let ls = LocalSite::new(SitedFunctor::new(p, k, j).unwrap()).unwrap();
    let r = is_local_fibration(&ls);
    assert!(!r.passed);
    assert_eq!(r.witness["arrow"], "f");
    assert_eq!(r.witness["object"], "d_b");
}

#[test]
fn local_sites_require_comorphisms() {
    let p = fixtures::disc2_over_arr();
    let k = Arc::new(GrothendieckTopology::trivial(p.source().clone()));
    let j = Arc::new(GrothendieckTopology::maximal(p.target().clone()));
    let err = LocalSite::new(SitedFunctor::new(p, k, j).unwrap()).unwrap_err();
    assert!(matches!(err, LocalFibrationError::NotAComorphism { .. }));
}

#[test]
fn local_factorizations() {
    let g = fixtures::gd1_vertical();
    let ls = giraud_site(&g);
    let d = &g.total;
    for f in d.arrows() {
        let fact = local_factorization(&ls, f).unwrap();
        assert!(fact.verify(&ls).passed, "{}", d.arr_name(f));
        if is_cartesian_arrow(&g.projection, f) {
            assert_eq!(fact.pieces.len(), 1);
            assert!(d.is_identity(fact.pieces[0].cover));
            assert!(d.is_iso(fact.pieces[0].connector));
        }
    }
    // (f, u) factors as the vertical u followed by the lift of f
    let fu = d.arr("(f,u1)").unwrap();
    let fact = local_factorization(&ls, fu).unwrap();
    assert_eq!(fact.pieces.len(), 1);
    let pc = fact.pieces[0];
    assert!(d.is_identity(pc.cover));
    assert_eq!(d.arr_name(pc.loccart), "(f,id_x1)");
    assert_eq!(d.comp(pc.loccart, pc.connector), fu);
}

#[test]
fn k_cartesian_matches_locally_cartesian_on_arr() {
    let c = fixtures::arr();
    for k in enumerate_topologies(&c) {
        let ls = identity_site(k);
        for f in c.arrows() {
            let r = is_k_cartesian(&ls, f).unwrap();
            assert_eq!(r.passed, ls.is_loccart(f));
        }
    }
    let ls = identity_site(GrothendieckTopology::trivial(fixtures::pair()));
    let err = is_k_cartesian(&ls, ls.total().arr("f").unwrap()).unwrap_err();
    assert!(matches!(err, LocalFibrationError::MissingPullback { .. }));
}

#[test]
fn relative_site_specialization() {
    let g = fixtures::gd1_vertical();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let giraud = giraud_topology(&g.projection, &j).unwrap();
    let mut seen = 0;
    for k in enumerate_topologies(&g.total).into_iter().filter(|k| k.contains(&giraud)) {
        let rs = RelativeSite::new(g.clone(), Arc::new(k), j.clone()).unwrap();
        for f in g.total.arrows() {
            assert_eq!(relative_site_loccart(&rs, f).passed, rs.local().is_loccart(f));
        }
        seen += 1;
    }
    assert!(seen > 1);
    let triv = Arc::new(GrothendieckTopology::trivial(g.total.clone()));
    let err = RelativeSite::new(g.clone(), triv, Arc::new(GrothendieckTopology::maximal(g.indexed.base().clone())));
    assert!(matches!(err, Err(LocalFibrationError::NotARelativeSite(_))));
}

#[test]
fn identity_morphisms() {
    let g = fixtures::gd1_vertical();
    let rs = RelativeSite::giraud(g.clone(), Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()))).unwrap();
    let a = FinFunctor::identity(g.total.clone());
    let m = LocalMorphism::strict(rs.local().clone(), rs.local().clone(), a.clone()).unwrap();
    assert!(is_morphism_of_local_fibrations(&m).passed);
    let phi = NatTransform::identity(&g.projection);
    assert!(comparison_criterion(&rs, &rs, &a, &phi).unwrap().passed);
    let w = weak_indexed_conditions(&m).unwrap();
    assert!(w.passed());
    assert!(w.generators.iter().all(|gen| gen.nu.is_iso()));
}

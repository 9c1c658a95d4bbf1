use std::sync::Arc;

use finsite::fibration::*;
use finsite::fincat::enumerate::{enumerate_functors, enumerate_indexed};
use finsite::fincat::{fixtures, grothendieck_construction, CategoryBuilder, FinFunctor, IndexedCategory};

fn collapsing() -> finsite::fincat::GrothendieckFibration {
    let base = fixtures::arr();
    let fb = Arc::new(CategoryBuilder::new("Fb").objects(["x", "y"]).arrow("u", "x", "y").build().unwrap());
    let fa = Arc::new(CategoryBuilder::new("Fa").object("z").build().unwrap());
    let t = FinFunctor::from_names("Df", fb.clone(), fa.clone(), &[("x", "z"), ("y", "z")], &[("u", "id_z")]).unwrap();
    let transport = base
        .arrows()
        .map(|a| match base.arr_name(a) {
            "f" => t.clone(),
            "id_a" => FinFunctor::identity(fa.clone()),
            _ => FinFunctor::identity(fb.clone()),
        })
        .collect();
    grothendieck_construction(&IndexedCategory::new("COL", base, vec![fa, fb], transport).unwrap())
}

#[test]
fn cartesian_examples() {
    let g = fixtures::gd1();
    let p = &g.projection;
    for o in g.total.objects() {
        assert!(is_cartesian(p, g.total.id(o)).passed);
    }
    let lift = g.total.arr("(f,id_x1)").unwrap();
    assert!(is_cartesian(p, lift).passed);
    assert_eq!(g.total.non_identity_arrows().count(), 2);
    assert!(g.total.non_identity_arrows().all(|a| is_cartesian_arrow(p, a)));

    let col = collapsing();
    let u = col.total.arr("(id_b,u)").unwrap();
    let r = is_cartesian(&col.projection, u);
    assert!(!r.passed);
    assert_eq!(r.detail, "no lift exists");
}

#[test]
fn lift_examples() {
    let g = fixtures::gd1();
    let (total, base) = (&g.total, g.indexed.base());
    let xb = total.obj("(x,b)").unwrap();
    let idb = base.arr("id_b").unwrap();
    assert_eq!(cartesian_lift(&g.projection, idb, xb).unwrap().arrow, total.id(xb));
    let l = cartesian_lift(&g.projection, base.arr("f").unwrap(), xb).unwrap();
    assert_eq!(total.arr_name(l.arrow), "(f,id_x1)");
    assert!(base.is_identity(l.sigma));

    let q = fixtures::disc2_over_arr();
    let db = q.source().obj("d_b").unwrap();
    assert!(cartesian_lift(&q, q.target().arr("f").unwrap(), db).is_none());
    let (r, cl) = is_fibration(&q);
    assert!(!r.passed && cl.is_none());
    assert_eq!(r.witness["arrow"], "f");
    assert_eq!(r.witness["object"], "d_b");

    let (r, cl) = is_fibration(&g.projection);
    assert!(r.passed);
    assert_eq!(cl.unwrap(), Cleavage::from_grothendieck(&g));
    assert!(is_fibration(&FinFunctor::identity(fixtures::pair())).0.passed);
}

#[test]
fn factorization_examples() {
    let g = fixtures::gd1_vertical();
    let p = &g.projection;
    let cl = Cleavage::from_grothendieck(&g);
    let t = &g.total;
    for a in t.arrows() {
        let (v, c) = factorize_vertical_cartesian(p, &cl, a).unwrap();
        assert_eq!(t.comp(c, v), a);
        assert!(g.indexed.base().is_identity(p.arr(v)));
        assert!(is_cartesian_arrow(p, c));
        if is_cartesian_arrow(p, a) {
            assert!(t.is_iso(v));
        }
        if g.indexed.base().is_identity(p.arr(a)) {
            assert!(t.is_identity(c));
        }
    }
    assert!(t.arr("(f,u1)").is_some());
}

#[test]
fn split_grothendieck_cleavages() {
    let base = fixtures::tri();
    let fibers = [fixtures::one(), fixtures::disc2(), fixtures::arr()];
    for ix in enumerate_indexed(&base, &fibers) {
        let g = grothendieck_construction(&ix);
        assert!(Cleavage::from_grothendieck(&g).is_split(&g.projection));
        assert!(is_fibration(&g.projection).0.passed);
    }
}

#[test]
fn identity_morphism_has_identity_cells() {
    let g = fixtures::gd1_vertical();
    let cl = Cleavage::from_grothendieck(&g);
    let m = FibredFunctor::identity(g.projection.clone());
    assert!(is_morphism_of_fibrations(&m).passed);
    for cell in comparison_cells(&m, &cl, &cl).unwrap() {
        assert!(g.total.is_identity(cell.cell));
    }
    assert!(comparison_naturality(&m, &cl, &cl).passed);
    assert!(comparison_cocycle(&m, &cl, &cl).unwrap().passed);
}

/// Functors between Grothendieck constructions over TRI commuting with the projections.
#[test]
fn cells_over_tri() {
    let base = fixtures::tri();
    let fibers = [fixtures::one(), fixtures::arr()];
    let all: Vec<_> = enumerate_indexed(&base, &fibers).iter().map(grothendieck_construction).collect();
    let mut checked = 0;
    let mut non_morphisms = 0;
    for g in all.iter().take(6) {
        for h in all.iter().take(6) {
            let (cg, ch) = (Cleavage::from_grothendieck(g), Cleavage::from_grothendieck(h));
            for a in enumerate_functors(&g.total, &h.total) {
                let Ok(m) = FibredFunctor::strict(g.projection.clone(), h.projection.clone(), a) else { continue };
                let cells = comparison_cells(&m, &cg, &ch).unwrap();
                for c in &cells {
                    assert_eq!(h.total.comp(c.target_lift, c.cell), m.a.arr(c.lift));
                }
                assert!(comparison_naturality(&m, &cg, &ch).passed);
                assert!(comparison_cocycle(&m, &cg, &ch).unwrap().passed);
                let morphism = is_morphism_of_fibrations(&m).passed;
                assert_eq!(morphism, cells.iter().all(|c| h.total.is_iso(c.cell)));
                non_morphisms += usize::from(!morphism);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "{checked}");
    assert!(non_morphisms > 0);
}

#[test]
fn cartesian_fibration_examples() {
    assert!(is_cartesian_fibration(&FinFunctor::identity(fixtures::one())).passed);
    let r = is_cartesian_fibration(&FinFunctor::identity(fixtures::pair()));
    assert!(!r.passed);
    assert_eq!(r.detail, "the total category has no terminal object");
    // GD1's total category is two disjoint arrows: no terminal object
    assert!(!is_cartesian_fibration(&fixtures::gd1().projection).passed);
    assert!(is_cartesian_fibration(&FinFunctor::identity(fixtures::arr())).passed);
}

#[test]
fn two_out_of_three_and_pullback_stability() {
    let base = fixtures::arr();
    for fibers in [vec![fixtures::one(), fixtures::arr()], vec![fixtures::disc2(), fixtures::pair()]] {
        for ix in enumerate_indexed(&base, &fibers) {
            let g = grothendieck_construction(&ix);
            let (t, p) = (&g.total, &g.projection);
            for f in t.arrows() {
                for &h in t.arrows_into(t.src(f)) {
                    let fh = t.comp(f, h);
                    if is_cartesian_arrow(p, f) && is_cartesian_arrow(p, fh) {
                        assert!(is_cartesian_arrow(p, h));
                    }
                    if is_cartesian_arrow(p, f) && is_cartesian_arrow(p, h) {
                        assert!(is_cartesian_arrow(p, fh));
                    }
                }
            }
            if !is_cartesian_fibration(p).passed {
                continue;
            }
            for f in t.arrows().filter(|&f| is_cartesian_arrow(p, f)) {
                for &k in t.arrows_into(t.tgt(f)) {
                    let sq = pullback(t, f, k).unwrap();
                    assert!(is_cartesian_arrow(p, sq.right));
                }
            }
        }
    }
}

use std::sync::Arc;

use crate::fincat::{full_subcategory, Arr, FinCategory, FinFunctor, Obj};
use crate::sites::{comorphism_closure, GrothendieckTopology};

use super::instances::SiteInstance;

/// The wide subcategory without `a`, when the remaining arrows are closed under composition.
pub fn drop_arrow(c: &Arc<FinCategory>, a: Arr) -> Option<(Arc<FinCategory>, FinFunctor)> {
    if c.is_identity(a) {
        return None;
    }
    let kept: Vec<Arr> = c.arrows().filter(|&x| x != a).collect();
    for &f in &kept {
        for &g in c.arrows_into(c.src(f)) {
            if g != a && c.comp(f, g) == a {
                return None;
            }
        }
    }
    let mut pos = vec![usize::MAX; c.arrow_count()];
    for (i, &x) in kept.iter().enumerate() {
        pos[x.0] = i;
    }
    let data = kept.iter().map(|&x| (c.arr_name(x).to_string(), c.src(x), c.tgt(x))).collect();
    let ids = c.objects().map(|o| Arr(pos[c.id(o).0])).collect();
    let names = c.objects().map(|o| c.obj_name(o).to_string()).collect();
    let sub = FinCategory::from_parts(c.name(), names, data, ids, |f, g| Arr(pos[c.comp(kept[f.0], kept[g.0]).0])).ok()?;
    let sub = Arc::new(sub);
    let incl = FinFunctor::new("incl", sub.clone(), c.clone(), c.objects().collect(), kept).ok()?;
    Some((sub, incl))
}

/// The full subcategory without `o`; `None` for a one-object category.
pub fn drop_object(c: &Arc<FinCategory>, o: Obj) -> Option<(Arc<FinCategory>, FinFunctor)> {
    if c.object_count() < 2 {
        return None;
    }
    let keep: Vec<Obj> = c.objects().filter(|&x| x != o).collect();
    let (sub, incl) = full_subcategory(c, &keep);
    let sub = Arc::new((*sub).clone().with_name(c.name()));
    let incl = FinFunctor::new("incl", sub.clone(), c.clone(), incl.obj_map().to_vec(), incl.arr_map().to_vec()).ok()?;
    Some((sub, incl))
}

fn restrict(incl: &FinFunctor, t: &GrothendieckTopology) -> Arc<GrothendieckTopology> {
    Arc::new(comorphism_closure(incl, t).with_name(t.name()))
}

/// `p` with its codomain cut down along `incl`, if the image fits.
fn corestrict(p: &FinFunctor, incl: &FinFunctor) -> Option<FinFunctor> {
    let obj: Option<Vec<Obj>> =
        p.obj_map().iter().map(|&y| incl.obj_map().iter().position(|&z| z == y).map(Obj)).collect();
    let arr: Option<Vec<Arr>> =
        p.arr_map().iter().map(|&y| incl.arr_map().iter().position(|&z| z == y).map(Arr)).collect();
    FinFunctor::new(p.name(), p.source().clone(), incl.source().clone(), obj?, arr?).ok()
}

fn shrink_source(s: &SiteInstance, (_, incl): (Arc<FinCategory>, FinFunctor)) -> Option<SiteInstance> {
    let p = s.p.after(&incl).ok()?.with_name(s.p.name());
    let k = restrict(&incl, &s.k);
    Some(SiteInstance { p, k, j: s.j.clone() })
}

fn shrink_target(s: &SiteInstance, (_, incl): (Arc<FinCategory>, FinFunctor)) -> Option<SiteInstance> {
    let j = restrict(&incl, &s.j);
    let p = corestrict(&s.p, &incl)?;
    Some(SiteInstance { p, k: s.k.clone(), j })
}

/// One-step reductions of `s`: drop an arrow (source first), then drop an object.
///
/// Topologies are restricted to the smaller category as the least topology
/// containing the traces of the old covers.
pub fn site_candidates(s: &SiteInstance) -> Vec<SiteInstance> {
    let (d, c) = (s.p.source(), s.p.target());
    let mut out = Vec::new();
    out.extend(d.non_identity_arrows().filter_map(|a| drop_arrow(d, a)).filter_map(|x| shrink_source(s, x)));
    out.extend(c.non_identity_arrows().filter_map(|a| drop_arrow(c, a)).filter_map(|x| shrink_target(s, x)));
    out.extend(d.objects().filter_map(|o| drop_object(d, o)).filter_map(|x| shrink_source(s, x)));
    out.extend(c.objects().filter_map(|o| drop_object(c, o)).filter_map(|x| shrink_target(s, x)));
    out
}

/// Greedy shrinking: take the first candidate on which `fails` still holds, until none does.
pub fn shrink_site(start: &SiteInstance, fails: impl Fn(&SiteInstance) -> bool) -> SiteInstance {
    let mut current = start.clone();
    'outer: loop {
        for cand in site_candidates(&current) {
            if fails(&cand) {
                current = cand;
                continue 'outer;
            }
        }
        return current;
    }
}

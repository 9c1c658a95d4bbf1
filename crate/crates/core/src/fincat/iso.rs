use super::category::{Arr, FinCategory, Obj};

/// An isomorphism of categories as a pair of bijections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryIso {
    pub objects: Vec<Obj>,
    pub arrows: Vec<Arr>,
}

fn signature(c: &FinCategory, o: Obj) -> (usize, usize, usize) {
    let endo = c.hom(o, o).len();
    (c.arrows_into(o).len(), c.arrows_from(o).len(), endo)
}

/// Exhaustive search for an isomorphism `c → d`.
pub fn find_isomorphism(c: &FinCategory, d: &FinCategory) -> Option<CategoryIso> {
    if c.object_count() != d.object_count() || c.arrow_count() != d.arrow_count() {
        return None;
    }
    let mut cs: Vec<_> = c.objects().map(|o| signature(c, o)).collect();
    let mut ds: Vec<_> = d.objects().map(|o| signature(d, o)).collect();
    cs.sort_unstable();
    ds.sort_unstable();
    if cs != ds {
        return None;
    }
    let n = c.object_count();
    let mut sigma = vec![None; n];
    let mut used = vec![false; n];
    search_objects(c, d, 0, &mut sigma, &mut used)
}

fn search_objects(
    c: &FinCategory,
    d: &FinCategory,
    i: usize,
    sigma: &mut Vec<Option<Obj>>,
    used: &mut Vec<bool>,
) -> Option<CategoryIso> {
    let n = c.object_count();
    if i == n {
        let objects: Vec<Obj> = sigma.iter().map(|o| o.unwrap()).collect();
        let mut tau = vec![None; c.arrow_count()];
        let mut taken = vec![false; d.arrow_count()];
        for o in c.objects() {
            tau[c.id(o).0] = Some(d.id(objects[o.0]));
            taken[d.id(objects[o.0]).0] = true;
        }
        let order: Vec<Arr> = c.non_identity_arrows().collect();
        return search_arrows(c, d, &objects, &order, 0, &mut tau, &mut taken)
            .map(|arrows| CategoryIso { objects, arrows });
    }
    let o = Obj(i);
    for t in d.objects() {
        if used[t.0] || signature(c, o) != signature(d, t) {
            continue;
        }
        let consistent = (0..i).all(|j| {
            let s = sigma[j].unwrap();
            c.hom(o, Obj(j)).len() == d.hom(t, s).len() && c.hom(Obj(j), o).len() == d.hom(s, t).len()
        }) && c.hom(o, o).len() == d.hom(t, t).len();
        if !consistent {
            continue;
        }
        sigma[i] = Some(t);
        used[t.0] = true;
        if let Some(found) = search_objects(c, d, i + 1, sigma, used) {
            return Some(found);
        }
        sigma[i] = None;
        used[t.0] = false;
    }
    None
}

fn search_arrows(
    c: &FinCategory,
    d: &FinCategory,
    sigma: &[Obj],
    order: &[Arr],
    k: usize,
    tau: &mut Vec<Option<Arr>>,
    taken: &mut Vec<bool>,
) -> Option<Vec<Arr>> {
    if k == order.len() {
        return Some(tau.iter().map(|a| a.unwrap()).collect());
    }
    let a = order[k];
    for &b in d.hom(sigma[c.src(a).0], sigma[c.tgt(a).0]) {
        if taken[b.0] {
            continue;
        }
        tau[a.0] = Some(b);
        if compatible(c, d, a, tau) {
            taken[b.0] = true;
            if let Some(found) = search_arrows(c, d, sigma, order, k + 1, tau, taken) {
                return Some(found);
            }
            taken[b.0] = false;
        }
        tau[a.0] = None;
    }
    None
}

fn compatible(c: &FinCategory, d: &FinCategory, a: Arr, tau: &[Option<Arr>]) -> bool {
    let ok = |f: Arr, g: Arr| -> bool {
        match (tau[f.0], tau[g.0], tau[c.comp(f, g).0]) {
            (Some(x), Some(y), Some(z)) => d.comp(x, y) == z,
            _ => true,
        }
    };
    for &g in c.arrows_into(c.src(a)) {
        if !ok(a, g) {
            return false;
        }
    }
    for &f in c.arrows_from(c.tgt(a)) {
        if !ok(f, a) {
            return false;
        }
    }
    // a as the composite of an already mapped pair
    for f in c.arrows_into(c.tgt(a)) {
        for &g in c.hom(c.src(a), c.src(*f)) {
            if c.comp(*f, g) == a && !ok(*f, g) {
                return false;
            }
        }
    }
    true
}

pub fn is_isomorphic(c: &FinCategory, d: &FinCategory) -> bool {
    find_isomorphism(c, d).is_some()
}

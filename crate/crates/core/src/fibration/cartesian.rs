use std::collections::BTreeMap;

use crate::fincat::{Arr, FinFunctor, GrothendieckFibration, Obj};
use crate::report::CheckReport;

/// How many `h'` satisfy `p(h') = h` and `f ∘ h' = g`.
fn lift_count(p: &FinFunctor, f: Arr, g: Arr, h: Arr) -> usize {
    let d = &**p.source();
    d.hom(d.src(g), d.src(f)).iter().filter(|&&k| p.arr(k) == h && d.comp(f, k) == g).count()
}

/// The unique `h'` with `p(h') = h` and `f ∘ h' = g`, when there is exactly one.
pub fn cartesian_factor(p: &FinFunctor, f: Arr, g: Arr, h: Arr) -> Option<Arr> {
    let d = &**p.source();
    let mut found = d.hom(d.src(g), d.src(f)).iter().copied().filter(|&k| p.arr(k) == h && d.comp(f, k) == g);
    let first = found.next()?;
    found.next().is_none().then_some(first)
}

fn first_failure(p: &FinFunctor, f: Arr) -> Option<(Arr, Arr, usize)> {
    let (d, c) = (&**p.source(), &**p.target());
    let pf = p.arr(f);
    let over = p.obj(d.src(f));
    for &g in d.arrows_into(d.tgt(f)) {
        let pg = p.arr(g);
        for &h in c.hom(p.obj(d.src(g)), over) {
            if c.comp(pf, h) != pg {
                continue;
            }
            let n = lift_count(p, f, g, h);
            if n != 1 {
                return Some((g, h, n));
            }
        }
    }
    None
}

pub fn is_cartesian_arrow(p: &FinFunctor, f: Arr) -> bool {
    first_failure(p, f).is_none()
}

/// Unique lifting of every `(g, h)` with `p(f) ∘ h = p(g)` through `f`.
pub fn is_cartesian(p: &FinFunctor, f: Arr) -> CheckReport {
    let (d, c) = (&**p.source(), &**p.target());
    match first_failure(p, f) {
        None => CheckReport::pass("cartesian", format!("{} is cartesian for {}", d.arr_name(f), p.name())),
        Some((g, h, n)) => {
            let detail = if n == 0 { "no lift exists" } else { "the lift is not unique" };
            CheckReport::fail("cartesian", detail)
                .with("arrow", d.arr_name(f))
                .with("g", d.arr_name(g))
                .with("h", c.arr_name(h))
                .with("lifts", n)
        }
    }
}

/// A cartesian arrow `arrow: d' → d` with `p(arrow) = f ∘ sigma`, `sigma` an iso.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lift {
    pub arrow: Arr,
    pub sigma: Arr,
}

/// The lexicographically least cartesian lift of `f` into `d`.
pub fn cartesian_lift(p: &FinFunctor, f: Arr, d: Obj) -> Option<Lift> {
    let (dc, c) = (&**p.source(), &**p.target());
    if p.obj(d) != c.tgt(f) {
        return None;
    }
    let mut best: Option<(&str, &str, Lift)> = None;
    for &a in dc.arrows_into(d) {
        let sources = c.hom(p.obj(dc.src(a)), c.src(f));
        for &sigma in sources {
            if !c.is_iso(sigma) || c.comp(f, sigma) != p.arr(a) {
                continue;
            }
            let key = (dc.arr_name(a), c.arr_name(sigma));
            if best.as_ref().is_some_and(|b| (b.0, b.1) <= key) {
                continue;
            }
            if is_cartesian_arrow(p, a) {
                best = Some((key.0, key.1, Lift { arrow: a, sigma }));
            }
        }
    }
    best.map(|b| b.2)
}

/// A chosen lift for every `(f, d)` with `p(d) = tgt f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cleavage {
    lifts: BTreeMap<(Arr, Obj), Lift>,
}

impl Cleavage {
    pub fn lift(&self, f: Arr, d: Obj) -> Lift {
        self.lifts[&(f, d)]
    }

    pub fn get(&self, f: Arr, d: Obj) -> Option<Lift> {
        self.lifts.get(&(f, d)).copied()
    }

    pub fn lifts(&self) -> impl Iterator<Item = ((Arr, Obj), Lift)> + '_ {
        self.lifts.iter().map(|(&k, &v)| (k, v))
    }

    /// The `(f, 1)` lifts of a Grothendieck construction.
    pub fn from_grothendieck(g: &GrothendieckFibration) -> Self {
        let (total, base) = (&*g.total, g.indexed.base());
        let mut lifts = BTreeMap::new();
        for d in total.objects() {
            let c = g.objects[d.0].0;
            for &f in base.arrows_into(c) {
                let sigma = base.id(base.src(f));
                lifts.insert((f, d), Lift { arrow: g.chosen_lift(f, d), sigma });
            }
        }
        Cleavage { lifts }
    }

    /// Every `sigma` is an identity, identities lift to identities and lifts compose.
    pub fn is_split(&self, p: &FinFunctor) -> bool {
        let (d, c) = (&**p.source(), &**p.target());
        if self.lifts.values().any(|l| !c.is_identity(l.sigma)) {
            return false;
        }
        for (&(f, x), &l) in &self.lifts {
            if c.is_identity(f) && l.arrow != d.id(x) {
                return false;
            }
            let mid = d.src(l.arrow);
            for &g in c.arrows_into(c.src(f)) {
                let inner = self.lift(g, mid);
                if self.lift(c.comp(f, g), x).arrow != d.comp(l.arrow, inner.arrow) {
                    return false;
                }
            }
        }
        true
    }
}

/// Lifts for every base arrow into every image object, or the first `(f, d)` with none.
pub fn is_fibration(p: &FinFunctor) -> (CheckReport, Option<Cleavage>) {
    let (d, c) = (&**p.source(), &**p.target());
    let mut lifts = BTreeMap::new();
    for x in d.objects() {
        for &f in c.arrows_into(p.obj(x)) {
            match cartesian_lift(p, f, x) {
                Some(l) => {
                    lifts.insert((f, x), l);
                }
                None => {
                    let r = CheckReport::fail("fibration", "an arrow has no cartesian lift")
                        .with("arrow", c.arr_name(f))
                        .with("object", d.obj_name(x));
                    return (r, None);
                }
            }
        }
    }
    (CheckReport::pass("fibration", format!("{} is a fibration", p.name())), Some(Cleavage { lifts }))
}

/// `g = cartesian ∘ vertical` with `cartesian` the chosen lift over `p(g)`.
pub fn factorize_vertical_cartesian(p: &FinFunctor, cleavage: &Cleavage, g: Arr) -> Option<(Arr, Arr)> {
    let (d, c) = (&**p.source(), &**p.target());
    let l = cleavage.get(p.arr(g), d.tgt(g))?;
    let back = c.inverse(l.sigma)?;
    let v = cartesian_factor(p, l.arrow, g, back)?;
    Some((v, l.arrow))
}

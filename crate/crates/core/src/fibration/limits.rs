use crate::fincat::{Arr, FinCategory, FinFunctor, Obj};
use crate::report::CheckReport;

pub fn is_terminal(c: &FinCategory, o: Obj) -> bool {
    c.objects().all(|x| c.hom(x, o).len() == 1)
}

pub fn terminal_object(c: &FinCategory) -> Option<Obj> {
    c.objects().find(|&o| is_terminal(c, o))
}

/// A pullback of `f: x → z` and `g: y → z`: `f ∘ left = g ∘ right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PullbackSquare {
    pub apex: Obj,
    pub left: Arr,
    pub right: Arr,
}

/// Whether `(left, right)` is universal among cones over `(f, g)`.
pub fn is_pullback_square(c: &FinCategory, f: Arr, g: Arr, left: Arr, right: Arr) -> bool {
    let apex = c.src(left);
    if c.src(right) != apex || c.comp(f, left) != c.comp(g, right) {
        return false;
    }
    let (x, y) = (c.src(f), c.src(g));
    c.objects().all(|q| {
        c.hom(q, x).iter().all(|&a| {
            c.hom(q, y).iter().all(|&b| {
                if c.comp(f, a) != c.comp(g, b) {
                    return true;
                }
                c.hom(q, apex).iter().filter(|&&m| c.comp(left, m) == a && c.comp(right, m) == b).count() == 1
            })
        })
    })
}

/// The first pullback cone found by exhaustive search.
pub fn pullback(c: &FinCategory, f: Arr, g: Arr) -> Option<PullbackSquare> {
    let (x, y) = (c.src(f), c.src(g));
    for apex in c.objects() {
        for &left in c.hom(apex, x) {
            for &right in c.hom(apex, y) {
                if is_pullback_square(c, f, g, left, right) {
                    return Some(PullbackSquare { apex, left, right });
                }
            }
        }
    }
    None
}

/// The total category has a terminal object and all pullbacks, and `p` preserves them.
pub fn is_cartesian_fibration(p: &FinFunctor) -> CheckReport {
    let (d, c) = (&**p.source(), &**p.target());
    let name = "cartesian fibration";
    let Some(t) = terminal_object(d) else {
        return CheckReport::fail(name, "the total category has no terminal object");
    };
    if !is_terminal(c, p.obj(t)) {
        return CheckReport::fail(name, "the terminal object is not preserved").with("terminal", d.obj_name(t));
    }
    for z in d.objects() {
        let into = d.arrows_into(z);
        for (i, &f) in into.iter().enumerate() {
            for &g in &into[i..] {
                let Some(sq) = pullback(d, f, g) else {
                    return CheckReport::fail(name, "a pullback is missing")
                        .with("f", d.arr_name(f))
                        .with("g", d.arr_name(g));
                };
                if !is_pullback_square(c, p.arr(f), p.arr(g), p.arr(sq.left), p.arr(sq.right)) {
                    return CheckReport::fail(name, "a pullback is not preserved")
                        .with("f", d.arr_name(f))
                        .with("g", d.arr_name(g));
                }
            }
        }
    }
    CheckReport::pass(name, format!("{} has finite limits preserved by {}", d.name(), p.name()))
}

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::category::{same, Arr, CategoryError, FinCategory, Obj};
use super::functor::{FinFunctor, FunctorError};
use super::indexed::IndexedCategory;
use crate::presheaf::FinPresheaf;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("functors `{0}` and `{1}` do not share a target category")]
    TargetMismatch(String, String),

    #[error(transparent)]
    Category(#[from] CategoryError),

    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// Picks `base`, or `base'`, `base''`, ... until the name is unused.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// The comma category `(F/G)` with its two projections.
#[derive(Clone, Debug)]
pub struct Comma {
    pub category: Arc<FinCategory>,
    pub left: FinFunctor,
    pub right: FinFunctor,
    /// `(a, b, u: F a → G b)` per object.
    pub objects: Vec<(Obj, Obj, Arr)>,
    /// `(f, g)` per arrow.
    pub arrows: Vec<(Arr, Arr)>,
}

impl Comma {
    pub fn find_object(&self, a: Obj, b: Obj, u: Arr) -> Option<Obj> {
        self.objects.iter().position(|&o| o == (a, b, u)).map(Obj)
    }

    pub fn find_arrow(&self, src: Obj, tgt: Obj, f: Arr, g: Arr) -> Option<Arr> {
        self.category
            .hom(src, tgt)
            .iter()
            .copied()
            .find(|a| self.arrows[a.0] == (f, g))
    }
}

pub fn build_comma(f: &FinFunctor, g: &FinFunctor) -> Result<Comma, ConstructionError> {
    if !same(f.target(), g.target()) {
        return Err(ConstructionError::TargetMismatch(f.name().into(), g.name().into()));
    }
    let (a_cat, b_cat, c) = (f.source().clone(), g.source().clone(), f.target().clone());
    let mut objects = Vec::new();
    for a in a_cat.objects() {
        for b in b_cat.objects() {
            for &u in c.hom(f.obj(a), g.obj(b)) {
                objects.push((a, b, u));
            }
        }
    }
    let obj_names: Vec<String> = objects
        .iter()
        .map(|&(a, b, u)| format!("({},{},{})", a_cat.obj_name(a), b_cat.obj_name(b), c.arr_name(u)))
        .collect();
    let mut arrows = Vec::new();
    let mut arrow_data = Vec::new();
    let mut ids = vec![Arr(0); objects.len()];
    let mut index: HashMap<(usize, usize, Arr, Arr), Arr> = HashMap::new();
    for (i, &(a1, b1, u1)) in objects.iter().enumerate() {
        for (j, &(a2, b2, u2)) in objects.iter().enumerate() {
            for &fa in a_cat.hom(a1, a2) {
                for &gb in b_cat.hom(b1, b2) {
                    if c.comp(u2, f.arr(fa)) != c.comp(g.arr(gb), u1) {
                        continue;
                    }
                    let idx = Arr(arrows.len());
                    let name = if i == j && a_cat.is_identity(fa) && b_cat.is_identity(gb) {
                        ids[i] = idx;
                        format!("id_{}", obj_names[i])
                    } else {
                        format!("({},{}):{}->{}", a_cat.arr_name(fa), b_cat.arr_name(gb), obj_names[i], obj_names[j])
                    };
                    index.insert((i, j, fa, gb), idx);
                    arrows.push((fa, gb));
                    arrow_data.push((name, Obj(i), Obj(j)));
                }
            }
        }
    }
    let ends: Vec<(usize, usize)> = arrow_data.iter().map(|(_, s, t)| (s.0, t.0)).collect();
    let category = Arc::new(FinCategory::from_parts(
        format!("({}/{})", f.name(), g.name()),
        obj_names,
        arrow_data,
        ids,
        |x, y| {
            let (fx, gx) = arrows[x.0];
            let (fy, gy) = arrows[y.0];
            index[&(ends[y.0].0, ends[x.0].1, a_cat.comp(fx, fy), b_cat.comp(gx, gy))]
        },
    )?);
    let left = FinFunctor::new(
        "pi_left",
        category.clone(),
        a_cat.clone(),
        objects.iter().map(|o| o.0).collect(),
        arrows.iter().map(|a| a.0).collect(),
    )?;
    let right = FinFunctor::new(
        "pi_right",
        category.clone(),
        b_cat.clone(),
        objects.iter().map(|o| o.1).collect(),
        arrows.iter().map(|a| a.1).collect(),
    )?;
    Ok(Comma { category, left, right, objects, arrows })
}

/// The slice `C/c`: objects are arrows into `c`, arrows are commuting triangles.
#[derive(Clone, Debug)]
pub struct Slice {
    pub category: Arc<FinCategory>,
    pub projection: FinFunctor,
    pub apex: Obj,
    /// The arrow `v: c' → c` each object stands for.
    pub objects: Vec<Arr>,
    /// The underlying arrow of `C` for each slice arrow.
    pub arrows: Vec<Arr>,
}

impl Slice {
    pub fn object_of(&self, v: Arr) -> Option<Obj> {
        self.objects.iter().position(|&w| w == v).map(Obj)
    }

    /// The slice arrow `h: v' → v`, if `v ∘ h = v'`.
    pub fn arrow_of(&self, h: Arr, v: Arr) -> Option<Arr> {
        let tgt = self.object_of(v)?;
        self.category.arrows_into(tgt).iter().copied().find(|a| self.arrows[a.0] == h)
    }
}

pub fn slice(c: &Arc<FinCategory>, apex: Obj) -> Slice {
    let objects: Vec<Arr> = c.arrows_into(apex).to_vec();
    let names: Vec<String> = objects.iter().map(|&v| c.arr_name(v).to_string()).collect();
    let mut arrows = Vec::new();
    let mut data = Vec::new();
    let mut ids = vec![Arr(0); objects.len()];
    let mut index = HashMap::new();
    for (j, &v) in objects.iter().enumerate() {
        for (i, &w) in objects.iter().enumerate() {
            for &h in c.hom(c.src(w), c.src(v)) {
                if c.comp(v, h) != w {
                    continue;
                }
                let idx = Arr(arrows.len());
                let name = if i == j && c.is_identity(h) {
                    ids[i] = idx;
                    format!("id_{}", names[i])
                } else {
                    format!("({},{})", c.arr_name(h), names[j])
                };
                index.insert((h, j), idx);
                arrows.push(h);
                data.push((name, Obj(i), Obj(j)));
            }
        }
    }
    let tgts: Vec<usize> = data.iter().map(|(_, _, t)| t.0).collect();
    let category = Arc::new(
        FinCategory::from_parts(
            format!("{}/{}", c.name(), c.obj_name(apex)),
            names,
            data,
            ids,
            |x, y| index[&(c.comp(arrows[x.0], arrows[y.0]), tgts[x.0])],
        )
        .expect("slice of a valid category is valid"),
    );
    let projection = FinFunctor::new(
        "pi_slice",
        category.clone(),
        c.clone(),
        objects.iter().map(|&v| c.src(v)).collect(),
        arrows.clone(),
    )
    .expect("slice projection is a functor");
    Slice { category, projection, apex, objects, arrows }
}

/// The Grothendieck construction of a strict indexed category.
#[derive(Clone, Debug)]
pub struct GrothendieckFibration {
    pub indexed: IndexedCategory,
    pub total: Arc<FinCategory>,
    pub projection: FinFunctor,
    /// `(c, x)` per total object.
    pub objects: Vec<(Obj, Obj)>,
    /// `(f, u)` per total arrow.
    pub arrows: Vec<(Arr, Arr)>,
    obj_index: HashMap<(Obj, Obj), Obj>,
    arr_index: HashMap<(Arr, Arr, Obj), Arr>,
}

impl GrothendieckFibration {
    pub fn object(&self, c: Obj, x: Obj) -> Obj {
        self.obj_index[&(c, x)]
    }

    /// The total arrow `(f, u)` with target `(x, tgt f)`.
    pub fn arrow(&self, f: Arr, u: Arr, x: Obj) -> Option<Arr> {
        self.arr_index.get(&(f, u, x)).copied()
    }

    /// The cleavage lift `(f, 1)` of `f` into the total object `d` over `tgt f`.
    pub fn chosen_lift(&self, f: Arr, d: Obj) -> Arr {
        let (c, x) = self.objects[d.0];
        let base = self.indexed.base();
        assert_eq!(base.tgt(f), c, "lift target is not over the arrow's codomain");
        let moved = self.indexed.transport(f).obj(x);
        let id = self.indexed.fiber(base.src(f)).id(moved);
        self.arr_index[&(f, id, x)]
    }

    pub fn is_chosen_lift(&self, a: Arr) -> bool {
        let (_, u) = self.arrows[a.0];
        let fiber = self.indexed.fiber(self.objects[self.total.src(a).0].0);
        fiber.is_identity(u)
    }
}

pub fn grothendieck_construction(d: &IndexedCategory) -> GrothendieckFibration {
    let base = d.base().clone();
    let mut objects = Vec::new();
    let mut names = Vec::new();
    for c in base.objects() {
        for x in d.fiber(c).objects() {
            objects.push((c, x));
            names.push(format!("({},{})", d.fiber(c).obj_name(x), base.obj_name(c)));
        }
    }
    let obj_index: HashMap<(Obj, Obj), Obj> = objects.iter().enumerate().map(|(i, &k)| (k, Obj(i))).collect();
    let mut arrows = Vec::new();
    let mut data = Vec::new();
    let mut ids = vec![Arr(0); objects.len()];
    let mut arr_index = HashMap::new();
    for f in base.arrows() {
        let (c1, c) = (base.src(f), base.tgt(f));
        let t = d.transport(f);
        let fib_c = d.fiber(c);
        let fib_c1 = d.fiber(c1);
        let collapses = fib_c
            .objects()
            .any(|x| fib_c.objects().any(|y| x != y && t.obj(x) == t.obj(y)));
        for x in fib_c.objects() {
            for &u in fib_c1.arrows_into(t.obj(x)) {
                let idx = Arr(arrows.len());
                let src = obj_index[&(c1, fib_c1.src(u))];
                let tgt = obj_index[&(c, x)];
                let name = if base.is_identity(f) && fib_c1.is_identity(u) {
                    ids[tgt.0] = idx;
                    format!("id_{}", names[tgt.0])
                } else if collapses {
                    format!("({},{})>{}", base.arr_name(f), fib_c1.arr_name(u), fib_c.obj_name(x))
                } else {
                    format!("({},{})", base.arr_name(f), fib_c1.arr_name(u))
                };
                arr_index.insert((f, u, x), idx);
                arrows.push((f, u));
                data.push((name, src, tgt));
            }
        }
    }
    let tgt_fiber_obj: Vec<Obj> = data.iter().map(|(_, _, t)| objects[t.0].1).collect();
    let total = Arc::new(
        FinCategory::from_parts(d.name().to_string(), names, data, ids, |a, b| {
            // (f, u) ∘ (g, v) = (f ∘ g, D(g)(u) ∘ v)
            let (f, u) = arrows[a.0];
            let (g, v) = arrows[b.0];
            let fib = d.fiber(base.src(g));
            let uu = d.transport(g).arr(u);
            arr_index[&(base.comp(f, g), fib.comp(uu, v), tgt_fiber_obj[a.0])]
        })
        .expect("Grothendieck construction of a strict indexed category is a category"),
    );
    let projection = FinFunctor::new(
        d.name().to_string(),
        total.clone(),
        base.clone(),
        objects.iter().map(|o| o.0).collect(),
        arrows.iter().map(|a| a.0).collect(),
    )
    .expect("projection is a functor");
    GrothendieckFibration { indexed: d.clone(), total, projection, objects, arrows, obj_index, arr_index }
}

/// `C₀`: `C` with a freshly added initial object that receives no arrows.
#[derive(Clone, Debug)]
pub struct FreeInitial {
    pub category: Arc<FinCategory>,
    pub inclusion: FinFunctor,
    pub initial: Obj,
    /// `!_c: 0 → c` per object of `C₀` (the identity at `0`).
    pub bang: Vec<Arr>,
}

pub fn add_free_initial(c: &Arc<FinCategory>) -> FreeInitial {
    let n = c.object_count();
    let m = c.arrow_count();
    let zero = fresh_name("0", |s| c.obj(s).is_some());
    let mut names: Vec<String> = c.objects().map(|o| c.obj_name(o).to_string()).collect();
    names.push(zero.clone());
    let initial = Obj(n);
    let mut data: Vec<(String, Obj, Obj)> =
        c.arrows().map(|a| (c.arr_name(a).to_string(), c.src(a), c.tgt(a))).collect();
    let id_zero = fresh_name(&format!("id_{zero}"), |s| c.arr(s).is_some());
    data.push((id_zero, initial, initial));
    let mut bang = Vec::with_capacity(n + 1);
    for o in c.objects() {
        let name = fresh_name(&format!("!_{}", c.obj_name(o)), |s| c.arr(s).is_some());
        bang.push(Arr(data.len()));
        data.push((name, initial, o));
    }
    bang.push(Arr(m));
    let mut ids: Vec<Arr> = c.objects().map(|o| c.id(o)).collect();
    ids.push(Arr(m));
    let category = Arc::new(
        FinCategory::from_parts(format!("{}_0", c.name()), names, data.clone(), ids, |f, g| {
            if f.0 < m && g.0 < m {
                c.comp(f, g)
            } else if g.0 == m {
                f
            } else {
                // g = !_x, so f ∘ g = !_{tgt f}
                bang[data[f.0].2 .0]
            }
        })
        .expect("free initial augmentation is a category"),
    );
    let inclusion = FinFunctor::new(
        "i0",
        c.clone(),
        category.clone(),
        c.objects().collect(),
        c.arrows().collect(),
    )
    .expect("inclusion is a functor");
    FreeInitial { category, inclusion, initial, bang }
}

/// Zig-zag components, each sorted, ordered by least member.
pub fn connected_components(c: &FinCategory) -> Vec<Vec<Obj>> {
    let n = c.object_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for a in c.arrows() {
        let (x, y) = (find(&mut parent, c.src(a).0), find(&mut parent, c.tgt(a).0));
        if x != y {
            parent[x.max(y)] = x.min(y);
        }
    }
    let mut groups: Vec<Vec<Obj>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for o in 0..n {
        let r = find(&mut parent, o);
        let k = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(Obj(o));
    }
    groups
}

/// The category of elements `∫P` with its projection to the base.
#[derive(Clone, Debug)]
pub struct Elements {
    pub category: Arc<FinCategory>,
    pub projection: FinFunctor,
    /// `(c, x)` per object.
    pub objects: Vec<(Obj, usize)>,
    /// The base arrow under each arrow.
    pub arrows: Vec<Arr>,
}

impl Elements {
    pub fn object_of(&self, c: Obj, x: usize) -> Option<Obj> {
        self.objects.iter().position(|&o| o == (c, x)).map(Obj)
    }
}

pub fn category_of_elements(p: &FinPresheaf) -> Elements {
    let base = p.base().clone();
    let mut objects = Vec::new();
    let mut names = Vec::new();
    let mut index = HashMap::new();
    for c in base.objects() {
        for x in 0..p.size(c) {
            index.insert((c, x), Obj(objects.len()));
            objects.push((c, x));
            names.push(format!("({},{})", base.obj_name(c), p.label(c, x)));
        }
    }
    let mut arrows = Vec::new();
    let mut data = Vec::new();
    let mut ids = vec![Arr(0); objects.len()];
    let mut arr_index = HashMap::new();
    for f in base.arrows() {
        let (c1, c) = (base.src(f), base.tgt(f));
        for x in 0..p.size(c) {
            let x1 = p.act(f, x);
            let tgt = index[&(c, x)];
            let idx = Arr(arrows.len());
            let name = if base.is_identity(f) {
                ids[tgt.0] = idx;
                format!("id_{}", names[tgt.0])
            } else {
                format!("({},{})", base.arr_name(f), p.label(c, x))
            };
            arr_index.insert((f, x), idx);
            arrows.push(f);
            data.push((name, index[&(c1, x1)], tgt));
        }
    }
    let tgt_elem: Vec<usize> = data.iter().map(|(_, _, t)| objects[t.0].1).collect();
    let category = Arc::new(
        FinCategory::from_parts(format!("el({})", p.name()), names, data, ids, |a, b| {
            arr_index[&(base.comp(arrows[a.0], arrows[b.0]), tgt_elem[a.0])]
        })
        .expect("category of elements is a category"),
    );
    let projection = FinFunctor::new(
        "pi_el",
        category.clone(),
        base.clone(),
        objects.iter().map(|o| o.0).collect(),
        arrows.clone(),
    )
    .expect("projection is a functor");
    Elements { category, projection, objects, arrows }
}

/// The full subcategory on `objects` (in that order) with its inclusion.
pub fn full_subcategory(c: &Arc<FinCategory>, objects: &[Obj]) -> (Arc<FinCategory>, FinFunctor) {
    let mut pos = vec![usize::MAX; c.object_count()];
    for (i, o) in objects.iter().enumerate() {
        pos[o.0] = i;
    }
    let mut arrows = Vec::new();
    let mut data = Vec::new();
    let mut new_index = vec![usize::MAX; c.arrow_count()];
    for &s in objects {
        for &t in objects {
            for &a in c.hom(s, t) {
                new_index[a.0] = arrows.len();
                arrows.push(a);
                data.push((c.arr_name(a).to_string(), Obj(pos[s.0]), Obj(pos[t.0])));
            }
        }
    }
    let ids = objects.iter().map(|&o| Arr(new_index[c.id(o).0])).collect();
    let names = objects.iter().map(|&o| c.obj_name(o).to_string()).collect();
    let sub = Arc::new(
        FinCategory::from_parts(format!("{}|sub", c.name()), names, data, ids, |f, g| {
            Arr(new_index[c.comp(arrows[f.0], arrows[g.0]).0])
        })
        .expect("full subcategory is a category"),
    );
    let inclusion = FinFunctor::new("incl", sub.clone(), c.clone(), objects.to_vec(), arrows)
        .expect("inclusion is a functor");
    (sub, inclusion)
}

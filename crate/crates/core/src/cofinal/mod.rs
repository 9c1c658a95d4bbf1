//! Factorization categories and `J`-cofinality of functors into slices.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{
    build_comma, category_of_elements, connected_components, find_isomorphism, fixtures, same, slice, Arr,
    FinCategory, FinFunctor, Obj, Slice,
};
use crate::locfib::{evaluation, is_locally_cartesian, postcompose, DualVerdict, LocalSite};
use crate::presheaf::{compute_pullback, locality_test, representable_cocone, restrict_along, yoneda, LocalityMode};
use crate::report::CheckReport;
use crate::sites::{GrothendieckTopology, Sieve};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CofinalError {
    #[error("`{0}` is not continuous")]
    NotContinuous(String),
    #[error("{0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactKind {
    /// Factorizations of a base arrow `f: c → p(d)`.
    Fact,
    /// Locally cartesian post-factors of a total arrow `f: d' → d`.
    CartFact,
}

/// A factorization category with its projection into a slice of the base.
#[derive(Clone, Debug)]
pub struct FactCategory {
    pub kind: FactKind,
    pub carrier: Arc<FinCategory>,
    /// `C/c` for [`FactKind::Fact`], `C/p(d')` for [`FactKind::CartFact`].
    pub slice: Slice,
    pub projection: FinFunctor,
    /// Forgets to the total category.
    pub to_total: FinFunctor,
    /// `(d', v', f')` per object.
    pub triples: Vec<(Obj, Arr, Arr)>,
}

impl FactCategory {
    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn find(&self, triple: (Obj, Arr, Arr)) -> Option<Obj> {
        self.triples.iter().position(|&t| t == triple).map(Obj)
    }
}

/// Objects `triples`, arrows every `u` between their total objects accepted by `keep`.
fn assemble(
    d: &Arc<FinCategory>,
    name: String,
    triples: &[(Obj, Arr, Arr)],
    labels: Vec<String>,
    keep: impl Fn(usize, usize, Arr) -> bool,
) -> (Arc<FinCategory>, Vec<Arr>) {
    let mut under = Vec::new();
    let mut data = Vec::new();
    let mut ids = vec![Arr(0); triples.len()];
    let mut index = HashMap::new();
    for (i, t1) in triples.iter().enumerate() {
        for (j, t2) in triples.iter().enumerate() {
            for &u in d.hom(t1.0, t2.0) {
                if !keep(i, j, u) {
                    continue;
                }
                let idx = Arr(under.len());
                let label = if i == j && d.is_identity(u) {
                    ids[i] = idx;
                    format!("id_{}", labels[i])
                } else {
                    format!("{}:{}->{}", d.arr_name(u), labels[i], labels[j])
                };
                index.insert((u, i, j), idx);
                under.push(u);
                data.push((label, Obj(i), Obj(j)));
            }
        }
    }
    let ends: Vec<(usize, usize)> = data.iter().map(|(_, s, t)| (s.0, t.0)).collect();
    let carrier = Arc::new(
        FinCategory::from_parts(name, labels, data, ids, |x, y| {
            index[&(d.comp(under[x.0], under[y.0]), ends[y.0].0, ends[x.0].1)]
        })
        .expect("factorization categories are categories"),
    );
    (carrier, under)
}

fn forget(carrier: &Arc<FinCategory>, d: &Arc<FinCategory>, triples: &[(Obj, Arr, Arr)], under: &[Arr]) -> FinFunctor {
    FinFunctor::new("forget", carrier.clone(), d.clone(), triples.iter().map(|t| t.0).collect(), under.to_vec())
        .expect("forgetting is a functor")
}

/// `D^fact_{f,d}`: triples `(d', v': p(d') → c, f': d' → d)` with `f∘v' = p(f')`.
pub fn build_fact_category(ls: &LocalSite, f: Arr, d0: Obj) -> Result<FactCategory, CofinalError> {
    let (d, c, p) = (ls.total(), ls.base(), ls.p());
    if c.tgt(f) != p.obj(d0) {
        return Err(CofinalError::Shape(format!("{} does not end at p({})", c.arr_name(f), d.obj_name(d0))));
    }
    let apex = c.src(f);
    let mut triples = Vec::new();
    for e in d.objects() {
        for &fp in d.hom(e, d0) {
            for &v in c.hom(p.obj(e), apex) {
                if c.comp(f, v) == p.arr(fp) {
                    triples.push((e, v, fp));
                }
            }
        }
    }
    let labels = triples
        .iter()
        .map(|&(e, v, fp)| format!("({},{},{})", d.obj_name(e), c.arr_name(v), d.arr_name(fp)))
        .collect();
    let name = format!("Fact({},{})", c.arr_name(f), d.obj_name(d0));
    let (carrier, under) = assemble(d, name, &triples, labels, |i, j, u| {
        let ((_, v1, f1), (_, v2, f2)) = (triples[i], triples[j]);
        c.comp(v2, p.arr(u)) == v1 && d.comp(f2, u) == f1
    });
    let sl = slice(c, apex);
    let projection = FinFunctor::new(
        "pi_fact",
        carrier.clone(),
        sl.category.clone(),
        triples.iter().map(|t| sl.object_of(t.1).expect("v' ends at c")).collect(),
        carrier
            .arrows()
            .map(|a| sl.arrow_of(p.arr(under[a.0]), triples[carrier.tgt(a).0].1).expect("triangles commute"))
            .collect(),
    )
    .expect("projection is a functor");
    let to_total = forget(&carrier, d, &triples, &under);
    Ok(FactCategory { kind: FactKind::Fact, carrier, slice: sl, projection, to_total, triples })
}

/// `D^cart-fact_f`: triples `(d'', v'': d'' → d', f∘v'')` with `f∘v''` locally cartesian.
///
/// The projection lands in `C/p(d')` via `(p(d''), p(v''))`.
pub fn build_cartfact_category(ls: &LocalSite, f: Arr) -> FactCategory {
    let (d, c, p) = (ls.total(), ls.base(), ls.p());
    let d1 = d.src(f);
    let mut triples = Vec::new();
    for &v in d.arrows_into(d1) {
        let fv = d.comp(f, v);
        if ls.is_loccart(fv) {
            triples.push((d.src(v), v, fv));
        }
    }
    let labels = triples
        .iter()
        .map(|&(e, v, fv)| format!("({},{},{})", d.obj_name(e), d.arr_name(v), d.arr_name(fv)))
        .collect();
    let name = format!("CartFact({})", d.arr_name(f));
    let (carrier, under) = assemble(d, name, &triples, labels, |i, j, u| d.comp(triples[j].1, u) == triples[i].1);
    let sl = slice(c, p.obj(d1));
    let projection = FinFunctor::new(
        "pi_cartfact",
        carrier.clone(),
        sl.category.clone(),
        triples.iter().map(|t| sl.object_of(p.arr(t.1)).expect("p(v'') ends at p(d')")).collect(),
        carrier
            .arrows()
            .map(|a| {
                let v2 = triples[carrier.tgt(a).0].1;
                sl.arrow_of(p.arr(under[a.0]), p.arr(v2)).expect("triangles commute")
            })
            .collect(),
    )
    .expect("projection is a functor");
    let to_total = forget(&carrier, d, &triples, &under);
    FactCategory { kind: FactKind::CartFact, carrier, slice: sl, projection, to_total, triples }
}

/// `D^fact_{f,d}` against `∫(y(d) ×_{C(p-, p d)} C(p-, c))`.
pub fn fact_elements_check(ls: &LocalSite, fc: &FactCategory, f: Arr, d0: Obj) -> CheckReport {
    let (d, c, p) = (ls.total(), ls.base(), ls.p());
    let name = "factorizations as elements";
    let yd = Arc::new(yoneda(d, d0));
    let ev = evaluation(p, d0, &yd);
    let cc = Arc::new(restrict_along(p, &yoneda(c, c.src(f))).expect("p lands in C"));
    let post = postcompose(p, f, &cc, ev.target());
    let pb = compute_pullback(&ev, &post).expect("legs share a target");
    let el = category_of_elements(&pb.apex);
    for (i, &(e, v, fp)) in fc.triples.iter().enumerate() {
        let x = d.hom(e, d0).iter().position(|&g| g == fp);
        let y = c.hom(p.obj(e), c.src(f)).iter().position(|&w| w == v);
        let found = x.zip(y).and_then(|(x, y)| pb.element(e, x, y)).and_then(|z| el.object_of(e, z));
        if found.is_none() {
            return CheckReport::fail(name, "a factorization is not an element of the pullback")
                .with("object", fc.carrier.obj_name(Obj(i)));
        }
    }
    if find_isomorphism(&fc.carrier, &el.category).is_none() {
        return CheckReport::fail(name, "the carrier is not isomorphic to the category of elements")
            .with("objects", format!("{} vs {}", fc.carrier.object_count(), el.category.object_count()))
            .with("arrows", format!("{} vs {}", fc.carrier.arrow_count(), el.category.arrow_count()));
    }
    CheckReport::pass(name, format!("{} objects, {} arrows", el.category.object_count(), el.category.arrow_count()))
}

fn lands_in(q: &FinFunctor, sl: &Slice, j: &GrothendieckTopology) -> Option<CheckReport> {
    if !same(q.target(), &sl.category) || !same(sl.projection.target(), j.base()) {
        return Some(CheckReport::fail("J-cofinal", format!("{} does not land in a slice of the site", q.name())));
    }
    None
}

/// Covering condition and local connectedness of the comma categories.
pub fn is_j_cofinal(q: &FinFunctor, sl: &Slice, j: &GrothendieckTopology) -> CheckReport {
    if let Some(r) = lands_in(q, sl, j) {
        return r;
    }
    let name = "J-cofinal";
    let c = sl.projection.target();
    let e = q.source();
    let pq = sl.projection.after(q).expect("q lands in the slice");
    let legs: Vec<Arr> = e.objects().map(|o| sl.objects[q.obj(o).0]).collect();

    let generated = Sieve::generated(c, sl.apex, legs.iter().copied());
    if !j.covers(&generated) {
        return CheckReport::fail(name, "condition (1): the images do not cover")
            .with("object", c.obj_name(sl.apex))
            .with("sieve", generated.display(c));
    }

    // component of each (x: c'' → πq(e), e) in (c''/πq)
    let one = fixtures::one();
    let components: Vec<HashMap<(Obj, Arr), usize>> = c
        .objects()
        .map(|c2| {
            let k = FinFunctor::constant_from(one.clone(), c.clone(), c2).expect("objects exist");
            let comma = build_comma(&k, &pq).expect("both functors land in C");
            let mut of = HashMap::new();
            for (n, comp) in connected_components(&comma.category).iter().enumerate() {
                for o in comp {
                    let (_, eo, x) = comma.objects[o.0];
                    of.insert((eo, x), n);
                }
            }
            of
        })
        .collect();

    for c1 in c.objects() {
        let elems: Vec<(Obj, Arr)> =
            e.objects().flat_map(|eo| c.hom(c1, pq.obj(eo)).iter().map(move |&x| (eo, x))).collect();
        for (a, &(e1, x1)) in elems.iter().enumerate() {
            for &(e2, x2) in &elems[a + 1..] {
                if c.comp(legs[e1.0], x1) != c.comp(legs[e2.0], x2)
                    || components[c1.0][&(e1, x1)] == components[c1.0][&(e2, x2)]
                {
                    continue;
                }
                let joined = c.arrows_into(c1).iter().copied().filter(|&w| {
                    let at = &components[c.src(w).0];
                    at[&(e1, c.comp(x1, w))] == at[&(e2, c.comp(x2, w))]
                });
                let sieve = Sieve::generated(c, c1, joined);
                if !j.covers(&sieve) {
                    return CheckReport::fail(name, "condition (2): two factorizations are not locally connected")
                        .with("object", c.obj_name(c1))
                        .with("first", format!("({}, {})", e.obj_name(e1), c.arr_name(x1)))
                        .with("second", format!("({}, {})", e.obj_name(e2), c.arr_name(x2)))
                        .with("sieve", sieve.display(c));
                }
            }
        }
    }
    CheckReport::pass(name, format!("{} is {}-cofinal", q.name(), j.name()))
}

/// `colim_e y(c_e) → y(c)` is locally invertible.
pub fn cofinality_oracle(q: &FinFunctor, sl: &Slice, j: &GrothendieckTopology) -> CheckReport {
    if let Some(r) = lands_in(q, sl, j) {
        return r;
    }
    let c = sl.projection.target();
    let e = q.source();
    let pq = sl.projection.after(q).expect("q lands in the slice");
    let objs: Vec<Obj> = e.objects().map(|o| pq.obj(o)).collect();
    let legs: Vec<Arr> = e.objects().map(|o| sl.objects[q.obj(o).0]).collect();
    let cmp = representable_cocone(c, e, &objs, pq.arr_map(), sl.apex, &legs);
    let r = locality_test(&cmp, j, LocalityMode::Iso);
    let out = CheckReport::verdict("J-cofinal (oracle)", r.passed, r.detail);
    r.witness.into_iter().fold(out, |acc, (k, v)| acc.with(k, v))
}

pub fn cofinality_verdict(q: &FinFunctor, sl: &Slice, j: &GrothendieckTopology) -> DualVerdict {
    DualVerdict::new(is_j_cofinal(q, sl, j), cofinality_oracle(q, sl, j))
}

/// The three verdicts attached to one total arrow.
#[derive(Clone, Debug)]
pub struct CofinalityVerdicts {
    /// `f` is locally cartesian.
    pub loccart: DualVerdict,
    /// The cart-fact projection is `J`-cofinal.
    pub cofinal: CheckReport,
    /// The colimit of `y(p d'')` over the cart-fact category is locally `y(p d')`.
    pub colimit: CheckReport,
}

impl CofinalityVerdicts {
    pub fn agree(&self) -> bool {
        let l = self.loccart.combinatorial.passed;
        self.loccart.agree && l == self.cofinal.passed && l == self.colimit.passed
    }
}

pub fn cofinality_verdicts(ls: &LocalSite, f: Arr) -> CofinalityVerdicts {
    let fc = build_cartfact_category(ls, f);
    let j = ls.j();
    CofinalityVerdicts {
        loccart: is_locally_cartesian(ls, f),
        cofinal: is_j_cofinal(&fc.projection, &fc.slice, j),
        colimit: cofinality_oracle(&fc.projection, &fc.slice, j),
    }
}

/// Passes when local cartesianness, cofinality of the cart-fact projection
/// and the colimit representation all agree.
pub fn loccart_cofinality_equiv(ls: &LocalSite, f: Arr) -> CheckReport {
    let v = cofinality_verdicts(ls, f);
    let tag = |b: bool| if b { "pass" } else { "fail" };
    let detail = if v.agree() { "the three verdicts agree" } else { "the verdicts disagree" };
    CheckReport::verdict("cofinality equivalence", v.agree(), detail)
        .with("arrow", ls.total().arr_name(f))
        .with("locally cartesian", tag(v.loccart.combinatorial.passed))
        .with("locally cartesian (oracle)", tag(v.loccart.oracle.passed))
        .with("cart-fact cofinal", tag(v.cofinal.passed))
        .with("colimit representation", tag(v.colimit.passed))
}

/// Every `π^f_d: D^fact_{f,d} → C/c` is `J`-cofinal.
pub fn topos_level_fibration_check(ls: &LocalSite, require_continuous: bool) -> Result<CheckReport, CofinalError> {
    if require_continuous && !ls.is_continuous() {
        return Err(CofinalError::NotContinuous(ls.p().name().into()));
    }
    let (d, c) = (ls.total(), ls.base());
    let name = "fibration at topos level";
    for d0 in d.objects() {
        for &f in c.arrows_into(ls.p().obj(d0)) {
            let fc = build_fact_category(ls, f, d0)?;
            let r = is_j_cofinal(&fc.projection, &fc.slice, ls.j());
            if !r.passed {
                let out = CheckReport::fail(name, format!("a factorization category is not cofinal: {}", r.detail))
                    .with("arrow", c.arr_name(f))
                    .with("object", d.obj_name(d0));
                return Ok(r.witness.into_iter().fold(out, |acc, (k, v)| acc.with(format!("cofinality {k}"), v)));
            }
        }
    }
    Ok(CheckReport::pass(name, format!("every factorization category of {} is cofinal", ls.p().name())))
}

use std::collections::HashMap;
use std::sync::Arc;

use crate::fincat::{category_of_elements, same, Arr, FinFunctor, NatTransform, Obj};
use crate::presheaf::{
    compute_colimit, compute_pullback, locality_test, yoneda, yoneda_map, Diagram, FinPresheaf, LocalityMode,
    PresheafMorphism,
};
use crate::report::CheckReport;
use crate::sites::{is_continuous, SitedFunctor};

use super::{evaluation_along, postcompose, LocalFibrationError, LocalSite};

/// `A: (D, K) → (D', K')` between local sites over a common base, with `φ: p'A ⇒ p`.
#[derive(Clone, Debug)]
pub struct LocalMorphism {
    pub source: LocalSite,
    pub target: LocalSite,
    pub a: FinFunctor,
    pub phi: NatTransform,
}

impl LocalMorphism {
    pub fn new(source: LocalSite, target: LocalSite, a: FinFunctor, phi: NatTransform) -> Result<Self, LocalFibrationError> {
        let shape = |m: String| LocalFibrationError::Shape(format!("`{}`: {m}", a.name()));
        if !same(a.source(), source.total()) || !same(a.target(), target.total()) || !same(source.base(), target.base()) {
            return Err(shape("endpoints do not match".into()));
        }
        let qa = target.p().after(&a).map_err(|e| shape(e.to_string()))?;
        if phi.source().obj_map() != qa.obj_map()
            || phi.source().arr_map() != qa.arr_map()
            || phi.target().obj_map() != source.p().obj_map()
            || phi.target().arr_map() != source.p().arr_map()
        {
            return Err(shape("witness is not a transformation p'A ⇒ p".into()));
        }
        Ok(LocalMorphism { source, target, a, phi })
    }

    /// Identity witness; requires `p'A = p`.
    pub fn strict(source: LocalSite, target: LocalSite, a: FinFunctor) -> Result<Self, LocalFibrationError> {
        let qa = target.p().after(&a).map_err(|e| LocalFibrationError::Shape(e.to_string()))?;
        let ids = source.total().objects().map(|o| source.base().id(source.p().obj(o))).collect();
        let phi = NatTransform::new("phi", qa, source.p().clone(), ids)
            .map_err(|_| LocalFibrationError::Shape(format!("`{}`: p'A differs from p", a.name())))?;
        LocalMorphism::new(source, target, a, phi)
    }

    pub fn sited(&self) -> SitedFunctor {
        SitedFunctor::new(self.a.clone(), self.source.k().clone(), self.target.k().clone())
            .expect("endpoints checked on construction")
    }
}

/// Locally cartesian arrows go to locally cartesian arrows.
pub fn is_morphism_of_local_fibrations(m: &LocalMorphism) -> CheckReport {
    let name = "morphism of local fibrations";
    let (d, e, c) = (&**m.source.total(), &**m.target.total(), &**m.source.base());
    if let Some(o) = d.objects().find(|&o| !c.is_iso(m.phi.at(o))) {
        return CheckReport::fail(name, "witness is not invertible").with("object", d.obj_name(o));
    }
    for f in d.arrows() {
        if m.source.is_loccart(f) && !m.target.is_loccart(m.a.arr(f)) {
            return CheckReport::fail(name, "a locally cartesian arrow maps to one that is not")
                .with("arrow", d.arr_name(f))
                .with("image", e.arr_name(m.a.arr(f)));
        }
    }
    CheckReport::pass(name, format!("{} preserves locally cartesian arrows", m.a.name()))
}

/// `ν^f_{(d,u)}: U → L` for one base arrow `f` and generator `u: p(d) → c`.
#[derive(Clone, Debug)]
pub struct WeakGenerator {
    pub base_arrow: Arr,
    pub object: Obj,
    pub arrow: Arr,
    /// The pullback `P^f_{(d,u)}` on the source total category.
    pub pullback: Arc<FinPresheaf>,
    /// `ν` from `U` (its source) to `L` (its target).
    pub nu: PresheafMorphism,
}

#[derive(Clone, Debug)]
pub struct WeakIndexedReport {
    /// Every `ν` is locally epi.
    pub condition_i: CheckReport,
    /// Every `ν` is locally mono.
    pub condition_ii: CheckReport,
    pub generators: Vec<WeakGenerator>,
}

impl WeakIndexedReport {
    pub fn passed(&self) -> bool {
        self.condition_i.passed && self.condition_ii.passed
    }
}

/// `P(d̄) = {(g: d̄ → d, ū: p(d̄) → c') | u∘p(g) = f∘ū}`.
fn generator_pullback(p: &FinFunctor, f: Arr, d0: Obj, u: Arr) -> (FinPresheaf, Vec<Vec<(Arr, Arr)>>) {
    let (d, c) = (p.source(), p.target());
    let c1 = c.src(f);
    let mut elems: Vec<Vec<(Arr, Arr)>> = Vec::new();
    let mut labels = Vec::new();
    for e in d.objects() {
        let mut xs = Vec::new();
        for &g in d.hom(e, d0) {
            for &ub in c.hom(p.obj(e), c1) {
                if c.comp(u, p.arr(g)) == c.comp(f, ub) {
                    xs.push((g, ub));
                }
            }
        }
        labels.push(xs.iter().map(|&(g, ub)| format!("({},{})", d.arr_name(g), c.arr_name(ub))).collect());
        elems.push(xs);
    }
    let index: Vec<HashMap<(Arr, Arr), usize>> =
        elems.iter().map(|xs| xs.iter().enumerate().map(|(i, &x)| (x, i)).collect()).collect();
    let action = d
        .arrows()
        .map(|w| {
            let s = d.src(w);
            elems[d.tgt(w).0].iter().map(|&(g, ub)| index[s.0][&(d.comp(g, w), c.comp(ub, p.arr(w)))]).collect()
        })
        .collect();
    let name = format!("P^{}_({},{})", c.arr_name(f), d.obj_name(d0), c.arr_name(u));
    let pb = FinPresheaf::new(name, d.clone(), labels, action).expect("pullback presheaf is functorial");
    (pb, elems)
}

fn generator(m: &LocalMorphism, f: Arr, d0: Obj, u: Arr) -> WeakGenerator {
    let (p, q) = (m.source.p(), m.target.p());
    let (dd, c) = (m.target.total(), &**m.source.base());
    let a = &m.a;
    let (pb, elems) = generator_pullback(p, f, d0, u);

    // L = y'(A d) ×_{C(p'-, c)} C(p'-, c')
    let yad = Arc::new(yoneda(dd, a.obj(d0)));
    let ev = evaluation_along(q, a.obj(d0), c.comp(u, m.phi.at(d0)), &yad);
    let cq1 = Arc::new(crate::presheaf::restrict_along(q, &yoneda(q.target(), c.src(f))).expect("q lands in C"));
    let post = postcompose(q, f, &cq1, ev.target());
    let lower = compute_pullback(&ev, &post).expect("legs share a target");

    // U = colim over ∫P of y'(A π)
    let el = category_of_elements(&pb);
    let mut cache: HashMap<Obj, Arc<FinPresheaf>> = HashMap::new();
    let mut rep = |o: Obj| cache.entry(o).or_insert_with(|| Arc::new(yoneda(dd, o))).clone();
    let objects: Vec<Arc<FinPresheaf>> = el.objects.iter().map(|&(db, _)| rep(a.obj(db))).collect();
    let arrows = el
        .category
        .arrows()
        .map(|k| {
            let (s, t) = (el.category.src(k), el.category.tgt(k));
            yoneda_map(dd, a.arr(el.arrows[k.0]), &objects[s.0], &objects[t.0])
        })
        .collect();
    let diagram = Diagram { shape: el.category.clone(), objects: objects.clone(), arrows };
    let upper = compute_colimit(dd, &diagram).expect("representables share a base");

    let legs: Vec<PresheafMorphism> = el
        .objects
        .iter()
        .zip(&objects)
        .map(|(&(db, z), y)| {
            let (g, ub) = elems[db.0][z];
            let components = dd
                .objects()
                .map(|e| {
                    let hom_ad = dd.hom(e, a.obj(d0));
                    let hom_c1 = c.hom(q.obj(e), c.src(f));
                    dd.hom(e, a.obj(db))
                        .iter()
                        .map(|&x| {
                            let first = dd.comp(a.arr(g), x);
                            let second = c.comp(ub, c.comp(m.phi.at(db), q.arr(x)));
                            let i = hom_ad.iter().position(|&h| h == first).unwrap();
                            let j = hom_c1.iter().position(|&h| h == second).unwrap();
                            lower.element(e, i, j).expect("the image satisfies the pullback equation")
                        })
                        .collect()
                })
                .collect();
            PresheafMorphism::new(y.clone(), lower.apex.clone(), components).expect("legs are natural")
        })
        .collect();
    let nu = upper.induced(&lower.apex, &legs).expect("legs form a cocone");
    WeakGenerator { base_arrow: f, object: d0, arrow: u, pullback: Arc::new(pb), nu }
}

/// The two local conditions on `ν^f_{(d,u)}` for every base arrow and generator.
pub fn weak_indexed_conditions(m: &LocalMorphism) -> Result<WeakIndexedReport, LocalFibrationError> {
    let sited = m.sited();
    if !is_continuous(&sited).passed {
        return Err(LocalFibrationError::NotContinuous(m.a.name().into()));
    }
    let (d, c) = (&**m.source.total(), &**m.source.base());
    let k2 = m.target.k();
    let mut generators = Vec::new();
    let mut condition_i = None;
    let mut condition_ii = None;
    for f in c.arrows() {
        let cod = c.tgt(f);
        for d0 in d.objects() {
            for &u in c.hom(m.source.p().obj(d0), cod) {
                let gen = generator(m, f, d0, u);
                let witness = |r: CheckReport| {
                    let mut r = r
                        .with("base arrow", c.arr_name(f))
                        .with("generator", format!("({}, {})", d.obj_name(d0), c.arr_name(u)));
                    if let Some(o) = r.witness.remove("object") {
                        r = r.with("test object", o);
                    }
                    r
                };
                if condition_i.is_none() {
                    let r = locality_test(&gen.nu, k2, LocalityMode::Epi);
                    if !r.passed {
                        condition_i = Some(witness(r));
                    }
                }
                if condition_ii.is_none() {
                    let r = locality_test(&gen.nu, k2, LocalityMode::Mono);
                    if !r.passed {
                        condition_ii = Some(witness(r));
                    }
                }
                generators.push(gen);
            }
        }
    }
    let pass = |label: &str| CheckReport::pass(label, format!("every comparison is {label} for {}", k2.name()));
    Ok(WeakIndexedReport {
        condition_i: condition_i.unwrap_or_else(|| pass("locally epi")),
        condition_ii: condition_ii.unwrap_or_else(|| pass("locally mono")),
        generators,
    })
}

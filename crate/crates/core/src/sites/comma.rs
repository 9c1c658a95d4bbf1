use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{add_free_initial, build_comma, same, Comma, ConstructionError, FinFunctor, FreeInitial, Obj};
use crate::presheaf::{restrict_along, FinPresheaf, PresheafError, PresheafMorphism};
use crate::report::CheckReport;

use super::roles::{is_comorphism, SitedFunctor};
use super::sieve::{sieves_on, Sieve};
use super::topology::{generate_from_sieves, GrothendieckTopology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommaError {
    #[error("`{functor}` is not a comorphism: {detail}")]
    NotAComorphism { functor: String, detail: String },

    #[error("the correspondence is only defined for trivial topologies")]
    NontrivialTopology,

    #[error("triplet does not live over the comma site: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Construction(#[from] ConstructionError),

    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

/// `((p₀/C₀), (K₀/J₀))` together with the augmented sites it is built from.
#[derive(Clone, Debug)]
pub struct CommaSite {
    pub sited: SitedFunctor,
    pub d0: FreeInitial,
    pub c0: FreeInitial,
    pub p0: FinFunctor,
    pub k0: Arc<GrothendieckTopology>,
    pub j0: Arc<GrothendieckTopology>,
    pub comma: Comma,
    pub topology: Arc<GrothendieckTopology>,
}

impl CommaSite {
    /// `π_{C₀}` as a functor of sites.
    pub fn right_projection(&self) -> SitedFunctor {
        SitedFunctor::new(self.comma.right.clone(), self.topology.clone(), self.j0.clone()).expect("endpoints match")
    }

    pub fn left_projection(&self) -> SitedFunctor {
        SitedFunctor::new(self.comma.left.clone(), self.topology.clone(), self.k0.clone()).expect("endpoints match")
    }

    /// Both projections of `s` cover.
    pub fn covers_by_projection(&self, s: &Sieve) -> bool {
        let (l, r) = project(&self.comma, s);
        self.k0.covers(&l) && self.j0.covers(&r)
    }
}

fn project(comma: &Comma, s: &Sieve) -> (Sieve, Sieve) {
    let (a, b, _) = comma.objects[s.object().0];
    let l = Sieve::generated(comma.left.target(), a, s.members().map(|m| comma.left.arr(m)));
    let r = Sieve::generated(comma.right.target(), b, s.members().map(|m| comma.right.arr(m)));
    (l, r)
}

/// `J` on `C₀`: the old covers, each with `!` adjoined, and the empty sieve on `0`.
pub fn augment_topology(fi: &FreeInitial, j: &GrothendieckTopology) -> GrothendieckTopology {
    let c0 = &fi.category;
    let mut sieves: Vec<Sieve> = j
        .all_covers()
        .map(|s| Sieve::generated(c0, s.object(), s.members().chain([fi.bang[s.object().0]])))
        .collect();
    sieves.push(Sieve::empty(c0, fi.initial));
    generate_from_sieves(c0.clone(), sieves).with_name(format!("{}_0", j.name()))
}

/// `p₀: D₀ → C₀`, sending the new initial object to the new initial object.
pub fn augment_functor(p: &FinFunctor, d0: &FreeInitial, c0: &FreeInitial) -> FinFunctor {
    let m = p.source().arrow_count();
    let mut obj_map: Vec<Obj> = p.obj_map().to_vec();
    obj_map.push(c0.initial);
    let arr_map = d0
        .category
        .arrows()
        .map(|a| {
            if a.0 < m {
                p.arr(a)
            } else {
                let t = d0.category.tgt(a);
                if t == d0.initial {
                    c0.bang[c0.initial.0]
                } else {
                    c0.bang[p.obj(Obj(t.0)).0]
                }
            }
        })
        .collect();
    FinFunctor::new(format!("{}_0", p.name()), d0.category.clone(), c0.category.clone(), obj_map, arr_map)
        .expect("augmentation of a functor is a functor")
}

pub fn comma_site(p: &SitedFunctor) -> Result<CommaSite, CommaError> {
    let report = is_comorphism(p);
    if !report.passed {
        return Err(CommaError::NotAComorphism { functor: p.functor().name().into(), detail: report.to_string() });
    }
    let d0 = add_free_initial(p.source());
    let c0 = add_free_initial(p.target());
    let p0 = augment_functor(p.functor(), &d0, &c0);
    let k0 = Arc::new(augment_topology(&d0, p.source_topology()));
    let j0 = Arc::new(augment_topology(&c0, p.target_topology()));
    let id = FinFunctor::identity(c0.category.clone());
    let comma = build_comma(&p0, &id)?;
    let cat = comma.category.clone();
    let mut covering = Vec::new();
    for o in cat.objects() {
        for s in sieves_on(&cat, o) {
            let (l, r) = project(&comma, &s);
            if k0.covers(&l) && j0.covers(&r) {
                covering.push(s);
            }
        }
    }
    let name = format!("({}/{})", k0.name(), j0.name());
    let topology = Arc::new(GrothendieckTopology::from_covers_exact(name, cat, covering));
    Ok(CommaSite { sited: p.clone(), d0, c0, p0, k0, j0, comma, topology })
}

/// `(F, E, α: F → E∘p)`.
#[derive(Clone, Debug)]
pub struct Triplet {
    pub f: Arc<FinPresheaf>,
    pub e: Arc<FinPresheaf>,
    pub alpha: PresheafMorphism,
}

impl Triplet {
    pub fn new(f: Arc<FinPresheaf>, e: Arc<FinPresheaf>, p: &FinFunctor, alpha: &[Vec<usize>]) -> Result<Self, CommaError> {
        let ep = Arc::new(restrict_along(p, &e)?);
        let alpha = PresheafMorphism::new(f.clone(), ep, alpha.to_vec())?;
        Ok(Triplet { f, e, alpha })
    }
}

/// `P` on `C₀` with a single point at the new initial object.
pub fn extend_to_initial(fi: &FreeInitial, p: &FinPresheaf) -> FinPresheaf {
    let c0 = &fi.category;
    let n = p.base().object_count();
    let mut labels: Vec<Vec<String>> = p.base().objects().map(|o| p.labels(o).to_vec()).collect();
    labels.push(vec!["*".into()]);
    let m = p.base().arrow_count();
    let action = c0
        .arrows()
        .map(|a| {
            if a.0 < m {
                p.action(a).to_vec()
            } else {
                let t = c0.tgt(a);
                if t.0 == n {
                    vec![0]
                } else {
                    vec![0; p.size(t)]
                }
            }
        })
        .collect();
    FinPresheaf::new(format!("{}_0", p.name()), c0.clone(), labels, action).expect("extension is functorial")
}

fn require_trivial(site: &CommaSite) -> Result<(), CommaError> {
    if site.sited.source_topology().is_trivial() && site.sited.target_topology().is_trivial() {
        Ok(())
    } else {
        Err(CommaError::NontrivialTopology)
    }
}

/// `ᾱ[u] = F(d) ×_{E(p d)} E(c)`.
pub fn comma_forward(site: &CommaSite, t: &Triplet) -> Result<FinPresheaf, CommaError> {
    require_trivial(site)?;
    if !same(t.f.base(), site.sited.source()) || !same(t.e.base(), site.sited.target()) {
        return Err(CommaError::Mismatch("presheaves over the wrong categories".into()));
    }
    let f0 = extend_to_initial(&site.d0, &t.f);
    let e0 = extend_to_initial(&site.c0, &t.e);
    let n = site.sited.source().object_count();
    let alpha0 = |d: Obj, x: usize| if d.0 == n { 0 } else { t.alpha.at(d, x) };
    let cat = &site.comma.category;
    let mut labels = Vec::new();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(d, c, u) in &site.comma.objects {
        let mut here = Vec::new();
        for x in 0..f0.size(d) {
            for y in 0..e0.size(c) {
                if alpha0(d, x) == e0.act(u, y) {
                    here.push((x, y));
                }
            }
        }
        labels.push(here.iter().map(|&(x, y)| format!("({},{})", f0.label(d, x), e0.label(c, y))).collect());
        pairs.push(here);
    }
    let action = cat
        .arrows()
        .map(|a| {
            let (g, h) = site.comma.arrows[a.0];
            let (s, tg) = (cat.src(a), cat.tgt(a));
            pairs[tg.0]
                .iter()
                .map(|&(x, y)| {
                    let image = (f0.act(g, x), e0.act(h, y));
                    pairs[s.0].iter().position(|&q| q == image).expect("pullback is closed under the action")
                })
                .collect()
        })
        .collect();
    let name = format!("fwd({})", t.alpha.source().name());
    Ok(FinPresheaf::new(name, cat.clone(), labels, action)?)
}

/// `(Q[-, p(-), 1], Q[0, -, !], α_Q)`.
pub fn comma_backward(site: &CommaSite, q: &FinPresheaf) -> Result<Triplet, CommaError> {
    require_trivial(site)?;
    if !same(q.base(), &site.comma.category) {
        return Err(CommaError::Mismatch("sheaf is not on the comma category".into()));
    }
    let (d, c) = (site.sited.source(), site.sited.target());
    let p = site.sited.functor();
    let comma = &site.comma;
    let c0 = &site.c0;
    let d0 = &site.d0;
    let over = |x: Obj| comma.find_object(x, p.obj(x), c0.category.id(p.obj(x))).expect("diagonal object");
    let at_zero = |y: Obj| comma.find_object(d0.initial, y, c0.bang[y.0]).expect("initial object");
    let f_labels = d.objects().map(|x| q.labels(over(x)).to_vec()).collect();
    let f_action = d
        .arrows()
        .map(|h| {
            let a = comma.find_arrow(over(d.src(h)), over(d.tgt(h)), h, p.arr(h)).expect("diagonal arrow");
            q.action(a).to_vec()
        })
        .collect();
    let fp = Arc::new(FinPresheaf::new(format!("{}|D", q.name()), d.clone(), f_labels, f_action)?);
    let e_labels = c.objects().map(|y| q.labels(at_zero(y)).to_vec()).collect();
    let e_action = c
        .arrows()
        .map(|g| {
            let a = comma.find_arrow(at_zero(c.src(g)), at_zero(c.tgt(g)), d0.bang[d0.initial.0], g).expect("arrow at 0");
            q.action(a).to_vec()
        })
        .collect();
    let ep = Arc::new(FinPresheaf::new(format!("{}|C", q.name()), c.clone(), e_labels, e_action)?);
    let alpha: Vec<Vec<usize>> = d
        .objects()
        .map(|x| {
            let a = comma.find_arrow(at_zero(p.obj(x)), over(x), d0.bang[x.0], c0.category.id(p.obj(x))).expect("α leg");
            q.action(a).to_vec()
        })
        .collect();
    Triplet::new(fp, ep, p, &alpha)
}

/// `backward(forward(t)) ≅ t` through `x ↦ (x, α x)` and `e ↦ (*, e)`.
pub fn triplet_roundtrip(site: &CommaSite, t: &Triplet) -> Result<CheckReport, CommaError> {
    let fwd = comma_forward(site, t)?;
    let back = comma_backward(site, &fwd)?;
    let (d, c) = (site.sited.source(), site.sited.target());
    let name = "triplet round trip";
    let pos = |labels: &[String], want: String| labels.iter().position(|l| *l == want);
    let mut fc = Vec::new();
    for x in d.objects() {
        let mut comp = Vec::new();
        for i in 0..t.f.size(x) {
            let want = format!("({},{})", t.f.label(x, i), t.e.label(site.sited.functor().obj(x), t.alpha.at(x, i)));
            match pos(back.f.labels(x), want) {
                Some(j) => comp.push(j),
                None => return Ok(CheckReport::fail(name, "an element is lost on D").with("object", d.obj_name(x))),
            }
        }
        fc.push(comp);
    }
    let mut ec = Vec::new();
    for y in c.objects() {
        let mut comp = Vec::new();
        for i in 0..t.e.size(y) {
            match pos(back.e.labels(y), format!("(*,{})", t.e.label(y, i))) {
                Some(j) => comp.push(j),
                None => return Ok(CheckReport::fail(name, "an element is lost on C").with("object", c.obj_name(y))),
            }
        }
        ec.push(comp);
    }
    let phi_f = match PresheafMorphism::new(t.f.clone(), back.f.clone(), fc) {
        Ok(m) => m,
        Err(e) => return Ok(CheckReport::fail(name, format!("comparison on D: {e}"))),
    };
    let phi_e = match PresheafMorphism::new(t.e.clone(), back.e.clone(), ec) {
        Ok(m) => m,
        Err(e) => return Ok(CheckReport::fail(name, format!("comparison on C: {e}"))),
    };
    if !phi_f.is_iso() || !phi_e.is_iso() {
        return Ok(CheckReport::fail(name, "comparison is not invertible"));
    }
    let p = site.sited.functor();
    for x in d.objects() {
        for i in 0..t.f.size(x) {
            let lhs = back.alpha.at(x, phi_f.at(x, i));
            let rhs = phi_e.at(p.obj(x), t.alpha.at(x, i));
            if lhs != rhs {
                return Ok(CheckReport::fail(name, "comparison does not commute with α").with("object", d.obj_name(x)));
            }
        }
    }
    Ok(CheckReport::pass(name, "backward∘forward is isomorphic to the identity"))
}

/// `Q ≅ forward(backward(Q))` through `q ↦ (Q(1, u) q, Q(!, 1) q)`.
pub fn sheaf_roundtrip(site: &CommaSite, q: &Arc<FinPresheaf>) -> Result<CheckReport, CommaError> {
    let back = comma_backward(site, q)?;
    let fwd = Arc::new(comma_forward(site, &back)?);
    let comma = &site.comma;
    let cat = &comma.category;
    let (c0, d0) = (&site.c0, &site.d0);
    let p0 = &site.p0;
    let name = "sheaf round trip";
    let mut comps = Vec::new();
    for o in cat.objects() {
        let (d, c, u) = comma.objects[o.0];
        let zero = comma.find_object(d0.initial, c, c0.bang[c.0]).expect("object at 0");
        let to_e = comma.find_arrow(zero, o, d0.bang[d.0], c0.category.id(c)).expect("leg to E");
        let mut comp = Vec::new();
        for z in 0..q.size(o) {
            let e = if c == c0.initial { "*".to_string() } else { q.label(zero, q.act(to_e, z)).to_string() };
            let first = if d == d0.initial {
                "*".to_string()
            } else {
                let diag = comma.find_object(d, p0.obj(d), c0.category.id(p0.obj(d))).expect("diagonal object");
                let to_f = comma.find_arrow(diag, o, d0.category.id(d), u).expect("leg to F");
                q.label(diag, q.act(to_f, z)).to_string()
            };
            let want = format!("({first},{e})");
            match fwd.find(o, &want) {
                Some(j) => comp.push(j),
                None => {
                    return Ok(CheckReport::fail(name, "an element has no image").with("object", cat.obj_name(o)));
                }
            }
        }
        comps.push(comp);
    }
    match PresheafMorphism::new(q.clone(), fwd, comps) {
        Ok(m) if m.is_iso() => Ok(CheckReport::pass(name, "forward∘backward is isomorphic to the identity")),
        Ok(_) => Ok(CheckReport::fail(name, "comparison is not invertible")),
        Err(e) => Ok(CheckReport::fail(name, format!("comparison is not natural: {e}"))),
    }
}


use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{same, slice, Arr, FinCategory, FinFunctor, Obj};
use crate::presheaf::{locality_test, representable_cocone, LocalityMode};
use crate::report::CheckReport;

use super::sieve::Sieve;
use super::topology::GrothendieckTopology;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("topology `{topology}` is not on the {side} category of `{functor}`")]
    EndpointMismatch { functor: String, topology: String, side: &'static str },
}

/// Role flags; each is re-derivable by the corresponding check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Roles {
    pub comorphism: bool,
    pub cover_preserving: bool,
    pub morphism_of_sites: bool,
    pub continuous: bool,
}

/// A functor between sites.
#[derive(Clone, Debug)]
pub struct SitedFunctor {
    functor: FinFunctor,
    source_topology: Arc<GrothendieckTopology>,
    target_topology: Arc<GrothendieckTopology>,
    roles: OnceLock<Roles>,
}

impl SitedFunctor {
    pub fn new(
        functor: FinFunctor,
        source_topology: Arc<GrothendieckTopology>,
        target_topology: Arc<GrothendieckTopology>,
    ) -> Result<Self, SiteError> {
        if !same(functor.source(), source_topology.base()) {
            return Err(SiteError::EndpointMismatch {
                functor: functor.name().into(),
                topology: source_topology.name().into(),
                side: "source",
            });
        }
        if !same(functor.target(), target_topology.base()) {
            return Err(SiteError::EndpointMismatch {
                functor: functor.name().into(),
                topology: target_topology.name().into(),
                side: "target",
            });
        }
        Ok(SitedFunctor { functor, source_topology, target_topology, roles: OnceLock::new() })
    }

    pub fn identity(j: Arc<GrothendieckTopology>) -> Self {
        let functor = FinFunctor::identity(j.base().clone());
        SitedFunctor { functor, source_topology: j.clone(), target_topology: j, roles: OnceLock::new() }
    }

    pub fn functor(&self) -> &FinFunctor {
        &self.functor
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        self.functor.source()
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        self.functor.target()
    }

    pub fn source_topology(&self) -> &Arc<GrothendieckTopology> {
        &self.source_topology
    }

    pub fn target_topology(&self) -> &Arc<GrothendieckTopology> {
        &self.target_topology
    }

    /// All four role flags, computed once.
    pub fn roles(&self) -> Roles {
        *self.roles.get_or_init(|| Roles {
            comorphism: is_comorphism(self).passed,
            cover_preserving: is_cover_preserving(self).passed,
            morphism_of_sites: is_morphism_of_sites(self).passed,
            continuous: is_continuous(self).passed,
        })
    }
}

/// `{ f into d | p(f) ∈ S }` for a sieve `S` on `p(d)`.
pub fn preimage_sieve(p: &FinFunctor, d: Obj, s: &Sieve) -> Sieve {
    let dc = p.source();
    let members = dc.arrows_into(d).iter().copied().filter(|&f| s.contains(p.arr(f)));
    Sieve::generated(dc, d, members.collect::<Vec<_>>())
}

/// The sieve on `F(c)` generated by the image of `S`.
pub fn image_sieve(f: &FinFunctor, s: &Sieve) -> Sieve {
    Sieve::generated(f.target(), f.obj(s.object()), s.members().map(|a| f.arr(a)).collect::<Vec<_>>())
}

/// Every covering sieve on an image object lifts to a covering sieve upstairs.
pub fn is_comorphism(p: &SitedFunctor) -> CheckReport {
    let (d, c) = (&**p.source(), &**p.target());
    for o in d.objects() {
        for s in p.target_topology.covering_sieves(p.functor.obj(o)) {
            let pre = preimage_sieve(&p.functor, o, s);
            if !p.source_topology.covers(&pre) {
                return CheckReport::fail("comorphism", "a covering sieve has no covering lift")
                    .with("object", d.obj_name(o))
                    .with("sieve", s.display(c))
                    .with("preimage", pre.display(d));
            }
        }
    }
    CheckReport::pass("comorphism", format!("{} is a comorphism of sites", p.functor.name()))
}

pub fn is_cover_preserving(a: &SitedFunctor) -> CheckReport {
    let (d, c) = (&**a.source(), &**a.target());
    for s in a.source_topology.all_covers() {
        let img = image_sieve(&a.functor, s);
        if !a.target_topology.covers(&img) {
            return CheckReport::fail("cover-preserving", "the image of a covering sieve does not cover")
                .with("sieve", s.display(d))
                .with("image", img.display(c));
        }
    }
    CheckReport::pass("cover-preserving", format!("{} preserves covers", a.functor.name()))
}

/// Cover preservation plus the three local flatness conditions.
pub fn is_morphism_of_sites(a: &SitedFunctor) -> CheckReport {
    let cp = is_cover_preserving(a);
    if !cp.passed {
        return CheckReport { check: "morphism of sites".into(), ..cp };
    }
    let (src, tgt) = (&**a.source(), &**a.target());
    let k = &a.target_topology;
    let af = &a.functor;
    let fail = |cond: &str, d: Obj, sieve: &Sieve| {
        CheckReport::fail("morphism of sites", format!("condition ({cond}) fails"))
            .with("object", tgt.obj_name(d))
            .with("sieve", sieve.display(tgt))
    };
    for d in tgt.objects() {
        // (1) locally, d maps into the image
        let s1 = Sieve::generated(
            tgt,
            d,
            tgt.arrows_into(d)
                .iter()
                .copied()
                .filter(|&v| src.objects().any(|c| !tgt.hom(tgt.src(v), af.obj(c)).is_empty()))
                .collect::<Vec<_>>(),
        );
        if !k.covers(&s1) {
            return fail("1", d, &s1);
        }
        // (2) locally, pairs of generalized elements come from a span
        for c1 in src.objects() {
            for c2 in src.objects() {
                for &x in tgt.hom(d, af.obj(c1)) {
                    for &y in tgt.hom(d, af.obj(c2)) {
                        let s2 = sieve_where(tgt, d, |v| {
                            let dv = tgt.src(v);
                            let (xv, yv) = (tgt.comp(x, v), tgt.comp(y, v));
                            src.objects().any(|b| {
                                tgt.hom(dv, af.obj(b)).iter().any(|&w| {
                                    src.hom(b, c1).iter().any(|&g| tgt.comp(af.arr(g), w) == xv)
                                        && src.hom(b, c2).iter().any(|&h| tgt.comp(af.arr(h), w) == yv)
                                })
                            })
                        });
                        if !k.covers(&s2) {
                            return fail("2", d, &s2)
                                .with("x", tgt.arr_name(x))
                                .with("y", tgt.arr_name(y));
                        }
                    }
                }
            }
        }
        // (3) locally, parallel pairs equalized by x are equalized upstairs
        for c in src.objects() {
            for &x in tgt.hom(d, af.obj(c)) {
                for c2 in src.objects() {
                    let pars = src.hom(c, c2);
                    for (i, &g) in pars.iter().enumerate() {
                        for &h in &pars[i + 1..] {
                            if tgt.comp(af.arr(g), x) != tgt.comp(af.arr(h), x) {
                                continue;
                            }
                            let s3 = sieve_where(tgt, d, |v| {
                                let dv = tgt.src(v);
                                let xv = tgt.comp(x, v);
                                src.objects().any(|b| {
                                    tgt.hom(dv, af.obj(b)).iter().any(|&w| {
                                        src.hom(b, c).iter().any(|&kk| {
                                            tgt.comp(af.arr(kk), w) == xv && src.comp(g, kk) == src.comp(h, kk)
                                        })
                                    })
                                })
                            });
                            if !k.covers(&s3) {
                                return fail("3", d, &s3)
                                    .with("x", tgt.arr_name(x))
                                    .with("pair", format!("{}, {}", src.arr_name(g), src.arr_name(h)));
                            }
                        }
                    }
                }
            }
        }
    }
    CheckReport::pass("morphism of sites", format!("{} is a morphism of sites", af.name()))
}

fn sieve_where(c: &FinCategory, d: Obj, pred: impl Fn(Arr) -> bool) -> Sieve {
    Sieve::generated(c, d, c.arrows_into(d).iter().copied().filter(|&v| pred(v)).collect::<Vec<_>>())
}

/// For every covering `R` on `d`, `colim_{r ∈ R} y(p(dom r)) → y(p(d))` is locally iso.
pub fn is_continuous(p: &SitedFunctor) -> CheckReport {
    let (dc, cc) = (p.source(), p.target());
    let pf = &p.functor;
    for s in p.source_topology.all_covers() {
        let d = s.object();
        let sl = slice(dc, d);
        let keep: Vec<Obj> = sl.category.objects().filter(|o| s.contains(sl.objects[o.0])).collect();
        let (shape, incl) = crate::fincat::full_subcategory(&sl.category, &keep);
        let objs: Vec<Obj> = keep.iter().map(|&o| pf.obj(dc.src(sl.objects[o.0]))).collect();
        let arrs: Vec<Arr> = shape.arrows().map(|a| pf.arr(sl.arrows[incl.arr(a).0])).collect();
        let legs: Vec<Arr> = keep.iter().map(|&o| pf.arr(sl.objects[o.0])).collect();
        let cmp = representable_cocone(cc, &shape, &objs, &arrs, pf.obj(d), &legs);
        let r = locality_test(&cmp, &p.target_topology, LocalityMode::Iso);
        if !r.passed {
            return CheckReport::fail("continuous", format!("comparison for a covering sieve is not {}", r.check))
                .with("object", dc.obj_name(d))
                .with("sieve", s.display(dc))
                .with("reason", r.detail);
        }
    }
    CheckReport::pass("continuous", format!("{} is continuous", pf.name()))
}

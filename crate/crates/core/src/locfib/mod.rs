//! Locally cartesian arrows, local fibrations and their morphisms.

mod factorization;
mod morphisms;
mod relative;

use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use thiserror::Error;

use crate::fincat::{Arr, FinCategory, FinFunctor, Obj};
use crate::presheaf::{
    compute_pullback, locality_test, restrict_along, yoneda, yoneda_map, FinPresheaf, LocalityMode, PresheafMorphism,
};
use crate::report::CheckReport;
use crate::sites::{is_comorphism, GrothendieckTopology, Sieve, SitedFunctor};

pub use factorization::{
    is_k_cartesian, is_local_fibration, local_factorization, FactorPiece, LocalFactorization,
};
pub use morphisms::{is_morphism_of_local_fibrations, weak_indexed_conditions, LocalMorphism, WeakIndexedReport, WeakGenerator};
pub use relative::{comparison_criterion, relative_site_loccart, RelativeSite};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalFibrationError {
    #[error("`{functor}` is not a comorphism of sites: {detail}")]
    NotAComorphism { functor: String, detail: String },

    #[error("no local factorization found for `{0}`")]
    SearchExhausted(String),

    #[error("the pullback of `{arrow}` along `{along}` does not exist")]
    MissingPullback { arrow: String, along: String },

    #[error("not a relative site: {0}")]
    NotARelativeSite(String),

    #[error("`{0}` is not continuous")]
    NotContinuous(String),

    #[error("{0}")]
    Shape(String),
}

/// What a sieve must cover for an arrow to be locally cartesian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObligationKind {
    /// `(g, h)` with `p(f)∘h = p(g)` must lift locally.
    Lift { g: Arr, h: Arr },
    /// `h ≠ h'` with `f∘h = f∘h'` and `p(h) = p(h')` must agree locally.
    Equalize { h1: Arr, h2: Arr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub kind: ObligationKind,
    pub sieve: Sieve,
}

/// Per-arrow sieves deciding local cartesianness against any topology on the total category.
///
/// Maximal sieves are dropped since every topology contains them.
#[derive(Clone, Debug)]
pub struct Obligations {
    per_arrow: Vec<Vec<Obligation>>,
}

impl Obligations {
    pub fn compute(p: &FinFunctor) -> Self {
        let per_arrow = p.source().arrows().map(|f| arrow_obligations(p, f)).collect();
        Obligations { per_arrow }
    }

    pub fn of(&self, f: Arr) -> &[Obligation] {
        &self.per_arrow[f.0]
    }

    pub fn first_uncovered(&self, f: Arr, k: &GrothendieckTopology) -> Option<&Obligation> {
        self.per_arrow[f.0].iter().find(|o| !k.covers(&o.sieve))
    }
}

fn arrow_obligations(p: &FinFunctor, f: Arr) -> Vec<Obligation> {
    let (d, c) = (&**p.source(), &**p.target());
    let (d1, d0) = (d.src(f), d.tgt(f));
    let pf = p.arr(f);
    let mut out = Vec::new();
    for e in d.objects() {
        for &g in d.hom(e, d0) {
            for &h in c.hom(p.obj(e), p.obj(d1)) {
                if c.comp(pf, h) != p.arr(g) {
                    continue;
                }
                let mut bits = Sieve::empty(d, e).bits().clone();
                for &v in d.arrows_into(e) {
                    let target = c.comp(h, p.arr(v));
                    let gv = d.comp(g, v);
                    if d.hom(d.src(v), d1).iter().any(|&k| p.arr(k) == target && d.comp(f, k) == gv) {
                        bits.insert(v.0);
                    }
                }
                let sieve = Sieve::from_bits(e, bits);
                if !sieve.is_maximal(d) {
                    out.push(Obligation { kind: ObligationKind::Lift { g, h }, sieve });
                }
            }
        }
        for (&h1, &h2) in d.hom(e, d1).iter().tuple_combinations() {
            if d.comp(f, h1) != d.comp(f, h2) || p.arr(h1) != p.arr(h2) {
                continue;
            }
            let mut bits = Sieve::empty(d, e).bits().clone();
            for &v in d.arrows_into(e) {
                if d.comp(h1, v) == d.comp(h2, v) {
                    bits.insert(v.0);
                }
            }
            let sieve = Sieve::from_bits(e, bits);
            if !sieve.is_maximal(d) {
                out.push(Obligation { kind: ObligationKind::Equalize { h1, h2 }, sieve });
            }
        }
    }
    out
}

/// A comorphism of sites `p: (D, K) → (C, J)` with cached local-cartesian verdicts.
#[derive(Clone, Debug)]
pub struct LocalSite {
    sited: SitedFunctor,
    obligations: Arc<Obligations>,
    loccart: OnceLock<Vec<bool>>,
    local_fibration: OnceLock<bool>,
}

impl LocalSite {
    pub fn new(sited: SitedFunctor) -> Result<Self, LocalFibrationError> {
        let obligations = Arc::new(Obligations::compute(sited.functor()));
        LocalSite::with_obligations(sited, obligations)
    }

    /// Reuses obligations computed for the same functor, e.g. across many topologies.
    pub fn with_obligations(sited: SitedFunctor, obligations: Arc<Obligations>) -> Result<Self, LocalFibrationError> {
        let r = is_comorphism(&sited);
        if !r.passed {
            return Err(LocalFibrationError::NotAComorphism {
                functor: sited.functor().name().into(),
                detail: r.to_string(),
            });
        }
        Ok(LocalSite { sited, obligations, loccart: OnceLock::new(), local_fibration: OnceLock::new() })
    }

    pub fn sited(&self) -> &SitedFunctor {
        &self.sited
    }

    pub fn p(&self) -> &FinFunctor {
        self.sited.functor()
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        self.sited.source()
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.sited.target()
    }

    pub fn k(&self) -> &Arc<GrothendieckTopology> {
        self.sited.source_topology()
    }

    pub fn j(&self) -> &Arc<GrothendieckTopology> {
        self.sited.target_topology()
    }

    pub fn obligations(&self) -> &Arc<Obligations> {
        &self.obligations
    }

    /// Combinatorial verdict for `f`, cached for the whole total category.
    pub fn is_loccart(&self, f: Arr) -> bool {
        self.loccart_flags()[f.0]
    }

    pub fn loccart_flags(&self) -> &[bool] {
        self.loccart.get_or_init(|| {
            self.total().arrows().map(|f| self.obligations.first_uncovered(f, self.k()).is_none()).collect()
        })
    }

    pub fn is_local_fibration(&self) -> bool {
        *self.local_fibration.get_or_init(|| is_local_fibration(self).passed)
    }

    pub fn is_continuous(&self) -> bool {
        self.sited.roles().continuous
    }
}

/// Verdicts of the combinatorial characterization and of the presheaf oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualVerdict {
    pub combinatorial: CheckReport,
    pub oracle: CheckReport,
    pub agree: bool,
}

impl DualVerdict {
    pub fn new(combinatorial: CheckReport, oracle: CheckReport) -> Self {
        let agree = combinatorial.passed == oracle.passed;
        DualVerdict { combinatorial, oracle, agree }
    }

    /// Both routes pass.
    pub fn passed(&self) -> bool {
        self.combinatorial.passed && self.oracle.passed
    }
}

pub fn is_locally_cartesian(ls: &LocalSite, f: Arr) -> DualVerdict {
    DualVerdict::new(loccart_combinatorial(ls, f), loccart_oracle(ls, f))
}

/// Local lifting and local uniqueness, each decided by one sieve per obligation.
pub fn loccart_combinatorial(ls: &LocalSite, f: Arr) -> CheckReport {
    let (d, c) = (&**ls.total(), &**ls.base());
    let name = "locally cartesian";
    match ls.obligations.first_uncovered(f, ls.k()) {
        None => CheckReport::pass(name, format!("{} is locally cartesian for {}", d.arr_name(f), ls.k().name())),
        Some(ob) => {
            let report = match &ob.kind {
                ObligationKind::Lift { g, h } => CheckReport::fail(name, "a factorization does not lift locally")
                    .with("g", d.arr_name(*g))
                    .with("h", c.arr_name(*h)),
                ObligationKind::Equalize { h1, h2 } => {
                    CheckReport::fail(name, "two lifts are not locally equal").with("pair", format!("{}, {}", d.arr_name(*h1), d.arr_name(*h2)))
                }
            };
            report.with("arrow", d.arr_name(f)).with("sieve", ob.sieve.display(d))
        }
    }
}

/// `y(d') → y(d) ×_{C(p-, pd)} C(p-, pd')`, induced by `f` and `p`.
pub fn loccart_comparison(p: &FinFunctor, f: Arr) -> PresheafMorphism {
    let d = p.source();
    let (d1, d0) = (d.src(f), d.tgt(f));
    let y0 = Arc::new(yoneda(d, d0));
    let y1 = Arc::new(yoneda(d, d1));
    let ev0 = evaluation(p, d0, &y0);
    let ev1 = evaluation(p, d1, &y1);
    let post = postcompose(p, p.arr(f), ev1.target(), ev0.target());
    let pb = compute_pullback(&ev0, &post).expect("both legs land in C(p-, pd)");
    let yf = yoneda_map(d, f, &y1, &y0);
    pb.mediate(&yf, &ev1).expect("the square commutes")
}

/// `y_D(d) → C(p-, p d)`, `g ↦ p(g)`.
pub(crate) fn evaluation(p: &FinFunctor, d0: Obj, yd: &Arc<FinPresheaf>) -> PresheafMorphism {
    evaluation_along(p, d0, p.target().id(p.obj(d0)), yd)
}

/// `y_D(d) → C(p-, c)`, `g ↦ w∘p(g)` for `w: p(d) → c`.
pub(crate) fn evaluation_along(p: &FinFunctor, d0: Obj, w: Arr, yd: &Arc<FinPresheaf>) -> PresheafMorphism {
    let (d, c) = (p.source(), p.target());
    let cod = c.tgt(w);
    let target = Arc::new(restrict_along(p, &yoneda(c, cod)).expect("p lands in C"));
    let components = d
        .objects()
        .map(|e| {
            let hom = c.hom(p.obj(e), cod);
            d.hom(e, d0).iter().map(|&g| hom.iter().position(|&x| x == c.comp(w, p.arr(g))).unwrap()).collect()
        })
        .collect();
    PresheafMorphism::new(yd.clone(), target, components).expect("evaluation is natural")
}

/// `u ∘ -: C(p-, a) → C(p-, b)` for `u: a → b`.
pub(crate) fn postcompose(p: &FinFunctor, u: Arr, from: &Arc<FinPresheaf>, to: &Arc<FinPresheaf>) -> PresheafMorphism {
    let (d, c) = (p.source(), p.target());
    let (a, b) = (c.src(u), c.tgt(u));
    let components = d
        .objects()
        .map(|e| {
            let pe = p.obj(e);
            let hom_b = c.hom(pe, b);
            c.hom(pe, a).iter().map(|&h| hom_b.iter().position(|&x| x == c.comp(u, h)).unwrap()).collect()
        })
        .collect();
    PresheafMorphism::new(from.clone(), to.clone(), components).expect("postcomposition is natural")
}

/// Locally iso comparison into the pullback presheaf.
pub fn loccart_oracle(ls: &LocalSite, f: Arr) -> CheckReport {
    let cmp = loccart_comparison(ls.p(), f);
    let r = locality_test(&cmp, ls.k(), LocalityMode::Iso);
    let d = &**ls.total();
    let out = CheckReport::verdict("locally cartesian (oracle)", r.passed, r.detail).with("arrow", d.arr_name(f));
    r.witness.into_iter().fold(out, |acc, (k, v)| acc.with(k, v))
}

/// The smallest family of `candidates` generating a covering sieve on `object`.
///
/// Subsets are tried by increasing size; above twelve candidates a greedy
/// removal pass replaces the exhaustive search.
pub fn minimal_covering_family(
    c: &FinCategory,
    k: &GrothendieckTopology,
    object: Obj,
    candidates: &[Arr],
) -> Option<Vec<Arr>> {
    if !k.covers(&Sieve::generated(c, object, candidates.to_vec())) {
        return None;
    }
    if candidates.len() <= 12 {
        for size in 0..=candidates.len() {
            for subset in candidates.iter().copied().combinations(size) {
                if k.covers(&Sieve::generated(c, object, subset.clone())) {
                    return Some(subset);
                }
            }
        }
    }
    let mut family = candidates.to_vec();
    let mut i = 0;
    while i < family.len() {
        let mut trial = family.clone();
        trial.remove(i);
        if k.covers(&Sieve::generated(c, object, trial.clone())) {
            family = trial;
        } else {
            i += 1;
        }
    }
    Some(family)
}

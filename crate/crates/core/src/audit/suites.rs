use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cofinal::{
    build_fact_category, cofinality_verdict, loccart_cofinality_equiv, topos_level_fibration_check,
};
use crate::dsl::{self, parse, run_check, serialize};
use crate::fibration::{
    comparison_cells, comparison_cocycle, comparison_naturality, is_cartesian_arrow, is_cartesian_fibration,
    is_morphism_of_fibrations, Cleavage, FibredFunctor,
};
use crate::fincat::enumerate::{enumerate_categories, enumerate_functors};
use crate::fincat::{fixtures, full_subcategory, slice, FinCategory, FinFunctor, GrothendieckFibration, Obj};
use crate::locfib::{
    comparison_criterion, is_k_cartesian, is_locally_cartesian, is_morphism_of_local_fibrations, local_factorization,
    weak_indexed_conditions, LocalMorphism, LocalSite, Obligations, RelativeSite,
};
use crate::presheaf::{
    enumerate_morphisms, enumerate_presheaves, is_sheaf, locality_test, restrict_along, sheafified_is_iso, sheafify,
    FinPresheaf, LocalityMode,
};
use crate::sites::{
    canonical_topology, comma_backward, comma_forward, comma_site, giraud_minimality, giraud_topology, is_comorphism,
    sheaf_roundtrip, triplet_roundtrip, GrothendieckTopology, SitedFunctor, Triplet,
};

use super::instances::{base_fits, categories, enumerate_instances, fibration_fits, fibrations, topologies, SiteInstance};
use super::{Ctx, Outcome, Record, Run, Suite};

type Topology = Arc<GrothendieckTopology>;

/// Totals with at most this many sieves get the exhaustive minimality scan.
pub const MINIMALITY_SIEVES: usize = 8;

pub(super) fn run_suite(suite: Suite, ctx: &Ctx) -> Run {
    match suite {
        Suite::LoccartDualRoute => site_suite(ctx, relative_families(ctx), suite),
        Suite::CanonicalCollapse => canonical_collapse(ctx),
        Suite::GiraudMinimality => giraud(ctx),
        Suite::Cofinality => {
            let mut run = site_suite(ctx, all_families(ctx), suite).merge(slice_cofinality(ctx));
            if !ctx.bounds.endomorphisms {
                run.notes.push(
                    "bases with non-identity endomorphisms are excluded; over a split idempotent the cart-fact \
                     projection of a retraction can be cofinal while the retraction is not locally cartesian"
                        .into(),
                );
            }
            run
        }
        Suite::ComparisonCells => comparison_cells_suite(ctx),
        Suite::CriterionEquivalence => criterion_equivalence(ctx),
        Suite::Correspondence => correspondence(ctx),
        Suite::Sheafification => sheafification(ctx),
        Suite::Dsl => dsl_suite(ctx),
        _ => site_suite(ctx, all_families(ctx), suite),
    }
}

/// One property verdict on one local site.
struct Verdict {
    property: &'static str,
    passed: bool,
    checks: usize,
    detail: String,
}

fn verdict(property: &'static str, failure: Option<String>, checks: usize) -> Verdict {
    match failure {
        Some(detail) => Verdict { property, passed: false, checks, detail },
        None => Verdict { property, passed: true, checks, detail: String::new() },
    }
}

type SiteProp = fn(&LocalSite) -> Vec<Verdict>;

fn site_props(suite: Suite) -> &'static [SiteProp] {
    match suite {
        Suite::LoccartDualRoute => &[dual_route],
        Suite::CartesianLoccart => &[cartesian_loccart],
        Suite::CanonicalCollapse => &[canonical_equivalence],
        Suite::LocalFactorization => &[factorization],
        Suite::KCartesian => &[k_cartesian],
        Suite::Cofinality => &[cofinality_equivalence, topos_consistency, topos_fibration],
        Suite::CommaSite => &[comma],
        _ => &[],
    }
}

fn dual_route(ls: &LocalSite) -> Vec<Verdict> {
    let d = ls.total();
    let failure = d.arrows().find_map(|f| {
        let v = is_locally_cartesian(ls, f);
        (!v.agree).then(|| {
            format!(
                "routes disagree on {}: combinatorial {}, oracle {}",
                d.arr_name(f),
                v.combinatorial.passed,
                v.oracle.passed
            )
        })
    });
    vec![verdict("combinatorial = oracle", failure, d.arrow_count())]
}

fn cartesian_loccart(ls: &LocalSite) -> Vec<Verdict> {
    let d = ls.total();
    let cartesian: Vec<_> = d.arrows().filter(|&f| is_cartesian_arrow(ls.p(), f)).collect();
    let failure = cartesian
        .iter()
        .find(|&&f| !ls.is_loccart(f))
        .map(|&f| format!("{} is cartesian but not locally cartesian", d.arr_name(f)));
    vec![verdict("cartesian => locally cartesian", failure, cartesian.len())]
}

fn canonical_equivalence(ls: &LocalSite) -> Vec<Verdict> {
    let d = ls.total();
    let failure = d.arrows().find_map(|f| {
        let cartesian = is_cartesian_arrow(ls.p(), f);
        (ls.is_loccart(f) != cartesian).then(|| {
            let v = is_locally_cartesian(ls, f);
            format!(
                "{}: cartesian {cartesian}, locally cartesian {} (oracle {})",
                d.arr_name(f),
                v.combinatorial.passed,
                v.oracle.passed
            )
        })
    });
    vec![verdict("locally cartesian = cartesian", failure, d.arrow_count())]
}

fn factorization(ls: &LocalSite) -> Vec<Verdict> {
    if !ls.is_local_fibration() {
        return Vec::new();
    }
    let d = ls.total();
    let failure = d.arrows().find_map(|f| match local_factorization(ls, f) {
        Ok(fact) => {
            let r = fact.verify(ls);
            (!r.passed).then(|| format!("{}: {}", d.arr_name(f), r.detail))
        }
        Err(e) => Some(format!("{}: {e}", d.arr_name(f))),
    });
    vec![verdict("local factorization re-verifies", failure, d.arrow_count())]
}

fn k_cartesian(ls: &LocalSite) -> Vec<Verdict> {
    if !ls.is_local_fibration() || !is_cartesian_fibration(ls.p()).passed {
        return Vec::new();
    }
    let d = ls.total();
    let failure = d.arrows().find_map(|f| match is_k_cartesian(ls, f) {
        Ok(r) if r.passed == ls.is_loccart(f) => None,
        Ok(r) => Some(format!("{}: K-cartesian {}, locally cartesian {}", d.arr_name(f), r.passed, ls.is_loccart(f))),
        Err(e) => Some(format!("{}: {e}", d.arr_name(f))),
    });
    vec![verdict("K-cartesian = locally cartesian", failure, d.arrow_count())]
}

fn cofinality_equivalence(ls: &LocalSite) -> Vec<Verdict> {
    if !ls.is_local_fibration() {
        return Vec::new();
    }
    let d = ls.total();
    let failure = d.arrows().find_map(|f| {
        let r = loccart_cofinality_equiv(ls, f);
        (!r.passed).then(|| r.to_string())
    });
    vec![verdict("locally cartesian = cart-fact cofinal = colimit", failure, d.arrow_count())]
}

/// The topos-level verdict is the conjunction of the per-factorization cofinality
/// verdicts, each decided by both routes.
fn topos_consistency(ls: &LocalSite) -> Vec<Verdict> {
    if !ls.is_continuous() {
        return Vec::new();
    }
    let (d, c) = (ls.total(), ls.base());
    let mut checks = 0;
    let mut all = true;
    let mut failure = None;
    for d0 in d.objects() {
        for &f in c.arrows_into(ls.p().obj(d0)) {
            checks += 1;
            let fc = match build_fact_category(ls, f, d0) {
                Ok(fc) => fc,
                Err(e) => {
                    failure.get_or_insert(e.to_string());
                    continue;
                }
            };
            let v = cofinality_verdict(&fc.projection, &fc.slice, ls.j());
            if !v.agree {
                failure.get_or_insert(format!(
                    "cofinality routes disagree on ({}, {})",
                    c.arr_name(f),
                    d.obj_name(d0)
                ));
            }
            all &= v.oracle.passed;
        }
    }
    match topos_level_fibration_check(ls, true) {
        Ok(r) if failure.is_none() && r.passed != all => {
            failure = Some(format!("topos-level verdict {} but per-factorization verdicts {all}", r.passed));
        }
        Err(e) => failure = Some(e.to_string()),
        _ => {}
    }
    vec![verdict("topos verdict = per-factorization cofinality", failure, checks)]
}

fn topos_fibration(ls: &LocalSite) -> Vec<Verdict> {
    if !ls.is_local_fibration() || !ls.is_continuous() {
        return Vec::new();
    }
    let failure = match topos_level_fibration_check(ls, true) {
        Ok(r) => (!r.passed).then(|| r.to_string()),
        Err(e) => Some(e.to_string()),
    };
    vec![verdict("continuous local fibration => topos-level fibration", failure, 1)]
}

fn comma(ls: &LocalSite) -> Vec<Verdict> {
    match comma_site(ls.sited()) {
        Ok(cs) => {
            let t = cs.topology.is_topology();
            let p = is_comorphism(&cs.right_projection());
            let n = cs.comma.category.object_count();
            vec![
                verdict("comma topology", (!t.passed).then(|| t.to_string()), n),
                verdict("comma projection is a comorphism", (!p.passed).then(|| p.to_string()), n),
            ]
        }
        Err(e) => vec![verdict("comma topology", Some(e.to_string()), 0)],
    }
}

/// A functor with candidate topologies; `relative` replaces `ks` by the
/// topologies containing the Giraud topology of each `J`.
#[derive(Clone)]
struct Family {
    p: FinFunctor,
    ks: Vec<Topology>,
    js: Vec<Topology>,
    relative: bool,
}

impl Family {
    fn sites(&self, ctx: &Ctx) -> Vec<(SiteInstance, LocalSite)> {
        let obligations = Arc::new(Obligations::compute(&self.p));
        let on_total = if self.relative { topologies(self.p.source(), ctx.bounds.max_topologies, ctx.seed) } else { Vec::new() };
        let mut out = Vec::new();
        for j in &self.js {
            let ks = if self.relative { relative_topologies(&self.p, j, &on_total) } else { self.ks.clone() };
            for k in ks {
                let s = SiteInstance { p: self.p.clone(), k, j: j.clone() };
                if let Some(ls) = local_with(&s, obligations.clone()) {
                    out.push((s, ls));
                }
            }
        }
        out
    }
}

fn relative_topologies(p: &FinFunctor, j: &GrothendieckTopology, on_total: &[Topology]) -> Vec<Topology> {
    let Ok(g) = giraud_topology(p, j) else { return Vec::new() };
    let mut ks: Vec<Topology> = on_total.iter().filter(|k| k.contains(&g)).cloned().collect();
    if !ks.iter().any(|k| k.same_covers(&g)) {
        ks.insert(0, Arc::new(g.with_name("KG")));
    }
    ks
}

fn local_with(s: &SiteInstance, obligations: Arc<Obligations>) -> Option<LocalSite> {
    let sited = SitedFunctor::new(s.p.clone(), s.k.clone(), s.j.clone()).ok()?;
    LocalSite::with_obligations(sited, obligations).ok()
}

fn local(s: &SiteInstance) -> Option<LocalSite> {
    if !s.k.is_topology().passed || !s.j.is_topology().passed {
        return None;
    }
    local_with(s, Arc::new(Obligations::compute(&s.p)))
}

fn topology_table(cats: &[Arc<FinCategory>], ctx: &Ctx) -> Vec<Vec<Topology>> {
    cats.par_iter().map(|c| topologies(c, ctx.bounds.max_topologies, ctx.seed)).collect()
}

/// Every functor between categories within the bounds, with all topology pairs.
fn functor_families(ctx: &Ctx) -> Vec<(Family, bool)> {
    let b = &ctx.bounds;
    let cats = categories(b.max_objects, b.max_arrows, b.endomorphisms);
    let tops = topology_table(&cats, ctx);
    let mut out = Vec::new();
    for (ci, c) in cats.iter().enumerate() {
        for (di, d) in cats.iter().enumerate() {
            let core = base_fits(c, &ctx.core) && base_fits(d, &ctx.core);
            for (n, p) in enumerate_functors(d, c).into_iter().enumerate() {
                let p = p.with_name(format!("F{n}"));
                out.push((Family { p, ks: tops[di].clone(), js: tops[ci].clone(), relative: false }, core));
            }
        }
    }
    out
}

/// Grothendieck constructions within the bounds, each with every base topology.
fn relative_families(ctx: &Ctx) -> Vec<(Family, bool)> {
    fibrations(&ctx.bounds)
        .into_iter()
        .map(|g| {
            let core = fibration_fits(&g, &ctx.core);
            let js = topologies(g.indexed.base(), ctx.bounds.max_topologies, ctx.seed);
            let p = g.projection.clone().with_name(format!("p_{}", g.indexed.name()));
            (Family { p, ks: Vec::new(), js, relative: true }, core)
        })
        .collect()
}

fn all_families(ctx: &Ctx) -> Vec<(Family, bool)> {
    let mut f = functor_families(ctx);
    f.extend(relative_families(ctx));
    f
}

fn site_outcomes(sites: Vec<(SiteInstance, LocalSite)>, props: &[SiteProp]) -> Vec<Outcome> {
    let mut out = Vec::new();
    for (s, ls) in sites {
        for prop in props {
            for v in prop(&ls) {
                let record = Record::new(v.property, s.label(), v.passed, v.checks, v.detail);
                out.push(Outcome { record, site: (!v.passed).then(|| s.clone()) });
            }
        }
    }
    out
}

fn site_suite(ctx: &Ctx, families: Vec<(Family, bool)>, suite: Suite) -> Run {
    let props = site_props(suite);
    ctx.run(families, |f| site_outcomes(f.sites(ctx), props))
}

/// Re-evaluates a site property by name; used to keep shrinking on failing instances.
pub(super) fn refail(suite: Suite) -> Option<fn(&SiteInstance, &str) -> bool> {
    if site_props(suite).is_empty() {
        return None;
    }
    Some(match suite {
        Suite::LoccartDualRoute => |s, prop| still_fails(Suite::LoccartDualRoute, s, prop),
        Suite::CartesianLoccart => |s, prop| still_fails(Suite::CartesianLoccart, s, prop),
        Suite::CanonicalCollapse => |s, prop| still_fails(Suite::CanonicalCollapse, s, prop),
        Suite::LocalFactorization => |s, prop| still_fails(Suite::LocalFactorization, s, prop),
        Suite::KCartesian => |s, prop| still_fails(Suite::KCartesian, s, prop),
        Suite::Cofinality => |s, prop| still_fails(Suite::Cofinality, s, prop),
        _ => |s, prop| still_fails(Suite::CommaSite, s, prop),
    })
}

fn still_fails(suite: Suite, s: &SiteInstance, prop: &str) -> bool {
    let Some(s) = normalize(suite, s.clone()) else { return false };
    let Some(ls) = local(&s) else { return false };
    site_props(suite).iter().flat_map(|p| p(&ls)).any(|v| v.property == prop && !v.passed)
}

/// Re-derives a topology fixed by the suite after the instance changed shape.
pub(super) fn normalize(suite: Suite, s: SiteInstance) -> Option<SiteInstance> {
    match suite {
        Suite::CanonicalCollapse => {
            let k = Arc::new(canonical_topology(s.p.source().clone()).with_name("K"));
            Some(SiteInstance { k, ..s })
        }
        _ => Some(s),
    }
}

fn canonical_collapse(ctx: &Ctx) -> Run {
    let b = &ctx.bounds;
    let totals = categories(b.max_objects, b.max_arrows, true);
    let bases = categories(b.max_objects.min(2), b.max_arrows.min(2), b.endomorphisms);
    let canon: Vec<Topology> =
        totals.par_iter().map(|d| Arc::new(canonical_topology(d.clone()).with_name("K"))).collect();
    let tops = topology_table(&bases, ctx);
    let mut families = Vec::new();
    for (di, d) in totals.iter().enumerate() {
        for (ci, c) in bases.iter().enumerate() {
            let core = d.object_count() <= ctx.core.max_objects
                && d.arrow_count() - d.object_count() <= ctx.core.max_arrows
                && (ctx.core.endomorphisms || !c.has_endomorphisms());
            for (n, p) in enumerate_functors(d, c).into_iter().enumerate() {
                let p = p.with_name(format!("F{n}"));
                families.push((Family { p, ks: vec![canon[di].clone()], js: tops[ci].clone(), relative: false }, core));
            }
        }
    }
    let mut run = ctx.run(families, |f| site_outcomes(f.sites(ctx), &[canonical_equivalence]));
    let failures = run.outcomes.iter().filter(|o| !o.record.passed).count();
    if failures > 0 {
        let endo = run
            .outcomes
            .iter()
            .filter(|o| !o.record.passed)
            .all(|o| o.site.as_ref().is_some_and(|s| s.p.target().has_endomorphisms()));
        if endo {
            run.notes.push(format!(
                "all {failures} failures have a base with a non-identity endomorphism; endomorphism-free bases give none"
            ));
        }
    } else if !b.endomorphisms {
        run.notes.push("bases with non-identity endomorphisms are excluded; pass --endomorphisms to include them".into());
    }
    run
}

fn giraud(ctx: &Ctx) -> Run {
    let items: Vec<((GrothendieckFibration, Topology), bool)> = fibrations(&ctx.bounds)
        .into_iter()
        .flat_map(|g| {
            let core = fibration_fits(&g, &ctx.core);
            topologies(g.indexed.base(), ctx.bounds.max_topologies, ctx.seed)
                .into_iter()
                .map(move |j| ((g.clone(), j), core))
        })
        .collect();
    let mut run = ctx.run(items, |(g, j)| {
        let p = g.projection.clone().with_name(format!("p_{}", g.indexed.name()));
        let k = match giraud_topology(&p, j) {
            Ok(k) => Arc::new(k.with_name("K")),
            Err(e) => {
                let label = format!("{} over {} [{}]", g.total.name(), g.indexed.base().name(), j.name());
                return vec![Record::new("giraud topology exists", label, false, 1, e.to_string()).into()];
            }
        };
        let s = SiteInstance { p: p.clone(), k: k.clone(), j: j.clone() };
        let label = s.label();
        let mut out: Vec<Outcome> = Vec::new();
        let t = k.is_topology();
        out.push(Record::new("giraud topology is a topology", label.clone(), t.passed, 1, t.detail).into());
        let sited = SitedFunctor::new(p.clone(), k.clone(), j.clone()).expect("endpoints match");
        let c = is_comorphism(&sited);
        out.push(Record::new("p is a comorphism for it", label.clone(), c.passed, 1, c.detail).into());
        if let Some(r) = giraud_minimality(&p, j, &k, MINIMALITY_SIEVES) {
            let sieves: usize = g.total.objects().map(|o| crate::sites::sieves_on(&g.total, o).len()).sum();
            out.push(Record::new("no smaller topology works", label, r.passed, sieves, r.to_string()).into());
        }
        for o in &mut out {
            if !o.record.passed {
                o.site = Some(s.clone());
            }
        }
        out
    });
    let scanned = run.outcomes.iter().filter(|o| o.record.property == "no smaller topology works").count();
    run.notes.push(format!("{scanned} instances have at most {MINIMALITY_SIEVES} sieves and get the lattice scan"));
    run
}

/// `(q, J)` for functors `q` into slices of small bases: shapes with at most two
/// objects and one arrow, and every full subcategory of the slice.
fn slice_cofinality(ctx: &Ctx) -> Run {
    let b = &ctx.bounds;
    let mut bases = categories(b.max_objects, b.max_arrows, b.endomorphisms);
    bases.extend([fixtures::tri(), fixtures::split_idempotent()]);
    let shapes: Arc<Vec<Arc<FinCategory>>> = Arc::new((0..=2).flat_map(|n| enumerate_categories(n, 1, false)).collect());
    let items: Vec<((Arc<FinCategory>, Obj), bool)> = bases
        .iter()
        .flat_map(|c| {
            let core = base_fits(c, &ctx.core);
            c.objects().map(move |o| ((c.clone(), o), core))
        })
        .collect();
    ctx.run(items, |(c, o)| {
        let sl = slice(c, *o);
        let mut functors: Vec<FinFunctor> = shapes.iter().flat_map(|e| enumerate_functors(e, &sl.category)).collect();
        let n = sl.category.object_count();
        if n <= 12 {
            for mask in 0u32..(1 << n) {
                let keep: Vec<Obj> = (0..n).filter(|i| mask & (1 << i) != 0).map(Obj).collect();
                functors.push(full_subcategory(&sl.category, &keep).1);
            }
        }
        let js = topologies(c, ctx.bounds.max_topologies, ctx.seed);
        let label = format!("{}/{}", c.name(), c.obj_name(*o));
        let mut failure = None;
        let mut checks = 0;
        for q in &functors {
            for j in &js {
                checks += 1;
                let v = cofinality_verdict(q, &sl, j);
                if !v.agree && failure.is_none() {
                    failure = Some(format!(
                        "{} under {}: two conditions {}, colimit {}",
                        q.name(),
                        j.describe(),
                        v.combinatorial.passed,
                        v.oracle.passed
                    ));
                }
            }
        }
        let passed = failure.is_none();
        vec![Record::new("two conditions = colimit oracle", label, passed, checks, failure.unwrap_or_default()).into()]
    })
}

/// Fibrations within the bounds, grouped by base.
fn fibrations_by_base(ctx: &Ctx) -> Vec<Vec<GrothendieckFibration>> {
    let mut groups: Vec<Vec<GrothendieckFibration>> = Vec::new();
    let mut index: HashMap<*const FinCategory, usize> = HashMap::new();
    for g in fibrations(&ctx.bounds) {
        let key = Arc::as_ptr(g.indexed.base());
        let i = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[i].push(g);
    }
    groups
}

fn pair_label(g: &GrothendieckFibration, h: &GrothendieckFibration) -> String {
    format!("{} -> {} over {}", g.indexed.name(), h.indexed.name(), g.indexed.base().name())
}

fn comparison_cells_suite(ctx: &Ctx) -> Run {
    let mut items = Vec::new();
    for group in fibrations_by_base(ctx) {
        for g in &group {
            for h in &group {
                let core = fibration_fits(g, &ctx.core) && fibration_fits(h, &ctx.core);
                items.push(((g.clone(), h.clone()), core));
            }
        }
    }
    ctx.run(items, |(g, h)| {
        let (cg, ch) = (Cleavage::from_grothendieck(g), Cleavage::from_grothendieck(h));
        let label = pair_label(g, h);
        let (mut natural, mut cocycle) = (None, None);
        let mut checks = 0;
        for a in enumerate_functors(&g.total, &h.total) {
            let Ok(m) = FibredFunctor::strict(g.projection.clone(), h.projection.clone(), a) else { continue };
            checks += comparison_cells(&m, &cg, &ch).map_or(0, |c| c.len());
            let r = comparison_naturality(&m, &cg, &ch);
            if !r.passed {
                natural.get_or_insert(format!("{}: {r}", m.a.name()));
            }
            match comparison_cocycle(&m, &cg, &ch) {
                Ok(r) if r.passed => {}
                Ok(r) => {
                    cocycle.get_or_insert(format!("{}: {r}", m.a.name()));
                }
                Err(e) => {
                    cocycle.get_or_insert(format!("{}: {e}", m.a.name()));
                }
            }
        }
        vec![
            Record::new("comparison cells are natural", label.clone(), natural.is_none(), checks, natural.unwrap_or_default())
                .into(),
            Record::new("cocycle identity", label, cocycle.is_none(), checks, cocycle.unwrap_or_default()).into(),
        ]
    })
}

fn criterion_equivalence(ctx: &Ctx) -> Run {
    let mut items = Vec::new();
    for group in fibrations_by_base(ctx) {
        let base = group[0].indexed.base().clone();
        let js = topologies(&base, ctx.bounds.max_topologies, ctx.seed);
        for g in &group {
            for h in &group {
                let core = fibration_fits(g, &ctx.core) && fibration_fits(h, &ctx.core);
                for j in &js {
                    items.push(((g.clone(), h.clone(), j.clone()), core));
                }
            }
        }
    }
    ctx.run(items, |(g, h, j)| {
        let label = format!("{} [{}]", pair_label(g, h), j.name());
        let sites = |f: &GrothendieckFibration| -> Vec<RelativeSite> {
            let on_total = topologies(&f.total, ctx.bounds.max_topologies, ctx.seed);
            relative_topologies(&f.projection, j, &on_total)
                .into_iter()
                .filter_map(|k| RelativeSite::new(f.clone(), k, j.clone()).ok())
                .collect()
        };
        let (rg, rh) = (sites(g), sites(h));
        let (mut equal, mut fibred) = (None, None);
        let (mut checks, mut fibred_checks) = (0, 0);
        for a in enumerate_functors(&g.total, &h.total) {
            let strict_fibred = FibredFunctor::strict(g.projection.clone(), h.projection.clone(), a.clone())
                .is_ok_and(|m| is_morphism_of_fibrations(&m).passed);
            for s1 in &rg {
                for s2 in &rh {
                    let Ok(m) = LocalMorphism::strict(s1.local().clone(), s2.local().clone(), a.clone()) else { continue };
                    let Ok(weak) = weak_indexed_conditions(&m) else { continue };
                    checks += 1;
                    let direct = is_morphism_of_local_fibrations(&m).passed;
                    let cells = comparison_criterion(s1, s2, &a, &m.phi).map(|r| r.passed);
                    if cells != Ok(direct) || weak.passed() != direct {
                        equal.get_or_insert(format!(
                            "{} [{}; {}]: preserves locally cartesian {direct}, comparison criterion {:?}, weak conditions {}",
                            a.name(),
                            s1.local().k().name(),
                            s2.local().k().name(),
                            cells.map_err(|e| e.to_string()),
                            weak.passed()
                        ));
                    }
                    if strict_fibred {
                        fibred_checks += 1;
                        if !direct {
                            fibred.get_or_insert(format!("{} is a morphism of fibrations but fails", a.name()));
                        }
                    }
                }
            }
        }
        vec![
            Record::new("three criteria agree", label.clone(), equal.is_none(), checks, equal.unwrap_or_default()).into(),
            Record::new(
                "continuous morphisms of fibrations pass",
                label,
                fibred.is_none(),
                fibred_checks,
                fibred.unwrap_or_default(),
            )
            .into(),
        ]
    })
}

/// The identity sites on ONE and ARR and the projection of GD1, all with trivial topologies.
pub fn correspondence_sites() -> Vec<SitedFunctor> {
    let trivial = |c: &Arc<FinCategory>| Arc::new(GrothendieckTopology::trivial(c.clone()).with_name("TRIV"));
    let g = fixtures::gd1();
    vec![
        SitedFunctor::identity(trivial(&fixtures::one())),
        SitedFunctor::identity(trivial(&fixtures::arr())),
        SitedFunctor::new(g.projection.clone(), trivial(&g.total), trivial(g.indexed.base())).expect("endpoints match"),
    ]
}

/// Comma categories above this size only get the sheaves reached from triplets.
const COMMA_SCAN_OBJECTS: usize = 10;

fn correspondence(ctx: &Ctx) -> Run {
    let m = ctx.bounds.max_elements;
    let mut items = Vec::new();
    for s in correspondence_sites() {
        let name = format!("{} -> {}", s.source().name(), s.target().name());
        let cs = Arc::new(comma_site(&s).expect("trivial topologies give comorphisms"));
        let fs: Vec<Arc<FinPresheaf>> = enumerate_presheaves(s.source(), m).into_iter().map(Arc::new).collect();
        let es: Vec<Arc<FinPresheaf>> = enumerate_presheaves(s.target(), m).into_iter().map(Arc::new).collect();
        for f in &fs {
            for e in &es {
                items.push((Item::Triplets(cs.clone(), name.clone(), f.clone(), e.clone()), m <= 1 || f.total_size() + e.total_size() <= 4));
            }
        }
        if cs.comma.category.object_count() <= COMMA_SCAN_OBJECTS {
            for q in enumerate_presheaves(&cs.comma.category, 1) {
                items.push((Item::Sheaf(cs.clone(), name.clone(), Arc::new(q)), true));
            }
        }
    }
    ctx.run(items, |item| match item {
        Item::Triplets(cs, name, f, e) => {
            let pe = Arc::new(restrict_along(cs.sited.functor(), e).expect("restriction along p"));
            let mut out = Vec::new();
            for (n, alpha) in enumerate_morphisms(f, &pe).into_iter().enumerate() {
                let t = Triplet { f: f.clone(), e: e.clone(), alpha };
                let label = format!("{name}: ({}, {}, a{n})", f.name(), e.name());
                let r = triplet_roundtrip(cs, &t);
                let (passed, detail) = match r {
                    Ok(r) => (r.passed, r.detail),
                    Err(e) => (false, e.to_string()),
                };
                out.push(Record::new("backward . forward = id", label.clone(), passed, 1, detail).into());
                if let Ok(q) = comma_forward(cs, &t) {
                    let q = Arc::new(q);
                    let (passed, detail) = match sheaf_roundtrip(cs, &q) {
                        Ok(r) => (r.passed, r.detail),
                        Err(e) => (false, e.to_string()),
                    };
                    out.push(Record::new("forward . backward = id", label, passed, 1, detail).into());
                }
            }
            out
        }
        Item::Sheaf(cs, name, q) => {
            if !is_sheaf(q, &cs.topology).passed {
                return Vec::new();
            }
            let label = format!("{name}: sheaf {}", q.name());
            let (passed, detail) = match sheaf_roundtrip(cs, q) {
                Ok(r) => (r.passed, r.detail),
                Err(e) => (false, e.to_string()),
            };
            let mut out: Vec<Outcome> = vec![Record::new("forward . backward = id", label.clone(), passed, 1, detail).into()];
            if let Ok(t) = comma_backward(cs, q) {
                let (passed, detail) = match triplet_roundtrip(cs, &t) {
                    Ok(r) => (r.passed, r.detail),
                    Err(e) => (false, e.to_string()),
                };
                out.push(Record::new("backward . forward = id", label, passed, 1, detail).into());
            }
            out
        }
    })
}

enum Item {
    Triplets(Arc<crate::sites::CommaSite>, String, Arc<FinPresheaf>, Arc<FinPresheaf>),
    Sheaf(Arc<crate::sites::CommaSite>, String, Arc<FinPresheaf>),
}

fn sheafification(ctx: &Ctx) -> Run {
    let b = &ctx.bounds;
    let cats = categories(b.max_objects, b.max_arrows, b.endomorphisms);
    let items: Vec<((Arc<FinCategory>, Topology), bool)> = cats
        .iter()
        .flat_map(|c| {
            let core = base_fits(c, &ctx.core);
            topologies(c, b.max_topologies, ctx.seed).into_iter().map(move |j| ((c.clone(), j), core))
        })
        .collect();
    ctx.run(items, |(c, j)| {
        let label = format!("{} [{}]", c.name(), j.name());
        let ps: Vec<Arc<FinPresheaf>> = enumerate_presheaves(c, ctx.bounds.max_elements).into_iter().map(Arc::new).collect();
        let (mut sheaf, mut unit, mut idem, mut agree) = (None, None, None, None);
        let mut morphisms = 0;
        for p in &ps {
            let a = sheafify(p, j);
            let r = is_sheaf(&a.sheaf, j);
            if !r.passed {
                sheaf.get_or_insert(format!("{}: {r}", p.name()));
            }
            let r = locality_test(&a.unit, j, LocalityMode::Iso);
            if !r.passed {
                unit.get_or_insert(format!("{}: {r}", p.name()));
            }
            if !sheafify(&a.sheaf, j).unit.is_iso() {
                idem.get_or_insert(format!("{}: the unit of a(a(P)) is not invertible", p.name()));
            }
            for q in &ps {
                for phi in enumerate_morphisms(p, q) {
                    morphisms += 1;
                    let local = locality_test(&phi, j, LocalityMode::Iso).passed;
                    if local != sheafified_is_iso(&phi, j) {
                        agree.get_or_insert(format!("{} -> {}: locality test {local}", p.name(), q.name()));
                    }
                }
            }
        }
        let n = ps.len();
        let rec = |prop: &str, f: Option<String>, checks: usize| -> Outcome {
            Record::new(prop, label.clone(), f.is_none(), checks, f.unwrap_or_default()).into()
        };
        vec![
            rec("sheafification is a sheaf", sheaf, n),
            rec("unit is locally iso", unit, n),
            rec("locality test = sheafified bijection", agree, morphisms),
            rec("idempotent on sheaves", idem, n),
        ]
    })
}

pub const FIXTURES: [(&str, &str); 3] = [
    ("arr.site", include_str!("../../../../fixtures/arr.site")),
    ("gd1.site", include_str!("../../../../fixtures/gd1.site")),
    ("gd1_indexed.site", include_str!("../../../../fixtures/gd1_indexed.site")),
];

/// Documents that must be rejected, each with at least one located diagnostic.
pub const MALFORMED: [&str; 12] = [
    "category {",
    "category C { objects: a ; arrow f: a -> z }",
    "category C { objects: a }\ncategory C { objects: b }",
    "topology T on NOPE { trivial }",
    "functor F: A -> B { obj x -> y }",
    "category C { objects: a, b ; arrow f: a -> b }\ncheck loccart S f",
    "category C { objects: a }\ncheck frobnicate C",
    "site S: p from",
    "\"unterminated",
    "category C { objects: a $ }",
    "category A { objects: a }\ncategory B { objects: b }\nfunctor F: A -> B { obj a -> a }",
    "category A { objects: a, b ; arrow f: a -> b }\ntopology T on A { trivial ; maximal }",
];

enum DslItem {
    Fixture(&'static str, &'static str),
    Malformed(&'static str),
    Generated(usize, String),
}

fn dsl_suite(ctx: &Ctx) -> Run {
    let mut items: Vec<(DslItem, bool)> = FIXTURES.iter().map(|&(n, t)| (DslItem::Fixture(n, t), true)).collect();
    items.extend(MALFORMED.iter().map(|&t| (DslItem::Malformed(t), true)));
    let core = enumerate_instances(ctx.core, ctx.seed).count();
    items.extend(
        enumerate_instances(ctx.bounds, ctx.seed).enumerate().map(|(i, t)| {
            let c = i < core;
            (DslItem::Generated(i, t), c)
        }),
    );
    ctx.run(items, |item| {
        let rec = |prop: &str, label: String, failure: Option<String>| -> Outcome {
            Record::new(prop, label, failure.is_none(), 1, failure.unwrap_or_default()).into()
        };
        match item {
            DslItem::Fixture(name, text) => {
                let doc = match parse(text) {
                    Ok(d) => d,
                    Err(e) => return vec![rec("fixture parses", name.to_string(), Some(e.to_string()))],
                };
                let once = serialize(&doc);
                let mut out = Vec::new();
                let canonical = *name != "gd1_indexed.site";
                if canonical {
                    out.push(rec("serialize . parse = id on canonical text", name.to_string(), (once != *text).then(|| "canonical text changed".to_string())));
                }
                let twice = parse(&once).map(|d| serialize(&d));
                out.push(rec(
                    "serialization is idempotent",
                    name.to_string(),
                    (twice.as_ref() != Ok(&once)).then(|| "second pass differs".to_string()),
                ));
                let bad = dsl::validate(&doc).into_iter().find(|(_, r)| !r.passed).map(|(sp, r)| format!("{sp}: {r}"));
                out.push(rec("fixture validates", name.to_string(), bad));
                let failed = doc.checks().find_map(|(c, sp)| match run_check(&doc, c) {
                    Ok(o) if o.passed => None,
                    Ok(_) => Some(format!("{sp}: check {} {} fails", c.kind.node, c.target.node)),
                    Err(e) => Some(format!("{sp}: {e}")),
                });
                out.push(rec("fixture checks pass", name.to_string(), failed));
                out
            }
            DslItem::Malformed(text) => {
                let lines = text.lines().count().max(1);
                let failure = match parse(text) {
                    Ok(_) => Some("accepted".to_string()),
                    Err(e) if e.0.is_empty() => Some("no diagnostics".to_string()),
                    Err(e) => e
                        .0
                        .iter()
                        .find(|d| d.span.line == 0 || d.span.col == 0 || d.span.line > lines + 1)
                        .map(|d| format!("diagnostic outside the text: {d}")),
                };
                vec![rec("every diagnostic carries a span", format!("{text:?}"), failure)]
            }
            DslItem::Generated(i, text) => {
                let failure = match parse(text) {
                    Ok(doc) => (serialize(&doc) != *text).then(|| "round trip changed the text".to_string()),
                    Err(e) => Some(e.to_string()),
                };
                vec![rec("serialize . parse = id on generated text", format!("instance {i}"), failure)]
            }
        }
    })
}

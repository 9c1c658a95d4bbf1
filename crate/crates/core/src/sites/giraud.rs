use std::sync::Arc;

use thiserror::Error;

use crate::fibration::{is_cartesian_arrow, is_fibration};
use crate::fincat::{same, FinFunctor};
use crate::report::CheckReport;

use super::roles::{is_comorphism, preimage_sieve, SitedFunctor};
use super::sieve::{sieves_on, Sieve};
use super::topology::{enumerate_topologies, generate_from_sieves, GrothendieckTopology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GiraudError {
    #[error("`{functor}` is not a fibration: {detail}")]
    NotAFibration { functor: String, detail: String },

    #[error("topology `{0}` does not live on the base of the fibration")]
    BaseMismatch(String),
}

/// Sieves whose cartesian members project onto a `J`-covering family.
pub fn giraud_topology(p: &FinFunctor, j: &GrothendieckTopology) -> Result<GrothendieckTopology, GiraudError> {
    if !same(p.target(), j.base()) {
        return Err(GiraudError::BaseMismatch(j.name().into()));
    }
    let (report, _) = is_fibration(p);
    if !report.passed {
        return Err(GiraudError::NotAFibration { functor: p.name().into(), detail: report.to_string() });
    }
    let (d, c) = (p.source(), &**p.target());
    let cartesian: Vec<bool> = d.arrows().map(|a| is_cartesian_arrow(p, a)).collect();
    let mut covering = Vec::new();
    for o in d.objects() {
        for s in sieves_on(d, o) {
            let image = Sieve::generated(c, p.obj(o), s.members().filter(|a| cartesian[a.0]).map(|a| p.arr(a)));
            if j.covers(&image) {
                covering.push(s);
            }
        }
    }
    let name = format!("giraud({},{})", p.name(), j.name());
    Ok(GrothendieckTopology::from_covers_exact(name, d.clone(), covering))
}

/// The least topology containing `p^{-1}(R)` for every `J`-covering `R`.
pub fn comorphism_closure(p: &FinFunctor, j: &GrothendieckTopology) -> GrothendieckTopology {
    let d = p.source();
    let lifted: Vec<Sieve> = d
        .objects()
        .flat_map(|o| j.covering_sieves(p.obj(o)).map(move |r| preimage_sieve(p, o, r)))
        .collect();
    generate_from_sieves(d.clone(), lifted).with_name(format!("lift({},{})", p.name(), j.name()))
}

/// Every topology strictly inside `k` fails to make `p` a comorphism.
///
/// Returns `None` when the total category has more than `bound` sieves.
pub fn giraud_minimality(
    p: &FinFunctor,
    j: &Arc<GrothendieckTopology>,
    k: &GrothendieckTopology,
    bound: usize,
) -> Option<CheckReport> {
    let d = p.source();
    let sieve_count: usize = d.objects().map(|o| sieves_on(d, o).len()).sum();
    if sieve_count > bound {
        return None;
    }
    for t in enumerate_topologies(d) {
        if t.cover_count() >= k.cover_count() || !k.contains(&t) {
            continue;
        }
        let t = Arc::new(t);
        let sited = SitedFunctor::new(p.clone(), t.clone(), j.clone()).expect("endpoints match");
        if is_comorphism(&sited).passed {
            return Some(
                CheckReport::fail("giraud minimality", "a smaller topology already makes p a comorphism")
                    .with("topology", t.describe()),
            );
        }
    }
    Some(CheckReport::pass("giraud minimality", format!("no topology below {} makes p a comorphism", k.name())))
}

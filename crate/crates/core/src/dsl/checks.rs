use std::sync::Arc;

use serde::Serialize;

use crate::cofinal::{
    build_cartfact_category, build_fact_category, cofinality_oracle, is_j_cofinal, loccart_cofinality_equiv,
    topos_level_fibration_check,
};
use crate::fincat::FinCategory;
use crate::locfib::{
    is_k_cartesian, is_local_fibration, is_locally_cartesian, is_morphism_of_local_fibrations, local_factorization,
    LocalMorphism, LocalSite,
};
use crate::presheaf::is_sheaf;
use crate::report::CheckReport;
use crate::sites::{is_comorphism, is_continuous, is_morphism_of_sites, GrothendieckTopology, SitedFunctor};

use super::ast::{CheckDecl, Name};
use super::resolve::Ns;
use super::{Diagnostic, Document};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Topology,
    Comorphism,
    Continuous,
    MorphismOfSites,
    Loccart,
    Locfib,
    KCartesian,
    Factorization,
    Cofinal,
    CofinalityEquiv,
    ToposFibration,
    MorphismLocfib,
    Sheaf,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::Topology,
        CheckKind::Comorphism,
        CheckKind::Continuous,
        CheckKind::MorphismOfSites,
        CheckKind::Loccart,
        CheckKind::Locfib,
        CheckKind::KCartesian,
        CheckKind::Factorization,
        CheckKind::Cofinal,
        CheckKind::CofinalityEquiv,
        CheckKind::ToposFibration,
        CheckKind::MorphismLocfib,
        CheckKind::Sheaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Topology => "topology",
            CheckKind::Comorphism => "comorphism",
            CheckKind::Continuous => "continuous",
            CheckKind::MorphismOfSites => "morphism-of-sites",
            CheckKind::Loccart => "loccart",
            CheckKind::Locfib => "locfib",
            CheckKind::KCartesian => "k-cartesian",
            CheckKind::Factorization => "factorization",
            CheckKind::Cofinal => "cofinal",
            CheckKind::CofinalityEquiv => "cofinality-equiv",
            CheckKind::ToposFibration => "topos-fibration",
            CheckKind::MorphismLocfib => "morphism-locfib",
            CheckKind::Sheaf => "sheaf",
        }
    }

    pub fn from_name(s: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub(super) fn target_namespace(self) -> Ns {
        match self {
            CheckKind::Topology => Ns::Topology,
            CheckKind::MorphismLocfib => Ns::Functor,
            CheckKind::Sheaf => Ns::Presheaf,
            _ => Ns::Site,
        }
    }

    /// Allowed argument counts after the target.
    pub fn arity(self) -> (usize, usize) {
        match self {
            CheckKind::Loccart | CheckKind::KCartesian | CheckKind::Factorization | CheckKind::CofinalityEquiv => (1, 1),
            CheckKind::Cofinal => (1, 2),
            CheckKind::MorphismLocfib => (2, 2),
            CheckKind::Sheaf => (1, 1),
            _ => (0, 0),
        }
    }

    pub fn usage(self) -> &'static str {
        match self {
            CheckKind::Topology => "a topology",
            CheckKind::Loccart | CheckKind::KCartesian | CheckKind::Factorization | CheckKind::CofinalityEquiv => {
                "a site and an arrow of its source category"
            }
            CheckKind::Cofinal => {
                "a site and either an arrow of its source category or a base arrow and a source object"
            }
            CheckKind::MorphismLocfib => "a functor and its source and target sites",
            CheckKind::Sheaf => "a presheaf and a topology on its base",
            _ => "a site",
        }
    }

    pub(super) fn resolve_args(self, doc: &Document, target: &str, args: &[Name]) -> Result<(), Diagnostic> {
        let arrow_in = |c: &FinCategory, a: &Name| {
            c.arr(&a.node)
                .map(|_| ())
                .ok_or_else(|| Diagnostic::unresolved(a.span, format!("no arrow `{}` in {}", a.node, c.name())))
        };
        let Some(site) = doc.sites.get(target) else {
            return match self {
                CheckKind::MorphismLocfib => args
                    .iter()
                    .find(|a| !doc.sites.contains_key(&a.node))
                    .map_or(Ok(()), |a| Err(Diagnostic::unresolved(a.span, format!("no site named `{}`", a.node)))),
                CheckKind::Sheaf => match doc.topologies.get(&args[0].node) {
                    None => Err(Diagnostic::unresolved(args[0].span, format!("no topology named `{}`", args[0].node))),
                    Some(_) => Ok(()),
                },
                _ => Ok(()),
            };
        };
        match (self, args) {
            (CheckKind::Cofinal, [f, d]) => {
                arrow_in(site.target(), f)?;
                site.source()
                    .obj(&d.node)
                    .map(|_| ())
                    .ok_or_else(|| Diagnostic::unresolved(d.span, format!("no object `{}` in {}", d.node, site.source().name())))
            }
            (_, [f]) => arrow_in(site.source(), f),
            _ => Ok(()),
        }
    }
}

/// Verdict of one check request with every report it produced.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub kind: CheckKind,
    pub target: String,
    pub passed: bool,
    pub reports: Vec<CheckReport>,
}

impl CheckOutcome {
    fn single(kind: CheckKind, target: &str, r: CheckReport) -> Self {
        CheckOutcome { kind, target: target.into(), passed: r.passed, reports: vec![r] }
    }
}

fn valid_topology(t: &GrothendieckTopology) -> Result<(), String> {
    let r = t.is_topology();
    if r.passed {
        Ok(())
    } else {
        Err(format!("`{}` is not a topology: {}", t.name(), r.detail))
    }
}

fn valid_site(s: &SitedFunctor) -> Result<(), String> {
    valid_topology(s.source_topology())?;
    valid_topology(s.target_topology())
}

fn local_site(s: &SitedFunctor) -> Result<LocalSite, String> {
    valid_site(s)?;
    LocalSite::new(s.clone()).map_err(|e| e.to_string())
}

/// Runs one check; `Err` carries an input error (bad arguments or a failed precondition).
pub fn run_check(doc: &Document, c: &CheckDecl) -> Result<CheckOutcome, String> {
    let kind = CheckKind::from_name(&c.kind.node).ok_or_else(|| format!("unknown check `{}`", c.kind.node))?;
    let target = c.target.node.as_str();
    let args: Vec<&str> = c.args.iter().map(|a| a.node.as_str()).collect();
    let site = || doc.sites.get(target).ok_or_else(|| format!("no site named `{target}`"));
    let arrow = |cat: &Arc<FinCategory>, name: &str| cat.arr(name).ok_or_else(|| format!("no arrow `{name}` in {}", cat.name()));
    let one = |r: CheckReport| Ok(CheckOutcome::single(kind, target, r));
    match kind {
        CheckKind::Topology => {
            let t = doc.topologies.get(target).ok_or_else(|| format!("no topology named `{target}`"))?;
            one(t.is_topology())
        }
        CheckKind::Comorphism => {
            let s = site()?;
            valid_site(s)?;
            one(is_comorphism(s))
        }
        CheckKind::Continuous => {
            let s = site()?;
            valid_site(s)?;
            one(is_continuous(s))
        }
        CheckKind::MorphismOfSites => {
            let s = site()?;
            valid_site(s)?;
            one(is_morphism_of_sites(s))
        }
        CheckKind::Loccart => {
            let ls = local_site(site()?)?;
            let f = arrow(ls.total(), args[0])?;
            let v = is_locally_cartesian(&ls, f);
            if !v.agree {
                return Err(format!("internal disagreement between the two routes on `{}`", args[0]));
            }
            Ok(CheckOutcome { kind, target: target.into(), passed: v.passed(), reports: vec![v.combinatorial, v.oracle] })
        }
        CheckKind::Locfib => {
            let ls = local_site(site()?)?;
            one(is_local_fibration(&ls))
        }
        CheckKind::KCartesian => {
            let ls = local_site(site()?)?;
            let f = arrow(ls.total(), args[0])?;
            is_k_cartesian(&ls, f).map_err(|e| e.to_string()).and_then(one)
        }
        CheckKind::Factorization => {
            let ls = local_site(site()?)?;
            let f = arrow(ls.total(), args[0])?;
            let r = match local_factorization(&ls, f) {
                Ok(fact) => {
                    let d = ls.total();
                    let pieces: Vec<String> = fact
                        .pieces
                        .iter()
                        .map(|pc| format!("{} . {} over {}", d.arr_name(pc.loccart), d.arr_name(pc.connector), d.arr_name(pc.cover)))
                        .collect();
                    fact.verify(&ls).with("pieces", pieces.join("; "))
                }
                Err(e) => CheckReport::fail("local factorization", e.to_string()).with("arrow", args[0]),
            };
            one(r)
        }
        CheckKind::Cofinal => {
            let ls = local_site(site()?)?;
            let fc = match args.as_slice() {
                [f] => build_cartfact_category(&ls, arrow(ls.total(), f)?),
                [f, d] => {
                    let f = arrow(ls.base(), f)?;
                    let d = ls.total().obj(d).ok_or_else(|| format!("no object `{d}` in {}", ls.total().name()))?;
                    build_fact_category(&ls, f, d).map_err(|e| e.to_string())?
                }
                _ => return Err(format!("`check cofinal` takes {}", kind.usage())),
            };
            let r = is_j_cofinal(&fc.projection, &fc.slice, ls.j()).with("category", fc.carrier.name());
            let o = cofinality_oracle(&fc.projection, &fc.slice, ls.j());
            if r.passed != o.passed {
                return Err("internal disagreement between the cofinality routes".into());
            }
            Ok(CheckOutcome { kind, target: target.into(), passed: r.passed, reports: vec![r, o] })
        }
        CheckKind::CofinalityEquiv => {
            let ls = local_site(site()?)?;
            let f = arrow(ls.total(), args[0])?;
            one(loccart_cofinality_equiv(&ls, f))
        }
        CheckKind::ToposFibration => {
            let ls = local_site(site()?)?;
            topos_level_fibration_check(&ls, false).map_err(|e| e.to_string()).and_then(one)
        }
        CheckKind::MorphismLocfib => {
            let a = doc.functors.get(target).ok_or_else(|| format!("no functor named `{target}`"))?;
            let get = |n: &str| doc.sites.get(n).ok_or_else(|| format!("no site named `{n}`"));
            let (s1, s2) = (local_site(get(args[0])?)?, local_site(get(args[1])?)?);
            let m = LocalMorphism::strict(s1, s2, a.clone()).map_err(|e| e.to_string())?;
            one(is_morphism_of_local_fibrations(&m))
        }
        CheckKind::Sheaf => {
            let p = doc.presheaves.get(target).ok_or_else(|| format!("no presheaf named `{target}`"))?;
            let t = doc.topologies.get(args[0]).ok_or_else(|| format!("no topology named `{}`", args[0]))?;
            valid_topology(t)?;
            if **t.base() != **p.base() {
                return Err(format!("`{}` is not a topology on the base of `{target}`", args[0]));
            }
            one(is_sheaf(p, t))
        }
    }
}

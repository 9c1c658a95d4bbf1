use std::sync::Arc;

use crate::fincat::same;
use crate::report::CheckReport;
use crate::sites::{GrothendieckTopology, Sieve};

use super::{sheafify, PresheafMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalityMode {
    Epi,
    Mono,
    Iso,
}

impl LocalityMode {
    fn label(self) -> &'static str {
        match self {
            LocalityMode::Epi => "locally epi",
            LocalityMode::Mono => "locally mono",
            LocalityMode::Iso => "locally iso",
        }
    }
}

/// Whether `φ` becomes epi, mono or iso after `J`-sheafification, decided by covering sieves.
pub fn locality_test(phi: &PresheafMorphism, j: &GrothendieckTopology, mode: LocalityMode) -> CheckReport {
    let check = mode.label();
    if !same(phi.base(), j.base()) {
        return CheckReport::fail(check, "morphism and topology live on different categories");
    }
    let c = &**phi.base();
    let (p, q) = (phi.source(), phi.target());
    if matches!(mode, LocalityMode::Epi | LocalityMode::Iso) {
        for o in c.objects() {
            for y in 0..q.size(o) {
                let mut bits = Sieve::empty(c, o).bits().clone();
                for &f in c.arrows_into(o) {
                    let s = c.src(f);
                    let yf = q.act(f, y);
                    if phi.component(s).contains(&yf) {
                        bits.insert(f.0);
                    }
                }
                let sieve = Sieve::from_bits(o, bits);
                if !j.covers(&sieve) {
                    return CheckReport::fail(check, "an element is not locally in the image")
                        .with("object", c.obj_name(o))
                        .with("element", q.label(o, y))
                        .with("sieve", sieve.display(c));
                }
            }
        }
    }
    if matches!(mode, LocalityMode::Mono | LocalityMode::Iso) {
        for o in c.objects() {
            for x1 in 0..p.size(o) {
                for x2 in (x1 + 1)..p.size(o) {
                    if phi.at(o, x1) != phi.at(o, x2) {
                        continue;
                    }
                    let mut bits = Sieve::empty(c, o).bits().clone();
                    for &f in c.arrows_into(o) {
                        if p.act(f, x1) == p.act(f, x2) {
                            bits.insert(f.0);
                        }
                    }
                    let sieve = Sieve::from_bits(o, bits);
                    if !j.covers(&sieve) {
                        return CheckReport::fail(check, "two identified elements are not locally equal")
                            .with("object", c.obj_name(o))
                            .with("elements", format!("{}, {}", p.label(o, x1), p.label(o, x2)))
                            .with("sieve", sieve.display(c));
                    }
                }
            }
        }
    }
    CheckReport::pass(check, format!("{} for {}", check, j.name()))
}

/// Second route: sheafify both ends and test the induced map for bijectivity.
pub fn sheafified_is_iso(phi: &PresheafMorphism, j: &GrothendieckTopology) -> bool {
    let a = sheafify(&Arc::clone(phi.source()), j);
    let b = sheafify(&Arc::clone(phi.target()), j);
    a.map(&b, phi).map(|m| m.is_iso()).unwrap_or(false)
}

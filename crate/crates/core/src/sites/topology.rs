use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use crate::fincat::{Arr, FinCategory, Obj};
use crate::presheaf::{matching_families, yoneda};
use crate::report::CheckReport;

use super::sieve::{sieves_on, Sieve, SieveError};

/// A Grothendieck topology stored as explicit sets of covering sieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckTopology {
    name: String,
    base: Arc<FinCategory>,
    covers: Vec<BTreeSet<Sieve>>,
}

impl GrothendieckTopology {
    /// Candidate data; run [`GrothendieckTopology::is_topology`] to validate it.
    ///
    /// Maximal sieves are added automatically.
    pub fn from_covers(name: impl Into<String>, base: Arc<FinCategory>, sieves: impl IntoIterator<Item = Sieve>) -> Self {
        let mut covers: Vec<BTreeSet<Sieve>> = vec![BTreeSet::new(); base.object_count()];
        for o in base.objects() {
            covers[o.0].insert(Sieve::maximal(&base, o));
        }
        for s in sieves {
            covers[s.object().0].insert(s);
        }
        GrothendieckTopology { name: name.into(), base, covers }
    }

    /// Candidate data taken verbatim, without adding maximal sieves.
    pub fn from_covers_exact(name: impl Into<String>, base: Arc<FinCategory>, sieves: impl IntoIterator<Item = Sieve>) -> Self {
        let mut covers: Vec<BTreeSet<Sieve>> = vec![BTreeSet::new(); base.object_count()];
        for s in sieves {
            covers[s.object().0].insert(s);
        }
        GrothendieckTopology { name: name.into(), base, covers }
    }

    /// Only maximal sieves cover.
    pub fn trivial(base: Arc<FinCategory>) -> Self {
        GrothendieckTopology::from_covers("TRIV", base, [])
    }

    /// Every sieve covers, including the empty one.
    pub fn maximal(base: Arc<FinCategory>) -> Self {
        let sieves: Vec<Sieve> = base.objects().flat_map(|o| sieves_on(&base, o)).collect();
        GrothendieckTopology::from_covers("MAX", base, sieves)
    }

    /// The least topology in which every listed family generates a covering sieve.
    pub fn generate(base: Arc<FinCategory>, families: &[(Obj, Vec<Arr>)]) -> Result<Self, SieveError> {
        let sieves = families
            .iter()
            .map(|(o, gens)| Sieve::closure(&base, *o, gens))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(generate_from_sieves(base, sieves))
    }

    pub fn canonical(base: Arc<FinCategory>) -> Self {
        canonical_topology(base)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.covers[s.object().0].contains(s)
    }

    pub fn covering_sieves(&self, o: Obj) -> impl Iterator<Item = &Sieve> + '_ {
        self.covers[o.0].iter()
    }

    pub fn all_covers(&self) -> impl Iterator<Item = &Sieve> + '_ {
        self.covers.iter().flatten()
    }

    pub fn cover_count(&self) -> usize {
        self.covers.iter().map(|c| c.len()).sum()
    }

    /// Every cover of `other` covers here.
    pub fn contains(&self, other: &GrothendieckTopology) -> bool {
        other.all_covers().all(|s| self.covers(s))
    }

    /// Same covering sieves, names ignored.
    pub fn same_covers(&self, other: &GrothendieckTopology) -> bool {
        crate::fincat::same(&self.base, &other.base) && self.covers == other.covers
    }

    pub fn is_trivial(&self) -> bool {
        self.base.objects().all(|o| self.covers[o.0].iter().all(|s| s.is_maximal(&self.base)))
    }

    /// Maximality, stability and transitivity, with a witness for the first failure.
    pub fn is_topology(&self) -> CheckReport {
        let c = &*self.base;
        for s in self.all_covers() {
            if !s.is_well_formed(c) {
                return CheckReport::fail("topology", "a listed cover is not a sieve")
                    .with("sieve", s.display(c));
            }
        }
        for o in c.objects() {
            if !self.covers(&Sieve::maximal(c, o)) {
                return CheckReport::fail("topology", "maximality fails")
                    .with("object", c.obj_name(o))
                    .with("sieve", Sieve::maximal(c, o).display(c));
            }
        }
        for s in self.all_covers() {
            for &h in c.arrows_into(s.object()) {
                let pulled = s.pull(c, h);
                if !self.covers(&pulled) {
                    return CheckReport::fail("topology", "stability fails")
                        .with("object", c.obj_name(s.object()))
                        .with("sieve", s.display(c))
                        .with("arrow", c.arr_name(h))
                        .with("pullback", pulled.display(c));
                }
            }
        }
        for o in c.objects() {
            for r in sieves_on(c, o) {
                if self.covers(&r) {
                    continue;
                }
                if let Some(s) = self.covers[o.0].iter().find(|s| s.members().all(|h| self.covers(&r.pull(c, h)))) {
                    return CheckReport::fail("topology", "transitivity fails")
                        .with("object", c.obj_name(o))
                        .with("sieve", r.display(c))
                        .with("local cover", s.display(c));
                }
            }
        }
        CheckReport::pass("topology", format!("{} is a Grothendieck topology on {}", self.name, c.name()))
    }

    pub fn describe(&self) -> String {
        let c = &*self.base;
        let mut lines = Vec::new();
        for o in c.objects() {
            let ss: Vec<String> = self.covers[o.0].iter().map(|s| s.display(c)).collect();
            lines.push(format!("{}: {}", c.obj_name(o), ss.join(" | ")));
        }
        lines.join("\n")
    }
}

/// Least fixpoint of stability and transitivity above the maximal sieves and `sieves`.
pub fn generate_from_sieves(base: Arc<FinCategory>, sieves: impl IntoIterator<Item = Sieve>) -> GrothendieckTopology {
    let lattice: Vec<Vec<Sieve>> = base.objects().map(|o| sieves_on(&base, o)).collect();
    generate_with_lattice(base, &lattice, sieves)
}

pub(crate) fn generate_with_lattice(
    base: Arc<FinCategory>,
    lattice: &[Vec<Sieve>],
    sieves: impl IntoIterator<Item = Sieve>,
) -> GrothendieckTopology {
    let mut t = GrothendieckTopology::from_covers("generated", base, sieves);
    let c = t.base.clone();
    loop {
        let mut changed = false;
        let mut pending = Vec::new();
        for s in t.all_covers() {
            for &h in c.arrows_into(s.object()) {
                let p = s.pull(&c, h);
                if !t.covers(&p) {
                    pending.push(p);
                }
            }
        }
        for p in pending {
            changed |= t.covers[p.object().0].insert(p);
        }
        for o in c.objects() {
            for r in &lattice[o.0] {
                if t.covers(r) {
                    continue;
                }
                let local = t.covers[o.0].iter().any(|s| s.members().all(|h| t.covers(&r.pull(&c, h))));
                if local {
                    t.covers[o.0].insert(r.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            return t;
        }
    }
}

/// Sieves that are universally effective-epimorphic.
pub fn canonical_topology(base: Arc<FinCategory>) -> GrothendieckTopology {
    let c = &*base;
    let representables: Vec<_> = c.objects().map(|e| yoneda(&base, e)).collect();
    let mut covering = Vec::new();
    for o in c.objects() {
        for s in sieves_on(c, o) {
            let effective = c.arrows_into(o).iter().all(|&h| {
                let pulled = s.pull(c, h);
                representables.iter().all(|y| {
                    let m = matching_families(&pulled, y);
                    m.is_bijective()
                })
            });
            if effective {
                covering.push(s);
            }
        }
    }
    GrothendieckTopology::from_covers("CAN", base, covering)
}

/// Every Grothendieck topology on `base`, in a deterministic order (TRIV first).
pub fn enumerate_topologies(base: &Arc<FinCategory>) -> Vec<GrothendieckTopology> {
    enumerate_topologies_capped(base, usize::MAX)
}

pub fn enumerate_topologies_capped(base: &Arc<FinCategory>, cap: usize) -> Vec<GrothendieckTopology> {
    let lattice: Vec<Vec<Sieve>> = base.objects().map(|o| sieves_on(base, o)).collect();
    let start = GrothendieckTopology::trivial(base.clone());
    let mut seen: HashSet<Vec<BTreeSet<Sieve>>> = HashSet::new();
    seen.insert(start.covers.clone());
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for o in base.objects() {
            for s in &lattice[o.0] {
                if t.covers(s) {
                    continue;
                }
                let next = generate_with_lattice(base.clone(), &lattice, t.all_covers().cloned().chain([s.clone()]));
                if seen.insert(next.covers.clone()) {
                    out.push(next.clone());
                    queue.push_back(next);
                    if out.len() >= cap {
                        return finish(out);
                    }
                }
            }
        }
    }
    finish(out)
}

fn finish(mut out: Vec<GrothendieckTopology>) -> Vec<GrothendieckTopology> {
    out.sort_by_key(|t| t.cover_count());
    for (i, t) in out.iter_mut().enumerate() {
        t.name = if i == 0 { "TRIV".into() } else { format!("T{i}") };
    }
    out
}

use std::collections::HashMap;
use std::sync::Arc;

use crate::fincat::{same, Arr, Obj};
use crate::report::CheckReport;
use crate::sites::{GrothendieckTopology, Sieve};

use super::{FinPresheaf, PresheafError, PresheafMorphism};

/// All matching families for `P` on a sieve, and the restriction map from `P(c)`.
#[derive(Clone, Debug)]
pub struct MatchingFamilies {
    pub sieve: Sieve,
    /// Sieve members in index order; families are aligned with this list.
    pub members: Vec<Arr>,
    pub families: Vec<Vec<usize>>,
    /// Family index of `(P(f)(x))_f` for each `x ∈ P(c)`.
    pub restriction: Vec<usize>,
}

impl MatchingFamilies {
    pub fn is_bijective(&self) -> bool {
        if self.restriction.len() != self.families.len() {
            return false;
        }
        let mut seen = vec![false; self.families.len()];
        self.restriction.iter().all(|&i| !std::mem::replace(&mut seen[i], true))
    }

    pub fn index_of(&self, family: &[usize]) -> Option<usize> {
        self.families.iter().position(|f| f == family)
    }
}

pub fn matching_families(sieve: &Sieve, p: &FinPresheaf) -> MatchingFamilies {
    let c = &**p.base();
    let members: Vec<Arr> = sieve.members().collect();
    let mut pos = vec![usize::MAX; c.arrow_count()];
    for (i, &f) in members.iter().enumerate() {
        pos[f.0] = i;
    }
    // x_{f∘g} = P(g)(x_f), checked once both positions are assigned
    let mut constraints: Vec<Vec<(usize, Arr, usize)>> = vec![Vec::new(); members.len()];
    for (i, &f) in members.iter().enumerate() {
        for &g in c.arrows_into(c.src(f)) {
            if c.is_identity(g) {
                continue;
            }
            let j = pos[c.comp(f, g).0];
            constraints[i.max(j)].push((i, g, j));
        }
    }
    let mut families = Vec::new();
    let mut current = vec![0usize; members.len()];
    enumerate(p, &members, &constraints, 0, &mut current, &mut families);
    let index: HashMap<&Vec<usize>, usize> = families.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let restriction = (0..p.size(sieve.object()))
        .map(|x| {
            let fam: Vec<usize> = members.iter().map(|&f| p.act(f, x)).collect();
            index[&fam]
        })
        .collect();
    MatchingFamilies { sieve: sieve.clone(), members, families, restriction }
}

fn enumerate(
    p: &FinPresheaf,
    members: &[Arr],
    constraints: &[Vec<(usize, Arr, usize)>],
    k: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == members.len() {
        out.push(current.clone());
        return;
    }
    let src = p.base().src(members[k]);
    for v in 0..p.size(src) {
        current[k] = v;
        if constraints[k].iter().all(|&(i, g, j)| current[j] == p.act(g, current[i])) {
            enumerate(p, members, constraints, k + 1, current, out);
        }
    }
}

pub fn is_sheaf(p: &FinPresheaf, j: &GrothendieckTopology) -> CheckReport {
    let c = &**p.base();
    if !same(p.base(), j.base()) {
        return CheckReport::fail("sheaf", "presheaf and topology live on different categories");
    }
    for o in c.objects() {
        for s in j.covering_sieves(o) {
            let m = matching_families(s, p);
            if m.is_bijective() {
                continue;
            }
            let mut hit = vec![None; m.families.len()];
            for (x, &i) in m.restriction.iter().enumerate() {
                if let Some(y) = hit[i] {
                    return CheckReport::fail("sheaf", "two elements restrict to the same matching family")
                        .with("object", c.obj_name(o))
                        .with("sieve", s.display(c))
                        .with("elements", format!("{}, {}", p.label(o, y), p.label(o, x)));
                }
                hit[i] = Some(x);
            }
            let missing = hit.iter().position(|h| h.is_none()).unwrap_or(0);
            let fam: Vec<String> = m
                .members
                .iter()
                .zip(&m.families[missing])
                .map(|(&f, &v)| format!("{}->{}", c.arr_name(f), p.label(c.src(f), v)))
                .collect();
            return CheckReport::fail("sheaf", "a matching family has no amalgamation")
                .with("object", c.obj_name(o))
                .with("sieve", s.display(c))
                .with("family", fam.join(", "));
        }
    }
    CheckReport::pass("sheaf", format!("{} is a sheaf for {}", p.name(), j.name()))
}

/// One application of the plus construction.
#[derive(Clone, Debug)]
pub struct Plus {
    pub presheaf: Arc<FinPresheaf>,
    pub unit: PresheafMorphism,
    // every (covering sieve, matching family) pair per object, mapped to its class
    classes: Vec<HashMap<(Sieve, Vec<usize>), usize>>,
    // least representative of each class
    reps: Vec<Vec<(Sieve, Vec<usize>)>>,
}

impl Plus {
    pub fn class_of(&self, c: Obj, sieve: &Sieve, family: &[usize]) -> Option<usize> {
        self.classes[c.0].get(&(sieve.clone(), family.to_vec())).copied()
    }

    pub fn representative(&self, c: Obj, e: usize) -> &(Sieve, Vec<usize>) {
        &self.reps[c.0][e]
    }

    /// `φ⁺: P⁺ → Q⁺` for `φ: P → Q`, given `self = P⁺` and `other = Q⁺`.
    pub fn map(&self, other: &Plus, phi: &PresheafMorphism) -> Result<PresheafMorphism, PresheafError> {
        let base = self.presheaf.base().clone();
        let mut components = Vec::new();
        for c in base.objects() {
            let comp = self.reps[c.0]
                .iter()
                .map(|(s, fam)| {
                    let image: Vec<usize> =
                        s.members().zip(fam).map(|(f, &v)| phi.at(base.src(f), v)).collect();
                    other.class_of(c, s, &image).expect("image of a matching family is matching")
                })
                .collect();
            components.push(comp);
        }
        PresheafMorphism::new(self.presheaf.clone(), other.presheaf.clone(), components)
    }
}

pub fn plus_construction(p: &Arc<FinPresheaf>, j: &GrothendieckTopology) -> Plus {
    let base = p.base().clone();
    let c = &*base;
    let mut classes = Vec::new();
    let mut reps: Vec<Vec<(Sieve, Vec<usize>)>> = Vec::new();
    for o in c.objects() {
        let mut map: HashMap<(Sieve, Vec<usize>), usize> = HashMap::new();
        let mut rs: Vec<(Sieve, Vec<usize>)> = Vec::new();
        for s in j.covering_sieves(o) {
            let m = matching_families(s, p);
            for fam in m.families {
                let cls = rs.iter().position(|(r, y)| agree_locally(j, p, s, &fam, r, y));
                let cls = cls.unwrap_or_else(|| {
                    rs.push((s.clone(), fam.clone()));
                    rs.len() - 1
                });
                map.insert((s.clone(), fam), cls);
            }
        }
        classes.push(map);
        reps.push(rs);
    }
    let labels: Vec<Vec<String>> =
        reps.iter().map(|rs| (0..rs.len()).map(|i| format!("e{i}")).collect()).collect();
    let action: Vec<Vec<usize>> = c
        .arrows()
        .map(|h| {
            let (s, t) = (c.src(h), c.tgt(h));
            reps[t.0]
                .iter()
                .map(|(sieve, fam)| {
                    let pulled = sieve.pull(c, h);
                    let lookup: HashMap<Arr, usize> = sieve.members().zip(fam.iter().copied()).collect();
                    let values: Vec<usize> = pulled.members().map(|g| lookup[&c.comp(h, g)]).collect();
                    classes[s.0][&(pulled, values)]
                })
                .collect()
        })
        .collect();
    let presheaf = Arc::new(FinPresheaf::from_parts_unchecked(format!("{}+", p.name()), base.clone(), labels, action));
    let unit_components = c
        .objects()
        .map(|o| {
            let max = Sieve::maximal(c, o);
            (0..p.size(o))
                .map(|x| {
                    let fam: Vec<usize> = max.members().map(|f| p.act(f, x)).collect();
                    classes[o.0][&(max.clone(), fam)]
                })
                .collect()
        })
        .collect();
    let unit = PresheafMorphism::new_unchecked(p.clone(), presheaf.clone(), unit_components);
    Plus { presheaf, unit, classes, reps }
}

/// `{f ∈ S ∩ R | x_f = y_f}` covers.
fn agree_locally(j: &GrothendieckTopology, p: &FinPresheaf, s: &Sieve, x: &[usize], r: &Sieve, y: &[usize]) -> bool {
    let c = &**p.base();
    let sx: HashMap<Arr, usize> = s.members().zip(x.iter().copied()).collect();
    let ry: HashMap<Arr, usize> = r.members().zip(y.iter().copied()).collect();
    let mut bits = Sieve::empty(c, s.object()).bits().clone();
    for f in s.members() {
        if let Some(v) = ry.get(&f) {
            if sx[&f] == *v {
                bits.insert(f.0);
            }
        }
    }
    j.covers(&Sieve::from_bits(s.object(), bits))
}

/// `P⁺⁺` with the composite unit and both stages.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Arc<FinPresheaf>,
    pub unit: PresheafMorphism,
    pub first: Plus,
    pub second: Plus,
}

impl Sheafification {
    /// `a(φ)` for `φ: P → Q`, with `self = a(P)` and `other = a(Q)`.
    pub fn map(&self, other: &Sheafification, phi: &PresheafMorphism) -> Result<PresheafMorphism, PresheafError> {
        let once = self.first.map(&other.first, phi)?;
        self.second.map(&other.second, &once)
    }
}

pub fn sheafify(p: &Arc<FinPresheaf>, j: &GrothendieckTopology) -> Sheafification {
    let first = plus_construction(p, j);
    let second = plus_construction(&first.presheaf, j);
    let unit = second.unit.after(&first.unit).expect("units compose");
    Sheafification { sheaf: second.presheaf.clone(), unit, first, second }
}

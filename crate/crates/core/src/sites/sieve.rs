use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::fincat::{Arr, FinCategory, Obj};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("arrow `{arrow}` does not target `{object}`")]
    TargetMismatch { arrow: String, object: String },
}

/// A set of arrows into `object`, closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    object: Obj,
    members: FixedBitSet,
}

impl Sieve {
    pub fn empty(c: &FinCategory, object: Obj) -> Self {
        Sieve { object, members: FixedBitSet::with_capacity(c.arrow_count()) }
    }

    pub fn maximal(c: &FinCategory, object: Obj) -> Self {
        let mut s = Sieve::empty(c, object);
        for &a in c.arrows_into(object) {
            s.members.insert(a.0);
        }
        s
    }

    /// Smallest sieve on `object` containing `generators`.
    pub fn closure(c: &FinCategory, object: Obj, generators: &[Arr]) -> Result<Self, SieveError> {
        let mut s = Sieve::empty(c, object);
        for &g in generators {
            if c.tgt(g) != object {
                return Err(SieveError::TargetMismatch {
                    arrow: c.arr_name(g).to_string(),
                    object: c.obj_name(object).to_string(),
                });
            }
            s.add_generated(c, g);
        }
        Ok(s)
    }

    /// The sieve generated by `generators`, which must all target `object`.
    pub fn generated(c: &FinCategory, object: Obj, generators: impl IntoIterator<Item = Arr>) -> Self {
        let mut s = Sieve::empty(c, object);
        for g in generators {
            debug_assert_eq!(c.tgt(g), object);
            s.add_generated(c, g);
        }
        s
    }

    fn add_generated(&mut self, c: &FinCategory, g: Arr) {
        if self.members.contains(g.0) {
            return;
        }
        for &k in c.arrows_into(c.src(g)) {
            self.members.insert(c.comp(g, k).0);
        }
    }

    /// Membership set without a closure check, for callers that built it closed.
    pub(crate) fn from_bits(object: Obj, members: FixedBitSet) -> Self {
        Sieve { object, members }
    }

    pub fn object(&self) -> Obj {
        self.object
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, a: Arr) -> bool {
        self.members.contains(a.0)
    }

    pub fn members(&self) -> impl Iterator<Item = Arr> + '_ {
        self.members.ones().map(Arr)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.count_ones(..) == 0
    }

    pub fn is_maximal(&self, c: &FinCategory) -> bool {
        self.contains(c.id(self.object))
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.object == other.object && self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Sieve) -> Sieve {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Sieve { object: self.object, members }
    }

    /// `h*(S) = { g | h ∘ g ∈ S }` on `src(h)`.
    pub fn pullback(&self, c: &FinCategory, h: Arr) -> Result<Sieve, SieveError> {
        if c.tgt(h) != self.object {
            return Err(SieveError::TargetMismatch {
                arrow: c.arr_name(h).to_string(),
                object: c.obj_name(self.object).to_string(),
            });
        }
        Ok(self.pull(c, h))
    }

    pub(crate) fn pull(&self, c: &FinCategory, h: Arr) -> Sieve {
        let src = c.src(h);
        let mut out = Sieve::empty(c, src);
        for &g in c.arrows_into(src) {
            if self.members.contains(c.comp(h, g).0) {
                out.members.insert(g.0);
            }
        }
        out
    }

    /// Whether the membership set is precomposition-closed and well-targeted.
    pub fn is_well_formed(&self, c: &FinCategory) -> bool {
        self.members().all(|f| {
            c.tgt(f) == self.object && c.arrows_into(c.src(f)).iter().all(|&g| self.contains(c.comp(f, g)))
        })
    }

    pub fn display(&self, c: &FinCategory) -> String {
        let names: Vec<&str> = self.members().map(|a| c.arr_name(a)).collect();
        format!("{{{}}} on {}", names.join(", "), c.obj_name(self.object))
    }
}

/// All sieves on `object`, enumerated as down-sets by branch and propagate.
pub fn sieves_on(c: &FinCategory, object: Obj) -> Vec<Sieve> {
    let into: Vec<Arr> = c.arrows_into(object).to_vec();
    let mut out = Vec::new();
    let mut state: Vec<Option<bool>> = vec![None; c.arrow_count()];
    branch(c, &into, 0, object, &mut state, &mut out);
    out.sort();
    out
}

fn branch(c: &FinCategory, into: &[Arr], k: usize, object: Obj, state: &mut Vec<Option<bool>>, out: &mut Vec<Sieve>) {
    if k == into.len() {
        let mut bits = FixedBitSet::with_capacity(c.arrow_count());
        for &a in into {
            if state[a.0] == Some(true) {
                bits.insert(a.0);
            }
        }
        out.push(Sieve::from_bits(object, bits));
        return;
    }
    let a = into[k];
    match state[a.0] {
        Some(_) => branch(c, into, k + 1, object, state, out),
        None => {
            // exclude a: every arrow factoring it must be excluded too
            let saved = state.clone();
            let mut ok = true;
            for &h in into {
                if c.arrows_into(c.src(h)).iter().any(|&g| c.comp(h, g) == a) {
                    match state[h.0] {
                        Some(true) => {
                            ok = false;
                            break;
                        }
                        _ => state[h.0] = Some(false),
                    }
                }
            }
            if ok {
                branch(c, into, k + 1, object, state, out);
            }
            *state = saved.clone();
            // include a: everything it generates joins
            let mut ok = true;
            for &g in c.arrows_into(c.src(a)) {
                let x = c.comp(a, g);
                match state[x.0] {
                    Some(false) => {
                        ok = false;
                        break;
                    }
                    _ => state[x.0] = Some(true),
                }
            }
            if ok {
                branch(c, into, k + 1, object, state, out);
            }
            *state = saved;
        }
    }
}

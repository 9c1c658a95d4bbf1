use std::collections::HashMap;
use std::sync::Arc;

use crate::fincat::{same, FinCategory};

use super::{FinPresheaf, PresheafError, PresheafMorphism};

/// A covariant diagram of presheaves indexed by `shape`.
///
/// `arrows[k]` is the morphism for shape arrow `k`, from the presheaf at its
/// source to the presheaf at its target. Identity arrows may carry identities.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub shape: Arc<FinCategory>,
    pub objects: Vec<Arc<FinPresheaf>>,
    pub arrows: Vec<PresheafMorphism>,
}

/// A pointwise colimit with its cocone legs, one per shape object.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub apex: Arc<FinPresheaf>,
    pub legs: Vec<PresheafMorphism>,
    // class representative (shape object, element) per apex element
    reps: Vec<Vec<(usize, usize)>>,
}

impl Colimit {
    /// The mediating morphism for a cocone with the given legs.
    pub fn induced(&self, target: &Arc<FinPresheaf>, legs: &[PresheafMorphism]) -> Result<PresheafMorphism, PresheafError> {
        let base = self.apex.base().clone();
        if !same(&base, target.base()) {
            return Err(PresheafError::BaseMismatch);
        }
        let mut components = Vec::new();
        for c in base.objects() {
            let comp: Vec<usize> = self.reps[c.0].iter().map(|&(i, x)| legs[i].at(c, x)).collect();
            // every member of a class must agree with its representative
            for (i, leg) in legs.iter().enumerate() {
                for x in 0..leg.source().size(c) {
                    let cls = self.legs[i].at(c, x);
                    if leg.at(c, x) != comp[cls] {
                        return Err(PresheafError::NotACocone(base.obj_name(c).to_string()));
                    }
                }
            }
            components.push(comp);
        }
        PresheafMorphism::new(self.apex.clone(), target.clone(), components)
    }
}

pub fn compute_colimit(base: &Arc<FinCategory>, d: &Diagram) -> Result<Colimit, PresheafError> {
    if d.objects.iter().any(|p| !same(p.base(), base)) {
        return Err(PresheafError::BaseMismatch);
    }
    let shape = &*d.shape;
    let k = d.objects.len();
    let mut labels = Vec::new();
    let mut offsets_per_obj = Vec::new();
    let mut class_of_per_obj = Vec::new();
    let mut reps_per_obj = Vec::new();
    for c in base.objects() {
        let mut offsets = Vec::with_capacity(k + 1);
        let mut total = 0;
        for p in &d.objects {
            offsets.push(total);
            total += p.size(c);
        }
        offsets.push(total);
        let mut parent: Vec<usize> = (0..total).collect();
        for a in shape.arrows() {
            let (s, t) = (shape.src(a), shape.tgt(a));
            let m = &d.arrows[a.0];
            for x in 0..d.objects[s.0].size(c) {
                let y = m.at(c, x);
                union(&mut parent, offsets[s.0] + x, offsets[t.0] + y);
            }
        }
        let mut class_of = vec![usize::MAX; total];
        let mut reps = Vec::new();
        let mut names = Vec::new();
        let mut root_class: HashMap<usize, usize> = HashMap::new();
        for i in 0..k {
            for x in 0..d.objects[i].size(c) {
                let r = find(&mut parent, offsets[i] + x);
                let cls = *root_class.entry(r).or_insert_with(|| {
                    reps.push((i, x));
                    names.push(format!("[{}:{}]", shape.obj_name(crate::fincat::Obj(i)), d.objects[i].label(c, x)));
                    reps.len() - 1
                });
                class_of[offsets[i] + x] = cls;
            }
        }
        labels.push(names);
        offsets_per_obj.push(offsets);
        class_of_per_obj.push(class_of);
        reps_per_obj.push(reps);
    }
    let action = base
        .arrows()
        .map(|f| {
            let (s, t) = (base.src(f), base.tgt(f));
            reps_per_obj[t.0]
                .iter()
                .map(|&(i, x)| {
                    let y = d.objects[i].act(f, x);
                    class_of_per_obj[s.0][offsets_per_obj[s.0][i] + y]
                })
                .collect()
        })
        .collect();
    let apex = Arc::new(FinPresheaf::from_parts_unchecked("colim", base.clone(), labels, action));
    let legs = (0..k)
        .map(|i| {
            let components = base
                .objects()
                .map(|c| (0..d.objects[i].size(c)).map(|x| class_of_per_obj[c.0][offsets_per_obj[c.0][i] + x]).collect())
                .collect();
            PresheafMorphism::new_unchecked(d.objects[i].clone(), apex.clone(), components)
        })
        .collect();
    Ok(Colimit { apex, legs, reps: reps_per_obj })
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

fn union(p: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(p, a), find(p, b));
    if ra != rb {
        p[ra.max(rb)] = ra.min(rb);
    }
}

/// A pointwise fiber product with its two projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub apex: Arc<FinPresheaf>,
    pub left: PresheafMorphism,
    pub right: PresheafMorphism,
    pairs: Vec<Vec<(usize, usize)>>,
    index: Vec<HashMap<(usize, usize), usize>>,
}

impl Pullback {
    pub fn pair(&self, c: crate::fincat::Obj, z: usize) -> (usize, usize) {
        self.pairs[c.0][z]
    }

    pub fn element(&self, c: crate::fincat::Obj, x: usize, y: usize) -> Option<usize> {
        self.index[c.0].get(&(x, y)).copied()
    }

    /// The mediating morphism for a commuting cone `(a, b)`.
    pub fn mediate(&self, a: &PresheafMorphism, b: &PresheafMorphism) -> Result<PresheafMorphism, PresheafError> {
        let base = self.apex.base().clone();
        let mut components = Vec::new();
        for c in base.objects() {
            let mut comp = Vec::new();
            for x in 0..a.source().size(c) {
                let z = self
                    .element(c, a.at(c, x), b.at(c, x))
                    .ok_or_else(|| PresheafError::NotACocone(base.obj_name(c).to_string()))?;
                comp.push(z);
            }
            components.push(comp);
        }
        PresheafMorphism::new(a.source().clone(), self.apex.clone(), components)
    }
}

pub fn compute_pullback(phi: &PresheafMorphism, psi: &PresheafMorphism) -> Result<Pullback, PresheafError> {
    if **phi.target() != **psi.target() {
        return Err(PresheafError::TargetMismatch);
    }
    let (p, q) = (phi.source(), psi.source());
    let base = p.base().clone();
    let mut pairs = Vec::new();
    let mut index = Vec::new();
    let mut labels = Vec::new();
    for c in base.objects() {
        let mut ps = Vec::new();
        let mut idx = HashMap::new();
        let mut ls = Vec::new();
        for x in 0..p.size(c) {
            for y in 0..q.size(c) {
                if phi.at(c, x) == psi.at(c, y) {
                    idx.insert((x, y), ps.len());
                    ps.push((x, y));
                    ls.push(format!("({},{})", p.label(c, x), q.label(c, y)));
                }
            }
        }
        pairs.push(ps);
        index.push(idx);
        labels.push(ls);
    }
    let action = base
        .arrows()
        .map(|f| {
            let (s, t) = (base.src(f), base.tgt(f));
            pairs[t.0].iter().map(|&(x, y)| index[s.0][&(p.act(f, x), q.act(f, y))]).collect()
        })
        .collect();
    let apex = Arc::new(FinPresheaf::from_parts_unchecked("pullback", base.clone(), labels, action));
    let left = PresheafMorphism::new_unchecked(
        apex.clone(),
        p.clone(),
        pairs.iter().map(|ps| ps.iter().map(|&(x, _)| x).collect()).collect(),
    );
    let right = PresheafMorphism::new_unchecked(
        apex.clone(),
        q.clone(),
        pairs.iter().map(|ps| ps.iter().map(|&(_, y)| y).collect()).collect(),
    );
    Ok(Pullback { apex, left, right, pairs, index })
}

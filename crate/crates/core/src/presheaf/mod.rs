//! Finite-set-valued presheaves and the locality tests used as the topos-level oracle.

mod enumerate;
mod limits;
mod locality;
mod sheaf;

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{same, Arr, FinCategory, FinFunctor, Obj};

pub use enumerate::{enumerate_morphisms, enumerate_presheaves};
pub use limits::{compute_colimit, compute_pullback, Colimit, Diagram, Pullback};
pub use locality::{locality_test, sheafified_is_iso, LocalityMode};
pub use sheaf::{is_sheaf, matching_families, plus_construction, sheafify, MatchingFamilies, Plus, Sheafification};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("presheaves live over different base categories")]
    BaseMismatch,

    #[error("morphisms do not share a target")]
    TargetMismatch,

    #[error("presheaf `{name}`: {message}")]
    Invalid { name: String, message: String },

    #[error("morphism is not natural at `{0}`")]
    NotNatural(String),

    #[error("cocone legs disagree on an identified element at `{0}`")]
    NotACocone(String),
}

/// A contravariant functor into finite sets, elements indexed per object.
///
/// `action[f]` maps `P(tgt f)` to `P(src f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPresheaf {
    name: String,
    base: Arc<FinCategory>,
    labels: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
}

impl FinPresheaf {
    pub fn new(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        action: Vec<Vec<usize>>,
    ) -> Result<Self, PresheafError> {
        let name = name.into();
        let invalid = |message: String| PresheafError::Invalid { name: name.clone(), message };
        if labels.len() != base.object_count() || action.len() != base.arrow_count() {
            return Err(invalid("one value per object and one action per arrow are required".into()));
        }
        for f in base.arrows() {
            let (s, t) = (base.src(f), base.tgt(f));
            if action[f.0].len() != labels[t.0].len() || action[f.0].iter().any(|&x| x >= labels[s.0].len()) {
                return Err(invalid(format!("action of `{}` has the wrong shape", base.arr_name(f))));
            }
            if base.is_identity(f) && action[f.0].iter().enumerate().any(|(i, &x)| i != x) {
                return Err(invalid(format!("identity `{}` acts nontrivially", base.arr_name(f))));
            }
        }
        for f in base.arrows() {
            for &g in base.arrows_into(base.src(f)) {
                let fg = base.comp(f, g);
                for x in 0..labels[base.tgt(f).0].len() {
                    if action[fg.0][x] != action[g.0][action[f.0][x]] {
                        return Err(invalid(format!(
                            "action is not functorial at ({}, {})",
                            base.arr_name(f),
                            base.arr_name(g)
                        )));
                    }
                }
            }
        }
        Ok(FinPresheaf { name, base, labels, action })
    }

    /// Builds from sizes and an action function, labelling elements `0, 1, ...`.
    pub fn from_fn(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        sizes: &[usize],
        act: impl Fn(Arr, usize) -> usize,
    ) -> Result<Self, PresheafError> {
        let labels = sizes.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect();
        let action = base.arrows().map(|f| (0..sizes[base.tgt(f).0]).map(|x| act(f, x)).collect()).collect();
        FinPresheaf::new(name, base, labels, action)
    }

    pub(crate) fn from_parts_unchecked(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        action: Vec<Vec<usize>>,
    ) -> Self {
        FinPresheaf { name: name.into(), base, labels, action }
    }

    pub fn terminal(base: &Arc<FinCategory>) -> Self {
        FinPresheaf {
            name: "1".into(),
            base: base.clone(),
            labels: base.objects().map(|_| vec!["*".to_string()]).collect(),
            action: base.arrows().map(|_| vec![0]).collect(),
        }
    }

    pub fn empty(base: &Arc<FinCategory>) -> Self {
        FinPresheaf {
            name: "0".into(),
            base: base.clone(),
            labels: base.objects().map(|_| Vec::new()).collect(),
            action: base.arrows().map(|_| Vec::new()).collect(),
        }
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

    pub fn size(&self, c: Obj) -> usize {
        self.labels[c.0].len()
    }

    pub fn label(&self, c: Obj, x: usize) -> &str {
        &self.labels[c.0][x]
    }

    pub fn labels(&self, c: Obj) -> &[String] {
        &self.labels[c.0]
    }

    pub fn find(&self, c: Obj, label: &str) -> Option<usize> {
        self.labels[c.0].iter().position(|l| l == label)
    }

    /// `P(f)(x)` for `x ∈ P(tgt f)`.
    pub fn act(&self, f: Arr, x: usize) -> usize {
        self.action[f.0][x]
    }

    pub fn action(&self, f: Arr) -> &[usize] {
        &self.action[f.0]
    }

    pub fn total_size(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    /// Same sizes and actions, labels ignored.
    pub fn same_shape(&self, other: &FinPresheaf) -> bool {
        same(&self.base, &other.base)
            && self.action == other.action
            && self.labels.iter().zip(&other.labels).all(|(a, b)| a.len() == b.len())
    }
}

/// The representable `y(c) = Hom(-, c)`.
pub fn yoneda(base: &Arc<FinCategory>, c: Obj) -> FinPresheaf {
    let b = &**base;
    let mut labels = Vec::with_capacity(b.object_count());
    let mut position = vec![usize::MAX; b.arrow_count()];
    for d in b.objects() {
        let hom = b.hom(d, c);
        for (i, &a) in hom.iter().enumerate() {
            position[a.0] = i;
        }
        labels.push(hom.iter().map(|&a| b.arr_name(a).to_string()).collect());
    }
    let action = b
        .arrows()
        .map(|f| b.hom(b.tgt(f), c).iter().map(|&g| position[b.comp(g, f).0]).collect())
        .collect();
    FinPresheaf { name: format!("y({})", b.obj_name(c)), base: base.clone(), labels, action }
}

pub fn yoneda_by_name(base: &Arc<FinCategory>, c: &str) -> Result<FinPresheaf, PresheafError> {
    let o = base.obj(c).ok_or_else(|| PresheafError::UnknownObject(c.to_string()))?;
    Ok(yoneda(base, o))
}

/// `P ∘ A^op`.
pub fn restrict_along(a: &FinFunctor, p: &FinPresheaf) -> Result<FinPresheaf, PresheafError> {
    if !same(a.target(), &p.base) {
        return Err(PresheafError::BaseMismatch);
    }
    let src = a.source();
    Ok(FinPresheaf {
        name: format!("{}*{}", a.name(), p.name),
        base: src.clone(),
        labels: src.objects().map(|d| p.labels[a.obj(d).0].clone()).collect(),
        action: src.arrows().map(|f| p.action[a.arr(f).0].clone()).collect(),
    })
}

/// A natural transformation between presheaves on a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMorphism {
    source: Arc<FinPresheaf>,
    target: Arc<FinPresheaf>,
    components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(
        source: Arc<FinPresheaf>,
        target: Arc<FinPresheaf>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self, PresheafError> {
        if !same(&source.base, &target.base) {
            return Err(PresheafError::BaseMismatch);
        }
        let b = &*source.base;
        for c in b.objects() {
            let comp = components.get(c.0).ok_or_else(|| PresheafError::NotNatural(b.obj_name(c).into()))?;
            if comp.len() != source.size(c) || comp.iter().any(|&y| y >= target.size(c)) {
                return Err(PresheafError::NotNatural(b.obj_name(c).into()));
            }
        }
        for f in b.arrows() {
            let (s, t) = (b.src(f), b.tgt(f));
            for x in 0..source.size(t) {
                if components[s.0][source.act(f, x)] != target.act(f, components[t.0][x]) {
                    return Err(PresheafError::NotNatural(b.arr_name(f).into()));
                }
            }
        }
        Ok(PresheafMorphism { source, target, components })
    }

    pub(crate) fn new_unchecked(source: Arc<FinPresheaf>, target: Arc<FinPresheaf>, components: Vec<Vec<usize>>) -> Self {
        PresheafMorphism { source, target, components }
    }

    pub fn identity(p: &Arc<FinPresheaf>) -> Self {
        let components = p.base.objects().map(|c| (0..p.size(c)).collect()).collect();
        PresheafMorphism { source: p.clone(), target: p.clone(), components }
    }

    /// The unique map out of the empty presheaf.
    pub fn from_empty(target: &Arc<FinPresheaf>) -> Self {
        let empty = Arc::new(FinPresheaf::empty(&target.base));
        let components = target.base.objects().map(|_| Vec::new()).collect();
        PresheafMorphism { source: empty, target: target.clone(), components }
    }

    pub fn source(&self) -> &Arc<FinPresheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinPresheaf> {
        &self.target
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.source.base
    }

    pub fn at(&self, c: Obj, x: usize) -> usize {
        self.components[c.0][x]
    }

    pub fn component(&self, c: Obj) -> &[usize] {
        &self.components[c.0]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PresheafMorphism) -> Result<PresheafMorphism, PresheafError> {
        if *first.target != *self.source {
            return Err(PresheafError::TargetMismatch);
        }
        let components = first
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&x| self.components[c][x]).collect())
            .collect();
        Ok(PresheafMorphism { source: first.source.clone(), target: self.target.clone(), components })
    }

    pub fn is_iso(&self) -> bool {
        self.source.base.objects().all(|c| {
            let comp = &self.components[c.0];
            if comp.len() != self.target.size(c) {
                return false;
            }
            let mut seen = vec![false; comp.len()];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_pointwise_surjective(&self) -> bool {
        self.source.base.objects().all(|c| {
            let mut hit = vec![false; self.target.size(c)];
            for &y in &self.components[c.0] {
                hit[y] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }
}

/// `y(u): y(a) → y(b)` by postcomposition with `u: a → b`.
pub fn yoneda_map(base: &Arc<FinCategory>, u: Arr, ya: &Arc<FinPresheaf>, yb: &Arc<FinPresheaf>) -> PresheafMorphism {
    let c = &**base;
    let (a, b) = (c.src(u), c.tgt(u));
    let components = c
        .objects()
        .map(|e| {
            let target = c.hom(e, b);
            c.hom(e, a).iter().map(|&g| target.iter().position(|&h| h == c.comp(u, g)).unwrap()).collect()
        })
        .collect();
    PresheafMorphism::new_unchecked(ya.clone(), yb.clone(), components)
}

/// The comparison `colim_i y(objs[i]) → y(apex)` induced by `legs[i]: objs[i] → apex`.
///
/// `arrs[k]` is the base arrow for shape arrow `k`; its endpoints must match `objs`.
pub fn representable_cocone(
    base: &Arc<FinCategory>,
    shape: &Arc<FinCategory>,
    objs: &[Obj],
    arrs: &[Arr],
    apex: Obj,
    legs: &[Arr],
) -> PresheafMorphism {
    let mut cache: std::collections::HashMap<Obj, Arc<FinPresheaf>> = std::collections::HashMap::new();
    let mut rep = |o: Obj| cache.entry(o).or_insert_with(|| Arc::new(yoneda(base, o))).clone();
    let objects: Vec<Arc<FinPresheaf>> = objs.iter().map(|&o| rep(o)).collect();
    let arrows = shape
        .arrows()
        .map(|a| yoneda_map(base, arrs[a.0], &objects[shape.src(a).0], &objects[shape.tgt(a).0]))
        .collect();
    let top = rep(apex);
    let diagram = Diagram { shape: shape.clone(), objects: objects.clone(), arrows };
    let colim = compute_colimit(base, &diagram).expect("representables share a base");
    let cocone: Vec<PresheafMorphism> =
        legs.iter().zip(&objects).map(|(&l, y)| yoneda_map(base, l, y, &top)).collect();
    colim.induced(&top, &cocone).expect("legs form a cocone")
}

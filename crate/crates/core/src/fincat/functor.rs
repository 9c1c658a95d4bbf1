use std::sync::Arc;

use thiserror::Error;

use super::category::{same, Arr, FinCategory, Obj};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("functor `{functor}` does not map `{name}`")]
    Unmapped { functor: String, name: String },

    #[error("functor `{functor}` maps to unknown `{name}`")]
    UnknownTarget { functor: String, name: String },

    /// Source/target, identity or composition preservation fails.
    #[error("functor `{functor}` breaks {law} at ({})", witness.join(", "))]
    LawViolation { functor: String, law: &'static str, witness: Vec<String> },

    #[error("`{0}` and `{1}` do not compose: target of the first is not the source of the second")]
    NotComposable(String, String),

    #[error("natural transformation `{name}`: {message}")]
    Transformation { name: String, message: String },
}

/// A functor between finite categories, stored as index maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    name: String,
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    obj_map: Vec<Obj>,
    arr_map: Vec<Arr>,
}

impl FinFunctor {
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        obj_map: Vec<Obj>,
        arr_map: Vec<Arr>,
    ) -> Result<Self, FunctorError> {
        let f = FinFunctor { name: name.into(), source, target, obj_map, arr_map };
        f.check()?;
        Ok(f)
    }

    /// Builds from name pairs; identities map to identities when omitted.
    pub fn from_names(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objs: &[(&str, &str)],
        arrs: &[(&str, &str)],
    ) -> Result<Self, FunctorError> {
        let name = name.into();
        let mut obj_map = vec![None; source.object_count()];
        for (x, y) in objs {
            let xo = source
                .obj(x)
                .ok_or_else(|| FunctorError::Unmapped { functor: name.clone(), name: x.to_string() })?;
            let yo = target
                .obj(y)
                .ok_or_else(|| FunctorError::UnknownTarget { functor: name.clone(), name: y.to_string() })?;
            obj_map[xo.0] = Some(yo);
        }
        let obj_map: Vec<Obj> = obj_map
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                o.ok_or_else(|| FunctorError::Unmapped {
                    functor: name.clone(),
                    name: source.obj_name(Obj(i)).to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        let mut arr_map = vec![None; source.arrow_count()];
        for (f, g) in arrs {
            let fa = source
                .arr(f)
                .ok_or_else(|| FunctorError::Unmapped { functor: name.clone(), name: f.to_string() })?;
            let ga = target
                .arr(g)
                .ok_or_else(|| FunctorError::UnknownTarget { functor: name.clone(), name: g.to_string() })?;
            arr_map[fa.0] = Some(ga);
        }
        for o in source.objects() {
            let slot = &mut arr_map[source.id(o).0];
            if slot.is_none() {
                *slot = Some(target.id(obj_map[o.0]));
            }
        }
        let arr_map: Vec<Arr> = arr_map
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                a.ok_or_else(|| FunctorError::Unmapped {
                    functor: name.clone(),
                    name: source.arr_name(Arr(i)).to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        FinFunctor::new(name, source, target, obj_map, arr_map)
    }

    fn check(&self) -> Result<(), FunctorError> {
        let (s, t) = (&*self.source, &*self.target);
        let violation = |law: &'static str, witness: Vec<String>| FunctorError::LawViolation {
            functor: self.name.clone(),
            law,
            witness,
        };
        if self.obj_map.len() != s.object_count() || self.arr_map.len() != s.arrow_count() {
            return Err(violation("totality", vec![]));
        }
        if self.obj_map.iter().any(|o| o.0 >= t.object_count()) || self.arr_map.iter().any(|a| a.0 >= t.arrow_count()) {
            return Err(violation("totality", vec![]));
        }
        for a in s.arrows() {
            let fa = self.arr_map[a.0];
            if t.src(fa) != self.obj_map[s.src(a).0] || t.tgt(fa) != self.obj_map[s.tgt(a).0] {
                return Err(violation("endpoint preservation", vec![s.arr_name(a).to_string()]));
            }
        }
        for o in s.objects() {
            if self.arr_map[s.id(o).0] != t.id(self.obj_map[o.0]) {
                return Err(violation("identity preservation", vec![s.obj_name(o).to_string()]));
            }
        }
        for f in s.arrows() {
            for &g in s.arrows_into(s.src(f)) {
                let lhs = self.arr_map[s.comp(f, g).0];
                let rhs = t.comp(self.arr_map[f.0], self.arr_map[g.0]);
                if lhs != rhs {
                    return Err(violation(
                        "composition preservation",
                        vec![s.arr_name(f).to_string(), s.arr_name(g).to_string()],
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn identity(cat: Arc<FinCategory>) -> Self {
        let obj_map = cat.objects().collect();
        let arr_map = cat.arrows().collect();
        FinFunctor { name: format!("id_{}", cat.name()), source: cat.clone(), target: cat, obj_map, arr_map }
    }

    /// The functor from the one-object category picking `o`.
    pub fn constant_from(one: Arc<FinCategory>, target: Arc<FinCategory>, o: Obj) -> Result<Self, FunctorError> {
        let obj_map = vec![o; one.object_count()];
        let arr_map = one.arrows().map(|_| target.id(o)).collect();
        FinFunctor::new(format!("const_{}", target.obj_name(o)), one, target, obj_map, arr_map)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinFunctor) -> Result<FinFunctor, FunctorError> {
        if !same(&first.target, &self.source) {
            return Err(FunctorError::NotComposable(first.name.clone(), self.name.clone()));
        }
        Ok(FinFunctor {
            name: format!("{}.{}", self.name, first.name),
            source: first.source.clone(),
            target: self.target.clone(),
            obj_map: first.obj_map.iter().map(|o| self.obj_map[o.0]).collect(),
            arr_map: first.arr_map.iter().map(|a| self.arr_map[a.0]).collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.obj_map[o.0]
    }

    pub fn arr(&self, a: Arr) -> Arr {
        self.arr_map[a.0]
    }

    pub fn obj_map(&self) -> &[Obj] {
        &self.obj_map
    }

    pub fn arr_map(&self) -> &[Arr] {
        &self.arr_map
    }

    pub fn is_identity_functor(&self) -> bool {
        same(&self.source, &self.target)
            && self.obj_map.iter().enumerate().all(|(i, o)| o.0 == i)
            && self.arr_map.iter().enumerate().all(|(i, a)| a.0 == i)
    }

    /// Name pairs `(x, F x)` and `(f, F f)`, identities omitted.
    pub fn name_pairs(&self) -> (NamePairs, NamePairs) {
        let objs = self
            .source
            .objects()
            .map(|o| (self.source.obj_name(o).to_string(), self.target.obj_name(self.obj(o)).to_string()))
            .collect();
        let arrs = self
            .source
            .non_identity_arrows()
            .map(|a| (self.source.arr_name(a).to_string(), self.target.arr_name(self.arr(a)).to_string()))
            .collect();
        (objs, arrs)
    }
}

/// `(source name, image name)` pairs.
pub type NamePairs = Vec<(String, String)>;

/// A natural transformation `F ⇒ G` between parallel functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTransform {
    name: String,
    source: FinFunctor,
    target: FinFunctor,
    components: Vec<Arr>,
}

impl NatTransform {
    pub fn new(
        name: impl Into<String>,
        source: FinFunctor,
        target: FinFunctor,
        components: Vec<Arr>,
    ) -> Result<Self, FunctorError> {
        let name = name.into();
        let err = |message: String| FunctorError::Transformation { name: name.clone(), message };
        if !same(&source.source, &target.source) || !same(&source.target, &target.target) {
            return Err(err("functors are not parallel".into()));
        }
        let (d, c) = (&*source.source, &*source.target);
        if components.len() != d.object_count() {
            return Err(err("one component per object is required".into()));
        }
        for o in d.objects() {
            let a = components[o.0];
            if a.0 >= c.arrow_count() || c.src(a) != source.obj(o) || c.tgt(a) != target.obj(o) {
                return Err(err(format!("component at `{}` has the wrong endpoints", d.obj_name(o))));
            }
        }
        for f in d.arrows() {
            let (s, t) = (d.src(f), d.tgt(f));
            if c.comp(target.arr(f), components[s.0]) != c.comp(components[t.0], source.arr(f)) {
                return Err(err(format!("naturality square at `{}` does not commute", d.arr_name(f))));
            }
        }
        Ok(NatTransform { name, source, target, components })
    }

    pub fn identity(f: &FinFunctor) -> Self {
        let components = f.source.objects().map(|o| f.target.id(f.obj(o))).collect();
        NatTransform { name: format!("1_{}", f.name), source: f.clone(), target: f.clone(), components }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &FinFunctor {
        &self.source
    }

    pub fn target(&self) -> &FinFunctor {
        &self.target
    }

    pub fn at(&self, o: Obj) -> Arr {
        self.components[o.0]
    }

    pub fn components(&self) -> &[Arr] {
        &self.components
    }

    pub fn is_iso(&self) -> bool {
        let c = &*self.source.target;
        self.components.iter().all(|&a| c.is_iso(a))
    }
}

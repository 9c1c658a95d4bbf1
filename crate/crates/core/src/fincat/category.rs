use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an object inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Obj(pub usize);

/// Index of an arrow inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arr(pub usize);

/// Category law that a candidate table can break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Law {
    LeftIdentity,
    RightIdentity,
    Associativity,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::LeftIdentity => "left identity",
            Law::RightIdentity => "right identity",
            Law::Associativity => "associativity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    /// Dangling identifier, duplicate entry, or a composable pair without a composite.
    #[error("malformed table: {message}")]
    MalformedTable { message: String, arrows: Vec<String> },

    /// A composition law fails; `witness` lists the offending arrows in application order.
    #[error("{law} law violated by ({})", witness.join(", "))]
    LawViolation { law: Law, witness: Vec<String> },
}

impl CategoryError {
    fn malformed(message: impl Into<String>, arrows: &[&str]) -> Self {
        CategoryError::MalformedTable {
            message: message.into(),
            arrows: arrows.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Unvalidated category data, keyed by names.
///
/// `compositions` holds triples `(f, g, h)` meaning `f ∘ g = h`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub name: String,
    pub objects: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
    pub identities: Vec<(String, String)>,
    pub compositions: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ArrowData {
    name: String,
    src: Obj,
    tgt: Obj,
}

/// A validated finite category with a dense composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    arrows: Vec<ArrowData>,
    identities: Vec<Arr>,
    // comp[f * m + g] = f ∘ g when tgt(g) = src(f)
    comp: Vec<Option<Arr>>,
    homs: Vec<Vec<Arr>>,
    into: Vec<Vec<Arr>>,
    out_of: Vec<Vec<Arr>>,
    obj_index: HashMap<String, Obj>,
    arr_index: HashMap<String, Arr>,
}

/// Checks a raw table strictly: every identity composite must be present.
pub fn validate_category(raw: &RawCategory) -> Result<FinCategory, CategoryError> {
    let mut obj_index = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if obj_index.insert(o.clone(), Obj(i)).is_some() {
            return Err(CategoryError::malformed(format!("duplicate object `{o}`"), &[]));
        }
    }
    let mut arr_index = HashMap::new();
    let mut arrows = Vec::with_capacity(raw.arrows.len());
    for (i, (name, s, t)) in raw.arrows.iter().enumerate() {
        let src = *obj_index.get(s).ok_or_else(|| {
            CategoryError::malformed(format!("arrow `{name}` has unknown source `{s}`"), &[name])
        })?;
        let tgt = *obj_index.get(t).ok_or_else(|| {
            CategoryError::malformed(format!("arrow `{name}` has unknown target `{t}`"), &[name])
        })?;
        if arr_index.insert(name.clone(), Arr(i)).is_some() {
            return Err(CategoryError::malformed(format!("duplicate arrow `{name}`"), &[name]));
        }
        arrows.push(ArrowData { name: name.clone(), src, tgt });
    }
    let n = raw.objects.len();
    let m = arrows.len();

    let mut identities: Vec<Option<Arr>> = vec![None; n];
    for (o, a) in &raw.identities {
        let obj = *obj_index.get(o).ok_or_else(|| {
            CategoryError::malformed(format!("identity declared for unknown object `{o}`"), &[a])
        })?;
        let arr = *arr_index.get(a).ok_or_else(|| {
            CategoryError::malformed(format!("identity `{a}` is not a declared arrow"), &[a])
        })?;
        if arrows[arr.0].src != obj || arrows[arr.0].tgt != obj {
            return Err(CategoryError::malformed(
                format!("identity `{a}` of `{o}` is not an endomorphism of `{o}`"),
                &[a],
            ));
        }
        if identities[obj.0].replace(arr).is_some_and(|prev| prev != arr) {
            return Err(CategoryError::malformed(format!("object `{o}` has two identities"), &[a]));
        }
    }
    let identities: Vec<Arr> = identities
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or_else(|| {
                CategoryError::malformed(format!("object `{}` has no identity", raw.objects[i]), &[])
            })
        })
        .collect::<Result<_, _>>()?;

    let mut comp: Vec<Option<Arr>> = vec![None; m * m];
    for (f, g, h) in &raw.compositions {
        let lookup = |x: &String| {
            arr_index.get(x).copied().ok_or_else(|| {
                CategoryError::malformed(format!("composition mentions unknown arrow `{x}`"), &[x])
            })
        };
        let (fa, ga, ha) = (lookup(f)?, lookup(g)?, lookup(h)?);
        if arrows[ga.0].tgt != arrows[fa.0].src {
            return Err(CategoryError::malformed(
                format!("`{f} . {g}` is not a composable pair"),
                &[f, g],
            ));
        }
        if arrows[ha.0].src != arrows[ga.0].src || arrows[ha.0].tgt != arrows[fa.0].tgt {
            return Err(CategoryError::malformed(
                format!("`{f} . {g} = {h}` has the wrong endpoints"),
                &[f, g, h],
            ));
        }
        let slot = &mut comp[fa.0 * m + ga.0];
        if slot.is_some_and(|prev| prev != ha) {
            return Err(CategoryError::malformed(
                format!("`{f} . {g}` is given two different composites"),
                &[f, g],
            ));
        }
        *slot = Some(ha);
    }
    for f in 0..m {
        for g in 0..m {
            if arrows[g].tgt == arrows[f].src && comp[f * m + g].is_none() {
                let (fname, gname) = (&arrows[f].name, &arrows[g].name);
                return Err(CategoryError::malformed(
                    format!("missing composite for composable pair ({fname}, {gname})"),
                    &[fname, gname],
                ));
            }
        }
    }

    for f in 0..m {
        let s = arrows[f].src;
        let t = arrows[f].tgt;
        if comp[f * m + identities[s.0].0] != Some(Arr(f)) {
            return Err(CategoryError::LawViolation {
                law: Law::RightIdentity,
                witness: vec![arrows[f].name.clone(), arrows[identities[s.0].0].name.clone()],
            });
        }
        if comp[identities[t.0].0 * m + f] != Some(Arr(f)) {
            return Err(CategoryError::LawViolation {
                law: Law::LeftIdentity,
                witness: vec![arrows[identities[t.0].0].name.clone(), arrows[f].name.clone()],
            });
        }
    }
    for h in 0..m {
        for g in 0..m {
            let Some(hg) = comp[h * m + g] else { continue };
            for f in 0..m {
                let Some(gf) = comp[g * m + f] else { continue };
                if comp[hg.0 * m + f] != comp[h * m + gf.0] {
                    return Err(CategoryError::LawViolation {
                        law: Law::Associativity,
                        witness: vec![
                            arrows[h].name.clone(),
                            arrows[g].name.clone(),
                            arrows[f].name.clone(),
                        ],
                    });
                }
            }
        }
    }

    Ok(FinCategory::assemble(
        raw.name.clone(),
        raw.objects.clone(),
        arrows,
        identities,
        comp,
        obj_index,
        arr_index,
    ))
}

impl FinCategory {
    fn assemble(
        name: String,
        objects: Vec<String>,
        arrows: Vec<ArrowData>,
        identities: Vec<Arr>,
        comp: Vec<Option<Arr>>,
        obj_index: HashMap<String, Obj>,
        arr_index: HashMap<String, Arr>,
    ) -> Self {
        let n = objects.len();
        let mut homs = vec![Vec::new(); n * n];
        let mut into = vec![Vec::new(); n];
        let mut out_of = vec![Vec::new(); n];
        for (i, a) in arrows.iter().enumerate() {
            homs[a.src.0 * n + a.tgt.0].push(Arr(i));
            into[a.tgt.0].push(Arr(i));
            out_of[a.src.0].push(Arr(i));
        }
        FinCategory { name, objects, arrows, identities, comp, homs, into, out_of, obj_index, arr_index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + Clone {
        (0..self.objects.len()).map(Obj)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> + Clone {
        (0..self.arrows.len()).map(Arr)
    }

    pub fn non_identity_arrows(&self) -> impl Iterator<Item = Arr> + '_ {
        self.arrows().filter(move |&a| !self.is_identity(a))
    }

    pub fn obj_name(&self, o: Obj) -> &str {
        &self.objects[o.0]
    }

    pub fn arr_name(&self, a: Arr) -> &str {
        &self.arrows[a.0].name
    }

    pub fn obj(&self, name: &str) -> Option<Obj> {
        self.obj_index.get(name).copied()
    }

    pub fn arr(&self, name: &str) -> Option<Arr> {
        self.arr_index.get(name).copied()
    }

    pub fn src(&self, a: Arr) -> Obj {
        self.arrows[a.0].src
    }

    pub fn tgt(&self, a: Arr) -> Obj {
        self.arrows[a.0].tgt
    }

    pub fn id(&self, o: Obj) -> Arr {
        self.identities[o.0]
    }

    pub fn is_identity(&self, a: Arr) -> bool {
        self.identities[self.src(a).0] == a
    }

    /// `f ∘ g`, or `None` when the pair is not composable.
    pub fn compose(&self, f: Arr, g: Arr) -> Option<Arr> {
        self.comp[f.0 * self.arrows.len() + g.0]
    }

    /// `f ∘ g` for a pair known to be composable.
    pub fn comp(&self, f: Arr, g: Arr) -> Arr {
        self.compose(f, g).unwrap_or_else(|| {
            panic!("{} . {} is not composable in {}", self.arr_name(f), self.arr_name(g), self.name)
        })
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Arr] {
        &self.homs[a.0 * self.objects.len() + b.0]
    }

    pub fn arrows_into(&self, o: Obj) -> &[Arr] {
        &self.into[o.0]
    }

    pub fn arrows_from(&self, o: Obj) -> &[Arr] {
        &self.out_of[o.0]
    }

    pub fn inverse(&self, a: Arr) -> Option<Arr> {
        let (s, t) = (self.src(a), self.tgt(a));
        self.hom(t, s)
            .iter()
            .copied()
            .find(|&b| self.comp(a, b) == self.id(t) && self.comp(b, a) == self.id(s))
    }

    pub fn is_iso(&self, a: Arr) -> bool {
        self.inverse(a).is_some()
    }

    pub fn has_endomorphisms(&self) -> bool {
        self.non_identity_arrows().any(|a| self.src(a) == self.tgt(a))
    }

    /// Table data for this category; `validate_category` of the result reproduces it.
    pub fn to_raw(&self) -> RawCategory {
        let mut compositions = Vec::new();
        for f in self.arrows() {
            for &g in self.arrows_into(self.src(f)) {
                compositions.push((
                    self.arr_name(f).to_string(),
                    self.arr_name(g).to_string(),
                    self.arr_name(self.comp(f, g)).to_string(),
                ));
            }
        }
        RawCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| (a.name.clone(), self.objects[a.src.0].clone(), self.objects[a.tgt.0].clone()))
                .collect(),
            identities: self
                .objects()
                .map(|o| (self.obj_name(o).to_string(), self.arr_name(self.id(o)).to_string()))
                .collect(),
            compositions,
        }
    }

    /// Builds a category from index-level data; names must be unique.
    ///
    /// `comp(f, g)` is consulted only on composable pairs.
    pub fn from_parts(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<(String, Obj, Obj)>,
        identities: Vec<Arr>,
        mut comp: impl FnMut(Arr, Arr) -> Arr,
    ) -> Result<Self, CategoryError> {
        let m = arrows.len();
        let data: Vec<ArrowData> =
            arrows.into_iter().map(|(name, src, tgt)| ArrowData { name, src, tgt }).collect();
        let mut table = vec![None; m * m];
        for f in 0..m {
            for g in 0..m {
                if data[g].tgt == data[f].src {
                    table[f * m + g] = Some(comp(Arr(f), Arr(g)));
                }
            }
        }
        let obj_index = objects.iter().enumerate().map(|(i, o)| (o.clone(), Obj(i))).collect();
        let arr_index = data.iter().enumerate().map(|(i, a)| (a.name.clone(), Arr(i))).collect();
        let cat = FinCategory::assemble(name.into(), objects, data, identities, table, obj_index, arr_index);
        // Re-validate through the strict path so construction bugs surface as law violations.
        validate_category(&cat.to_raw())
    }

    /// Pretty form of an arrow with its endpoints, e.g. `f: a -> b`.
    pub fn describe(&self, a: Arr) -> String {
        format!("{}: {} -> {}", self.arr_name(a), self.obj_name(self.src(a)), self.obj_name(self.tgt(a)))
    }
}

impl fmt::Display for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} objects, {} arrows)", self.name, self.object_count(), self.arrow_count())
    }
}

/// Pointer equality with a structural fallback.
pub fn same(a: &std::sync::Arc<FinCategory>, b: &std::sync::Arc<FinCategory>) -> bool {
    std::sync::Arc::ptr_eq(a, b) || **a == **b
}

use std::collections::HashMap;

use super::category::{validate_category, CategoryError, FinCategory, RawCategory};

/// Assembles a category from generators, synthesizing identities and forced composites.
///
/// Identities are named `id_<object>`. A missing composite is filled only when
/// it follows from an identity law or is forced uniquely by associativity from
/// the declared composites; anything else is reported as missing.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    raw: RawCategory,
}

impl CategoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryBuilder { raw: RawCategory { name: name.into(), ..RawCategory::default() } }
    }

    pub fn object(mut self, name: impl Into<String>) -> Self {
        self.raw.objects.push(name.into());
        self
    }

    pub fn objects<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.raw.objects.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn arrow(mut self, name: impl Into<String>, src: impl Into<String>, tgt: impl Into<String>) -> Self {
        self.raw.arrows.push((name.into(), src.into(), tgt.into()));
        self
    }

    /// Declares `f ∘ g = h`.
    pub fn compose(mut self, f: impl Into<String>, g: impl Into<String>, h: impl Into<String>) -> Self {
        self.raw.compositions.push((f.into(), g.into(), h.into()));
        self
    }

    pub fn build(self) -> Result<FinCategory, CategoryError> {
        validate_category(&complete(self.raw)?)
    }
}

/// Adds identities, identity composites and associativity-forced composites.
pub fn complete(mut raw: RawCategory) -> Result<RawCategory, CategoryError> {
    let declared_ids: HashMap<String, String> = raw.identities.iter().cloned().collect();
    for o in raw.objects.clone() {
        if declared_ids.contains_key(&o) {
            continue;
        }
        let id = format!("id_{o}");
        match raw.arrows.iter().find(|(n, _, _)| *n == id) {
            Some((_, s, t)) if *s == o && *t == o => {}
            Some(_) => {
                return Err(CategoryError::MalformedTable {
                    message: format!("`{id}` is reserved for the identity of `{o}`"),
                    arrows: vec![id],
                })
            }
            None => raw.arrows.push((id.clone(), o.clone(), o.clone())),
        }
        raw.identities.push((o, id));
    }

    let arrow_pos: HashMap<&str, usize> =
        raw.arrows.iter().enumerate().map(|(i, (n, _, _))| (n.as_str(), i)).collect();
    // Dangling names are left to validate_category, which reports them precisely.
    if raw.compositions.iter().any(|(f, g, h)| {
        !arrow_pos.contains_key(f.as_str()) || !arrow_pos.contains_key(g.as_str()) || !arrow_pos.contains_key(h.as_str())
    }) || raw.arrows.iter().any(|(_, s, t)| !raw.objects.contains(s) || !raw.objects.contains(t))
    {
        return Ok(raw);
    }
    let m = raw.arrows.len();
    let src: Vec<&str> = raw.arrows.iter().map(|(_, s, _)| s.as_str()).collect();
    let tgt: Vec<&str> = raw.arrows.iter().map(|(_, _, t)| t.as_str()).collect();
    let mut table: Vec<Option<usize>> = vec![None; m * m];
    for (f, g, h) in &raw.compositions {
        let (f, g, h) = (arrow_pos[f.as_str()], arrow_pos[g.as_str()], arrow_pos[h.as_str()]);
        if tgt[g] == src[f] {
            table[f * m + g] = Some(h);
        }
    }
    let is_id: Vec<bool> = {
        let ids: Vec<usize> = raw.identities.iter().filter_map(|(_, a)| arrow_pos.get(a.as_str()).copied()).collect();
        (0..m).map(|a| ids.contains(&a)).collect()
    };
    for f in 0..m {
        for g in 0..m {
            if tgt[g] != src[f] || table[f * m + g].is_some() {
                continue;
            }
            if is_id[f] {
                table[f * m + g] = Some(g);
            } else if is_id[g] {
                table[f * m + g] = Some(f);
            }
        }
    }

    loop {
        let mut progress = false;
        for f in 0..m {
            for g in 0..m {
                if tgt[g] != src[f] || table[f * m + g].is_some() {
                    continue;
                }
                let mut candidates = Vec::new();
                // f = a ∘ b  ⇒  f ∘ g = a ∘ (b ∘ g)
                for a in 0..m {
                    for b in 0..m {
                        if is_id[a] || is_id[b] || table[a * m + b] != Some(f) {
                            continue;
                        }
                        if let Some(bg) = table[b * m + g] {
                            if let Some(r) = table[a * m + bg] {
                                candidates.push(r);
                            }
                        }
                    }
                }
                // g = a ∘ b  ⇒  f ∘ g = (f ∘ a) ∘ b
                for a in 0..m {
                    for b in 0..m {
                        if is_id[a] || is_id[b] || table[a * m + b] != Some(g) {
                            continue;
                        }
                        if let Some(fa) = table[f * m + a] {
                            if let Some(r) = table[fa * m + b] {
                                candidates.push(r);
                            }
                        }
                    }
                }
                candidates.sort_unstable();
                candidates.dedup();
                match candidates.as_slice() {
                    [] => {}
                    [r] => {
                        table[f * m + g] = Some(*r);
                        progress = true;
                    }
                    _ => {
                        return Err(CategoryError::MalformedTable {
                            message: format!(
                                "composite of ({}, {}) is forced to several different arrows",
                                raw.arrows[f].0, raw.arrows[g].0
                            ),
                            arrows: vec![raw.arrows[f].0.clone(), raw.arrows[g].0.clone()],
                        })
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }

    raw.compositions = Vec::new();
    for f in 0..m {
        for g in 0..m {
            if let Some(h) = table[f * m + g] {
                raw.compositions.push((raw.arrows[f].0.clone(), raw.arrows[g].0.clone(), raw.arrows[h].0.clone()));
            }
        }
    }
    Ok(raw)
}

/// Declared composites that are not identity composites, for compact serialization.
pub fn essential_compositions(cat: &FinCategory) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for f in cat.non_identity_arrows() {
        for &g in cat.arrows_into(cat.src(f)) {
            if cat.is_identity(g) {
                continue;
            }
            let h = cat.comp(f, g);
            out.push((cat.arr_name(f).to_string(), cat.arr_name(g).to_string(), cat.arr_name(h).to_string()));
        }
    }
    out
}

use std::sync::Arc;

use itertools::Itertools;

use crate::fincat::{Arr, FinCategory};

use super::{FinPresheaf, PresheafMorphism};

/// Every presheaf on `base` with at most `max_size` elements per object, one per
/// choice of sizes and action tables (not up to isomorphism).
///
/// Actions are chosen freely on a generating set of arrows; the rest are forced
/// by functoriality and checked.
pub fn enumerate_presheaves(base: &Arc<FinCategory>, max_size: usize) -> Vec<FinPresheaf> {
    let c = &**base;
    let generators = generating_arrows(c);
    let mut out = Vec::new();
    let sizes = (0..c.object_count()).map(|_| 0..=max_size).multi_cartesian_product();
    for sizes in sizes {
        let tables: Vec<Vec<Vec<usize>>> = generators
            .iter()
            .map(|&f| {
                let (s, t) = (sizes[c.src(f).0], sizes[c.tgt(f).0]);
                (0..t).map(|_| 0..s).multi_cartesian_product().collect()
            })
            .collect();
        if tables.iter().any(|t| t.is_empty()) {
            continue;
        }
        let combos: Box<dyn Iterator<Item = Vec<&Vec<usize>>>> = if generators.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(tables.iter().map(|t| t.iter()).multi_cartesian_product())
        };
        for combo in combos {
            if let Some(p) = extend(base, &sizes, &generators, &combo) {
                out.push(p.with_name(format!("P{}", out.len())));
            }
        }
    }
    out
}

/// Non-identity arrows, each not a composite of those chosen before it.
fn generating_arrows(c: &FinCategory) -> Vec<Arr> {
    let mut reached: Vec<bool> = c.arrows().map(|a| c.is_identity(a)).collect();
    let mut gens = Vec::new();
    for a in c.non_identity_arrows() {
        if reached[a.0] {
            continue;
        }
        gens.push(a);
        reached[a.0] = true;
        loop {
            let mut progress = false;
            let current: Vec<Arr> = c.arrows().filter(|f| reached[f.0]).collect();
            for f in current {
                for &g in c.arrows_into(c.src(f)) {
                    let fg = c.comp(f, g);
                    if reached[g.0] && !reached[fg.0] {
                        reached[fg.0] = true;
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
    }
    gens
}

/// Fills in the actions forced by the generators, if consistent.
fn extend(base: &Arc<FinCategory>, sizes: &[usize], generators: &[Arr], combo: &[&Vec<usize>]) -> Option<FinPresheaf> {
    let c = &**base;
    let mut action: Vec<Option<Vec<usize>>> = vec![None; c.arrow_count()];
    for o in c.objects() {
        action[c.id(o).0] = Some((0..sizes[o.0]).collect());
    }
    for (&f, t) in generators.iter().zip(combo) {
        action[f.0] = Some((*t).clone());
    }
    loop {
        let mut progress = false;
        for f in c.arrows() {
            for &g in c.arrows_into(c.src(f)) {
                let fg = c.comp(f, g);
                if action[fg.0].is_some() {
                    continue;
                }
                if let (Some(af), Some(ag)) = (&action[f.0], &action[g.0]) {
                    action[fg.0] = Some(af.iter().map(|&x| ag[x]).collect());
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    let action: Option<Vec<Vec<usize>>> = action.into_iter().collect();
    let labels = sizes.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect();
    FinPresheaf::new("P", base.clone(), labels, action?).ok()
}

/// Every natural transformation `p → q`.
pub fn enumerate_morphisms(p: &Arc<FinPresheaf>, q: &Arc<FinPresheaf>) -> Vec<PresheafMorphism> {
    let c = p.base();
    let per_object: Vec<Vec<Vec<usize>>> = c
        .objects()
        .map(|o| (0..p.size(o)).map(|_| 0..q.size(o)).multi_cartesian_product().collect())
        .collect();
    if per_object.iter().any(|v| v.is_empty()) {
        return Vec::new();
    }
    per_object
        .iter()
        .map(|v| v.iter())
        .multi_cartesian_product()
        .filter_map(|comps| PresheafMorphism::new(p.clone(), q.clone(), comps.into_iter().cloned().collect()).ok())
        .collect()
}

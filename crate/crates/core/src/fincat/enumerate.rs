//! Deterministic enumeration of small categories, functors and strict indexed categories.

use std::sync::Arc;

use itertools::Itertools;

use super::category::{Arr, FinCategory, Obj};
use super::functor::FinFunctor;
use super::indexed::IndexedCategory;
use super::iso::is_isomorphic;

const OBJECT_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "o"];
const ARROW_NAMES: [&str; 10] = ["f", "g", "h", "k", "l", "m", "n", "q", "r", "s"];

fn object_name(i: usize) -> String {
    if i < 5 {
        OBJECT_NAMES[i].to_string()
    } else {
        format!("o{i}")
    }
}

fn arrow_name(i: usize) -> String {
    ARROW_NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("f{i}"))
}

/// Categories with exactly `objects` objects and at most `max_arrows`
/// non-identity arrows, one per isomorphism class.
///
/// Endomorphisms other than identities are excluded unless `endomorphisms` is set.
pub fn enumerate_categories(objects: usize, max_arrows: usize, endomorphisms: bool) -> Vec<Arc<FinCategory>> {
    let n = objects;
    let cells: Vec<(usize, usize)> =
        (0..n).cartesian_product(0..n).filter(|&(i, j)| endomorphisms || i != j).collect();
    let mut out: Vec<Arc<FinCategory>> = Vec::new();
    let mut matrices = Vec::new();
    let mut counts = vec![0usize; cells.len()];
    collect_matrices(&cells, 0, max_arrows, &mut counts, &mut matrices);
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    for counts in matrices {
        let mut hom = vec![0usize; n * n];
        for (k, &(i, j)) in cells.iter().enumerate() {
            hom[i * n + j] = counts[k];
        }
        let canonical = perms.iter().all(|p| {
            let permuted: Vec<usize> = (0..n * n).map(|x| hom[p[x / n] * n + p[x % n]]).collect();
            hom <= permuted
        });
        if !canonical {
            continue;
        }
        let start = out.len();
        for cat in categories_with_homs(n, &hom) {
            if out[start..].iter().all(|c| !is_isomorphic(c, &cat)) {
                out.push(Arc::new(cat));
            }
        }
    }
    for (i, c) in out.iter_mut().enumerate() {
        let named = (**c).clone().with_name(format!("C{n}_{i}"));
        *c = Arc::new(named);
    }
    out
}

fn collect_matrices(cells: &[(usize, usize)], k: usize, budget: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k == cells.len() {
        out.push(counts.clone());
        return;
    }
    for c in 0..=budget {
        counts[k] = c;
        collect_matrices(cells, k + 1, budget - c, counts, out);
    }
    counts[k] = 0;
}

/// All composition tables over a fixed hom-count matrix (not iso-reduced).
fn categories_with_homs(n: usize, hom: &[usize]) -> Vec<FinCategory> {
    let mut names: Vec<String> = Vec::new();
    let mut ends: Vec<(Obj, Obj)> = Vec::new();
    for o in 0..n {
        names.push(format!("id_{}", object_name(o)));
        ends.push((Obj(o), Obj(o)));
    }
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            for _ in 0..hom[i * n + j] {
                names.push(arrow_name(k));
                ends.push((Obj(i), Obj(j)));
                k += 1;
            }
        }
    }
    let m = names.len();
    let homs = |a: Obj, b: Obj| -> Vec<usize> { (0..m).filter(|&x| ends[x] == (a, b)).collect() };
    let mut table: Vec<Option<usize>> = vec![None; m * m];
    let mut pairs = Vec::new();
    for f in 0..m {
        for g in 0..m {
            if ends[g].1 != ends[f].0 {
                continue;
            }
            if f < n {
                table[f * m + g] = Some(g);
            } else if g < n {
                table[f * m + g] = Some(f);
            } else {
                pairs.push((f, g));
            }
        }
    }
    let choices: Vec<Vec<usize>> = pairs.iter().map(|&(f, g)| homs(ends[g].0, ends[f].1)).collect();
    let mut results = Vec::new();
    fill(&pairs, &choices, 0, m, &ends, &mut table, &mut |table| {
        let objects = (0..n).map(object_name).collect();
        let arrows = (0..m).map(|x| (names[x].clone(), ends[x].0, ends[x].1)).collect();
        let ids = (0..n).map(Arr).collect();
        if let Ok(c) = FinCategory::from_parts("C", objects, arrows, ids, |f, g| Arr(table[f.0 * m + g.0].unwrap())) {
            results.push(c);
        }
    });
    results
}

fn fill(
    pairs: &[(usize, usize)],
    choices: &[Vec<usize>],
    k: usize,
    m: usize,
    ends: &[(Obj, Obj)],
    table: &mut Vec<Option<usize>>,
    emit: &mut dyn FnMut(&[Option<usize>]),
) {
    if k == pairs.len() {
        emit(table);
        return;
    }
    let (f, g) = pairs[k];
    for &h in &choices[k] {
        table[f * m + g] = Some(h);
        if associative_so_far(m, ends, table) {
            fill(pairs, choices, k + 1, m, ends, table, emit);
        }
    }
    table[f * m + g] = None;
}

fn associative_so_far(m: usize, ends: &[(Obj, Obj)], table: &[Option<usize>]) -> bool {
    for x in 0..m {
        for y in 0..m {
            if ends[y].1 != ends[x].0 {
                continue;
            }
            let Some(xy) = table[x * m + y] else { continue };
            for z in 0..m {
                if ends[z].1 != ends[y].0 {
                    continue;
                }
                let Some(yz) = table[y * m + z] else { continue };
                if let (Some(l), Some(r)) = (table[xy * m + z], table[x * m + yz]) {
                    if l != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Every functor `source → target`.
pub fn enumerate_functors(source: &Arc<FinCategory>, target: &Arc<FinCategory>) -> Vec<FinFunctor> {
    let n = source.object_count();
    let mut out = Vec::new();
    if n > 0 && target.object_count() == 0 {
        return out;
    }
    let obj_maps = (0..n).map(|_| target.objects()).multi_cartesian_product();
    let obj_maps: Box<dyn Iterator<Item = Vec<Obj>>> =
        if n == 0 { Box::new(std::iter::once(Vec::new())) } else { Box::new(obj_maps) };
    let order: Vec<Arr> = source.non_identity_arrows().collect();
    for obj_map in obj_maps {
        let mut arr_map: Vec<Option<Arr>> = vec![None; source.arrow_count()];
        for o in source.objects() {
            arr_map[source.id(o).0] = Some(target.id(obj_map[o.0]));
        }
        functor_arrows(source, target, &obj_map, &order, 0, &mut arr_map, &mut |arr_map| {
            let f = FinFunctor::new(
                format!("F{}", out.len()),
                source.clone(),
                target.clone(),
                obj_map.clone(),
                arr_map.iter().map(|a| a.unwrap()).collect(),
            );
            if let Ok(f) = f {
                out.push(f);
            }
        });
    }
    out
}

fn functor_arrows(
    s: &FinCategory,
    t: &FinCategory,
    obj_map: &[Obj],
    order: &[Arr],
    k: usize,
    arr_map: &mut Vec<Option<Arr>>,
    emit: &mut dyn FnMut(&[Option<Arr>]),
) {
    if k == order.len() {
        emit(arr_map);
        return;
    }
    let a = order[k];
    for &b in t.hom(obj_map[s.src(a).0], obj_map[s.tgt(a).0]) {
        arr_map[a.0] = Some(b);
        let ok = s.arrows().all(|f| {
            s.arrows_into(s.src(f)).iter().all(|&g| match (arr_map[f.0], arr_map[g.0], arr_map[s.comp(f, g).0]) {
                (Some(x), Some(y), Some(z)) => t.comp(x, y) == z,
                _ => true,
            })
        });
        if ok {
            functor_arrows(s, t, obj_map, order, k + 1, arr_map, emit);
        }
    }
    arr_map[a.0] = None;
}

/// Strict indexed categories over `base` whose fibers are drawn from `fibers`.
pub fn enumerate_indexed(base: &Arc<FinCategory>, fibers: &[Arc<FinCategory>]) -> Vec<IndexedCategory> {
    let mut out = Vec::new();
    let n = base.object_count();
    if fibers.is_empty() && n > 0 {
        return out;
    }
    let assignments: Box<dyn Iterator<Item = Vec<usize>>> = if n == 0 {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new((0..n).map(|_| 0..fibers.len()).multi_cartesian_product())
    };
    let arrows: Vec<Arr> = base.non_identity_arrows().collect();
    for assign in assignments {
        let fib: Vec<Arc<FinCategory>> = assign.iter().map(|&i| fibers[i].clone()).collect();
        let options: Vec<Vec<FinFunctor>> = arrows
            .iter()
            .map(|&f| enumerate_functors(&fib[base.tgt(f).0], &fib[base.src(f).0]))
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let combos: Box<dyn Iterator<Item = Vec<&FinFunctor>>> = if arrows.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(options.iter().map(|o| o.iter()).multi_cartesian_product())
        };
        for combo in combos {
            let transport: Vec<FinFunctor> = base
                .arrows()
                .map(|a| match arrows.iter().position(|&x| x == a) {
                    Some(i) => combo[i].clone(),
                    None => FinFunctor::identity(fib[base.src(a).0].clone()),
                })
                .collect();
            let name = format!("I{}", out.len());
            if let Ok(ix) = IndexedCategory::new(name, base.clone(), fib.clone(), transport) {
                out.push(ix);
            }
        }
    }
    out
}

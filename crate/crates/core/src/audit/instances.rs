use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::{category_block, functor_block, serialize_blocks, site_block, topology_block, Block};
use crate::fincat::enumerate::{enumerate_categories, enumerate_functors, enumerate_indexed};
use crate::fincat::{grothendieck_construction, FinCategory, FinFunctor, GrothendieckFibration};
use crate::sites::{enumerate_topologies_capped, GrothendieckTopology};

/// Size limits for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Objects of a base (or standalone) category.
    pub max_objects: usize,
    /// Non-identity arrows of a base category.
    pub max_arrows: usize,
    /// Objects of each fiber of a generated fibration.
    pub max_fiber_objects: usize,
    /// Topologies kept per category; beyond it a seeded sample is taken.
    pub max_topologies: usize,
    /// Whether non-identity endomorphisms may appear in base categories.
    pub endomorphisms: bool,
    /// Elements per object of a generated presheaf.
    pub max_elements: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_objects: 2, max_arrows: 2, max_fiber_objects: 2, max_topologies: 256, endomorphisms: true, max_elements: 1 }
    }
}

impl Bounds {
    pub fn contains(&self, other: &Bounds) -> bool {
        other.max_objects <= self.max_objects
            && other.max_arrows <= self.max_arrows
            && other.max_fiber_objects <= self.max_fiber_objects
            && other.max_elements <= self.max_elements
            && (self.endomorphisms || !other.endomorphisms)
    }
}

/// Categories with `1..=max_objects` objects, one per isomorphism class.
pub fn categories(max_objects: usize, max_arrows: usize, endomorphisms: bool) -> Vec<Arc<FinCategory>> {
    (1..=max_objects).flat_map(|n| enumerate_categories(n, max_arrows, endomorphisms)).collect()
}

/// Fiber candidates: categories with at most one non-identity arrow.
pub fn fiber_categories(max_objects: usize) -> Vec<Arc<FinCategory>> {
    categories(max_objects, 1, false)
}

/// Whether `c` fits inside `b` as a base category.
pub fn base_fits(c: &FinCategory, b: &Bounds) -> bool {
    c.object_count() <= b.max_objects
        && c.arrow_count() - c.object_count() <= b.max_arrows
        && (b.endomorphisms || !c.has_endomorphisms())
}

/// All topologies on `c`, or a seeded sample of `cap` of them when there are more.
///
/// The trivial topology is always kept.
pub fn topologies(c: &Arc<FinCategory>, cap: usize, seed: u64) -> Vec<Arc<GrothendieckTopology>> {
    let all = enumerate_topologies_capped(c, cap.saturating_mul(8).max(cap));
    let picked: Vec<GrothendieckTopology> = if all.len() <= cap {
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fingerprint(c));
        let mut idx = sample(&mut rng, all.len() - 1, cap.saturating_sub(1)).into_vec();
        idx.sort_unstable();
        std::iter::once(all[0].clone()).chain(idx.into_iter().map(|i| all[i + 1].clone())).collect()
    };
    picked.into_iter().enumerate().map(|(i, t)| Arc::new(t.with_name(format!("T{i}")))).collect()
}

/// A stable hash of a category's shape, for per-category seeds.
fn fingerprint(c: &FinCategory) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (a, s, t) in c.to_raw().arrows {
        for b in a.bytes().chain(s.bytes()).chain(t.bytes()) {
            h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Whether every fiber of `g` has at most `b.max_fiber_objects` objects and its base fits `b`.
pub fn fibration_fits(g: &GrothendieckFibration, b: &Bounds) -> bool {
    base_fits(g.indexed.base(), b) && g.indexed.fibers().iter().all(|f| f.object_count() <= b.max_fiber_objects)
}

/// Grothendieck constructions over every base within `b`, with fibers of at most
/// `b.max_fiber_objects` objects.
pub fn fibrations(b: &Bounds) -> Vec<GrothendieckFibration> {
    let fibers = fiber_categories(b.max_fiber_objects);
    categories(b.max_objects, b.max_arrows, b.endomorphisms)
        .iter()
        .flat_map(|base| enumerate_indexed(base, &fibers))
        .map(|ix| grothendieck_construction(&ix))
        .collect()
}

/// A functor with topologies on both ends, not yet checked to be a comorphism.
#[derive(Clone, Debug)]
pub struct SiteInstance {
    pub p: FinFunctor,
    pub k: Arc<GrothendieckTopology>,
    pub j: Arc<GrothendieckTopology>,
}

impl SiteInstance {
    pub fn label(&self) -> String {
        format!(
            "{} -> {} via {} [{}; {}]",
            self.p.source().name(),
            self.p.target().name(),
            self.p.name(),
            self.k.name(),
            self.j.name()
        )
    }

    /// Object and non-identity arrow counts of both ends.
    pub fn shape(&self) -> String {
        let size = |c: &FinCategory| format!("{}/{}", c.object_count(), c.arrow_count() - c.object_count());
        format!("{} -> {}", size(self.p.source()), size(self.p.target()))
    }

    pub fn blocks(&self) -> Vec<Block> {
        vec![
            category_block("D", self.p.source()),
            category_block("C", self.p.target()),
            functor_block("p", "D", "C", &self.p),
            topology_block("K", "D", &self.k),
            topology_block("J", "C", &self.j),
            site_block("S", "p", "K", "J"),
        ]
    }

    pub fn document(&self) -> String {
        serialize_blocks(&self.blocks())
    }
}

/// Deterministic stream of instance documents within `bounds`: categories,
/// then categories with topologies, then fibrations with a base topology.
///
/// Identical `(bounds, seed)` give identical streams.
pub fn enumerate_instances(bounds: Bounds, seed: u64) -> impl Iterator<Item = String> {
    let cats = categories(bounds.max_objects, bounds.max_arrows, bounds.endomorphisms);
    let plain = cats.clone().into_iter().map(|c| serialize_blocks(&[category_block("C", &c)]));
    let sited = cats.into_iter().flat_map(move |c| {
        topologies(&c, bounds.max_topologies, seed)
            .into_iter()
            .map(move |t| serialize_blocks(&[category_block("C", &c), topology_block("J", "C", &t)]))
    });
    let fibred = fibrations(&bounds).into_iter().flat_map(move |g| {
        let base = g.indexed.base().clone();
        topologies(&base, bounds.max_topologies, seed).into_iter().map(move |j| {
            serialize_blocks(&[
                category_block("C", &base),
                category_block("D", &g.total),
                functor_block("p", "D", "C", &g.projection),
                topology_block("J", "C", &j),
            ])
        })
    });
    plain.chain(sited).chain(fibred)
}

/// Every functor between categories of `cats`, paired with every pair of topologies,
/// restricted to comorphisms by the caller.
pub fn functor_sites(cats: &[Arc<FinCategory>], max_topologies: usize, seed: u64) -> Vec<SiteInstance> {
    let tops: Vec<Vec<Arc<GrothendieckTopology>>> = cats.iter().map(|c| topologies(c, max_topologies, seed)).collect();
    let mut out = Vec::new();
    for (ci, c) in cats.iter().enumerate() {
        for (di, d) in cats.iter().enumerate() {
            for (n, p) in enumerate_functors(d, c).into_iter().enumerate() {
                let p = p.with_name(format!("F{n}"));
                for k in &tops[di] {
                    for j in &tops[ci] {
                        out.push(SiteInstance { p: p.clone(), k: k.clone(), j: j.clone() });
                    }
                }
            }
        }
    }
    out
}

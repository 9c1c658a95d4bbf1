use crate::fibration::{is_pullback_square, pullback};
use crate::fincat::Arr;
use crate::report::CheckReport;
use crate::sites::Sieve;

use super::{minimal_covering_family, LocalFibrationError, LocalSite};

/// Every `f: c → p(d)` is locally the image of locally cartesian arrows into `d`.
pub fn is_local_fibration(ls: &LocalSite) -> CheckReport {
    let (d, c) = (&**ls.total(), &**ls.base());
    let p = ls.p();
    let name = "local fibration";
    for x in d.objects() {
        for &f in c.arrows_into(p.obj(x)) {
            let cod = c.src(f);
            let candidates: Vec<Arr> = c
                .arrows_into(cod)
                .iter()
                .copied()
                .filter(|&fi| {
                    let ffi = c.comp(f, fi);
                    d.objects().filter(|&xi| p.obj(xi) == c.src(fi)).any(|xi| {
                        d.hom(xi, x).iter().any(|&lift| p.arr(lift) == ffi && ls.is_loccart(lift))
                    })
                })
                .collect();
            let sieve = Sieve::generated(c, cod, candidates);
            if !ls.j().covers(&sieve) {
                return CheckReport::fail(name, "an arrow has no local family of locally cartesian lifts")
                    .with("arrow", c.arr_name(f))
                    .with("object", d.obj_name(x))
                    .with("sieve", sieve.display(c));
            }
        }
    }
    CheckReport::pass(name, format!("{} is a local fibration", p.name()))
}

/// One member `(v, f̂, a, s)` of a local factorization of `f: d' → d`.
///
/// `f∘v = f̂∘a`, `p(f)∘s = p(f̂)` and `p(v) = s∘p(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorPiece {
    /// `v: d'_i → d'` upstairs.
    pub cover: Arr,
    /// `p(v)`.
    pub base_cover: Arr,
    /// `f̂: d_i → d`, locally cartesian.
    pub loccart: Arr,
    /// `a: d'_i → d_i`.
    pub connector: Arr,
    /// `s: p(d_i) → p(d')`.
    pub section: Arr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactorization {
    pub arrow: Arr,
    pub pieces: Vec<FactorPiece>,
}

impl LocalFactorization {
    /// Re-checks every equation, every local-cartesian flag and the covering condition.
    pub fn verify(&self, ls: &LocalSite) -> CheckReport {
        let (d, c) = (&**ls.total(), &**ls.base());
        let p = ls.p();
        let f = self.arrow;
        let name = "local factorization";
        for pc in &self.pieces {
            let ok = d.comp(f, pc.cover) == d.comp(pc.loccart, pc.connector)
                && c.comp(p.arr(f), pc.section) == p.arr(pc.loccart)
                && p.arr(pc.cover) == c.comp(pc.section, p.arr(pc.connector))
                && pc.base_cover == p.arr(pc.cover);
            if !ok {
                return CheckReport::fail(name, "a piece does not commute").with("cover", d.arr_name(pc.cover));
            }
            if !super::loccart_combinatorial(ls, pc.loccart).passed {
                return CheckReport::fail(name, "a factor is not locally cartesian").with("factor", d.arr_name(pc.loccart));
            }
        }
        let sieve = Sieve::generated(d, d.src(f), self.pieces.iter().map(|pc| pc.cover).collect::<Vec<_>>());
        if !ls.k().covers(&sieve) {
            return CheckReport::fail(name, "the covers do not generate a covering sieve").with("sieve", sieve.display(d));
        }
        CheckReport::pass(name, format!("{} pieces for {}", self.pieces.len(), d.arr_name(f)))
    }
}

/// Locally factors `f` through locally cartesian arrows.
pub fn local_factorization(ls: &LocalSite, f: Arr) -> Result<LocalFactorization, LocalFibrationError> {
    let (d, c) = (&**ls.total(), &**ls.base());
    let p = ls.p();
    let (d1, d0) = (d.src(f), d.tgt(f));
    let mut found = Vec::new();
    for &v in d.arrows_into(d1) {
        let fv = d.comp(f, v);
        let piece = d.objects().find_map(|di| {
            d.hom(di, d0).iter().filter(|&&fh| ls.is_loccart(fh)).find_map(|&fh| {
                d.hom(d.src(v), di).iter().filter(|&&a| d.comp(fh, a) == fv).find_map(|&a| {
                    c.hom(p.obj(di), p.obj(d1))
                        .iter()
                        .find(|&&s| c.comp(p.arr(f), s) == p.arr(fh) && p.arr(v) == c.comp(s, p.arr(a)))
                        .map(|&s| FactorPiece { cover: v, base_cover: p.arr(v), loccart: fh, connector: a, section: s })
                })
            })
        });
        if let Some(pc) = piece {
            found.push(pc);
        }
    }
    let covers: Vec<Arr> = found.iter().map(|pc| pc.cover).collect();
    let family = minimal_covering_family(d, ls.k(), d1, &covers)
        .ok_or_else(|| LocalFibrationError::SearchExhausted(d.arr_name(f).into()))?;
    let pieces = found.into_iter().filter(|pc| family.contains(&pc.cover)).collect();
    Ok(LocalFactorization { arrow: f, pieces })
}

/// Pullbacks of `f` along some covering family are locally cartesian.
pub fn is_k_cartesian(ls: &LocalSite, f: Arr) -> Result<CheckReport, LocalFibrationError> {
    let (d, c) = (&**ls.total(), &**ls.base());
    let p = ls.p();
    let d0 = d.tgt(f);
    let mut good = Vec::new();
    for &u in d.arrows_into(d0) {
        let sq = pullback(d, f, u).ok_or_else(|| LocalFibrationError::MissingPullback {
            arrow: d.arr_name(f).into(),
            along: d.arr_name(u).into(),
        })?;
        if !is_pullback_square(c, p.arr(f), p.arr(u), p.arr(sq.left), p.arr(sq.right)) {
            return Err(LocalFibrationError::Shape(format!(
                "p does not preserve the pullback of {} along {}",
                d.arr_name(f),
                d.arr_name(u)
            )));
        }
        if ls.is_loccart(sq.right) {
            good.push(u);
        }
    }
    let name = "K-cartesian";
    Ok(match minimal_covering_family(d, ls.k(), d0, &good) {
        Some(family) => CheckReport::pass(name, format!("{} is {}-cartesian", d.arr_name(f), ls.k().name()))
            .with("family", family.iter().map(|&a| d.arr_name(a)).collect::<Vec<_>>().join(", ")),
        None => CheckReport::fail(name, "no covering family has locally cartesian pullbacks")
            .with("arrow", d.arr_name(f))
            .with("sieve", Sieve::generated(d, d0, good).display(d)),
    })
}

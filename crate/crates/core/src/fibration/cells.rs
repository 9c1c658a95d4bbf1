use thiserror::Error;

use crate::fincat::{same, Arr, FinFunctor, NatTransform, Obj};
use crate::report::CheckReport;

use super::cartesian::{cartesian_factor, is_cartesian_arrow, Cleavage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrationError {
    #[error("`{0}` is not a fibration")]
    NotAFibration(String),

    #[error("functor `{functor}` does not fit between the fibrations: {message}")]
    Shape { functor: String, message: String },

    #[error("the cocycle law is stated for split cleavages and an identity witness")]
    NotSplit,
}

/// `A: D → D'` over a common base with `φ: p'A ⇒ p`.
#[derive(Clone, Debug)]
pub struct FibredFunctor {
    pub p: FinFunctor,
    pub q: FinFunctor,
    pub a: FinFunctor,
    pub phi: NatTransform,
}

impl FibredFunctor {
    pub fn new(p: FinFunctor, q: FinFunctor, a: FinFunctor, phi: NatTransform) -> Result<Self, FibrationError> {
        let shape = |message: &str| FibrationError::Shape { functor: a.name().into(), message: message.into() };
        if !same(a.source(), p.source()) || !same(a.target(), q.source()) || !same(p.target(), q.target()) {
            return Err(shape("endpoints do not match"));
        }
        let qa = q.after(&a).map_err(|e| shape(&e.to_string()))?;
        if phi.source().obj_map() != qa.obj_map()
            || phi.source().arr_map() != qa.arr_map()
            || phi.target().obj_map() != p.obj_map()
            || phi.target().arr_map() != p.arr_map()
        {
            return Err(shape("witness is not a transformation p'A ⇒ p"));
        }
        Ok(FibredFunctor { p, q, a, phi })
    }

    /// Takes `φ` to be the identity, which requires `p'A = p` on the nose.
    pub fn strict(p: FinFunctor, q: FinFunctor, a: FinFunctor) -> Result<Self, FibrationError> {
        let qa = q.after(&a).map_err(|e| FibrationError::Shape { functor: a.name().into(), message: e.to_string() })?;
        if qa.obj_map() != p.obj_map() || qa.arr_map() != p.arr_map() {
            return Err(FibrationError::Shape { functor: a.name().into(), message: "p'A differs from p".into() });
        }
        let phi = NatTransform::identity(&p);
        let phi = NatTransform::new("phi", qa, p.clone(), phi.components().to_vec())
            .map_err(|e| FibrationError::Shape { functor: a.name().into(), message: e.to_string() })?;
        Ok(FibredFunctor { p, q, a, phi })
    }

    pub fn identity(p: FinFunctor) -> Self {
        let a = FinFunctor::identity(p.source().clone());
        FibredFunctor::strict(p.clone(), p, a).expect("identity fits")
    }

    pub fn is_strict(&self) -> bool {
        let c = &**self.p.target();
        self.phi.components().iter().all(|&a| c.is_identity(a))
    }
}

/// Witness is iso and cartesian arrows go to cartesian arrows.
pub fn is_morphism_of_fibrations(m: &FibredFunctor) -> CheckReport {
    let (d, c) = (&**m.p.source(), &**m.p.target());
    if let Some(o) = d.objects().find(|&o| !c.is_iso(m.phi.at(o))) {
        return CheckReport::fail("morphism of fibrations", "witness is not invertible")
            .with("object", d.obj_name(o))
            .with("component", c.arr_name(m.phi.at(o)));
    }
    let e = &**m.q.source();
    for f in d.arrows() {
        if is_cartesian_arrow(&m.p, f) && !is_cartesian_arrow(&m.q, m.a.arr(f)) {
            return CheckReport::fail("morphism of fibrations", "a cartesian arrow maps to a non-cartesian one")
                .with("arrow", d.arr_name(f))
                .with("image", e.arr_name(m.a.arr(f)));
        }
    }
    CheckReport::pass("morphism of fibrations", format!("{} preserves cartesian arrows", m.a.name()))
}

/// `v_f^x`: the vertical part of `A(f̂_x)` against the target cleavage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComparisonCell {
    pub base_arrow: Arr,
    pub object: Obj,
    /// The chosen lift `f̂_x` upstairs.
    pub lift: Arr,
    /// The chosen lift in the target fibration that `A(f̂_x)` factors through.
    pub target_lift: Arr,
    pub cell: Arr,
}

pub fn comparison_cell(m: &FibredFunctor, cp: &Cleavage, cq: &Cleavage, f: Arr, x: Obj) -> Option<ComparisonCell> {
    let c = &**m.p.target();
    let l = cp.get(f, x)?;
    let ax = m.a.obj(x);
    let phi_x = m.phi.at(x);
    let f_shift = c.comp(c.inverse(phi_x)?, f);
    let lq = cq.get(f_shift, ax)?;
    let h = c.comp(c.inverse(lq.sigma)?, c.comp(l.sigma, m.phi.at(m.p.source().src(l.arrow))));
    let cell = cartesian_factor(&m.q, lq.arrow, m.a.arr(l.arrow), h)?;
    Some(ComparisonCell { base_arrow: f, object: x, lift: l.arrow, target_lift: lq.arrow, cell })
}

/// Every cell, or the first `(f, x)` for which the factorization is missing.
pub fn comparison_cells(m: &FibredFunctor, cp: &Cleavage, cq: &Cleavage) -> Result<Vec<ComparisonCell>, (Arr, Obj)> {
    let (d, c) = (&**m.p.source(), &**m.p.target());
    let mut out = Vec::new();
    for x in d.objects() {
        for &f in c.arrows_into(m.p.obj(x)) {
            out.push(comparison_cell(m, cp, cq, f, x).ok_or((f, x))?);
        }
    }
    Ok(out)
}

/// `D'(f)(A u) ∘ v_f^x = v_f^y ∘ A(D(f)(u))` for every vertical `u: x → y`.
pub fn comparison_naturality(m: &FibredFunctor, cp: &Cleavage, cq: &Cleavage) -> CheckReport {
    let (d, c, e) = (&**m.p.source(), &**m.p.target(), &**m.q.source());
    let name = "comparison naturality";
    for u in d.arrows() {
        if !c.is_identity(m.p.arr(u)) {
            continue;
        }
        let (x, y) = (d.src(u), d.tgt(u));
        for &f in c.arrows_into(m.p.obj(x)) {
            let cells = (comparison_cell(m, cp, cq, f, x), comparison_cell(m, cp, cq, f, y));
            let (Some(vx), Some(vy)) = cells else {
                return CheckReport::fail(name, "a comparison cell is missing").with("arrow", c.arr_name(f));
            };
            let (lx, ly) = (cp.lift(f, x), cp.lift(f, y));
            let h = c.comp(c.inverse(ly.sigma).expect("iso"), lx.sigma);
            let Some(dfu) = cartesian_factor(&m.p, ly.arrow, d.comp(u, lx.arrow), h) else {
                return CheckReport::fail(name, "reindexing upstairs is undefined").with("arrow", d.arr_name(u));
            };
            let (qx, qy) = (target_lift_sigma(m, cq, f, x), target_lift_sigma(m, cq, f, y));
            let h2 = c.comp(c.inverse(qy).expect("iso"), qx);
            let Some(dfau) = cartesian_factor(&m.q, vy.target_lift, e.comp(m.a.arr(u), vx.target_lift), h2) else {
                return CheckReport::fail(name, "reindexing downstairs is undefined").with("arrow", d.arr_name(u));
            };
            if e.comp(dfau, vx.cell) != e.comp(vy.cell, m.a.arr(dfu)) {
                return CheckReport::fail(name, "naturality square does not commute")
                    .with("base arrow", c.arr_name(f))
                    .with("vertical", d.arr_name(u));
            }
        }
    }
    CheckReport::pass(name, "every comparison cell is natural in the fiber object")
}

fn target_lift_sigma(m: &FibredFunctor, cq: &Cleavage, f: Arr, x: Obj) -> Arr {
    let c = &**m.p.target();
    let f_shift = c.comp(c.inverse(m.phi.at(x)).expect("iso witness"), f);
    cq.lift(f_shift, m.a.obj(x)).sigma
}

/// `v_{gf}^x = D'(f)(v_g^x) ∘ v_f^{D(g)x}` for every composable `(g, f)`.
pub fn comparison_cocycle(m: &FibredFunctor, cp: &Cleavage, cq: &Cleavage) -> Result<CheckReport, FibrationError> {
    if !m.is_strict() || !cp.is_split(&m.p) || !cq.is_split(&m.q) {
        return Err(FibrationError::NotSplit);
    }
    let (d, c, e) = (&**m.p.source(), &**m.p.target(), &**m.q.source());
    let name = "comparison cocycle";
    for x in d.objects() {
        for &g in c.arrows_into(m.p.obj(x)) {
            let xg = d.src(cp.lift(g, x).arrow);
            let Some(vg) = comparison_cell(m, cp, cq, g, x) else {
                return Ok(CheckReport::fail(name, "a comparison cell is missing").with("arrow", c.arr_name(g)));
            };
            for &f in c.arrows_into(c.src(g)) {
                let gf = c.comp(g, f);
                let (Some(vgf), Some(vf)) = (comparison_cell(m, cp, cq, gf, x), comparison_cell(m, cp, cq, f, xg)) else {
                    return Ok(CheckReport::fail(name, "a comparison cell is missing").with("arrow", c.arr_name(f)));
                };
                // D'(f) applied to the vertical cell v_g^x
                let outer = cq.lift(f, e.tgt(vg.cell)).arrow;
                let inner = cq.lift(f, e.src(vg.cell)).arrow;
                let Some(moved) = cartesian_factor(&m.q, outer, e.comp(vg.cell, inner), c.id(c.src(f))) else {
                    return Ok(CheckReport::fail(name, "reindexing of a cell is undefined").with("arrow", c.arr_name(f)));
                };
                if vgf.cell != e.comp(moved, vf.cell) {
                    return Ok(CheckReport::fail(name, "cocycle identity fails")
                        .with("object", d.obj_name(x))
                        .with("g", c.arr_name(g))
                        .with("f", c.arr_name(f))
                        .with("lhs", e.arr_name(vgf.cell))
                        .with("rhs", e.arr_name(e.comp(moved, vf.cell))));
                }
            }
        }
    }
    Ok(CheckReport::pass(name, "the cocycle identity holds for every composable pair"))
}

use std::sync::Arc;

use crate::fibration::{comparison_cells, Cleavage, FibredFunctor};
use crate::fincat::{same, Arr, FinCategory, FinFunctor, GrothendieckFibration, NatTransform};
use crate::presheaf::{locality_test, yoneda, yoneda_map, LocalityMode};
use crate::report::CheckReport;
use crate::sites::{giraud_topology, is_continuous, GrothendieckTopology, SitedFunctor};

use super::{LocalFibrationError, LocalSite};

/// A Grothendieck construction over `(C, J)` whose topology contains the Giraud topology.
#[derive(Clone, Debug)]
pub struct RelativeSite {
    fibration: GrothendieckFibration,
    local: LocalSite,
}

impl RelativeSite {
    pub fn new(
        fibration: GrothendieckFibration,
        k: Arc<GrothendieckTopology>,
        j: Arc<GrothendieckTopology>,
    ) -> Result<Self, LocalFibrationError> {
        let not_relative = |m: String| LocalFibrationError::NotARelativeSite(m);
        if !same(k.base(), &fibration.total) {
            return Err(not_relative(format!("{} is not a topology on the total category", k.name())));
        }
        let giraud = giraud_topology(&fibration.projection, &j).map_err(|e| not_relative(e.to_string()))?;
        if !k.contains(&giraud) {
            return Err(not_relative(format!("{} does not contain the Giraud topology", k.name())));
        }
        let sited = SitedFunctor::new(fibration.projection.clone(), k, j).map_err(|e| not_relative(e.to_string()))?;
        let local = LocalSite::new(sited)?;
        Ok(RelativeSite { fibration, local })
    }

    /// The relative site carrying the Giraud topology itself.
    pub fn giraud(fibration: GrothendieckFibration, j: Arc<GrothendieckTopology>) -> Result<Self, LocalFibrationError> {
        let k = giraud_topology(&fibration.projection, &j)
            .map_err(|e| LocalFibrationError::NotARelativeSite(e.to_string()))?;
        RelativeSite::new(fibration, Arc::new(k), j)
    }

    pub fn fibration(&self) -> &GrothendieckFibration {
        &self.fibration
    }

    pub fn local(&self) -> &LocalSite {
        &self.local
    }

    /// The vertical part `(1, u)` of a total arrow `(f, u)`.
    pub fn vertical_part(&self, g: Arr) -> Arr {
        let gf = &self.fibration;
        let (_, u) = gf.arrows[g.0];
        let c1 = gf.objects[gf.total.src(g).0].0;
        let fiber = gf.indexed.fiber(c1);
        let base = gf.indexed.base();
        gf.arrow(base.id(c1), u, fiber.tgt(u)).expect("vertical arrows exist in the total category")
    }

    pub fn is_vertical(&self, g: Arr) -> bool {
        self.fibration.indexed.base().is_identity(self.fibration.arrows[g.0].0)
    }
}

/// `y(a)` is locally iso.
fn locally_iso(c: &Arc<FinCategory>, a: Arr, k: &GrothendieckTopology) -> CheckReport {
    let ya = Arc::new(yoneda(c, c.src(a)));
    let yb = Arc::new(yoneda(c, c.tgt(a)));
    locality_test(&yoneda_map(c, a, &ya, &yb), k, LocalityMode::Iso)
}

/// `(f, u)` is locally cartesian exactly when `(1, u)` becomes invertible.
pub fn relative_site_loccart(rs: &RelativeSite, g: Arr) -> CheckReport {
    let d = &rs.fibration.total;
    let v = rs.vertical_part(g);
    let r = locally_iso(d, v, rs.local.k());
    CheckReport::verdict("locally cartesian (relative)", r.passed, r.detail)
        .with("arrow", d.arr_name(g))
        .with("vertical part", d.arr_name(v))
}

/// Locally invertible verticals go to locally invertible arrows, and every
/// comparison cell is locally invertible.
///
/// The first condition is skipped when `A` is continuous.
pub fn comparison_criterion(
    source: &RelativeSite,
    target: &RelativeSite,
    a: &FinFunctor,
    phi: &NatTransform,
) -> Result<CheckReport, LocalFibrationError> {
    let p = source.fibration.projection.clone();
    let q = target.fibration.projection.clone();
    let m = FibredFunctor::new(p, q, a.clone(), phi.clone()).map_err(|e| LocalFibrationError::Shape(e.to_string()))?;
    let (d, e) = (&source.fibration.total, &target.fibration.total);
    let (k, k2) = (source.local.k(), target.local.k());
    let name = "comparison criterion";
    let sited = SitedFunctor::new(a.clone(), k.clone(), k2.clone()).map_err(|e| LocalFibrationError::Shape(e.to_string()))?;
    let continuous = is_continuous(&sited).passed;
    if !continuous {
        for g in d.arrows().filter(|&g| source.is_vertical(g)) {
            if locally_iso(d, g, k).passed && !locally_iso(e, a.arr(g), k2).passed {
                return Ok(CheckReport::fail(name, "condition (1) fails: a locally invertible vertical arrow is not preserved")
                    .with("arrow", d.arr_name(g))
                    .with("image", e.arr_name(a.arr(g))));
            }
        }
    }
    let cp = Cleavage::from_grothendieck(&source.fibration);
    let cq = Cleavage::from_grothendieck(&target.fibration);
    let cells = comparison_cells(&m, &cp, &cq).map_err(|(f, x)| {
        LocalFibrationError::Shape(format!(
            "no comparison cell at ({}, {})",
            source.fibration.indexed.base().arr_name(f),
            d.obj_name(x)
        ))
    })?;
    for cell in cells {
        let r = locally_iso(e, cell.cell, k2);
        if !r.passed {
            return Ok(CheckReport::fail(name, "condition (2) fails: a comparison cell is not locally invertible")
                .with("base arrow", source.fibration.indexed.base().arr_name(cell.base_arrow))
                .with("object", d.obj_name(cell.object))
                .with("cell", e.arr_name(cell.cell)));
        }
    }
    let detail = if continuous { "continuous; every comparison cell is locally invertible" } else { "both conditions hold" };
    Ok(CheckReport::pass(name, detail))
}

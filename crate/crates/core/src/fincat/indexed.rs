use std::sync::Arc;

use thiserror::Error;

use super::category::{same, Arr, CategoryError, FinCategory, Obj};
use super::functor::{FinFunctor, FunctorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexedError {
    #[error("indexed category `{name}`: {message}")]
    Shape { name: String, message: String },

    #[error("indexed category `{name}` is not strict at ({})", witness.join(", "))]
    NotStrict { name: String, witness: Vec<String> },

    #[error(transparent)]
    Category(#[from] CategoryError),

    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// A strict functor `C^op → Cat` with finite fibers.
///
/// `transport[f]` for `f: c → c'` is a functor `fiber(c') → fiber(c)`.
#[derive(Clone, Debug)]
pub struct IndexedCategory {
    name: String,
    base: Arc<FinCategory>,
    fibers: Vec<Arc<FinCategory>>,
    transport: Vec<FinFunctor>,
}

impl IndexedCategory {
    pub fn new(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        transport: Vec<FinFunctor>,
    ) -> Result<Self, IndexedError> {
        let name = name.into();
        let shape = |message: String| IndexedError::Shape { name: name.clone(), message };
        if fibers.len() != base.object_count() {
            return Err(shape("one fiber per base object is required".into()));
        }
        if transport.len() != base.arrow_count() {
            return Err(shape("one transport functor per base arrow is required".into()));
        }
        for f in base.arrows() {
            let t = &transport[f.0];
            if !same(t.source(), &fibers[base.tgt(f).0]) || !same(t.target(), &fibers[base.src(f).0]) {
                return Err(shape(format!("transport along `{}` has the wrong fibers", base.arr_name(f))));
            }
        }
        for o in base.objects() {
            if !transport[base.id(o).0].is_identity_functor() {
                return Err(IndexedError::NotStrict {
                    name,
                    witness: vec![base.arr_name(base.id(o)).to_string()],
                });
            }
        }
        for f in base.arrows() {
            for &g in base.arrows_into(base.src(f)) {
                // D(f ∘ g) = D(g) ∘ D(f)
                let lhs = &transport[base.comp(f, g).0];
                let t_f = &transport[f.0];
                let t_g = &transport[g.0];
                let obj_ok = lhs.obj_map().iter().zip(t_f.obj_map()).all(|(a, b)| *a == t_g.obj(*b));
                let arr_ok = lhs.arr_map().iter().zip(t_f.arr_map()).all(|(a, b)| *a == t_g.arr(*b));
                if !obj_ok || !arr_ok {
                    return Err(IndexedError::NotStrict {
                        name,
                        witness: vec![base.arr_name(f).to_string(), base.arr_name(g).to_string()],
                    });
                }
            }
        }
        Ok(IndexedCategory { name, base, fibers, transport })
    }

    /// Every fiber equal to `fiber`, every transport the identity.
    pub fn constant(name: impl Into<String>, base: Arc<FinCategory>, fiber: Arc<FinCategory>) -> Self {
        let fibers = base.objects().map(|_| fiber.clone()).collect();
        let transport = base.arrows().map(|_| FinFunctor::identity(fiber.clone())).collect();
        IndexedCategory { name: name.into(), base, fibers, transport }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn fiber(&self, c: Obj) -> &Arc<FinCategory> {
        &self.fibers[c.0]
    }

    pub fn fibers(&self) -> &[Arc<FinCategory>] {
        &self.fibers
    }

    pub fn transport(&self, f: Arr) -> &FinFunctor {
        &self.transport[f.0]
    }
}

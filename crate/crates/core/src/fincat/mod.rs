//! Finite categories, functors and the basic constructions built from them.

mod builder;
mod category;
mod constructions;
pub mod enumerate;
pub mod fixtures;
mod functor;
mod indexed;
mod iso;

pub use builder::{complete, essential_compositions, CategoryBuilder};
pub use category::{same, validate_category, Arr, CategoryError, FinCategory, Law, Obj, RawCategory};
pub use constructions::{
    add_free_initial, build_comma, category_of_elements, connected_components, fresh_name, full_subcategory, grothendieck_construction,
    slice, Comma, ConstructionError, Elements, FreeInitial, GrothendieckFibration, Slice,
};
pub use functor::{FinFunctor, FunctorError, NatTransform};
pub use indexed::{IndexedCategory, IndexedError};
pub use iso::{find_isomorphism, is_isomorphic, CategoryIso};

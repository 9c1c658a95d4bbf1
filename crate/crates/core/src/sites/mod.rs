//! Sieves, Grothendieck topologies and the site-level roles of functors.

mod comma;
mod giraud;
mod roles;
mod sieve;
mod topology;

pub use sieve::{sieves_on, Sieve, SieveError};
pub use topology::{
    canonical_topology, enumerate_topologies, enumerate_topologies_capped, generate_from_sieves, GrothendieckTopology,
};
pub use roles::{
    image_sieve, is_comorphism, is_continuous, is_cover_preserving, is_morphism_of_sites, preimage_sieve, Roles, SiteError,
    SitedFunctor,
};
pub use comma::{
    augment_functor, augment_topology, comma_backward, comma_forward, comma_site, extend_to_initial, sheaf_roundtrip,
    triplet_roundtrip, CommaError, CommaSite, Triplet,
};
pub use giraud::{comorphism_closure, giraud_minimality, giraud_topology, GiraudError};

//! Grothendieck topologies on small categories: enumeration, the canonical
//! topology, Giraud topologies and comma sites.

use std::sync::Arc;

use finsite::fincat::fixtures;
use finsite::sites::{
    canonical_topology, comma_site, enumerate_topologies, giraud_minimality, giraud_topology, is_comorphism,
    GrothendieckTopology, SitedFunctor,
};

fn main() {
    for c in [fixtures::one(), fixtures::arr(), fixtures::tri()] {
        let ts = enumerate_topologies(&c);
        println!("{}: {} topologies", c.name(), ts.len());
        for t in &ts {
            println!("  {}", t.describe());
        }
        println!("  canonical: {}", canonical_topology(c.clone()).describe());
    }

    let g = fixtures::gd1();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = giraud_topology(&g.projection, &j).expect("a fibration");
    println!("Giraud topology over the trivial topology on ARR: {}", k.describe());
    println!("{}", giraud_minimality(&g.projection, &j, &k, 64).expect("few sieves"));

    let sited = SitedFunctor::new(g.projection.clone(), Arc::new(k), j).unwrap();
    let cs = comma_site(&sited).expect("a comorphism");
    println!("comma category: {} objects", cs.comma.category.object_count());
    println!("{}", cs.topology.is_topology());
    println!("{}", is_comorphism(&cs.right_projection()));
}

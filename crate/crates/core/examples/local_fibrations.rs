//! Locally cartesian arrows by both routes, local factorizations and the
//! canonical-topology counterexample over an idempotent.

use std::sync::Arc;

use finsite::fibration::is_cartesian_arrow;
use finsite::fincat::{fixtures, CategoryBuilder, FinFunctor};
use finsite::locfib::{is_local_fibration, is_locally_cartesian, local_factorization, LocalSite};
use finsite::sites::{canonical_topology, giraud_topology, GrothendieckTopology, SitedFunctor};

fn main() {
    let g = fixtures::gd1_vertical();
    let j = Arc::new(GrothendieckTopology::trivial(g.indexed.base().clone()));
    let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
    let ls = LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j).unwrap()).unwrap();
    println!("{}", is_local_fibration(&ls));
    for f in g.total.arrows() {
        let v = is_locally_cartesian(&ls, f);
        println!("{}: combinatorial {}, oracle {}", g.total.arr_name(f), v.combinatorial.passed, v.oracle.passed);
        let fact = local_factorization(&ls, f).unwrap();
        for pc in &fact.pieces {
            let d = &g.total;
            println!("  {} . {} over {}", d.arr_name(pc.loccart), d.arr_name(pc.connector), d.arr_name(pc.cover));
        }
    }

    // f: b -> a over an idempotent e: the canonical topology covers b by the
    // empty sieve, so f is locally cartesian, but e has no lift b -> b
    let d = Arc::new(CategoryBuilder::new("ARR").objects(["a", "b"]).arrow("f", "b", "a").build().unwrap());
    let c = Arc::new(CategoryBuilder::new("E").object("*").arrow("e", "*", "*").compose("e", "e", "e").build().unwrap());
    let p = FinFunctor::from_names("p", d.clone(), c.clone(), &[("a", "*"), ("b", "*")], &[("f", "e")]).unwrap();
    let k = Arc::new(canonical_topology(d.clone()));
    let j = Arc::new(GrothendieckTopology::trivial(c));
    let ls = LocalSite::new(SitedFunctor::new(p.clone(), k, j).unwrap()).unwrap();
    let f = d.arr("f").unwrap();
    let v = is_locally_cartesian(&ls, f);
    println!("over an idempotent: locally cartesian {} (oracle {}), cartesian {}", v.combinatorial.passed, v.oracle.passed, is_cartesian_arrow(&p, f));
}

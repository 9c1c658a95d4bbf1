//! Factorization categories, J-cofinality by two routes and the topos-level
//! fibration check.

use std::sync::Arc;

use finsite::cofinal::{build_cartfact_category, cofinality_verdicts, topos_level_fibration_check};
use finsite::fincat::fixtures;
use finsite::locfib::LocalSite;
use finsite::sites::{enumerate_topologies, giraud_topology, SitedFunctor};

fn main() {
    let g = fixtures::gd1_vertical();
    for j in enumerate_topologies(g.indexed.base()) {
        let j = Arc::new(j);
        let k = Arc::new(giraud_topology(&g.projection, &j).unwrap());
        let ls = LocalSite::new(SitedFunctor::new(g.projection.clone(), k, j.clone()).unwrap()).unwrap();
        println!("J = {}", j.describe());
        for f in g.total.arrows() {
            let fc = build_cartfact_category(&ls, f);
            let v = cofinality_verdicts(&ls, f);
            println!(
                "  {}: {} cart-fact objects; locally cartesian {}, cofinal {}, colimit {}",
                g.total.arr_name(f),
                fc.triples.len(),
                v.loccart.combinatorial.passed,
                v.cofinal.passed,
                v.colimit.passed
            );
        }
        match topos_level_fibration_check(&ls, true) {
            Ok(r) => println!("  {r}"),
            Err(e) => println!("  {e}"),
        }
    }
}

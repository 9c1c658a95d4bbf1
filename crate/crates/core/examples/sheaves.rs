//! Presheaves on ARR: sheaf conditions, sheafification and the locality test.

use std::sync::Arc;

use finsite::fincat::fixtures;
use finsite::presheaf::{enumerate_morphisms, enumerate_presheaves, is_sheaf, locality_test, sheafify, LocalityMode};
use finsite::sites::enumerate_topologies;

fn main() {
    let arr = fixtures::arr();
    let presheaves: Vec<_> = enumerate_presheaves(&arr, 2).into_iter().map(Arc::new).collect();
    println!("presheaves on ARR with at most 2 elements per object: {}", presheaves.len());
    for j in enumerate_topologies(&arr) {
        let sheaves = presheaves.iter().filter(|p| is_sheaf(p, &j).passed).count();
        println!("{}: {sheaves} sheaves", j.describe());
        for p in &presheaves {
            let a = sheafify(p, &j);
            let sizes: Vec<usize> = arr.objects().map(|o| a.sheaf.size(o)).collect();
            let unit = locality_test(&a.unit, &j, LocalityMode::Iso);
            println!("  {} -> sheaf of sizes {sizes:?}, unit locally iso: {}", p.name(), unit.passed);
        }
    }
    let (p, q) = (&presheaves[1], &presheaves[presheaves.len() - 1]);
    println!("morphisms {} -> {}: {}", p.name(), q.name(), enumerate_morphisms(p, q).len());
}

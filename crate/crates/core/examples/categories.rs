//! Builds small categories, enumerates them up to isomorphism and forms a
//! Grothendieck construction.

use finsite::fincat::enumerate::{enumerate_categories, enumerate_functors};
use finsite::fincat::{fixtures, grothendieck_construction, CategoryBuilder};

fn main() {
    let tri = CategoryBuilder::new("TRI")
        .objects(["a", "b", "c"])
        .arrow("f", "a", "b")
        .arrow("g", "b", "c")
        .arrow("gf", "a", "c")
        .compose("g", "f", "gf")
        .build()
        .expect("identities are synthesized");
    println!("{}: {} objects, {} arrows", tri.name(), tri.object_count(), tri.arrow_count());
    for a in tri.non_identity_arrows() {
        println!("  {}", tri.describe(a));
    }

    for n in 1..=2 {
        let cats = enumerate_categories(n, 2, true);
        println!("{n} object(s), at most 2 non-identity arrows: {} categories up to iso", cats.len());
    }

    let (arr, tri) = (fixtures::arr(), fixtures::tri());
    println!("functors ARR -> TRI: {}", enumerate_functors(&arr, &tri).len());

    let g = grothendieck_construction(&fixtures::gd1_vertical_indexed());
    println!("total category of {}: {} objects, {} arrows", g.indexed.name(), g.total.object_count(), g.total.arrow_count());
    for a in g.total.non_identity_arrows() {
        println!("  {} over {}", g.total.describe(a), g.indexed.base().arr_name(g.projection.arr(a)));
    }
}

//! Cartesian arrows, cleavages and comparison cells of functors between
//! Grothendieck fibrations.

use finsite::fibration::{
    comparison_cells, comparison_cocycle, comparison_naturality, is_cartesian, is_fibration, Cleavage, FibredFunctor,
};
use finsite::fincat::enumerate::{enumerate_functors, enumerate_indexed};
use finsite::fincat::{fixtures, grothendieck_construction};

fn main() {
    let g = fixtures::gd1_vertical();
    for a in g.total.arrows() {
        println!("{}", is_cartesian(&g.projection, a));
    }
    println!("{}", is_fibration(&fixtures::disc2_over_arr()).0);

    let base = fixtures::arr();
    let fibrations: Vec<_> =
        enumerate_indexed(&base, &[fixtures::one(), fixtures::arr()]).iter().map(grothendieck_construction).collect();
    let (p, q) = (&fibrations[0], &fibrations[fibrations.len() - 1]);
    let (cp, cq) = (Cleavage::from_grothendieck(p), Cleavage::from_grothendieck(q));
    for a in enumerate_functors(&p.total, &q.total) {
        let Ok(m) = FibredFunctor::strict(p.projection.clone(), q.projection.clone(), a) else { continue };
        let cells = comparison_cells(&m, &cp, &cq).expect("split cleavages");
        let vertical: Vec<_> = cells.iter().map(|c| q.total.arr_name(c.cell)).collect();
        println!("{}: cells {vertical:?}", m.a.name());
        println!("  {}", comparison_naturality(&m, &cp, &cq));
        println!("  {}", comparison_cocycle(&m, &cp, &cq).expect("strict witness"));
    }
}

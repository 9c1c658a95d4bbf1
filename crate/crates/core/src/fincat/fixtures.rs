//! Small named categories used across tests, examples and documentation.

use std::sync::Arc;

use super::builder::CategoryBuilder;
use super::category::FinCategory;
use super::constructions::{grothendieck_construction, GrothendieckFibration};
use super::functor::FinFunctor;
use super::indexed::IndexedCategory;

fn build(b: CategoryBuilder) -> Arc<FinCategory> {
    Arc::new(b.build().expect("fixture is a valid category"))
}

/// The empty category.
pub fn empty() -> Arc<FinCategory> {
    build(CategoryBuilder::new("EMPTY"))
}

/// One object `*`.
pub fn one() -> Arc<FinCategory> {
    build(CategoryBuilder::new("ONE").object("*"))
}

/// `f: a -> b`.
pub fn arr() -> Arc<FinCategory> {
    build(CategoryBuilder::new("ARR").objects(["a", "b"]).arrow("f", "a", "b"))
}

/// Parallel `f, g: a -> b`.
pub fn pair() -> Arc<FinCategory> {
    build(CategoryBuilder::new("PAIR").objects(["a", "b"]).arrow("f", "a", "b").arrow("g", "a", "b"))
}

/// `f: a -> b`, `g: b -> c`, `gf = g . f`.
pub fn tri() -> Arc<FinCategory> {
    build(
        CategoryBuilder::new("TRI")
            .objects(["a", "b", "c"])
            .arrow("f", "a", "b")
            .arrow("g", "b", "c")
            .arrow("gf", "a", "c")
            .compose("g", "f", "gf"),
    )
}

/// Two objects, identities only.
pub fn disc2() -> Arc<FinCategory> {
    build(CategoryBuilder::new("DISC2").objects(["a", "b"]))
}

/// Objects `d_a`, `d_b` with identities only; the functor to ARR has no lift of `f`.
pub fn disc2_over_arr() -> FinFunctor {
    let d = build(CategoryBuilder::new("D").objects(["d_a", "d_b"]));
    FinFunctor::from_names("p", d, arr(), &[("d_a", "a"), ("d_b", "b")], &[]).expect("valid functor")
}

/// The indexed category over ARR with discrete fibers `{x, y}` at `b` and
/// `{x1, y1}` at `a`, transport along `f` sending `x ↦ x1`, `y ↦ y1`.
pub fn gd1_indexed() -> IndexedCategory {
    let base = arr();
    let fb = build(CategoryBuilder::new("Db").objects(["x", "y"]));
    let fa = build(CategoryBuilder::new("Da").objects(["x1", "y1"]));
    let tf = FinFunctor::from_names("Df", fb.clone(), fa.clone(), &[("x", "x1"), ("y", "y1")], &[]).unwrap();
    let transport = base
        .arrows()
        .map(|a| match base.arr_name(a) {
            "f" => tf.clone(),
            "id_a" => FinFunctor::identity(fa.clone()),
            _ => FinFunctor::identity(fb.clone()),
        })
        .collect();
    IndexedCategory::new("GD1", base, vec![fa, fb], transport).expect("GD1 is strict")
}

pub fn gd1() -> GrothendieckFibration {
    grothendieck_construction(&gd1_indexed())
}

/// GD1 with a vertical arrow `u: y -> x` in both fibers, preserved by transport.
pub fn gd1_vertical_indexed() -> IndexedCategory {
    let base = arr();
    let fb = build(CategoryBuilder::new("Db").objects(["x", "y"]).arrow("u", "y", "x"));
    let fa = build(CategoryBuilder::new("Da").objects(["x1", "y1"]).arrow("u1", "y1", "x1"));
    let tf = FinFunctor::from_names("Df", fb.clone(), fa.clone(), &[("x", "x1"), ("y", "y1")], &[("u", "u1")])
        .unwrap();
    let transport = base
        .arrows()
        .map(|a| match base.arr_name(a) {
            "f" => tf.clone(),
            "id_a" => FinFunctor::identity(fa.clone()),
            _ => FinFunctor::identity(fb.clone()),
        })
        .collect();
    IndexedCategory::new("GD1V", base, vec![fa, fb], transport).expect("GD1V is strict")
}

pub fn gd1_vertical() -> GrothendieckFibration {
    grothendieck_construction(&gd1_vertical_indexed())
}

/// `s: d -> e`, `f: e -> d` with `f . s = id_d` and `s . f = e` idempotent.
pub fn split_idempotent() -> Arc<FinCategory> {
    build(
        CategoryBuilder::new("SPLIT")
            .objects(["d", "e"])
            .arrow("s", "d", "e")
            .arrow("f", "e", "d")
            .arrow("i", "e", "e")
            .compose("f", "s", "id_d")
            .compose("s", "f", "i")
            .compose("i", "i", "i")
            .compose("i", "s", "s")
            .compose("f", "i", "f"),
    )
}

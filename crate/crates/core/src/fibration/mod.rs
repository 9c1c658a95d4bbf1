//! Cartesian arrows, cleavages, limits of total categories and comparison cells.

mod cartesian;
mod cells;
mod limits;

pub use cartesian::{
    cartesian_factor, cartesian_lift, factorize_vertical_cartesian, is_cartesian, is_cartesian_arrow, is_fibration,
    Cleavage, Lift,
};
pub use cells::{
    comparison_cell, comparison_cells, comparison_cocycle, comparison_naturality, is_morphism_of_fibrations,
    ComparisonCell, FibrationError, FibredFunctor,
};
pub use limits::{is_cartesian_fibration, is_pullback_square, is_terminal, pullback, terminal_object, PullbackSquare};

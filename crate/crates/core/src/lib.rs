//! Finite sites, fibrations and local fibrations.

pub mod audit;
pub mod cli;
pub mod cofinal;
pub mod fibration;
pub mod dsl;
pub mod fincat;
pub mod locfib;
pub mod presheaf;
pub mod report;
pub mod sites;

pub use report::CheckReport;

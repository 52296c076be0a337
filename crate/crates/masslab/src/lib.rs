//! Desk-scale workbench for Π⁰₁ classes, mass problems and learners with mind changes.

pub mod checks;
pub mod concat;
pub mod disjunction;
pub mod dsl;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod kernel;
pub mod learners;
pub mod oracle;
pub mod pairing;
pub mod trees;
pub mod witnesses;
pub mod word;

pub use error::{Error, Result};

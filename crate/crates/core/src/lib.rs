//! Skeletal fusion, braided and module category data, with the
//! polar-decomposition based unitarization pipelines and their
//! group-cohomology counterpart.

pub mod braided;
pub mod builtin;
pub mod checks;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod fusion;
pub mod io;
pub mod library;
pub mod linalg;
pub mod module_cats;
pub mod polar;
pub mod report;
pub mod sampling;
pub mod unitarizer;

pub use error::{Error, Result};

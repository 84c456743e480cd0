//! Levi-form analysis, derived null distributions and cores of pseudoconvex
//! boundaries, with the complete Hartogs domain over a planar compact set as
//! the worked model.

pub mod chain;
pub mod config;
pub mod dims;
pub mod domain;
pub mod error;
pub mod levi;
pub mod linalg;
pub mod pipeline;
pub mod potential;
pub mod report;
pub mod sets;
pub mod tangent;
pub mod witness;

pub use error::{LeviError, Result};

//! Numerical laboratory for spectral gerbes over unitary groups, Fock-space
//! implementers and current-algebra cocycles.
//!
//! Each module is usable on its own; [`experiments`] bundles the standard
//! checks behind seeded configs and [`cli`] exposes them as `gerbelab`.

pub mod carfock;
pub mod cechdeligne;
pub mod cli;
pub mod dirac;
pub mod error;
pub mod experiments;
pub mod extensions;
pub mod geometry;
pub mod lie;

pub use error::{Error, Result};

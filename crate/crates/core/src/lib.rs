//! Mahler measures of bivariate polynomials and the algebra around them.

pub mod error;
pub mod numerics;
pub mod poly;
pub mod torus;
pub mod mahler;
pub mod tracker;
pub mod curves;
pub mod lfunctions;
pub mod relations;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;

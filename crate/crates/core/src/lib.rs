//! Certification of free divisors with normal crossings: weights, logarithmic
//! derivations, Lie structure and the descent to a solvable algebra.

pub mod cli;
pub mod descent;
pub mod error;
pub mod factor;
pub mod groebner;
pub mod lie;
pub mod linalg;
pub mod logder;
pub mod poly;
pub mod weights;

pub use error::{Error, Result};

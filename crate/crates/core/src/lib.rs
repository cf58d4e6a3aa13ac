//! Certified search for Pell numbers that are products of two
//! k-generalized Fibonacci numbers.

pub mod apreal;
pub mod error;
pub mod heights;
pub mod matveev;
pub mod pipeline;
pub mod reduction;
pub mod search;
pub mod sequences;

pub use error::{Error, Result};

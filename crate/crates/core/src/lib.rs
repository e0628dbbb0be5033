//! Numerical isotypic decompositions of classical Hermitian Lie algebras under
//! embedded `su(n, 1)`, and positivity certificates for local rigidity.

pub mod certify;
pub mod embed;
pub mod error;
pub mod groups;
pub mod isotype;
pub mod liealg;
pub mod linops;
pub mod pipeline;
pub mod verify;

pub use error::{Error, Result};

pub mod cli;
pub mod costs;
pub mod error;
pub mod exact;
pub mod fkgas;
pub mod gallery;
pub mod monge;
pub mod plans;
pub mod polytope;

pub use error::{Error, Result};

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod rng;
pub mod superop;

pub use algebra::OperatorAlgebra;
pub use error::{ManError, Result};
pub mod cli;
pub mod man;
pub mod protocol;

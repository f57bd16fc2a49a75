pub mod ballspace;
pub mod diagonalize;
pub mod error;
pub mod float;
pub mod harness;
pub mod linalg;
pub mod pipeline;
pub mod polyring;
pub mod scalar;
pub mod tuples;

pub use error::{Error, Result};

pub mod error;
pub mod cli;
pub mod convolve;
pub mod gammafactor;
pub mod specialfun;
pub mod roots;
pub mod symbols;
pub mod toeplitz;
pub mod unit;

pub use error::{Error, Result};

pub mod cli;
pub mod convert;
pub mod error;
pub mod hilbert;
pub mod ops;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};

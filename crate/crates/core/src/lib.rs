pub mod biot3d;
pub mod blowup;
pub mod cli;
pub mod error;
pub mod fields;
pub mod quad;
pub mod singular2d;
pub mod symgroup;

pub use error::{Error, Result};

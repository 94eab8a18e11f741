pub mod certificate;
pub mod complex;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod profile;

pub use error::{Error, Result};

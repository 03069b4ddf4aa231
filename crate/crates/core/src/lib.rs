pub mod error;
pub mod interval;
pub mod linalg;
pub mod poly;
pub mod real;
pub mod diophantine;
pub mod lattice;
pub mod spectra;
pub mod cohomology;

pub use error::{Error, Result};
pub use interval::Interval;
pub mod numberfields;

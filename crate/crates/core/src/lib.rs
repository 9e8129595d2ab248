//! Diophantine exponents of lattice orbits on homogeneous varieties:
//! exact exponent predictions, lattice enumeration, volume growth, spectral
//! certificates and numerical approximation experiments.

pub mod algebra;
pub mod enumeration;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod spaces;
pub mod spectral;
pub mod volume;

pub use error::{Error, Result};

//! Rényi entanglement entropies of Z2 gauged PEPS.
//!
//! The crate builds the bond-dimension-2 Z2 site tensor from its four flux
//! amplitudes, reduces it to single-site transfer operators, tiles those into
//! row transfer matrices with replica boundary operators, and evaluates
//! normalized purities on finite cylinders and in the thermodynamic limit.
//! [`oracle`] enumerates the same states exactly on small tori.

pub mod entropy;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod rows;
pub mod tensor;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use params::PepsParams;

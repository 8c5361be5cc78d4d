//! Hard-constraint neural network for the molar excess Gibbs energy of
//! binary mixtures.
//!
//! Activity coefficients follow from `gᴱ/RT` by exact differentiation in
//! `x1`, so pure-component limits, Gibbs-Duhem consistency, vanishing excess
//! properties of pseudo-binary mixtures and permutation equivariance hold for
//! every parameter setting.

pub mod autodiff;
pub mod data;
pub mod descriptors;
pub mod error;
pub mod eval;
pub mod model;
pub mod thermo;
pub mod train;

pub use error::{Error, Result};

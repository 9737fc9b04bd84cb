//! Critical points of multiple Green functions on flat tori.
//!
//! The library evaluates Weierstrass elliptic functions, Green functions
//! and their derivatives on E_tau = C/(Z + Z*tau), solves the spectral
//! curve Y_n attached to the integral Lame equation, evaluates the
//! pre-modular forms that detect nontrivial critical points, and
//! classifies critical points of the multiple Green function G_n by the
//! closed-form Hessian determinant.

pub mod crit;
pub mod elliptic;
pub mod error;
pub mod green;
pub mod lame;
pub mod modular;
pub mod premodular;

pub use elliptic::LatticeData;
pub use error::{Error, Result};

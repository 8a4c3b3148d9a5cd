//! Schwarz symmetrals of profile-defined sets: exact perimeters, rigidity of
//! the perimeter inequality, equality-case witnesses and independent numerical
//! checks.

pub mod bv_profile;
pub mod cantor;
pub mod cli;
pub mod counterexamples;
pub mod error;
pub mod numeric_oracle;
pub mod poly;
pub mod quadrature;
pub mod rigidity;
pub mod symmetral;
pub mod window;

pub use error::{Error, Result};

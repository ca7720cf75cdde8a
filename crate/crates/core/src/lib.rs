//! Finite groupoids, their convolution *-algebras, twisted and Fell-bundle
//! section algebras, and numerical certificates for the isomorphisms between
//! these algebras and their opposites.
//!
//! Everything here is finite-dimensional: groupoids are explicit composition
//! tables, Haar systems are positive arrow weights, and Fell bundles are given
//! by structure constants. Operator norms are computed exactly (up to floating
//! point) through regular representations.

#![allow(clippy::needless_range_loop)]

pub mod cocycle;
pub mod conv_algebra;
pub mod error;
pub mod fell_bundle;
pub mod groupoid;
pub mod io;
pub mod linalg;
pub mod policy;
pub mod random;
pub mod section_algebra;
pub mod structure;
pub mod validation;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use policy::NumericPolicy;

//! Exact-arithmetic toolkit for pointed braided fusion categories with a
//! distinguished fermion, group-cohomological obstruction theory, and the
//! counting of minimal modular extensions of super-Tannakian categories.
//!
//! Everything is computed over `Q/Z` (torsion coefficients) and finite
//! abelian groups; there is no floating point anywhere in this crate.

pub mod action;
pub mod budget;
pub mod cohomology;
pub mod error;
pub mod group;
mod linalg;
pub mod mext;
pub mod o4;
pub mod pointed;
pub mod qz;

pub use budget::Budget;
pub use error::Error;
pub use qz::QZ;

pub type Result<T> = std::result::Result<T, Error>;

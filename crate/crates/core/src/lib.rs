//! Tree almost automorphism groups, generalized posets with Morse theory,
//! the descending-link complexes `C_n`, exact integral homology and
//! equivariant cell trading.

pub mod error;
pub mod genposet;
pub mod groups;
pub mod homology;
pub mod perm;
pub mod spheroposet;
pub mod trading;

pub use error::{Error, Result};

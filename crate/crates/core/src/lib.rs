//! Residual finiteness growth for split M-groups K ⋊ Z^n.
//!
//! The nilpotent part K is modelled in Lie coordinates with the BCH product,
//! the [`separator`] builds explicit finite quotients that separate an element,
//! and the [`oracle`] computes exact divisibility values for the families where
//! all finite-index normal subgroups can be classified.

pub mod error;
pub mod experiments;
pub mod mgroup;
pub mod field;
pub mod fit;
pub mod groupfile;
pub mod lie_ring;
pub mod linalg;
pub mod ntheory;
pub mod oracle;
pub mod separator;

pub use error::{Error, Result};

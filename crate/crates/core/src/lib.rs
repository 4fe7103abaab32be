//! Pitch estimation with EEMD-based low/high frequency-region separation
//! and octave correction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emd;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod pro;
pub mod signal;
pub mod spectral;
pub mod vad;

pub use error::{Error, Result};

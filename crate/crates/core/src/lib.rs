//! Surfaces in hyperbolic 3-space as envelopes of horospheres.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod conformal;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod fields;
pub mod flow;
pub mod grid;
pub mod hyperbolic;
pub mod jet;
pub mod linalg;
pub mod mesh;
pub mod verify;
pub mod weingarten;

pub use error::{GeomError, Result};

//! Generalized singular value functions, tail majorisation, `I_h` norms and
//! computable surrogates for Dixmier-type traces `τ_ω`.
//!
//! Operators enter only through their singular value function `μ`, realised
//! as an exact step function (functions, matrices, singular value lists) or
//! as a symbolic nonincreasing function with an optional closed-form tail.
//! Extended limits `ω` are not constructible; the [`limits`] module provides
//! surrogates together with defect diagnostics against the properties an
//! extended limit must have.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod counterexample;
pub mod error;
pub mod limits;
pub mod majorize;
pub mod quad;
pub mod rearrange;
pub mod traces;
pub mod weights;

pub use error::{Error, Result};

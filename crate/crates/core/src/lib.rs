//! Finite-size continuous-variable QKD post-processing.
//!
//! The crate simulates Gaussian-modulated coherent-state transmissions and
//! runs the full classical chain on them: multidimensional reconciliation,
//! syndrome-based LDPC error correction, maximum-likelihood channel
//! estimation with worst-case bounds, finite-size key rates and Toeplitz
//! privacy amplification.
//!
//! Two estimation strategies are supported. The *legacy* one sacrifices half
//! of each block to parameter estimation. The *proposed* one reconciles the
//! whole block first, then lets Bob reveal his rotation so that Alice can
//! recover his full measurement record and estimate on every sample.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod ecc;
pub mod error;
pub mod estimation;
pub mod keyrate;
pub mod pipeline;
pub mod privacy;
pub mod reconciliation;

pub use error::{Error, Result};

//! Autoregressive range density estimation with variable skipping.
//!
//! The crate is split along the life of an estimate:
//!
//! - [`data`]: dictionary-encoded discrete tables, synthetic generators and
//!   fixed-width text tables.
//! - [`numeric`]: dense kernels with hand-derived gradients (masked affine
//!   layers, softmax cross-entropy, Adam, finite-difference checks).
//! - [`armodel`]: the ResMADE-style autoregressive network with per-column
//!   MASK embeddings, masked-input training and multi-order conditioning.
//! - [`inference`]: progressive sampling over range queries, the skipping
//!   rewrite, naive forward sampling, ensembles and forward-pass accounting.
//! - [`bench`]: workload generation, scan oracle, Q-error and quantile reports.
//! - [`textmatch`]: CONTAINS match probabilities over fixed-width strings.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. All IO lives in the companion `varskip` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod armodel;
pub mod bench;
pub mod data;
mod error;
pub mod inference;
pub(crate) mod math;
pub mod numeric;
pub mod seed;
pub mod textmatch;

pub use error::{Error, Result};

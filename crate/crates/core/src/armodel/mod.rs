//! ResMADE-style autoregressive model with MASK embeddings.
//!
//! Inputs are per-column embeddings laid out in natural column order; the
//! autoregressive ordering lives entirely in the MADE connectivity masks, so
//! a multi-order model shares one set of weights across orderings. Output
//! logits for a column are the dot products of its output block with that
//! column's embedding rows (real values only, never MASK).

mod config;
mod made;
mod model;
mod plan;
mod train;

pub use config::{MaskMode, ModelConfig, TrainConfig};
pub use made::{build_made_masks, hidden_degrees, Ordering};
pub use model::{ArModel, ParamSlot, Prepared};
pub use plan::{apply_mask_plans, sample_mask_plan, MaskPlan};
pub use train::{eval_nll_bits, train, EpochLog};

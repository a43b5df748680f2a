//! Probability that a fixed-width string contains a pattern, estimated from
//! a prefix-masked character model as a sum over match positions of
//! `P(match at i) · (1 − P(later match | match at i))`.
//!
//! Text models use the identity ordering: position `i` is character `i`.

mod bench;
mod estimator;
mod pattern;
mod uniform;

pub use bench::{run_text_bench, sample_patterns, text_query};
pub use estimator::{contains_prob, naive_contains, position_match_prob, MatchEstimate, FIRST_TERM_CUTOFF};
pub use pattern::Pattern;
pub use uniform::UniformCharModel;

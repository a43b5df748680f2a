//! Range-density estimation by progressive sampling over an autoregressive
//! model, with optional variable skipping, plus the naive forward-sampling
//! baseline, multi-order ensembling and forward-pass accounting.

mod conditional;
mod cost;
mod ensemble;
mod naive;
mod progressive;
mod query_text;
mod region;

pub use conditional::{ConditionalModel, CountingModel, EmpiricalModel};
pub use cost::forward_pass_cost;
pub use ensemble::ensemble_estimate;
pub use naive::{naive_sample, naive_sample_query};
pub use progressive::{progressive_sample, Estimate, SAMPLE_CHUNK};
pub use query_text::{format_query, parse_query};
pub use region::{RangeQuery, Region};

//! Query workloads, the exact scan oracle, q-error metrics and the
//! estimator × budget × ordering benchmark harness.

mod metrics;
mod run;
mod workload;

pub use metrics::{
    exact_count, exact_selectivity, nearest_rank, q_error, summarize, QuantileSummary, BOOTSTRAP_RESAMPLES,
};
pub use run::{
    bench_query, run_bench, BenchReport, BenchRow, Estimator, ModelSet, QueryResult, QueryRunner, Sequential,
};
pub use workload::{gen_workload, Op, WorkloadSpec};

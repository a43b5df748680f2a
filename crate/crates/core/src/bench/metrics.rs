use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Table;
use crate::inference::RangeQuery;
use crate::{math, Error, Result};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Rows of `table` satisfying every constraint of `query`.
pub fn exact_count(table: &Table, query: &RangeQuery) -> usize {
    table.iter_rows().filter(|r| query.matches(r)).count()
}

pub fn exact_selectivity(table: &Table, query: &RangeQuery) -> f64 {
    exact_count(table, query) as f64 / table.n_rows() as f64
}

/// `max(e, a) / min(e, a)` after raising both to `floor`.
pub fn q_error(estimate: f64, actual: f64, floor: f64) -> Result<f64> {
    for v in [estimate, actual, floor] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidNumber(v));
        }
    }
    if floor == 0.0 {
        return Err(Error::InvalidNumber(floor));
    }
    let (e, a) = (estimate.max(floor), actual.max(floor));
    Ok(e.max(a) / e.min(a))
}

/// Nearest-rank quantile of ascending `sorted`: element `⌈p·N⌉` (1-based).
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = math::ceil(p * n as f64) as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Median, P99 and max with bootstrap standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileSummary {
    pub median: f64,
    pub p99: f64,
    pub max: f64,
    pub median_std: f64,
    pub p99_std: f64,
    pub max_std: f64,
}

fn quantiles(sorted: &[f64]) -> [f64; 3] {
    [nearest_rank(sorted, 0.5), nearest_rank(sorted, 0.99), sorted[sorted.len() - 1]]
}

/// Quantiles of `values`, each with the sample standard deviation of that
/// quantile over `resamples` bootstrap resamples drawn with replacement.
pub fn summarize<R: Rng + ?Sized>(values: &[f64], resamples: usize, rng: &mut R) -> Result<QuantileSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|v| v.is_nan()) {
        return Err(Error::InvalidNumber(bad));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let [median, p99, max] = quantiles(&sorted);
    let n = values.len();
    let mut draws: Vec<[f64; 3]> = Vec::with_capacity(resamples);
    let mut buf = Vec::with_capacity(n);
    for _ in 0..resamples {
        buf.clear();
        buf.extend((0..n).map(|_| values[rng.random_range(0..n)]));
        buf.sort_by(f64::total_cmp);
        draws.push(quantiles(&buf));
    }
    let std = |i: usize| {
        if draws.len() < 2 {
            return 0.0;
        }
        let mean = draws.iter().map(|d| d[i]).sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d[i] - mean) * (d[i] - mean)).sum::<f64>() / (draws.len() - 1) as f64;
        math::sqrt(var)
    };
    Ok(QuantileSummary { median, p99, max, median_std: std(0), p99_std: std(1), max_std: std(2) })
}

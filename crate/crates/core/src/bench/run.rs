use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{q_error, summarize, QuantileSummary};
use crate::inference::{
    ensemble_estimate, naive_sample_query, progressive_sample, ConditionalModel, Estimate, RangeQuery,
};
use crate::{seed, Error, Result};

/// Estimator flavors compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Progressive sampling on a plain maximum-likelihood model.
    Baseline,
    /// Progressive sampling with variable skipping on a mask-trained model.
    Skipping,
    /// Ensemble over a multi-order model's orderings, no skipping.
    MultiOrder,
    MultiOrderSkipping,
    /// Unconstrained sampling on the baseline model, then filtering.
    Naive,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Baseline,
        Estimator::Skipping,
        Estimator::MultiOrder,
        Estimator::MultiOrderSkipping,
        Estimator::Naive,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::Baseline => "baseline",
            Estimator::Skipping => "skipping",
            Estimator::MultiOrder => "multiorder",
            Estimator::MultiOrderSkipping => "multiorder+skipping",
            Estimator::Naive => "naive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.label() == s.trim())
            .ok_or_else(|| Error::InvalidSpec(format!("unknown estimator `{s}`")))
    }

    fn id(self) -> u64 {
        Estimator::ALL.iter().position(|&e| e == self).expect("listed") as u64
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Models for one ordering repetition. Missing flavors only matter to the
/// estimators that need them.
#[derive(Debug, Clone)]
pub struct ModelSet<M> {
    pub baseline: Option<M>,
    pub masked: Option<M>,
    pub multi: Vec<M>,
}

impl<M> Default for ModelSet<M> {
    fn default() -> Self {
        ModelSet { baseline: None, masked: None, multi: Vec::new() }
    }
}

impl<M: ConditionalModel> ModelSet<M> {
    /// Checks that the flavors `estimator` needs are present.
    pub fn check(&self, estimator: Estimator) -> Result<()> {
        let mismatch = |reason: &str| {
            Err(Error::EstimatorMismatch { estimator: estimator.label().to_string(), reason: reason.to_string() })
        };
        match estimator {
            Estimator::Baseline | Estimator::Naive if self.baseline.is_none() => mismatch("no baseline model"),
            Estimator::Skipping => match &self.masked {
                None => mismatch("no mask-trained model"),
                Some(m) if !m.mask_trained() => mismatch("model was not trained with masking"),
                _ => Ok(()),
            },
            Estimator::MultiOrder | Estimator::MultiOrderSkipping if self.multi.is_empty() => {
                mismatch("no multi-order model")
            }
            Estimator::MultiOrderSkipping if self.multi.iter().any(|m| !m.mask_trained()) => {
                mismatch("multi-order model was not trained with masking")
            }
            _ => Ok(()),
        }
    }
}

/// Runs one estimator on one query.
pub fn bench_query<M, R>(
    models: &ModelSet<M>,
    estimator: Estimator,
    query: &RangeQuery,
    budget: usize,
    rng: &mut R,
) -> Result<Estimate>
where
    M: ConditionalModel,
    R: rand::Rng + ?Sized,
{
    models.check(estimator)?;
    let est = match estimator {
        Estimator::Baseline => {
            progressive_sample(models.baseline.as_ref().expect("checked"), query, budget, false, rng)?
        }
        Estimator::Skipping => progressive_sample(models.masked.as_ref().expect("checked"), query, budget, true, rng)?,
        Estimator::MultiOrder => ensemble_estimate(&models.multi, query, budget, false, rng)?,
        Estimator::MultiOrderSkipping => ensemble_estimate(&models.multi, query, budget, true, rng)?,
        Estimator::Naive => naive_sample_query(models.baseline.as_ref().expect("checked"), query, budget, rng)?,
    };
    Ok(est.without_weights())
}

/// Outcome for one query of one report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: usize,
    pub truth: f64,
    pub estimate: f64,
    pub q_error: f64,
    pub forward_passes: u64,
    pub std_error: f64,
}

/// One estimator × budget × ordering repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub estimator: Estimator,
    pub budget: usize,
    pub order: usize,
    pub summary: QuantileSummary,
    pub mean_forward_passes: f64,
    pub queries: Vec<QueryResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Table size; q-errors clamp estimates at `1 / n_rows`.
    pub n_rows: usize,
    pub n_queries: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, estimator: Estimator, budget: usize, order: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.budget == budget && r.order == order)
    }
}

/// Evaluates `f(0..n)`; implementations may run queries concurrently but
/// must return results in index order.
pub trait QueryRunner {
    fn run_all(&self, n: usize, f: &(dyn Fn(usize) -> Result<QueryResult> + Sync)) -> Result<Vec<QueryResult>>;
}

/// Runs queries one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl QueryRunner for Sequential {
    fn run_all(&self, n: usize, f: &(dyn Fn(usize) -> Result<QueryResult> + Sync)) -> Result<Vec<QueryResult>> {
        (0..n).map(f).collect()
    }
}

/// Runs every estimator × budget × model set over the workload.
///
/// `truths[i]` is the exact selectivity of `workload[i]` over a table of
/// `n_rows` rows. Each query draws from its own stream derived from `seed`,
/// the estimator, budget, repetition and query index, so results do not
/// depend on the runner.
#[allow(clippy::too_many_arguments)]
pub fn run_bench<M>(
    sets: &[ModelSet<M>],
    workload: &[RangeQuery],
    truths: &[f64],
    n_rows: usize,
    budgets: &[usize],
    estimators: &[Estimator],
    seed: u64,
    runner: &dyn QueryRunner,
) -> Result<BenchReport>
where
    M: ConditionalModel + Sync,
{
    if workload.len() != truths.len() {
        return Err(Error::ShapeMismatch { context: "workload truths", expected: workload.len(), found: truths.len() });
    }
    if workload.is_empty() || n_rows == 0 {
        return Err(Error::EmptyInput);
    }
    for set in sets {
        for &e in estimators {
            set.check(e)?;
        }
    }
    let floor = 1.0 / n_rows as f64;
    let mut rows = Vec::new();
    for &estimator in estimators {
        for &budget in budgets {
            for (order, set) in sets.iter().enumerate() {
                let run = move |i: usize| {
                    let mut rng = seed::stream(seed, &[estimator.id(), budget as u64, order as u64, i as u64]);
                    let est = bench_query(set, estimator, &workload[i], budget, &mut rng)?;
                    Ok(QueryResult {
                        query: i,
                        truth: truths[i],
                        estimate: est.selectivity,
                        q_error: q_error(est.selectivity, truths[i], floor)?,
                        forward_passes: est.forward_passes,
                        std_error: est.std_error,
                    })
                };
                let queries = runner.run_all(workload.len(), &run)?;
                let errors: Vec<f64> = queries.iter().map(|q| q.q_error).collect();
                let mut boot = seed::stream(seed, &[0xB0, estimator.id(), budget as u64, order as u64]);
                let summary = summarize(&errors, super::BOOTSTRAP_RESAMPLES, &mut boot)?;
                let mean_forward_passes =
                    queries.iter().map(|q| q.forward_passes as f64).sum::<f64>() / queries.len() as f64;
                rows.push(BenchRow { estimator, budget, order, summary, mean_forward_passes, queries });
            }
        }
    }
    Ok(BenchReport { n_rows, n_queries: workload.len(), seed, rows })
}

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{contains_prob, naive_contains, MatchEstimate, Pattern};
use crate::bench::{
    q_error, summarize, BenchReport, BenchRow, Estimator, QueryResult, QueryRunner, BOOTSTRAP_RESAMPLES,
};
use crate::data::TextTable;
use crate::inference::ConditionalModel;
use crate::{seed, Error, Result};

const MAX_TRIES: usize = 1000;

/// Draws `n` substrings of corpus strings (PAD excluded) with lengths
/// uniform in `min_len..=max_len`.
pub fn sample_patterns(text: &TextTable, n: usize, min_len: usize, max_len: usize, seed: u64) -> Result<Vec<String>> {
    if min_len == 0 || min_len > max_len {
        return Err(Error::InvalidSpec(alloc::format!("pattern lengths {min_len}..={max_len}")));
    }
    let mut rng = seed::stream(seed, &[0x7E]);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut tries = 0;
        loop {
            if tries == MAX_TRIES {
                return Err(Error::WorkloadRejection(MAX_TRIES));
            }
            tries += 1;
            let len = rng.random_range(min_len..=max_len);
            let chars: Vec<char> = text.decode_string(rng.random_range(0..text.table().n_rows())).chars().collect();
            if chars.len() < len {
                continue;
            }
            let start = rng.random_range(0..=chars.len() - len);
            out.push(chars[start..start + len].iter().collect());
            break;
        }
    }
    Ok(out)
}

/// Runs one text estimator: `Skipping` is the prefix-masked position sum,
/// `Naive` is unconditional sampling.
pub fn text_query<M, R>(
    model: &M,
    estimator: Estimator,
    pattern: &Pattern,
    budget: usize,
    rng: &mut R,
) -> Result<MatchEstimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    match estimator {
        Estimator::Skipping => contains_prob(model, pattern, budget, rng),
        Estimator::Naive => naive_contains(model, pattern, budget, rng),
        other => Err(Error::EstimatorMismatch {
            estimator: other.label().into(),
            reason: "text search supports skipping and naive".into(),
        }),
    }
}

/// Text counterpart of [`crate::bench::run_bench`] over one model; the
/// report rows all have `order` 0.
#[allow(clippy::too_many_arguments)]
pub fn run_text_bench<M>(
    model: &M,
    patterns: &[Pattern],
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
    if patterns.len() != truths.len() {
        return Err(Error::ShapeMismatch { context: "pattern truths", expected: patterns.len(), found: truths.len() });
    }
    if patterns.is_empty() || n_rows == 0 {
        return Err(Error::EmptyInput);
    }
    let floor = 1.0 / n_rows as f64;
    let mut rows = Vec::new();
    for (ei, &estimator) in estimators.iter().enumerate() {
        for &budget in budgets {
            let run = |i: usize| {
                let mut rng = seed::stream(seed, &[0x7B, estimator as u64, budget as u64, i as u64]);
                let est = text_query(model, estimator, &patterns[i], budget, &mut rng)?;
                Ok(QueryResult {
                    query: i,
                    truth: truths[i],
                    estimate: est.probability,
                    q_error: q_error(est.probability, truths[i], floor)?,
                    forward_passes: est.forward_passes,
                    std_error: est.std_error,
                })
            };
            let queries = runner.run_all(patterns.len(), &run)?;
            let errors: Vec<f64> = queries.iter().map(|q| q.q_error).collect();
            let mut boot = seed::stream(seed, &[0xB1, ei as u64, budget as u64]);
            let summary = summarize(&errors, BOOTSTRAP_RESAMPLES, &mut boot)?;
            let mean_forward_passes =
                queries.iter().map(|q| q.forward_passes as f64).sum::<f64>() / queries.len() as f64;
            rows.push(BenchRow { estimator, budget, order: 0, summary, mean_forward_passes, queries });
        }
    }
    Ok(BenchReport { n_rows, n_queries: patterns.len(), seed, rows })
}

use alloc::vec::Vec;

use rand::Rng;

use super::progressive::Estimate;
use super::region::pick;
use super::{ConditionalModel, RangeQuery, SAMPLE_CHUNK};
use crate::{Error, Result};

/// Fraction of `budget` unconstrained ancestral samples that satisfy
/// `predicate`; every sample costs one pass per column.
pub fn naive_sample<M, R, F>(model: &M, predicate: F, budget: usize, rng: &mut R) -> Result<Estimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
    F: Fn(&[u32]) -> bool,
{
    if budget == 0 {
        return Err(Error::ZeroBudget(budget));
    }
    let vocab = model.vocab_sizes();
    let n = vocab.len();
    let ordering = model.ordering();
    let mut weights = Vec::with_capacity(budget);
    let mut rows = Vec::new();
    let mut probs = Vec::new();
    let mut passes = 0u64;
    while weights.len() < budget {
        let b = SAMPLE_CHUNK.min(budget - weights.len());
        rows.clear();
        for _ in 0..b {
            rows.extend(vocab.iter().map(|&v| v as u32));
        }
        for pos in 0..n {
            let c = ordering.column_at(pos);
            let v = vocab[c];
            model.conditional_into(&rows, b, pos, &mut probs)?;
            passes += b as u64;
            for s in 0..b {
                let p = &probs[s * v..(s + 1) * v];
                let total: f64 = p.iter().sum();
                rows[s * n + c] =
                    pick(p.iter().copied().enumerate().map(|(i, q)| (i as u32, q)), rng.random::<f64>() * total);
            }
        }
        weights.extend(rows.chunks_exact(n).map(|r| if predicate(r) { 1.0 } else { 0.0 }));
    }
    let mut est = Estimate::from_weights(weights, passes, false);
    // Binomial standard error of a proportion.
    let p = est.selectivity;
    est.std_error = crate::math::sqrt(p * (1.0 - p) / budget as f64);
    Ok(est)
}

/// [`naive_sample`] with a range query as the predicate.
pub fn naive_sample_query<M, R>(model: &M, query: &RangeQuery, budget: usize, rng: &mut R) -> Result<Estimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    query.validate(model.vocab_sizes())?;
    naive_sample(model, |row| query.matches(row), budget, rng)
}

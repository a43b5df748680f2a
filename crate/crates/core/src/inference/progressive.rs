use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::region::pick;
use super::{ConditionalModel, RangeQuery};
use crate::{math, Error, Result};

/// Samples advanced together through the network per call.
pub const SAMPLE_CHUNK: usize = 2048;

/// Monte-Carlo range-density estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub selectivity: f64,
    pub budget: usize,
    pub forward_passes: u64,
    /// Standard error of the mean weight.
    pub std_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Estimate {
    pub(crate) fn from_weights(weights: Vec<f64>, forward_passes: u64, keep: bool) -> Self {
        let budget = weights.len();
        let mean = weights.iter().sum::<f64>() / budget as f64;
        let std_error = if budget > 1 {
            let var = weights.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (budget - 1) as f64;
            math::sqrt(var / budget as f64)
        } else {
            0.0
        };
        Estimate { selectivity: mean, budget, forward_passes, std_error, weights: keep.then_some(weights) }
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }
}

/// Progressive sampling estimate of `P(X_1 ∈ R_1, …, X_n ∈ R_n)`.
///
/// Each sample walks the model's ordering, multiplying the in-range mass of
/// every evaluated position into its weight and drawing the position's value
/// from the conditional restricted to the region. With `skipping`, only
/// constrained positions are evaluated and every other input stays MASK;
/// without it, all positions up to the last constrained one are evaluated and
/// unconstrained ones are sampled from the full conditional. A zero in-range
/// mass ends the sample with weight 0; it stays in its batch (so the pass
/// count is exactly `budget × forward_pass_cost`) but no longer matters.
pub fn progressive_sample<M, R>(
    model: &M,
    query: &RangeQuery,
    budget: usize,
    skipping: bool,
    rng: &mut R,
) -> Result<Estimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(Error::ZeroBudget(budget));
    }
    if skipping && !model.mask_trained() {
        return Err(Error::SkippingUnsupported);
    }
    let vocab = model.vocab_sizes();
    query.validate(vocab)?;
    let n = vocab.len();
    let ordering = model.ordering();
    let constrained: Vec<bool> =
        (0..n).map(|p| query.effective_region(ordering.column_at(p), vocab[ordering.column_at(p)]).is_some()).collect();
    let Some(last) = constrained.iter().rposition(|&c| c) else {
        return Ok(Estimate::from_weights(vec![1.0; budget], 0, true));
    };
    let positions: Vec<usize> = (0..=last).filter(|&p| !skipping || constrained[p]).collect();

    let mask_row: Vec<u32> = vocab.iter().map(|&v| v as u32).collect();
    let mut weights = Vec::with_capacity(budget);
    let mut passes = 0u64;
    let mut rows = Vec::with_capacity(SAMPLE_CHUNK.min(budget) * n);
    let mut probs = Vec::new();
    let mut done = 0;
    while done < budget {
        let b = SAMPLE_CHUNK.min(budget - done);
        rows.clear();
        for _ in 0..b {
            rows.extend_from_slice(&mask_row);
        }
        let start = weights.len();
        weights.resize(start + b, 1.0);
        let w = &mut weights[start..];
        for &pos in &positions {
            let c = ordering.column_at(pos);
            let v = vocab[c];
            model.conditional_into(&rows, b, pos, &mut probs)?;
            passes += b as u64;
            let region = query.effective_region(c, v);
            for s in 0..b {
                let p = &probs[s * v..(s + 1) * v];
                let value = if w[s] == 0.0 {
                    0
                } else if let Some(r) = region {
                    let mass = r.mass(p);
                    if mass > 0.0 {
                        w[s] *= mass;
                        r.sample(p, rng.random::<f64>() * mass)
                    } else {
                        w[s] = 0.0;
                        0
                    }
                } else {
                    let total: f64 = p.iter().sum();
                    pick(p.iter().copied().enumerate().map(|(i, q)| (i as u32, q)), rng.random::<f64>() * total)
                };
                rows[s * n + c] = value;
            }
        }
        done += b;
    }
    Ok(Estimate::from_weights(weights, passes, true))
}

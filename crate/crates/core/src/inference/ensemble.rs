use alloc::vec::Vec;

use rand::Rng;

use super::progressive::{progressive_sample, Estimate};
use super::{ConditionalModel, RangeQuery};
use crate::{math, Error, Result};

/// Arithmetic mean of per-ordering progressive estimates.
///
/// The budget is split evenly with the remainder going to the first members,
/// so every member needs at least one sample. Passes are summed and the
/// standard error is that of the mean of independent members.
pub fn ensemble_estimate<M, R>(
    members: &[M],
    query: &RangeQuery,
    budget: usize,
    skipping: bool,
    rng: &mut R,
) -> Result<Estimate>
where
    M: ConditionalModel,
    R: Rng + ?Sized,
{
    let k = members.len();
    if k == 0 {
        return Err(Error::EmptyInput);
    }
    if budget < k {
        return Err(Error::ZeroBudget(budget / k));
    }
    let mut parts = Vec::with_capacity(k);
    for (i, m) in members.iter().enumerate() {
        let share = budget / k + usize::from(i < budget % k);
        parts.push(progressive_sample(m, query, share, skipping, rng)?);
    }
    if k == 1 {
        return Ok(parts.pop().expect("one member"));
    }
    let selectivity = parts.iter().map(|e| e.selectivity).sum::<f64>() / k as f64;
    let std_error = math::sqrt(parts.iter().map(|e| e.std_error * e.std_error).sum::<f64>()) / k as f64;
    let forward_passes = parts.iter().map(|e| e.forward_passes).sum();
    Ok(Estimate { selectivity, budget, forward_passes, std_error, weights: None })
}

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Pattern;
use crate::inference::ConditionalModel;
use crate::{math, seed, Error, Result};

/// Positions whose first term falls below this skip second-term sampling.
pub const FIRST_TERM_CUTOFF: f64 = 1e-12;

/// Containment probability with its per-position breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEstimate {
    pub probability: f64,
    /// `P(match at i)` for every start position `i` (0-based).
    pub first_terms: Vec<f64>,
    /// Estimated `P(later match | match at i)`.
    pub second_terms: Vec<f64>,
    /// Continuation samples actually drawn.
    pub budget_used: usize,
    pub forward_passes: u64,
    pub std_error: f64,
}

impl MatchEstimate {
    /// `Σ_i P(match at i)`, which double counts strings with several matches.
    pub fn uncorrected_sum(&self) -> f64 {
        self.first_terms.iter().sum()
    }
}

fn check_model<M: ConditionalModel + ?Sized>(model: &M) -> Result<()> {
    if model.ordering().perm().iter().enumerate().any(|(i, &c)| i != c) {
        return Err(Error::InvalidSpec("text models use the identity ordering".into()));
    }
    if !model.mask_trained() {
        return Err(Error::SkippingUnsupported);
    }
    Ok(())
}

fn mask_row<M: ConditionalModel + ?Sized>(model: &M) -> Vec<u32> {
    model.vocab_sizes().iter().map(|&v| v as u32).collect()
}

// First term plus the row it leaves behind (MASK prefix, pattern at `start`).
fn first_term<M: ConditionalModel + ?Sized>(model: &M, pattern: &Pattern, start: usize) -> Result<(f64, Vec<u32>)> {
    let mut row = mask_row(model);
    let mut probs = Vec::new();
    let mut p = 1.0;
    for (t, &ch) in pattern.chars().iter().enumerate() {
        model.conditional_into(&row, 1, start + t, &mut probs)?;
        p *= probs[ch as usize];
        row[start + t] = ch;
    }
    Ok((p, row))
}

/// `P(pattern at start | every earlier character MASK)`: the product of `L`
/// conditionals, feeding the pattern's own characters forward. Costs exactly
/// `L` passes for any `start`.
pub fn position_match_prob<M: ConditionalModel + ?Sized>(model: &M, pattern: &Pattern, start: usize) -> Result<f64> {
    check_model(model)?;
    let w = model.n_cols();
    if pattern.len() > w || start > w - pattern.len() {
        return Err(Error::PositionOutOfRange {
            position: start,
            valid: format!("0..{}", (w + 1).saturating_sub(pattern.len())),
        });
    }
    Ok(first_term(model, pattern, start)?.0)
}

// Draws one character per row at `pos` from `probs`.
fn draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u32 {
    let total: f64 = probs.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i as u32;
            if acc > target {
                break;
            }
        }
    }
    last
}

/// Samples `rows` forward from position `from` until each is resolved (a
/// match starting after `after`, or PAD) or the string ends. Returns hits and
/// passes.
fn continue_rows<M, R>(
    model: &M,
    pattern: &Pattern,
    rows: &mut [u32],
    from: usize,
    after: Option<usize>,
    rng: &mut R,
) -> Result<(usize, u64)>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    let w = model.n_cols();
    let batch = rows.len() / w;
    let l = pattern.len();
    let mut resolved = vec![false; batch];
    let mut hits = 0;
    let mut passes = 0u64;
    let mut probs = Vec::new();
    for pos in from..w {
        if resolved.iter().all(|&r| r) {
            break;
        }
        model.conditional_into(rows, batch, pos, &mut probs)?;
        passes += batch as u64;
        let v = model.vocab_sizes()[pos];
        for s in 0..batch {
            if resolved[s] {
                continue;
            }
            let ch = draw(&probs[s * v..(s + 1) * v], rng);
            let row = &mut rows[s * w..(s + 1) * w];
            row[pos] = ch;
            if Some(ch) == pattern.pad() {
                resolved[s] = true;
            } else if pos + 1 >= l {
                let start = pos + 1 - l;
                if after.is_none_or(|a| start > a) && pattern.occurs_at(row, start) {
                    resolved[s] = true;
                    hits += 1;
                }
            }
        }
    }
    Ok((hits, passes))
}

/// Containment probability as `Σ_i P(match at i)·(1 − P(later match | match
/// at i))`. The second factor is estimated per position from sampled
/// continuations; `budget` is split evenly over positions, at least one
/// sample each. Positions with no room for a later match, or with a first
/// term below [`FIRST_TERM_CUTOFF`], draw nothing. Patterns longer than the
/// strings give probability 0.
pub fn contains_prob<M, R>(model: &M, pattern: &Pattern, budget: usize, rng: &mut R) -> Result<MatchEstimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(Error::ZeroBudget(budget));
    }
    check_model(model)?;
    let w = model.n_cols();
    let l = pattern.len();
    if l > w {
        return Ok(MatchEstimate {
            probability: 0.0,
            first_terms: Vec::new(),
            second_terms: Vec::new(),
            budget_used: 0,
            forward_passes: 0,
            std_error: 0.0,
        });
    }
    let n_pos = w - l + 1;
    let base = rng.random::<u64>();
    let mut first_terms = Vec::with_capacity(n_pos);
    let mut second_terms = Vec::with_capacity(n_pos);
    let mut budget_used = 0;
    let mut passes = 0u64;
    let mut var = 0.0;
    let mut total = 0.0;
    for i in 0..n_pos {
        let (first, row) = first_term(model, pattern, i)?;
        passes += l as u64;
        let share = (budget / n_pos + usize::from(i < budget % n_pos)).max(1);
        let mut second = 0.0;
        if i + l < w && first >= FIRST_TERM_CUTOFF {
            let mut rows: Vec<u32> = row.iter().copied().cycle().take(share * w).collect();
            let mut prng = seed::stream(base, &[i as u64]);
            let (hits, p) = continue_rows(model, pattern, &mut rows, i + l, Some(i), &mut prng)?;
            passes += p;
            budget_used += share;
            second = hits as f64 / share as f64;
            if share > 1 {
                var += first * first * second * (1.0 - second) / (share - 1) as f64;
            }
        }
        total += first * (1.0 - second);
        first_terms.push(first);
        second_terms.push(second);
    }
    Ok(MatchEstimate {
        probability: total.clamp(0.0, 1.0),
        first_terms,
        second_terms,
        budget_used,
        forward_passes: passes,
        std_error: math::sqrt(var),
    })
}

/// Fraction of `budget` unconditional string samples containing the pattern.
pub fn naive_contains<M, R>(model: &M, pattern: &Pattern, budget: usize, rng: &mut R) -> Result<MatchEstimate>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(Error::ZeroBudget(budget));
    }
    let w = model.n_cols();
    if model.ordering().perm().iter().enumerate().any(|(i, &c)| i != c) {
        return Err(Error::InvalidSpec("text models use the identity ordering".into()));
    }
    let mut hits = 0;
    let mut passes = 0;
    let mut done = 0;
    let template = mask_row(model);
    while done < budget {
        let b = crate::inference::SAMPLE_CHUNK.min(budget - done);
        let mut rows: Vec<u32> = template.iter().copied().cycle().take(b * w).collect();
        let (h, p) = continue_rows(model, pattern, &mut rows, 0, None, rng)?;
        hits += h;
        passes += p;
        done += b;
    }
    let p = hits as f64 / budget as f64;
    Ok(MatchEstimate {
        probability: p,
        first_terms: Vec::new(),
        second_terms: Vec::new(),
        budget_used: budget,
        forward_passes: passes,
        std_error: math::sqrt(p * (1.0 - p) / budget as f64),
    })
}

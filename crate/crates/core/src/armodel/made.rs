use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::numeric::ConnectivityMask;
use crate::{Error, Result};

/// A variable ordering: `perm[position] = column`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    perm: Vec<usize>,
    seed: u64,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Ordering { perm: (0..n).collect(), seed: 0 }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut crate::seed::stream(seed, &[0x0D]));
        Ordering { perm, seed }
    }

    /// `k` random orderings derived from `seed`.
    pub fn random_set(n: usize, k: usize, seed: u64) -> Vec<Self> {
        (0..k).map(|i| Self::random(n, crate::seed::derive(seed, &[i as u64]))).collect()
    }

    pub fn from_perm(perm: Vec<usize>, seed: u64) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &c in &perm {
            if c >= perm.len() || core::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidSpec(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Ordering { perm, seed })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn column_at(&self, position: usize) -> usize {
        self.perm[position]
    }

    /// Inverse permutation: `positions()[column] = position`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (p, &c) in self.perm.iter().enumerate() {
            pos[c] = p;
        }
        pos
    }
}

/// Round-robin degrees over `1..n` (all 1 when n == 1).
pub fn hidden_degrees(n: usize, width: usize) -> Vec<usize> {
    let span = n.saturating_sub(1).max(1);
    (0..width).map(|u| u % span + 1).collect()
}

/// Degree-based MADE masks for an input of `n` blocks of `d_emb` units,
/// hidden layers of the given widths, and an output of `n` blocks.
///
/// Input block of the column at position k has degree k + 1; a hidden unit of
/// degree m sees inputs of degree ≤ m; the output block at position k sees
/// hidden units of degree ≤ k. All hidden layers of equal width share the
/// same degrees, so identity skips between them preserve the property.
pub fn build_made_masks(
    n: usize,
    d_emb: usize,
    hidden_widths: &[usize],
    ordering: &Ordering,
) -> Result<Vec<ConnectivityMask>> {
    if n == 0 || ordering.len() != n {
        return Err(Error::InvalidSpec(format!("ordering of length {} for {n} columns", ordering.len())));
    }
    if hidden_widths.is_empty() {
        return Err(Error::InvalidSpec("at least one hidden layer required".into()));
    }
    let needed = n - 1;
    if let Some(&w) = hidden_widths.iter().find(|&&w| w < needed.max(1)) {
        return Err(Error::HiddenTooNarrow { width: w, needed });
    }
    let pos = ordering.positions();
    let block_degree = |unit: usize| pos[unit / d_emb] + 1;

    let mut masks = Vec::with_capacity(hidden_widths.len() + 1);
    let mut prev = hidden_degrees(n, hidden_widths[0]);
    masks.push(ConnectivityMask::from_fn(n * d_emb, hidden_widths[0], |i, j| prev[j] >= block_degree(i)));
    for &w in &hidden_widths[1..] {
        let next = hidden_degrees(n, w);
        masks.push(ConnectivityMask::from_fn(prev.len(), w, |i, j| next[j] >= prev[i]));
        prev = next;
    }
    masks.push(ConnectivityMask::from_fn(prev.len(), n * d_emb, |i, j| prev[i] < block_degree(j)));
    Ok(masks)
}

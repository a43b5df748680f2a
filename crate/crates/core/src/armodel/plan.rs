use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use super::{MaskMode, Ordering};

/// Columns whose inputs are replaced by MASK for one training row.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPlan {
    /// Masked columns, ascending.
    pub columns: Vec<usize>,
    pub mode: MaskMode,
}

impl MaskPlan {
    pub fn empty(mode: MaskMode) -> Self {
        MaskPlan { columns: Vec::new(), mode }
    }

    pub fn n_mask(&self) -> usize {
        self.columns.len()
    }

    pub fn is_masked(&self, column: usize) -> bool {
        self.columns.binary_search(&column).is_ok()
    }
}

/// Draws which columns to mask for one row.
///
/// `Random` and `Prefix` draw the mask count uniformly from `0..n`; `Prefix`
/// masks the first positions of `ordering`. `Fixed(p)` masks each column with
/// probability `p`, unmasking one at random if all `n` were drawn.
pub fn sample_mask_plan<R: Rng + ?Sized>(rng: &mut R, ordering: &Ordering, mode: MaskMode) -> MaskPlan {
    let n = ordering.len();
    let mut columns: Vec<usize> = match mode {
        MaskMode::None => Vec::new(),
        MaskMode::Random => {
            let k = rng.random_range(0..n);
            index::sample(rng, n, k).into_vec()
        }
        MaskMode::Prefix => {
            let k = rng.random_range(0..n);
            ordering.perm()[..k].to_vec()
        }
        MaskMode::Fixed(p) => {
            let mut c: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
            if c.len() == n {
                c.remove(rng.random_range(0..n));
            }
            c
        }
    };
    columns.sort_unstable();
    MaskPlan { columns, mode }
}

/// Overwrites masked cells of row-major `rows` with each column's MASK index.
pub fn apply_mask_plans(rows: &mut [u32], n_cols: usize, plans: &[MaskPlan], mask_index: &[u32]) {
    for (row, plan) in rows.chunks_exact_mut(n_cols).zip(plans) {
        for &c in &plan.columns {
            row[c] = mask_index[c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    #[test]
    fn single_column_is_never_masked() {
        let mut rng = stream(1, &[]);
        let o = Ordering::identity(1);
        for mode in [MaskMode::Random, MaskMode::Prefix, MaskMode::Fixed(0.9)] {
            for _ in 0..100 {
                assert_eq!(sample_mask_plan(&mut rng, &o, mode).n_mask(), 0);
            }
        }
    }

    #[test]
    fn expected_masked_fraction() {
        // n_mask ~ U{0..n-1} ⇒ E[n_mask / n] = (n - 1) / (2n) = 0.45 for n = 10.
        let mut rng = stream(2, &[]);
        let o = Ordering::identity(10);
        let draws = 100_000;
        let total: usize = (0..draws).map(|_| sample_mask_plan(&mut rng, &o, MaskMode::Random).n_mask()).sum();
        let frac = total as f64 / (draws * 10) as f64;
        assert!((frac - 0.45).abs() < 0.01, "{frac}");
    }

    #[test]
    fn prefix_plans_are_prefixes_of_the_ordering() {
        let mut rng = stream(3, &[]);
        let o = Ordering::random(8, 5);
        let pos = o.positions();
        for _ in 0..500 {
            let plan = sample_mask_plan(&mut rng, &o, MaskMode::Prefix);
            let mut p: Vec<usize> = plan.columns.iter().map(|&c| pos[c]).collect();
            p.sort_unstable();
            assert_eq!(p, (0..plan.n_mask()).collect::<Vec<_>>());
            assert!(plan.n_mask() < 8);
        }
    }

    #[test]
    fn fixed_probability_keeps_one_column() {
        let mut rng = stream(4, &[]);
        let o = Ordering::identity(3);
        for _ in 0..500 {
            assert!(sample_mask_plan(&mut rng, &o, MaskMode::Fixed(0.99)).n_mask() < 3);
        }
    }
}

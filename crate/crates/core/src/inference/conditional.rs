use alloc::format;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::armodel::{Ordering, Prepared};
use crate::data::Table;
use crate::{Error, Result};

/// Anything that can produce `p(x_c | earlier positions)` for the column at
/// a given position of its ordering.
///
/// `rows` is row-major in natural column order; each cell is a real value
/// index or the column's MASK index (`vocab_sizes()[c]`). Cells at the
/// queried position and later are ignored. One call on `batch` rows counts
/// as `batch` forward passes.
pub trait ConditionalModel {
    fn vocab_sizes(&self) -> &[usize];

    fn ordering(&self) -> &Ordering;

    /// Whether MASK inputs carry meaning (required for variable skipping).
    fn mask_trained(&self) -> bool;

    /// Writes `batch × vocab` probabilities of the column at `position`.
    fn conditional_into(&self, rows: &[u32], batch: usize, position: usize, out: &mut Vec<f64>) -> Result<()>;

    fn n_cols(&self) -> usize {
        self.vocab_sizes().len()
    }
}

impl<T: ConditionalModel + ?Sized> ConditionalModel for &T {
    fn vocab_sizes(&self) -> &[usize] {
        (**self).vocab_sizes()
    }

    fn ordering(&self) -> &Ordering {
        (**self).ordering()
    }

    fn mask_trained(&self) -> bool {
        (**self).mask_trained()
    }

    fn conditional_into(&self, rows: &[u32], batch: usize, position: usize, out: &mut Vec<f64>) -> Result<()> {
        (**self).conditional_into(rows, batch, position, out)
    }
}

impl ConditionalModel for Prepared<'_> {
    fn vocab_sizes(&self) -> &[usize] {
        self.model().vocab_sizes()
    }

    fn ordering(&self) -> &Ordering {
        Prepared::ordering(self)
    }

    fn mask_trained(&self) -> bool {
        self.model().mask_mode().is_masking()
    }

    fn conditional_into(&self, rows: &[u32], batch: usize, position: usize, out: &mut Vec<f64>) -> Result<()> {
        let probs = self.conditional_probs(rows, batch, position)?;
        out.clear();
        out.extend_from_slice(probs.data());
        Ok(())
    }
}

/// Wraps a model and counts forward passes (one per row per call).
#[derive(Debug)]
pub struct CountingModel<M> {
    inner: M,
    passes: AtomicU64,
}

impl<M: ConditionalModel> CountingModel<M> {
    pub fn new(inner: M) -> Self {
        CountingModel { inner, passes: AtomicU64::new(0) }
    }

    pub fn passes(&self) -> u64 {
        self.passes.load(AtomicOrdering::Relaxed)
    }

    pub fn reset(&self) {
        self.passes.store(0, AtomicOrdering::Relaxed);
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: ConditionalModel> ConditionalModel for CountingModel<M> {
    fn vocab_sizes(&self) -> &[usize] {
        self.inner.vocab_sizes()
    }

    fn ordering(&self) -> &Ordering {
        self.inner.ordering()
    }

    fn mask_trained(&self) -> bool {
        self.inner.mask_trained()
    }

    fn conditional_into(&self, rows: &[u32], batch: usize, position: usize, out: &mut Vec<f64>) -> Result<()> {
        self.passes.fetch_add(batch as u64, AtomicOrdering::Relaxed);
        self.inner.conditional_into(rows, batch, position, out)
    }
}

/// Exact empirical conditionals of a table under an ordering.
///
/// MASK inputs marginalize their column out. When no row matches the
/// conditioning values the conditional is uniform.
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    table: Table,
    vocab_sizes: Vec<usize>,
    ordering: Ordering,
}

impl EmpiricalModel {
    pub fn new(table: Table, ordering: Ordering) -> Result<Self> {
        if ordering.len() != table.n_cols() {
            return Err(Error::ShapeMismatch {
                context: "ordering length",
                expected: table.n_cols(),
                found: ordering.len(),
            });
        }
        let vocab_sizes = table.vocab_sizes();
        Ok(EmpiricalModel { table, vocab_sizes, ordering })
    }

    pub fn table(&self) -> &Table {
        &self.table
    }
}

impl ConditionalModel for EmpiricalModel {
    fn vocab_sizes(&self) -> &[usize] {
        &self.vocab_sizes
    }

    fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    fn mask_trained(&self) -> bool {
        true
    }

    fn conditional_into(&self, rows: &[u32], batch: usize, position: usize, out: &mut Vec<f64>) -> Result<()> {
        let n = self.vocab_sizes.len();
        if position >= n {
            return Err(Error::PositionOutOfRange { position, valid: format!("0..{n}") });
        }
        if rows.len() != batch * n {
            return Err(Error::ShapeMismatch { context: "conditional rows", expected: batch * n, found: rows.len() });
        }
        let c = self.ordering.column_at(position);
        let v = self.vocab_sizes[c];
        out.clear();
        out.resize(batch * v, 0.0);
        let earlier = &self.ordering.perm()[..position];
        for (b, probs) in out.chunks_exact_mut(v).enumerate() {
            let given = &rows[b * n..(b + 1) * n];
            let mut total = 0usize;
            for row in self.table.iter_rows() {
                let hit = earlier.iter().all(|&j| given[j] as usize == self.vocab_sizes[j] || given[j] == row[j]);
                if hit {
                    probs[row[c] as usize] += 1.0;
                    total += 1;
                }
            }
            if total == 0 {
                probs.fill(1.0 / v as f64);
            } else {
                probs.iter_mut().for_each(|p| *p /= total as f64);
            }
        }
        Ok(())
    }
}

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::armodel::Ordering;
use crate::inference::ConditionalModel;
use crate::{Error, Result};

/// Strings of `width` independent characters, uniform over `alphabet`
/// symbols. Every conditional is `1 / alphabet` whatever the inputs.
#[derive(Debug, Clone)]
pub struct UniformCharModel {
    vocab_sizes: Vec<usize>,
    ordering: Ordering,
}

impl UniformCharModel {
    pub fn new(width: usize, alphabet: usize) -> Self {
        UniformCharModel { vocab_sizes: vec![alphabet; width], ordering: Ordering::identity(width) }
    }
}

impl ConditionalModel for UniformCharModel {
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
        let w = self.vocab_sizes.len();
        if position >= w {
            return Err(Error::PositionOutOfRange { position, valid: format!("0..{w}") });
        }
        if rows.len() != batch * w {
            return Err(Error::ShapeMismatch { context: "conditional rows", expected: batch * w, found: rows.len() });
        }
        let a = self.vocab_sizes[position];
        out.clear();
        out.resize(batch * a, 1.0 / a as f64);
        Ok(())
    }
}

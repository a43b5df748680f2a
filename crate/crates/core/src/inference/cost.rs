use crate::armodel::Ordering;

use super::RangeQuery;

/// Network evaluations one progressive sample needs.
///
/// Without skipping the walk runs up to and including the last constrained
/// position (trailing positions have mass 1); with skipping only constrained
/// positions are evaluated.
pub fn forward_pass_cost(query: &RangeQuery, vocab_sizes: &[usize], ordering: &Ordering, skipping: bool) -> usize {
    let constrained = query.constrained_columns(vocab_sizes);
    if skipping {
        return constrained.len();
    }
    let pos = ordering.positions();
    constrained.iter().map(|&c| pos[c] + 1).max().unwrap_or(0)
}

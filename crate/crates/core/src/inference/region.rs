use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Allowed values of one column, as indices into its real vocab.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Inclusive index interval.
    Interval { lo: u32, hi: u32 },
    /// Sorted, deduplicated index set.
    Set(Vec<u32>),
}

impl Region {
    pub fn point(v: u32) -> Self {
        Region::Interval { lo: v, hi: v }
    }

    pub fn set(mut values: Vec<u32>) -> Self {
        values.sort_unstable();
        values.dedup();
        Region::Set(values)
    }

    pub fn contains(&self, v: u32) -> bool {
        match self {
            Region::Interval { lo, hi } => (*lo..=*hi).contains(&v),
            Region::Set(s) => s.binary_search(&v).is_ok(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Region::Interval { lo, hi } => {
                if hi >= lo {
                    (hi - lo) as usize + 1
                } else {
                    0
                }
            }
            Region::Set(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest index in the region.
    pub fn max(&self) -> Option<u32> {
        match self {
            Region::Interval { lo, hi } => (hi >= lo).then_some(*hi),
            Region::Set(s) => s.last().copied(),
        }
    }

    /// True when the region covers the whole domain `0..domain`.
    pub fn is_full(&self, domain: usize) -> bool {
        self.len() == domain && self.max().is_some_and(|m| (m as usize) < domain)
    }

    pub fn indices(&self) -> Vec<u32> {
        match self {
            Region::Interval { lo, hi } => (*lo..=*hi).collect(),
            Region::Set(s) => s.clone(),
        }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        match (self, other) {
            (Region::Interval { lo: a, hi: b }, Region::Interval { lo: c, hi: d }) => {
                let (lo, hi) = ((*a).max(*c), (*b).min(*d));
                if lo <= hi {
                    Region::Interval { lo, hi }
                } else {
                    Region::Set(Vec::new())
                }
            }
            (Region::Set(s), r) | (r, Region::Set(s)) => {
                Region::Set(s.iter().copied().filter(|&v| r.contains(v)).collect())
            }
        }
    }

    /// `Σ_{v ∈ region} probs[v]`, capped at 1 against rounding.
    pub fn mass(&self, probs: &[f64]) -> f64 {
        let m: f64 = match self {
            Region::Interval { lo, hi } => probs[*lo as usize..=*hi as usize].iter().sum(),
            Region::Set(s) => s.iter().map(|&v| probs[v as usize]).sum(),
        };
        m.min(1.0)
    }

    /// Inverse-CDF draw restricted to the region: the first value whose
    /// running mass exceeds `target` (with `0 ≤ target < mass`).
    pub fn sample(&self, probs: &[f64], target: f64) -> u32 {
        match self {
            Region::Interval { lo, hi } => pick((*lo..=*hi).map(|v| (v, probs[v as usize])), target),
            Region::Set(s) => pick(s.iter().map(|&v| (v, probs[v as usize])), target),
        }
    }
}

/// Walks `(value, p)` pairs accumulating `p` and returns the first positive
/// entry that pushes the total past `target`; falls back to the last positive
/// entry when rounding leaves the total short.
pub(crate) fn pick(items: impl Iterator<Item = (u32, f64)>, target: f64) -> u32 {
    let mut acc = 0.0;
    let mut last = None;
    for (v, p) in items {
        if p > 0.0 {
            acc += p;
            last = Some(v);
            if acc > target {
                return v;
            }
        }
    }
    last.expect("pick needs positive mass")
}

/// Conjunction of per-column regions; `None` leaves a column unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeQuery {
    regions: Vec<Option<Region>>,
}

impl RangeQuery {
    pub fn unconstrained(n_cols: usize) -> Self {
        RangeQuery { regions: alloc::vec![None; n_cols] }
    }

    pub fn n_cols(&self) -> usize {
        self.regions.len()
    }

    pub fn regions(&self) -> &[Option<Region>] {
        &self.regions
    }

    pub fn region(&self, column: usize) -> Option<&Region> {
        self.regions[column].as_ref()
    }

    /// Intersects `region` into the column's current constraint.
    pub fn constrain(&mut self, column: usize, region: Region) {
        let r = &mut self.regions[column];
        *r = Some(match r.take() {
            Some(old) => old.intersect(&region),
            None => region,
        });
    }

    pub fn with(mut self, column: usize, region: Region) -> Self {
        self.constrain(column, region);
        self
    }

    /// Columns whose region is strictly smaller than the full domain.
    pub fn constrained_columns(&self, vocab_sizes: &[usize]) -> Vec<usize> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(c, r)| r.as_ref().is_some_and(|r| !r.is_full(vocab_sizes[*c])))
            .map(|(c, _)| c)
            .collect()
    }

    /// Region of a column unless it is absent or covers the whole domain.
    pub fn effective_region(&self, column: usize, domain: usize) -> Option<&Region> {
        self.regions[column].as_ref().filter(|r| !r.is_full(domain))
    }

    pub fn matches(&self, row: &[u32]) -> bool {
        self.regions.iter().zip(row).all(|(r, &v)| r.as_ref().is_none_or(|r| r.contains(v)))
    }

    /// Checks shape, non-emptiness and that every index is a real value.
    pub fn validate(&self, vocab_sizes: &[usize]) -> Result<()> {
        if self.regions.len() != vocab_sizes.len() {
            return Err(Error::ShapeMismatch {
                context: "query columns",
                expected: vocab_sizes.len(),
                found: self.regions.len(),
            });
        }
        for (c, r) in self.regions.iter().enumerate() {
            let Some(r) = r else { continue };
            match r.max() {
                None => return Err(Error::EmptyRegion(format!("{c}"))),
                Some(m) if m as usize >= vocab_sizes[c] => {
                    return Err(Error::IndexOutOfRange {
                        column: format!("{c}"),
                        index: m,
                        limit: vocab_sizes[c] as u32,
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interval_and_set_agree() {
        let a = Region::Interval { lo: 2, hi: 5 };
        let b = Region::set(vec![5, 2, 3, 4, 4]);
        assert_eq!(a.indices(), b.indices());
        let probs = [0.1, 0.1, 0.2, 0.2, 0.3, 0.1];
        assert!((a.mass(&probs) - b.mass(&probs)).abs() < 1e-15);
        for t in [0.0, 0.19, 0.21, 0.5, 0.79] {
            assert_eq!(a.sample(&probs, t), b.sample(&probs, t));
        }
    }

    #[test]
    fn sampling_skips_zero_probability_values() {
        let r = Region::Interval { lo: 0, hi: 3 };
        let probs = [0.0, 0.5, 0.0, 0.5];
        assert_eq!(r.sample(&probs, 0.0), 1);
        assert_eq!(r.sample(&probs, 0.7), 3);
        assert_eq!(r.sample(&probs, 0.999_999_999), 3);
    }

    #[test]
    fn intersections() {
        let a = Region::Interval { lo: 2, hi: 5 };
        assert_eq!(a.intersect(&Region::Interval { lo: 4, hi: 9 }), Region::Interval { lo: 4, hi: 5 });
        assert!(a.intersect(&Region::point(7)).is_empty());
        assert_eq!(a.intersect(&Region::set(vec![1, 3, 5])), Region::Set(vec![3, 5]));
    }

    #[test]
    fn full_regions_are_unconstrained() {
        let q = RangeQuery::unconstrained(3)
            .with(0, Region::Interval { lo: 0, hi: 3 })
            .with(1, Region::Interval { lo: 0, hi: 2 })
            .with(2, Region::set(vec![0, 1]));
        assert_eq!(q.constrained_columns(&[4, 4, 2]), vec![1]);
        assert!(q.validate(&[4, 4, 2]).is_ok());
        assert!(q.validate(&[4, 2, 2]).is_err());
        let empty = RangeQuery::unconstrained(1).with(0, Region::point(1)).with(0, Region::point(2));
        assert!(matches!(empty.validate(&[4]), Err(Error::EmptyRegion(_))));
    }
}

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::exact_count;
use crate::data::Table;
use crate::inference::{RangeQuery, Region};
use crate::{seed, Error, Result};

const MAX_TRIES: usize = 1000;

/// Comparison used for a generated constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Eq,
    Le,
    Ge,
}

impl Op {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "==" => Ok(Op::Eq),
            "<=" => Ok(Op::Le),
            ">=" => Ok(Op::Ge),
            other => Err(Error::InvalidSpec(format!("unsupported workload operator `{other}`"))),
        }
    }

    fn region(self, value: u32, domain: usize) -> Region {
        match self {
            Op::Eq => Region::point(value),
            Op::Le => Region::Interval { lo: 0, hi: value },
            Op::Ge => Region::Interval { lo: value, hi: domain as u32 - 1 },
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Eq => "==",
            Op::Le => "<=",
            Op::Ge => ">=",
        })
    }
}

/// Random conjunctive workload: each query constrains between `min` and
/// `max` distinct columns (clamped to the table width).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n_queries: usize,
    pub min_constraints: usize,
    pub max_constraints: usize,
    pub ops: Vec<Op>,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn new(n_queries: usize, seed: u64) -> Self {
        WorkloadSpec { n_queries, min_constraints: 5, max_constraints: 12, ops: vec![Op::Eq, Op::Le, Op::Ge], seed }
    }

    fn clamped(&self, n_cols: usize) -> Result<(usize, usize)> {
        let (lo, hi) = (self.min_constraints.min(n_cols), self.max_constraints.min(n_cols));
        if lo == 0 || lo > hi || self.ops.is_empty() {
            return Err(Error::InvalidSpec(format!(
                "constraint range {}..={} with {} operators",
                self.min_constraints,
                self.max_constraints,
                self.ops.len()
            )));
        }
        Ok((lo, hi))
    }
}

/// Draws queries whose literals come from a uniformly chosen pivot row, so
/// every query matches at least that row. Queries with no matching row would
/// be redrawn (up to 1000 times).
pub fn gen_workload(table: &Table, spec: &WorkloadSpec) -> Result<Vec<RangeQuery>> {
    let n = table.n_cols();
    let (lo, hi) = spec.clamped(n)?;
    let vocab = table.vocab_sizes();
    let mut rng = seed::stream(spec.seed, &[0x3F]);
    let mut out = Vec::with_capacity(spec.n_queries);
    for _ in 0..spec.n_queries {
        let mut tries = 0;
        let query = loop {
            if tries == MAX_TRIES {
                return Err(Error::WorkloadRejection(MAX_TRIES));
            }
            tries += 1;
            let k = rng.random_range(lo..=hi);
            let mut cols = index::sample(&mut rng, n, k).into_vec();
            cols.sort_unstable();
            let pivot = table.row(rng.random_range(0..table.n_rows()));
            let mut q = RangeQuery::unconstrained(n);
            for c in cols {
                let op = spec.ops[rng.random_range(0..spec.ops.len())];
                q.constrain(c, op.region(pivot[c], vocab[c]));
            }
            if exact_count(table, &q) > 0 {
                break q;
            }
        };
        out.push(query);
    }
    Ok(out)
}

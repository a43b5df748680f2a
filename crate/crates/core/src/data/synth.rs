use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{Column, Table, Vocab};
use crate::seed::StreamRng;
use crate::{Error, Result};

/// Parameters of the latent-factor generator behind [`synth_table`].
///
/// Columns are bound round-robin to `depth` latent factors. Column `f < depth`
/// is the anchor of factor `f` and equals the latent value itself; every other
/// column is a fixed (seeded) function of its factor's latent value. With
/// probability `noise` a cell is replaced by a uniform draw from its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_cols: usize,
    pub domain_sizes: Vec<usize>,
    pub n_rows: usize,
    pub depth: usize,
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Draws each domain size uniformly from `lo..=hi` using `seed`.
    pub fn with_random_domains(
        n_cols: usize,
        lo: usize,
        hi: usize,
        n_rows: usize,
        depth: usize,
        noise: f64,
        seed: u64,
    ) -> Self {
        let mut rng = crate::seed::stream(seed, &[0xD0]);
        let domain_sizes = (0..n_cols).map(|_| rng.random_range(lo..=hi.max(lo))).collect();
        SynthSpec { n_cols, domain_sizes, n_rows, depth, noise, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cols == 0 || self.n_rows == 0 {
            return Err(Error::InvalidSpec("n_cols and n_rows must be positive".into()));
        }
        if self.domain_sizes.len() != self.n_cols {
            return Err(Error::InvalidSpec(format!(
                "{} domain sizes for {} columns",
                self.domain_sizes.len(),
                self.n_cols
            )));
        }
        if let Some(d) = self.domain_sizes.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpec(format!("domain size {d} < 2")));
        }
        if self.depth == 0 || self.depth > self.n_cols {
            return Err(Error::InvalidSpec(format!("depth {} not in 1..={}", self.depth, self.n_cols)));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::InvalidSpec(format!("noise {} not in [0, 1]", self.noise)));
        }
        Ok(())
    }
}

/// Generates a correlated table; identical specs give identical tables.
pub fn synth_table(spec: &SynthSpec) -> Result<Table> {
    spec.validate()?;
    let mut rng = StreamRng::seed_from_u64(spec.seed);
    let n = spec.n_cols;
    let latent: Vec<usize> = (0..spec.depth).map(|f| spec.domain_sizes[f]).collect();

    // Value maps: anchors are the identity, other columns scale the latent
    // value into their own domain and then permute it.
    let maps: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let f = j % spec.depth;
            let dom = spec.domain_sizes[j];
            let mut perm: Vec<u32> = (0..dom as u32).collect();
            if j != f {
                perm.shuffle(&mut rng);
            }
            (0..latent[f]).map(|z| perm[z * dom / latent[f]]).collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(spec.n_rows * n);
    let mut z = alloc::vec![0usize; spec.depth];
    for _ in 0..spec.n_rows {
        for (zf, &l) in z.iter_mut().zip(&latent) {
            *zf = rng.random_range(0..l);
        }
        for j in 0..n {
            let clean = maps[j][z[j % spec.depth]];
            let v = if spec.noise > 0.0 && rng.random::<f64>() < spec.noise {
                rng.random_range(0..spec.domain_sizes[j] as u32)
            } else {
                clean
            };
            rows.push(v);
        }
    }
    let columns = spec
        .domain_sizes
        .iter()
        .enumerate()
        .map(|(j, &d)| Column { name: format!("col{j}"), vocab: Vocab::integer_range(d) })
        .collect();
    Table::new(format!("synth-{}", spec.seed), columns, rows)
}

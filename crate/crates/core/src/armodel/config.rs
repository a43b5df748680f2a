use alloc::format;
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How training inputs are masked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaskMode {
    /// Plain maximum likelihood; the model cannot be used with skipping.
    None,
    /// Per row, mask a uniformly sized random subset of `0..n` columns.
    Random,
    /// Per row, mask a uniformly sized prefix of the ordering (text).
    Prefix,
    /// Mask each column independently with a fixed probability.
    Fixed(f64),
}

impl MaskMode {
    pub fn is_masking(&self) -> bool {
        !matches!(self, MaskMode::None)
    }

    /// Accepts `none`, `random`, `prefix` or `fixed:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(MaskMode::None),
            "random" | "uniform" => Ok(MaskMode::Random),
            "prefix" => Ok(MaskMode::Prefix),
            other => {
                let p = other
                    .strip_prefix("fixed:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .filter(|p| (0.0..1.0).contains(p))
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown mask mode `{other}`")))?;
                Ok(MaskMode::Fixed(p))
            }
        }
    }
}

impl fmt::Display for MaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaskMode::None => f.write_str("none"),
            MaskMode::Random => f.write_str("random"),
            MaskMode::Prefix => f.write_str("prefix"),
            MaskMode::Fixed(p) => write!(f, "fixed:{p}"),
        }
    }
}

/// Network shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Residual blocks, each holding two masked hidden layers.
    pub blocks: usize,
    /// Hidden units of a single-order model; multi-order models shrink this
    /// to keep about the same parameter count.
    pub hidden: usize,
    pub d_emb: usize,
    /// Number of orderings the model is trained under.
    pub orders: usize,
    /// One embedding table shared by every column (text).
    pub tied_embeddings: bool,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { blocks: 3, hidden: 64, d_emb: 8, orders: 1, tied_embeddings: false, seed: 0 }
    }
}

impl ModelConfig {
    /// Full-scale architecture: 3 blocks of 2×256 units, 32-wide embeddings.
    pub fn full_scale() -> Self {
        ModelConfig { hidden: 256, d_emb: 32, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.d_emb == 0 || self.orders == 0 {
            return Err(Error::InvalidSpec("hidden, d_emb and orders must be positive".into()));
        }
        Ok(())
    }
}

/// Optimisation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Linear warmup from 0 over this many epochs, then constant.
    pub warmup_epochs: usize,
    pub mask_mode: MaskMode,
    /// Rows used for the unmasked evaluation NLL each epoch (0 = all).
    pub eval_rows: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 256,
            lr: 2e-3,
            warmup_epochs: 1,
            mask_mode: MaskMode::Random,
            eval_rows: 20_000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Full-scale schedule: 20 epochs, batch 2048, lr 5e-4, 1 warmup epoch.
    pub fn full_scale() -> Self {
        TrainConfig { batch_size: 2048, lr: 5e-4, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "batch_size {} / lr {} must be positive",
                self.batch_size, self.lr
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("mask={} epochs={} bs={} lr={}", self.mask_mode, self.epochs, self.batch_size, self.lr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn mask_modes_round_trip_through_text() {
        for m in [MaskMode::None, MaskMode::Random, MaskMode::Prefix, MaskMode::Fixed(0.3)] {
            assert_eq!(MaskMode::parse(&m.to_string()).unwrap(), m);
        }
        assert!(MaskMode::parse("fixed:1.5").is_err());
        assert!(MaskMode::parse("sometimes").is_err());
    }
}

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_mask_plan, ArModel, MaskMode, MaskPlan, TrainConfig};
use crate::data::Table;
use crate::numeric::{adam_step, AdamState};
use crate::{math, seed, Error, Result};

const EVAL_CHUNK: usize = 1024;

/// Progress after one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub steps: u64,
    /// Mean training loss over the epoch's (masked) batches, bits per row.
    pub train_bits: f64,
    /// NLL of unmasked rows, bits per row, averaged over orderings.
    pub eval_bits: f64,
    pub lr: f64,
}

/// Trains `model` on `table` with Adam, sampling a fresh ordering per batch
/// (multi-order models) and a fresh mask plan per row. Targets are always the
/// original values. `on_epoch` sees each epoch's log as it completes.
pub fn train(
    model: &mut ArModel,
    table: &Table,
    cfg: &TrainConfig,
    on_epoch: &mut dyn FnMut(&EpochLog),
) -> Result<Vec<EpochLog>> {
    cfg.validate()?;
    if table.vocab_sizes() != model.vocab_sizes() {
        return Err(Error::InvalidSpec("table vocab sizes differ from the model's".into()));
    }
    model.set_mask_mode(cfg.mask_mode);
    let n = table.n_cols();
    let n_rows = table.n_rows();
    let batch = cfg.batch_size.min(n_rows);
    let steps_per_epoch = n_rows.div_ceil(batch);
    let warmup = (cfg.warmup_epochs * steps_per_epoch) as f64;
    let mask_index = model.mask_indices();
    let mut rng = seed::stream(cfg.seed, &[0x7A]);
    let mut adam = AdamState::new(model.param_count());
    let mut order: Vec<usize> = (0..n_rows).collect();
    let mut targets = Vec::with_capacity(batch * n);
    let mut inputs = Vec::with_capacity(batch * n);
    let mut plans: Vec<MaskPlan> = Vec::with_capacity(batch);
    let mut logs = Vec::with_capacity(cfg.epochs);
    let mut step = 0u64;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut lr = cfg.lr;
        for chunk in order.chunks(batch) {
            let k = if model.orderings().len() > 1 { rng.random_range(0..model.orderings().len()) } else { 0 };
            targets.clear();
            for &i in chunk {
                targets.extend_from_slice(table.row(i));
            }
            inputs.clear();
            inputs.extend_from_slice(&targets);
            plans.clear();
            if cfg.mask_mode != MaskMode::None {
                let ordering = &model.orderings()[k];
                plans.extend(chunk.iter().map(|_| sample_mask_plan(&mut rng, ordering, cfg.mask_mode)));
                super::apply_mask_plans(&mut inputs, n, &plans, &mask_index);
            }
            let diverged = |loss: f64| Error::Divergence { epoch, step: step as usize, loss };
            let (loss, grads) = match model.prepare(k)?.loss_and_grads(&inputs, &targets, chunk.len()) {
                Ok(v) => v,
                Err(Error::NonFiniteLoss { .. }) => return Err(diverged(f64::NAN)),
                Err(e) => return Err(e),
            };
            lr = if warmup > 0.0 { cfg.lr * ((step + 1) as f64 / warmup).min(1.0) } else { cfg.lr };
            if adam_step(model.params_mut(), &grads, &mut adam, lr).is_err() {
                return Err(diverged(loss));
            }
            loss_sum += loss * chunk.len() as f64;
            step += 1;
        }
        let eval_bits = eval_nll_bits(model, table, cfg.eval_rows)?;
        if !eval_bits.is_finite() {
            return Err(Error::Divergence { epoch, step: step as usize, loss: eval_bits });
        }
        let log = EpochLog {
            epoch,
            steps: step,
            train_bits: loss_sum / n_rows as f64 / core::f64::consts::LN_2,
            eval_bits,
            lr,
        };
        on_epoch(&log);
        logs.push(log);
    }
    Ok(logs)
}

/// Mean negative log-likelihood in bits per row of unmasked rows, averaged
/// over the model's orderings. `max_rows > 0` evaluates an evenly strided
/// subset of that many rows.
pub fn eval_nll_bits(model: &ArModel, table: &Table, max_rows: usize) -> Result<f64> {
    let n_rows = table.n_rows();
    let picked: Vec<usize> = if max_rows == 0 || max_rows >= n_rows {
        (0..n_rows).collect()
    } else {
        (0..max_rows).map(|i| i * n_rows / max_rows).collect()
    };
    let n = table.n_cols();
    let mut rows = Vec::with_capacity(EVAL_CHUNK * n);
    let mut total = 0.0;
    for k in 0..model.orderings().len() {
        let prepared = model.prepare(k)?;
        for chunk in picked.chunks(EVAL_CHUNK) {
            rows.clear();
            for &i in chunk {
                rows.extend_from_slice(table.row(i));
            }
            total += prepared.nll_rows(&rows, &rows, chunk.len())?.iter().sum::<f64>();
        }
    }
    Ok(total / (picked.len() * model.orderings().len()) as f64 / math::ln(2.0))
}

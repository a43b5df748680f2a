//! Model checkpoints: `VSKC`, format version, a JSON header (configs,
//! schema, orderings, training log), the bit-packed MADE masks and the flat
//! parameters as little-endian `f64`. Masks are rebuilt from the orderings on
//! load and must match the stored ones.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use varskip_core::armodel::{ArModel, EpochLog, MaskMode, ModelConfig, Ordering, TrainConfig};
use varskip_core::data::Column;
use varskip_core::numeric::ConnectivityMask;

use crate::tablefile::{check_magic, read_json_block, write_json_block, write_u32};
use crate::{AppError, AppResult};

const MAGIC: &[u8; 4] = b"VSKC";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tabular,
    /// Fixed-width strings over one shared character vocab.
    Text {
        width: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub kind: ModelKind,
    pub table_name: String,
    pub schema: Vec<Column>,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub vocab_sizes: Vec<usize>,
    pub orderings: Vec<Ordering>,
    pub mask_mode: MaskMode,
    pub hidden_width: usize,
    pub param_count: usize,
    pub mask_shapes: Vec<(usize, usize)>,
    pub log: Vec<EpochLog>,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub model: ArModel,
}

impl Checkpoint {
    pub fn new(
        kind: ModelKind,
        table_name: &str,
        schema: Vec<Column>,
        train: TrainConfig,
        log: Vec<EpochLog>,
        model: ArModel,
    ) -> Self {
        let meta = CheckpointMeta {
            kind,
            table_name: table_name.to_string(),
            schema,
            model: model.config().clone(),
            train,
            vocab_sizes: model.vocab_sizes().to_vec(),
            orderings: model.orderings().to_vec(),
            mask_mode: model.mask_mode(),
            hidden_width: model.hidden_width(),
            param_count: model.param_count(),
            mask_shapes: model.masks(0).iter().map(|m| (m.rows(), m.cols())).collect(),
            log,
        };
        Checkpoint { meta, model }
    }

    pub fn save(&self, path: &Path) -> AppResult<()> {
        let file = File::create(path).map_err(|e| AppError::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| AppError::io(path, e);
        w.write_all(MAGIC).map_err(io)?;
        write_u32(&mut w, VERSION).map_err(io)?;
        write_json_block(&mut w, &self.meta, path)?;
        for k in 0..self.model.orderings().len() {
            for mask in self.model.masks(k) {
                w.write_all(&mask.to_bytes()).map_err(io)?;
            }
        }
        for p in self.model.params() {
            w.write_all(&p.to_le_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let file = File::open(path).map_err(|e| AppError::io(path, e))?;
        let mut r = BufReader::new(file);
        check_magic(&mut r, path, MAGIC, VERSION)?;
        let meta: CheckpointMeta = read_json_block(&mut r, path)?;
        let io = |e| AppError::io(path, e);
        let mut masks = Vec::with_capacity(meta.orderings.len());
        for _ in &meta.orderings {
            let mut set = Vec::with_capacity(meta.mask_shapes.len());
            for &(rows, cols) in &meta.mask_shapes {
                let mut bytes = vec![0u8; (rows * cols).div_ceil(8)];
                r.read_exact(&mut bytes).map_err(io)?;
                set.push(ConnectivityMask::from_bytes(rows, cols, &bytes)?);
            }
            masks.push(set);
        }
        let mut raw = vec![0u8; meta.param_count * 8];
        r.read_exact(&mut raw).map_err(io)?;
        let params = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing).map_err(io)? != 0 {
            return Err(AppError::format(path, "trailing bytes after parameters"));
        }
        let model = ArModel::from_parts(
            &meta.vocab_sizes,
            meta.model.clone(),
            meta.orderings.clone(),
            Some(masks),
            params,
            meta.mask_mode,
        )
        .map_err(|e| AppError::format(path, e.to_string()))?;
        if model.hidden_width() != meta.hidden_width {
            return Err(AppError::format(path, "hidden width disagrees with the model config"));
        }
        Ok(Checkpoint { meta, model })
    }
}

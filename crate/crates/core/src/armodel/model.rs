use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_made_masks, MaskMode, MaskPlan, ModelConfig, Ordering};
use crate::math;
use crate::numeric::{
    gemm_strided, relu, relu_backward, softmax_cross_entropy, softmax_in_place, ConnectivityMask, DenseMatrix,
    LayerGrads, LayerView, PreparedLayer,
};
use crate::{Error, Result};

/// A contiguous range of the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSlot {
    pub offset: usize,
    pub len: usize,
}

impl ParamSlot {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len
    }
}

// weight, bias and order weight are laid out back to back.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LayerSlots {
    weight: ParamSlot,
    bias: ParamSlot,
    order: Option<ParamSlot>,
}

struct Layout {
    embed: Vec<ParamSlot>,
    layers: Vec<LayerSlots>,
    total: usize,
}

fn layout(vocab: &[usize], d: usize, hidden: usize, blocks: usize, order_cond: bool, tied: bool) -> Layout {
    let n = vocab.len();
    let mut offset = 0;
    let mut embed = Vec::with_capacity(n);
    for &v in vocab {
        if tied && !embed.is_empty() {
            embed.push(embed[0]);
            continue;
        }
        embed.push(ParamSlot { offset, len: (v + 1) * d });
        offset += (v + 1) * d;
    }
    let mut dims = vec![(n * d, hidden)];
    dims.extend(core::iter::repeat_n((hidden, hidden), 2 * blocks));
    dims.push((hidden, n * d));
    let layers = dims
        .into_iter()
        .map(|(i, o)| {
            let weight = ParamSlot { offset, len: i * o };
            let bias = ParamSlot { offset: weight.offset + weight.len, len: o };
            offset = bias.offset + o;
            let order = order_cond.then(|| {
                let s = ParamSlot { offset, len: i * o };
                offset += i * o;
                s
            });
            LayerSlots { weight, bias, order }
        })
        .collect();
    Layout { embed, layers, total: offset }
}

/// Parameter count of a model with the given shape.
pub(crate) fn count_params(vocab: &[usize], cfg: &ModelConfig, hidden: usize, order_cond: bool) -> usize {
    layout(vocab, cfg.d_emb, hidden, cfg.blocks, order_cond, cfg.tied_embeddings).total
}

/// Hidden width for the configured number of orders: multi-order models get
/// the width whose parameter count (including order weights) is closest to
/// the single-order model's.
fn resolve_hidden(vocab: &[usize], cfg: &ModelConfig) -> usize {
    if cfg.orders <= 1 {
        return cfg.hidden;
    }
    let target = count_params(vocab, cfg, cfg.hidden, false) as i64;
    let lo = vocab.len().saturating_sub(1).max(1);
    (lo..=cfg.hidden.max(lo))
        .min_by_key(|&w| (count_params(vocab, cfg, w, true) as i64 - target).abs())
        .unwrap_or(cfg.hidden)
}

/// ResMADE autoregressive model over discrete columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    config: ModelConfig,
    vocab_sizes: Vec<usize>,
    hidden: usize,
    orderings: Vec<Ordering>,
    masks: Vec<Vec<ConnectivityMask>>,
    embed: Vec<ParamSlot>,
    layers: Vec<LayerSlots>,
    params: Vec<f64>,
    mask_mode: MaskMode,
}

impl ArModel {
    /// Builds a freshly initialised model, one MADE mask set per ordering.
    pub fn new(vocab_sizes: &[usize], config: ModelConfig, orderings: Vec<Ordering>) -> Result<Self> {
        let mut model = Self::skeleton(vocab_sizes, config, orderings)?;
        let mut rng = crate::seed::stream(model.config.seed, &[0x1417]);
        let d = model.config.d_emb;
        let emb_bound = math::sqrt(3.0 / d as f64);
        for (c, slot) in model.embed.iter().enumerate() {
            if model.embed[..c].contains(slot) {
                continue;
            }
            for p in &mut model.params[slot.range()] {
                *p = rng.random_range(-emb_bound..emb_bound);
            }
        }
        for slots in &model.layers {
            let (i, o) = (slots.weight.len / slots.bias.len, slots.bias.len);
            let bound = math::sqrt(6.0 / (i + o) as f64);
            for p in &mut model.params[slots.weight.range()] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(model)
    }

    fn skeleton(vocab_sizes: &[usize], config: ModelConfig, orderings: Vec<Ordering>) -> Result<Self> {
        config.validate()?;
        let n = vocab_sizes.len();
        if n == 0 || vocab_sizes.contains(&0) {
            return Err(Error::InvalidSpec("every column needs a nonempty vocab".into()));
        }
        if orderings.len() != config.orders {
            return Err(Error::InvalidSpec(format!("{} orderings for orders={}", orderings.len(), config.orders)));
        }
        if config.tied_embeddings && vocab_sizes.iter().any(|&v| v != vocab_sizes[0]) {
            return Err(Error::InvalidSpec("tied embeddings need equal vocab sizes".into()));
        }
        let hidden = resolve_hidden(vocab_sizes, &config);
        let widths = vec![hidden; 1 + 2 * config.blocks];
        let masks =
            orderings.iter().map(|o| build_made_masks(n, config.d_emb, &widths, o)).collect::<Result<Vec<_>>>()?;
        let lay = layout(vocab_sizes, config.d_emb, hidden, config.blocks, config.orders > 1, config.tied_embeddings);
        Ok(ArModel {
            config,
            vocab_sizes: vocab_sizes.to_vec(),
            hidden,
            orderings,
            masks,
            embed: lay.embed,
            layers: lay.layers,
            params: vec![0.0; lay.total],
            mask_mode: MaskMode::None,
        })
    }

    /// Reassembles a model from stored parts, checking that the stored masks
    /// are the ones the orderings imply.
    pub fn from_parts(
        vocab_sizes: &[usize],
        config: ModelConfig,
        orderings: Vec<Ordering>,
        masks: Option<Vec<Vec<ConnectivityMask>>>,
        params: Vec<f64>,
        mask_mode: MaskMode,
    ) -> Result<Self> {
        let mut model = Self::skeleton(vocab_sizes, config, orderings)?;
        if params.len() != model.params.len() {
            return Err(Error::ShapeMismatch {
                context: "model parameters",
                expected: model.params.len(),
                found: params.len(),
            });
        }
        if let Some(m) = masks {
            if m != model.masks {
                return Err(Error::InvalidSpec("stored masks disagree with the orderings".into()));
            }
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteGradient { index: i });
        }
        model.params = params;
        model.mask_mode = mask_mode;
        Ok(model)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn vocab_sizes(&self) -> &[usize] {
        &self.vocab_sizes
    }

    pub fn n_cols(&self) -> usize {
        self.vocab_sizes.len()
    }

    /// Hidden width actually used (smaller than `config.hidden` for
    /// multi-order models).
    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    pub fn orderings(&self) -> &[Ordering] {
        &self.orderings
    }

    pub fn masks(&self, ordering: usize) -> &[ConnectivityMask] {
        &self.masks[ordering]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Masking the model was trained with (`None` for baselines).
    pub fn mask_mode(&self) -> MaskMode {
        self.mask_mode
    }

    pub fn set_mask_mode(&mut self, mode: MaskMode) {
        self.mask_mode = mode;
    }

    pub fn mask_index(&self, column: usize) -> u32 {
        self.vocab_sizes[column] as u32
    }

    pub fn mask_indices(&self) -> Vec<u32> {
        self.vocab_sizes.iter().map(|&v| v as u32).collect()
    }

    /// Embedding table of a column: `(vocab + 1) × d_emb`, last row MASK.
    pub fn embedding(&self, column: usize) -> &[f64] {
        &self.params[self.embed[column].range()]
    }

    pub fn embedding_slot(&self, column: usize) -> ParamSlot {
        self.embed[column]
    }

    /// Slots of every masked layer's weight matrix, input layer first.
    pub fn weight_slots(&self) -> Vec<ParamSlot> {
        self.layers.iter().map(|l| l.weight).collect()
    }

    fn layer_view(&self, layer: usize, ordering: usize) -> LayerView<'_> {
        let s = &self.layers[layer];
        LayerView {
            weight: &self.params[s.weight.range()],
            bias: &self.params[s.bias.range()],
            order_weight: s.order.map(|o| &self.params[o.range()]),
            mask: &self.masks[ordering][layer],
        }
    }

    /// Looks up input features (`batch × n·d_emb`, natural column order).
    /// Cells may hold the MASK index.
    pub fn embed_inputs(&self, inputs: &[u32], batch: usize) -> Result<DenseMatrix> {
        let (n, d) = (self.n_cols(), self.config.d_emb);
        if inputs.len() != batch * n {
            return Err(Error::ShapeMismatch { context: "model inputs", expected: batch * n, found: inputs.len() });
        }
        let mut x = DenseMatrix::zeros(batch, n * d);
        for b in 0..batch {
            let row = x.row_mut(b);
            for c in 0..n {
                let idx = inputs[b * n + c];
                if idx as usize > self.vocab_sizes[c] {
                    return Err(Error::IndexOutOfRange {
                        column: format!("{c}"),
                        index: idx,
                        limit: self.vocab_sizes[c] as u32,
                    });
                }
                let e = &self.embedding(c)[idx as usize * d..(idx as usize + 1) * d];
                row[c * d..(c + 1) * d].copy_from_slice(e);
            }
        }
        Ok(x)
    }

    /// `Embed(x_i)` for unmasked columns and `Embed(MASK_i)` for masked ones.
    pub fn encode_inputs(&self, rows: &[u32], batch: usize, plans: &[MaskPlan]) -> Result<DenseMatrix> {
        if plans.len() != batch {
            return Err(Error::ShapeMismatch { context: "mask plans", expected: batch, found: plans.len() });
        }
        let mut inputs = rows.to_vec();
        super::apply_mask_plans(&mut inputs, self.n_cols(), plans, &self.mask_indices());
        self.embed_inputs(&inputs, batch)
    }

    pub fn prepare(&self, ordering: usize) -> Result<Prepared<'_>> {
        if ordering >= self.orderings.len() {
            return Err(Error::PositionOutOfRange {
                position: ordering,
                valid: format!("0..{}", self.orderings.len()),
            });
        }
        let layers = (0..self.layers.len()).map(|l| self.layer_view(l, ordering).prepare()).collect();
        Ok(Prepared { model: self, ordering, layers })
    }

    fn scatter_layer(&self, layer: usize, ordering: usize, g: &LayerGrads, grads: &mut [f64]) {
        let s = self.layers[layer];
        let end = s.order.map_or(s.bias.offset + s.bias.len, |o| o.offset + o.len);
        let region = &mut grads[s.weight.offset..end];
        let (dw, rest) = region.split_at_mut(s.weight.len);
        let (db, du) = rest.split_at_mut(s.bias.len);
        let du = s.order.map(|_| du);
        self.layer_view(layer, ordering).scatter_grads(g, dw, db, du);
    }
}

struct Trace {
    hs: Vec<DenseMatrix>,
    a1s: Vec<DenseMatrix>,
    z1s: Vec<DenseMatrix>,
    a2s: Vec<DenseMatrix>,
}

/// A model bound to one ordering with masks folded into its weights.
#[derive(Debug, Clone)]
pub struct Prepared<'m> {
    model: &'m ArModel,
    ordering: usize,
    layers: Vec<PreparedLayer>,
}

impl<'m> Prepared<'m> {
    pub fn model(&self) -> &'m ArModel {
        self.model
    }

    pub fn ordering_index(&self) -> usize {
        self.ordering
    }

    pub fn ordering(&self) -> &'m Ordering {
        &self.model.orderings[self.ordering]
    }

    fn trunk(&self, x0: &DenseMatrix, mut trace: Option<&mut Trace>) -> Result<DenseMatrix> {
        let mut h = self.layers[0].forward(x0)?;
        for r in 0..self.model.config.blocks {
            let a1 = relu(&h);
            let z1 = self.layers[1 + 2 * r].forward(&a1)?;
            let a2 = relu(&z1);
            let mut next = self.layers[2 + 2 * r].forward(&a2)?;
            for (o, &hv) in next.data_mut().iter_mut().zip(h.data()) {
                *o += hv;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.hs.push(h);
                t.a1s.push(a1);
                t.z1s.push(z1);
                t.a2s.push(a2);
            }
            h = next;
        }
        let out = relu(&h);
        if let Some(t) = trace {
            t.hs.push(h);
        }
        Ok(out)
    }

    /// Logits of `column` from the output block starting at `offset` in
    /// `out`: the block dotted with the column's real embedding rows.
    fn column_logits(&self, out: &DenseMatrix, offset: usize, column: usize) -> DenseMatrix {
        let d = self.model.config.d_emb;
        let v = self.model.vocab_sizes[column];
        let e = self.model.embedding(column);
        let mut logits = DenseMatrix::zeros(out.rows(), v);
        gemm_strided(
            out.rows(),
            d,
            v,
            &out.data()[offset..],
            out.cols() as isize,
            1,
            e,
            1,
            d as isize,
            logits.data_mut(),
            v as isize,
            0.0,
        );
        logits
    }

    /// Per-column logits (natural column order) from input features.
    pub fn logits_from_features(&self, features: &DenseMatrix) -> Result<Vec<DenseMatrix>> {
        let d = self.model.config.d_emb;
        let a = self.trunk(features, None)?;
        let out = self.layers.last().expect("output layer").forward(&a)?;
        Ok((0..self.model.n_cols()).map(|c| self.column_logits(&out, c * d, c)).collect())
    }

    pub fn forward_logits(&self, inputs: &[u32], batch: usize) -> Result<Vec<DenseMatrix>> {
        self.logits_from_features(&self.model.embed_inputs(inputs, batch)?)
    }

    /// `p(x_c | inputs before position)` for the column at `position`:
    /// one network evaluation per row, `batch × vocab` probabilities.
    pub fn conditional_probs(&self, inputs: &[u32], batch: usize, position: usize) -> Result<DenseMatrix> {
        let n = self.model.n_cols();
        if position >= n {
            return Err(Error::PositionOutOfRange { position, valid: format!("0..{n}") });
        }
        let d = self.model.config.d_emb;
        let c = self.ordering().column_at(position);
        let a = self.trunk(&self.model.embed_inputs(inputs, batch)?, None)?;
        let block = self.layers.last().expect("output layer").forward_columns(&a, c * d, d)?;
        let mut probs = self.column_logits(&block, 0, c);
        for b in 0..batch {
            softmax_in_place(probs.row_mut(b));
        }
        Ok(probs)
    }

    fn check_targets(&self, targets: &[u32], batch: usize) -> Result<()> {
        let n = self.model.n_cols();
        if targets.len() != batch * n {
            return Err(Error::ShapeMismatch { context: "targets", expected: batch * n, found: targets.len() });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t as usize >= self.model.vocab_sizes[i % n] {
                return Err(Error::IndexOutOfRange {
                    column: format!("{}", i % n),
                    index: t,
                    limit: self.model.vocab_sizes[i % n] as u32,
                });
            }
        }
        Ok(())
    }

    /// Per-row negative log-likelihood in nats, summed over columns.
    pub fn nll_rows(&self, inputs: &[u32], targets: &[u32], batch: usize) -> Result<Vec<f64>> {
        self.check_targets(targets, batch)?;
        let n = self.model.n_cols();
        let logits = self.forward_logits(inputs, batch)?;
        let mut nll = vec![0.0; batch];
        let mut col = vec![0u32; batch];
        for (c, l) in logits.iter().enumerate() {
            for (b, t) in col.iter_mut().enumerate() {
                *t = targets[b * n + c];
            }
            softmax_cross_entropy(l, &col, 1.0, None, &mut nll)?;
        }
        Ok(nll)
    }

    /// Mean NLL (nats) of `targets` given `inputs`, and its exact gradient
    /// with respect to every parameter (same layout as `params`).
    pub fn loss_and_grads(&self, inputs: &[u32], targets: &[u32], batch: usize) -> Result<(f64, Vec<f64>)> {
        self.check_targets(targets, batch)?;
        let model = self.model;
        let (n, d) = (model.n_cols(), model.config.d_emb);
        let blocks = model.config.blocks;
        let x0 = model.embed_inputs(inputs, batch)?;
        let mut trace = Trace { hs: Vec::new(), a1s: Vec::new(), z1s: Vec::new(), a2s: Vec::new() };
        let a_out = self.trunk(&x0, Some(&mut trace))?;
        let last = self.layers.len() - 1;
        let out = self.layers[last].forward(&a_out)?;

        let mut grads = vec![0.0; model.params.len()];
        let mut d_out = DenseMatrix::zeros(batch, n * d);
        let mut nll = vec![0.0; batch];
        let mut col = vec![0u32; batch];
        let scale = 1.0 / batch as f64;
        for c in 0..n {
            let v = model.vocab_sizes[c];
            let logits = self.column_logits(&out, c * d, c);
            for (b, t) in col.iter_mut().enumerate() {
                *t = targets[b * n + c];
            }
            let mut dlog = DenseMatrix::zeros(batch, v);
            softmax_cross_entropy(&logits, &col, scale, Some(&mut dlog), &mut nll)?;
            let emb = model.embed[c];
            // dO_c = dlogits · E
            gemm_strided(
                batch,
                v,
                d,
                dlog.data(),
                v as isize,
                1,
                &model.params[emb.offset..],
                d as isize,
                1,
                &mut d_out.data_mut()[c * d..],
                (n * d) as isize,
                0.0,
            );
            // dE += dlogitsᵀ · O_c
            gemm_strided(
                v,
                batch,
                d,
                dlog.data(),
                1,
                v as isize,
                &out.data()[c * d..],
                (n * d) as isize,
                1,
                &mut grads[emb.offset..],
                d as isize,
                1.0,
            );
        }
        if let Some(batch_index) = nll.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { batch_index });
        }
        let loss = nll.iter().sum::<f64>() * scale;

        let g = self.layers[last].backward(&a_out, &d_out, true);
        model.scatter_layer(last, self.ordering, &g, &mut grads);
        let mut dh = g.input.expect("input grad");
        relu_backward(&trace.hs[blocks], &mut dh);
        for r in (0..blocks).rev() {
            let g2 = self.layers[2 + 2 * r].backward(&trace.a2s[r], &dh, true);
            model.scatter_layer(2 + 2 * r, self.ordering, &g2, &mut grads);
            let mut da2 = g2.input.expect("input grad");
            relu_backward(&trace.z1s[r], &mut da2);
            let g1 = self.layers[1 + 2 * r].backward(&trace.a1s[r], &da2, true);
            model.scatter_layer(1 + 2 * r, self.ordering, &g1, &mut grads);
            let mut da1 = g1.input.expect("input grad");
            relu_backward(&trace.hs[r], &mut da1);
            for (o, a) in dh.data_mut().iter_mut().zip(da1.data()) {
                *o += a;
            }
        }
        let g0 = self.layers[0].backward(&x0, &dh, true);
        model.scatter_layer(0, self.ordering, &g0, &mut grads);
        let dx = g0.input.expect("input grad");
        for b in 0..batch {
            let row = dx.row(b);
            for c in 0..n {
                let idx = inputs[b * n + c] as usize;
                let off = model.embed[c].offset + idx * d;
                for (gv, dv) in grads[off..off + d].iter_mut().zip(&row[c * d..(c + 1) * d]) {
                    *gv += dv;
                }
            }
        }
        Ok((loss, grads))
    }
}

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{gemm, gemm_strided};
use super::DenseMatrix;
use crate::{Error, Result};

/// Binary in×out connectivity pattern of a masked layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl ConnectivityMask {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                bits.push(f(i, j));
            }
        }
        ConnectivityMask { rows, cols, bits }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| false)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `weight ⊙ mask`.
    pub fn apply(&self, weight: &[f64]) -> Vec<f64> {
        weight.iter().zip(&self.bits).map(|(&w, &b)| if b { w } else { 0.0 }).collect()
    }

    /// Packs the mask into bytes, least significant bit first.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        let len = rows * cols;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::ShapeMismatch { context: "mask bytes", expected: len.div_ceil(8), found: bytes.len() });
        }
        let bits = (0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
        Ok(ConnectivityMask { rows, cols, bits })
    }
}

/// Borrowed parameters of one masked layer: `weight` is in×out row-major,
/// `order_weight` (multi-order models) shares the same mask and is fed an
/// all-ones input.
#[derive(Debug, Clone, Copy)]
pub struct LayerView<'a> {
    pub weight: &'a [f64],
    pub bias: &'a [f64],
    pub order_weight: Option<&'a [f64]>,
    pub mask: &'a ConnectivityMask,
}

impl LayerView<'_> {
    pub fn in_dim(&self) -> usize {
        self.mask.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.mask.cols()
    }

    /// Folds the mask into the weights and the order-conditioning term into
    /// the bias.
    pub fn prepare(&self) -> PreparedLayer {
        let mut bias = self.bias.to_vec();
        if let Some(u) = self.order_weight {
            let cols = self.out_dim();
            for (i, (uv, mb)) in u.iter().zip(self.mask.bits()).enumerate() {
                if *mb {
                    bias[i % cols] += uv;
                }
            }
        }
        PreparedLayer { in_dim: self.in_dim(), out_dim: self.out_dim(), weight: self.mask.apply(self.weight), bias }
    }

    /// Maps gradients of the effective weight/bias back onto the raw
    /// parameters, writing into `(d_weight, d_bias, d_order_weight)`.
    pub fn scatter_grads(
        &self,
        grads: &LayerGrads,
        d_weight: &mut [f64],
        d_bias: &mut [f64],
        d_order: Option<&mut [f64]>,
    ) {
        for ((dw, g), &b) in d_weight.iter_mut().zip(&grads.weight).zip(self.mask.bits()) {
            if b {
                *dw += g;
            }
        }
        for (db, g) in d_bias.iter_mut().zip(&grads.bias) {
            *db += g;
        }
        if let Some(du) = d_order {
            let cols = self.out_dim();
            for (i, (d, &b)) in du.iter_mut().zip(self.mask.bits()).enumerate() {
                if b {
                    *d += grads.bias[i % cols];
                }
            }
        }
    }
}

/// Owned masked layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedLayer {
    pub weight: DenseMatrix,
    pub mask: ConnectivityMask,
    pub bias: Vec<f64>,
    pub order_weight: Option<DenseMatrix>,
}

impl MaskedLayer {
    pub fn view(&self, order_conditioning: bool) -> LayerView<'_> {
        LayerView {
            weight: self.weight.data(),
            bias: &self.bias,
            order_weight: if order_conditioning { self.order_weight.as_ref().map(DenseMatrix::data) } else { None },
            mask: &self.mask,
        }
    }
}

/// `input·(W⊙mask) + bias [+ 1⃗·(W_order⊙mask)]`.
pub fn masked_affine(input: &DenseMatrix, layer: &MaskedLayer, order_conditioning: bool) -> Result<DenseMatrix> {
    let (r, c) = (layer.weight.rows(), layer.weight.cols());
    if layer.mask.rows() != r || layer.mask.cols() != c {
        return Err(Error::ShapeMismatch {
            context: "mask shape",
            expected: r * c,
            found: layer.mask.rows() * layer.mask.cols(),
        });
    }
    if layer.bias.len() != c {
        return Err(Error::ShapeMismatch { context: "bias length", expected: c, found: layer.bias.len() });
    }
    if let Some(u) = &layer.order_weight {
        if u.rows() != r || u.cols() != c {
            return Err(Error::ShapeMismatch {
                context: "order weight shape",
                expected: r * c,
                found: u.rows() * u.cols(),
            });
        }
    }
    layer.view(order_conditioning).prepare().forward(input)
}

/// A layer with its mask folded in, ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedLayer {
    in_dim: usize,
    out_dim: usize,
    weight: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    /// Gradient of the effective (masked) weight, in×out.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
    pub input: Option<DenseMatrix>,
}

impl PreparedLayer {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn forward(&self, input: &DenseMatrix) -> Result<DenseMatrix> {
        self.forward_columns(input, 0, self.out_dim)
    }

    /// Output columns `start..start + len` only.
    pub fn forward_columns(&self, input: &DenseMatrix, start: usize, len: usize) -> Result<DenseMatrix> {
        if input.cols() != self.in_dim {
            return Err(Error::ShapeMismatch {
                context: "masked_affine input",
                expected: self.in_dim,
                found: input.cols(),
            });
        }
        if start + len > self.out_dim {
            return Err(Error::ShapeMismatch { context: "output columns", expected: self.out_dim, found: start + len });
        }
        let b = input.rows();
        let mut out = DenseMatrix::zeros(b, len);
        for i in 0..b {
            out.row_mut(i).copy_from_slice(&self.bias[start..start + len]);
        }
        if self.in_dim > 0 {
            gemm_strided(
                b,
                self.in_dim,
                len,
                input.data(),
                self.in_dim as isize,
                1,
                &self.weight[start..],
                self.out_dim as isize,
                1,
                out.data_mut(),
                len as isize,
                1.0,
            );
        }
        Ok(out)
    }

    pub fn backward(&self, input: &DenseMatrix, grad_out: &DenseMatrix, want_input: bool) -> LayerGrads {
        let b = input.rows();
        let mut weight = vec![0.0; self.in_dim * self.out_dim];
        gemm(self.in_dim, b, self.out_dim, input.data(), true, grad_out.data(), false, &mut weight, 0.0);
        let mut bias = vec![0.0; self.out_dim];
        for i in 0..b {
            for (acc, g) in bias.iter_mut().zip(grad_out.row(i)) {
                *acc += g;
            }
        }
        let input = want_input.then(|| {
            let mut dx = DenseMatrix::zeros(b, self.in_dim);
            gemm(b, self.out_dim, self.in_dim, grad_out.data(), false, &self.weight, true, dx.data_mut(), 0.0);
            dx
        });
        LayerGrads { weight, bias, input }
    }
}

pub fn relu(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    for v in out.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    out
}

/// Zeroes `grad` wherever the pre-activation was not positive.
pub fn relu_backward(pre: &DenseMatrix, grad: &mut DenseMatrix) {
    for (g, &p) in grad.data_mut().iter_mut().zip(pre.data()) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

use super::DenseMatrix;
use crate::math;
use crate::{Error, Result};

pub fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + math::ln(row.iter().map(|&v| math::exp(v - max)).sum::<f64>())
}

pub fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = math::exp(*v - max);
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Per-row negative log-likelihood (nats) of `targets` under softmax
/// `logits`, accumulated into `nll`. When `grad` is given it receives
/// `scale · (softmax − onehot)`.
pub fn softmax_cross_entropy(
    logits: &DenseMatrix,
    targets: &[u32],
    scale: f64,
    grad: Option<&mut DenseMatrix>,
    nll: &mut [f64],
) -> Result<()> {
    let (b, v) = (logits.rows(), logits.cols());
    if targets.len() != b || nll.len() != b {
        return Err(Error::ShapeMismatch { context: "cross-entropy targets", expected: b, found: targets.len() });
    }
    if let Some(t) = targets.iter().find(|&&t| t as usize >= v) {
        return Err(Error::IndexOutOfRange { column: "target".into(), index: *t, limit: v as u32 });
    }
    match grad {
        Some(g) => {
            if g.rows() != b || g.cols() != v {
                return Err(Error::ShapeMismatch {
                    context: "cross-entropy grad",
                    expected: b * v,
                    found: g.rows() * g.cols(),
                });
            }
            for i in 0..b {
                let row = logits.row(i);
                let lse = log_sum_exp(row);
                let t = targets[i] as usize;
                nll[i] += lse - row[t];
                let grow = g.row_mut(i);
                for (gv, &l) in grow.iter_mut().zip(row) {
                    *gv = scale * math::exp(l - lse);
                }
                grow[t] -= scale;
            }
        }
        None => {
            for i in 0..b {
                let row = logits.row(i);
                nll[i] += log_sum_exp(row) - row[targets[i] as usize];
            }
        }
    }
    Ok(())
}

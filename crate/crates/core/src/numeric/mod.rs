//! Dense f64 kernels with hand-derived gradients.

mod adam;
mod gradcheck;
mod layer;
mod loss;
mod matrix;

pub use adam::{adam_step, AdamState};
pub use gradcheck::{grad_check, GradCheckReport};
pub use layer::{
    masked_affine, relu, relu_backward, ConnectivityMask, LayerGrads, LayerView, MaskedLayer, PreparedLayer,
};
pub use loss::{log_sum_exp, softmax_cross_entropy, softmax_in_place};
pub(crate) use matrix::gemm_strided;
pub use matrix::DenseMatrix;

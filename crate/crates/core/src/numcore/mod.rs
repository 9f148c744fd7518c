//! Dense/sparse numerics with hand-written backward rules, Adam, and a
//! finite-difference gradient oracle.

pub mod dense;
pub mod gradcheck;
pub mod ops;
pub mod params;
pub mod sparse;

pub use dense::{dot, squared_distance, DenseMatrix};
pub use gradcheck::{grad_check, grad_check_piecewise, relative_error, GradCheckReport, RegimeHasher};
pub use ops::{
    add_row_bias, add_row_bias_backward, matmul, matmul_a_bt, matmul_at_b, matmul_backward, relu,
    relu_backward, softmax_backward, softmax_cross_entropy, softmax_cross_entropy_backward,
    softmax_rows,
};
pub use params::{adam_step, glorot_uniform, AdamConfig, ParamId, ParamStore};
pub use sparse::SparseWeighted;

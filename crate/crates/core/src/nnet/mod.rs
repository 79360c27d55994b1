//! Layer kit with hand-written forward and backward passes: 1-D convolution
//! with ReLU and max-pooling, LSTM and bidirectional LSTM, dense softmax,
//! cross-entropy, Adagrad, and finite-difference gradient checking.

pub mod adagrad;
pub mod conv;
pub mod dense;
pub mod gradcheck;
pub mod init;
pub mod lstm;
pub mod tensor;

pub use adagrad::AdagradState;
pub use conv::{Conv1d, ConvCache};
pub use dense::{cross_entropy, dense_softmax, softmax, softmax_xent_grad, Dense, LOG_CLAMP};
pub use gradcheck::{grad_check, relative_error, Differentiable, GradCheckReport};
pub use lstm::{bilstm_backward, bilstm_forward, sigmoid, BiLstmCache, LstmCell, StepCache};
pub use tensor::Tensor;

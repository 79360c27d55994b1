use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::glorot_limit;
use super::tensor::{matvec_acc, matvec_t_acc, outer_acc, Tensor};

pub const LOG_CLAMP: f64 = 1e-12;

/// Fully connected layer producing class logits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `classes × in_dim`
    pub w: Tensor,
    /// `classes`
    pub b: Tensor,
}

impl Dense {
    pub fn new<R: Rng + ?Sized>(in_dim: usize, classes: usize, rng: &mut R) -> Self {
        Dense {
            w: Tensor::uniform(&[classes, in_dim], glorot_limit(in_dim, classes), rng),
            b: Tensor::zeros(&[classes]),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Dense {
            w: self.w.zeros_like(),
            b: self.b.zeros_like(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.b.data().to_vec();
        matvec_acc(self.w.data(), x, &mut z);
        z
    }

    /// Accumulates gradients for `dL/dlogits` and returns `dL/dx`.
    pub fn backward(&self, x: &[f64], d_logits: &[f64], grad: &mut Dense) -> Vec<f64> {
        outer_acc(grad.w.data_mut(), d_logits, x);
        for (gb, d) in grad.b.data_mut().iter_mut().zip(d_logits) {
            *gb += d;
        }
        let mut dx = vec![0.0; x.len()];
        matvec_t_acc(self.w.data(), d_logits, &mut dx);
        dx
    }
}

/// Softmax with max-subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `softmax(W·x + b)`.
pub fn dense_softmax(x: &[f64], layer: &Dense) -> Vec<f64> {
    softmax(&layer.logits(x))
}

/// `-ln p[y]`, with `p[y]` clamped to at least 1e-12.
pub fn cross_entropy(p: &[f64], y: usize) -> f64 {
    -p[y].max(LOG_CLAMP).ln()
}

/// Gradient of cross-entropy-after-softmax with respect to the logits.
pub fn softmax_xent_grad(p: &[f64], y: usize) -> Vec<f64> {
    p.iter()
        .enumerate()
        .map(|(k, &pk)| if k == y { pk - 1.0 } else { pk })
        .collect()
}

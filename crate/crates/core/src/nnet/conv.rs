//! 1-D convolution over the token axis, ReLU, then windowed max-pooling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::glorot_limit;
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// `count` filters, each a `dim × width` kernel sliding along the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conv1d {
    /// `count × dim × width`
    pub filters: Tensor,
    /// `count`
    pub bias: Tensor,
    pub pool_width: usize,
    pub pool_stride: usize,
}

/// Values kept from the forward pass for backprop.
#[derive(Debug, Clone)]
pub struct ConvCache {
    input: Tensor,
    pre_relu: Tensor,
    /// For each pooled cell, the conv position that won the max.
    argmax: Vec<usize>,
    pooled_len: usize,
}

impl ConvCache {
    pub fn pre_relu(&self) -> &Tensor {
        &self.pre_relu
    }
}

/// Length of the pooled sequence, or `None` when nothing fits.
pub fn pooled_len(seq_len: usize, width: usize, pool_width: usize, pool_stride: usize) -> Option<usize> {
    let conv_len = (seq_len + 1).checked_sub(width)?;
    let span = conv_len.checked_sub(pool_width)?;
    Some(span / pool_stride + 1)
}

impl Conv1d {
    pub fn new<R: Rng + ?Sized>(
        count: usize,
        dim: usize,
        width: usize,
        pool_width: usize,
        pool_stride: usize,
        rng: &mut R,
    ) -> Self {
        let limit = glorot_limit(dim * width, count * width);
        Conv1d {
            filters: Tensor::uniform(&[count, dim, width], limit, rng),
            bias: Tensor::zeros(&[count]),
            pool_width,
            pool_stride,
        }
    }

    pub fn count(&self) -> usize {
        self.filters.shape()[0]
    }

    pub fn dim(&self) -> usize {
        self.filters.shape()[1]
    }

    pub fn width(&self) -> usize {
        self.filters.shape()[2]
    }

    pub fn zeros_like(&self) -> Self {
        Conv1d {
            filters: self.filters.zeros_like(),
            bias: self.bias.zeros_like(),
            pool_width: self.pool_width,
            pool_stride: self.pool_stride,
        }
    }

    /// Convolves a `dim × len` matrix; returns the pooled `count × len'` map.
    pub fn forward(&self, q: &Tensor) -> Result<(Tensor, ConvCache)> {
        let (dim, width, count) = (self.dim(), self.width(), self.count());
        if q.shape().len() != 2 || q.shape()[0] != dim {
            return Err(Error::ShapeMismatch(format!(
                "conv expects {dim} × len input, got {:?}",
                q.shape()
            )));
        }
        let len = q.shape()[1];
        if width > len {
            return Err(Error::FilterTooLong { filter: width, sequence: len });
        }
        if self.pool_width == 0 || self.pool_stride == 0 {
            return Err(Error::InvalidConfig("pool width and stride must be positive".into()));
        }
        let conv_len = len - width + 1;
        let out_len = pooled_len(len, width, self.pool_width, self.pool_stride).ok_or_else(|| {
            Error::EmptySequence(format!(
                "pool width {} exceeds convolved length {conv_len}",
                self.pool_width
            ))
        })?;

        let qd = q.data();
        let fd = self.filters.data();
        let mut pre = Tensor::zeros(&[count, conv_len]);
        let pre_d = pre.data_mut();
        for f in 0..count {
            let kernel = &fd[f * dim * width..(f + 1) * dim * width];
            for t in 0..conv_len {
                let mut acc = self.bias.data()[f];
                for i in 0..dim {
                    let krow = &kernel[i * width..(i + 1) * width];
                    let qrow = &qd[i * len + t..i * len + t + width];
                    acc += krow.iter().zip(qrow).map(|(a, b)| a * b).sum::<f64>();
                }
                pre_d[f * conv_len + t] = acc;
            }
        }

        // Windows are aligned to the end of the sequence: queries are
        // left-padded, so any positions the stride cannot cover are dropped
        // from the padding side rather than from the last words.
        let offset = (conv_len - self.pool_width) % self.pool_stride;
        let mut out = Tensor::zeros(&[count, out_len]);
        let mut argmax = vec![0; count * out_len];
        for f in 0..count {
            let row = pre.row(f);
            for p in 0..out_len {
                let start = offset + p * self.pool_stride;
                let (best_t, best) = (start..start + self.pool_width)
                    .map(|t| (t, row[t].max(0.0)))
                    .fold((start, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
                out.data_mut()[f * out_len + p] = best;
                argmax[f * out_len + p] = best_t;
            }
        }

        let cache = ConvCache {
            input: q.clone(),
            pre_relu: pre,
            argmax,
            pooled_len: out_len,
        };
        Ok((out, cache))
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dQ`.
    pub fn backward(&self, cache: &ConvCache, d_out: &Tensor, grad: &mut Conv1d) -> Result<Tensor> {
        let (dim, width, count) = (self.dim(), self.width(), self.count());
        if d_out.shape() != [count, cache.pooled_len] {
            return Err(Error::ShapeMismatch(format!(
                "conv backward expects [{count}, {}], got {:?}",
                cache.pooled_len,
                d_out.shape()
            )));
        }
        let len = cache.input.shape()[1];
        let conv_len = cache.pre_relu.shape()[1];

        // Route through max-pool, then gate by ReLU.
        let mut d_pre = vec![0.0; count * conv_len];
        for (cell, &t) in cache.argmax.iter().enumerate() {
            let f = cell / cache.pooled_len;
            if cache.pre_relu.data()[f * conv_len + t] > 0.0 {
                d_pre[f * conv_len + t] += d_out.data()[cell];
            }
        }

        let qd = cache.input.data();
        let fd = self.filters.data();
        let mut d_q = Tensor::zeros(&[dim, len]);
        for f in 0..count {
            for t in 0..conv_len {
                let g = d_pre[f * conv_len + t];
                if g == 0.0 {
                    continue;
                }
                grad.bias.data_mut()[f] += g;
                for i in 0..dim {
                    for j in 0..width {
                        let k = f * dim * width + i * width + j;
                        grad.filters.data_mut()[k] += g * qd[i * len + t + j];
                        d_q.data_mut()[i * len + t + j] += g * fd[k];
                    }
                }
            }
        }
        Ok(d_q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(filters: Tensor, pool_width: usize, pool_stride: usize) -> Conv1d {
        let count = filters.shape()[0];
        Conv1d {
            filters,
            bias: Tensor::zeros(&[count]),
            pool_width,
            pool_stride,
        }
    }

    #[test]
    fn zero_filters_give_zero_output() {
        let l = layer(Tensor::zeros(&[2, 3, 2]), 2, 1);
        let q = Tensor::from_vec(&[3, 5], (0..15).map(f64::from).collect()).unwrap();
        let (out, _) = l.forward(&q).unwrap();
        assert!(out.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn identity_kernel() {
        let l = layer(Tensor::from_vec(&[1, 1, 1], vec![1.0]).unwrap(), 1, 1);
        let q = Tensor::from_vec(&[1, 3], vec![1.0, 2.0, 3.0]).unwrap();
        let (out, _) = l.forward(&q).unwrap();
        assert_eq!(out.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn hand_convolved_example() {
        // pre-ReLU: [1-2, -2+3, 3-4] = [-1, 1, -1]; ReLU [0, 1, 0]; pool(2, 1) [1, 1]
        let l = layer(Tensor::from_vec(&[1, 1, 2], vec![1.0, 1.0]).unwrap(), 2, 1);
        let q = Tensor::from_vec(&[1, 4], vec![1.0, -2.0, 3.0, -4.0]).unwrap();
        let (out, cache) = l.forward(&q).unwrap();
        assert_eq!(cache.pre_relu().data(), &[-1.0, 1.0, -1.0]);
        assert_eq!(out.data(), &[1.0, 1.0]);
    }

    #[test]
    fn filter_longer_than_sequence() {
        let l = layer(Tensor::zeros(&[1, 1, 4]), 1, 1);
        let q = Tensor::zeros(&[1, 3]);
        assert!(matches!(l.forward(&q), Err(Error::FilterTooLong { filter: 4, sequence: 3 })));
    }

    #[test]
    fn windows_end_at_last_position() {
        // conv_len 3, p=2, s=2: one window over positions 1..3, position 0 dropped.
        let q = Tensor::from_vec(&[1, 4], vec![9.0, 1.0, 2.0, 3.0]).unwrap();
        let conv = layer(Tensor::from_vec(&[1, 1, 2], vec![1.0, 0.0]).unwrap(), 2, 2);
        let (pooled, _) = conv.forward(&q).unwrap();
        assert_eq!(pooled.data(), &[2.0]);
    }

    #[test]
    fn pooled_length_formula() {
        assert_eq!(pooled_len(15, 3, 2, 2), Some(6));
        assert_eq!(pooled_len(6, 2, 2, 2), Some(2));
        assert_eq!(pooled_len(4, 2, 2, 1), Some(2));
        assert_eq!(pooled_len(2, 2, 2, 1), None);
    }

    #[test]
    fn max_pool_ignores_order_within_window() {
        let l = layer(Tensor::from_vec(&[1, 1, 1], vec![1.0]).unwrap(), 3, 3);
        let up = Tensor::from_vec(&[1, 3], vec![1.0, 2.0, 3.0]).unwrap();
        let down = Tensor::from_vec(&[1, 3], vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(l.forward(&up).unwrap().0, l.forward(&down).unwrap().0);
    }
}

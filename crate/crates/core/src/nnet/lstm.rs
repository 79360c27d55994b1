//! LSTM cell with gate blocks ordered `[input, forget, candidate, output]`,
//! and the bidirectional wrapper that concatenates both final hidden states.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::glorot_limit;
use super::tensor::{matvec_acc, matvec_t_acc, outer_acc, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmCell {
    /// `4h × in_dim`
    pub w: Tensor,
    /// `4h × h`
    pub u: Tensor,
    /// `4h`
    pub b: Tensor,
}

#[derive(Debug, Clone)]
pub struct StepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    tanh_c: Vec<f64>,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl LstmCell {
    /// Glorot-uniform weights, zero bias except the forget block at 1.0.
    pub fn new<R: Rng + ?Sized>(in_dim: usize, hidden: usize, rng: &mut R) -> Self {
        let w = Tensor::uniform(&[4 * hidden, in_dim], glorot_limit(in_dim, 4 * hidden), rng);
        let u = Tensor::uniform(&[4 * hidden, hidden], glorot_limit(hidden, 4 * hidden), rng);
        let mut b = Tensor::zeros(&[4 * hidden]);
        b.data_mut()[hidden..2 * hidden].iter_mut().for_each(|x| *x = 1.0);
        LstmCell { w, u, b }
    }

    pub fn hidden(&self) -> usize {
        self.u.shape()[1]
    }

    pub fn in_dim(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn zeros_like(&self) -> Self {
        LstmCell {
            w: self.w.zeros_like(),
            u: self.u.zeros_like(),
            b: self.b.zeros_like(),
        }
    }

    /// One time step; returns `(h_next, c_next, cache)`.
    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> (Vec<f64>, Vec<f64>, StepCache) {
        let h = self.hidden();
        let mut z = self.b.data().to_vec();
        matvec_acc(self.w.data(), x, &mut z);
        matvec_acc(self.u.data(), h_prev, &mut z);
        let i: Vec<f64> = z[..h].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<f64> = z[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<f64> = z[2 * h..3 * h].iter().map(|v| v.tanh()).collect();
        let o: Vec<f64> = z[3 * h..].iter().map(|&v| sigmoid(v)).collect();
        let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h_next: Vec<f64> = (0..h).map(|k| o[k] * tanh_c[k]).collect();
        let cache = StepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            i,
            f,
            g,
            o,
            tanh_c,
        };
        (h_next, c, cache)
    }

    /// Runs the cell over `inputs` from zero state; returns the final hidden
    /// state and one cache per step, in processing order.
    pub fn run<'a, I>(&self, inputs: I) -> (Vec<f64>, Vec<StepCache>)
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let h = self.hidden();
        let mut hs = vec![0.0; h];
        let mut cs = vec![0.0; h];
        let mut caches = Vec::new();
        for x in inputs {
            let (hn, cn, cache) = self.step(x, &hs, &cs);
            hs = hn;
            cs = cn;
            caches.push(cache);
        }
        (hs, caches)
    }

    /// Backprop through time from a gradient on the final hidden state.
    ///
    /// Accumulates into `grad` and returns `dL/dx` per step, in processing order.
    pub fn backward(&self, caches: &[StepCache], d_h_final: &[f64], grad: &mut LstmCell) -> Vec<Vec<f64>> {
        let h = self.hidden();
        let in_dim = self.in_dim();
        let mut dh = d_h_final.to_vec();
        let mut dc = vec![0.0; h];
        let mut dxs = vec![Vec::new(); caches.len()];
        let mut dz = vec![0.0; 4 * h];
        for (t, cache) in caches.iter().enumerate().rev() {
            for k in 0..h {
                let (i, f, g, o, tc) = (cache.i[k], cache.f[k], cache.g[k], cache.o[k], cache.tanh_c[k]);
                let d_o = dh[k] * tc;
                let dc_total = dc[k] + dh[k] * o * (1.0 - tc * tc);
                let d_i = dc_total * g;
                let d_g = dc_total * i;
                let d_f = dc_total * cache.c_prev[k];
                dc[k] = dc_total * f;
                dz[k] = d_i * i * (1.0 - i);
                dz[h + k] = d_f * f * (1.0 - f);
                dz[2 * h + k] = d_g * (1.0 - g * g);
                dz[3 * h + k] = d_o * o * (1.0 - o);
            }
            outer_acc(grad.w.data_mut(), &dz, &cache.x);
            outer_acc(grad.u.data_mut(), &dz, &cache.h_prev);
            for (gb, d) in grad.b.data_mut().iter_mut().zip(&dz) {
                *gb += d;
            }
            let mut dx = vec![0.0; in_dim];
            matvec_t_acc(self.w.data(), &dz, &mut dx);
            dxs[t] = dx;
            let mut dh_prev = vec![0.0; h];
            matvec_t_acc(self.u.data(), &dz, &mut dh_prev);
            dh = dh_prev;
        }
        dxs
    }
}

/// Caches of both directions of a bidirectional pass.
#[derive(Debug, Clone)]
pub struct BiLstmCache {
    fwd: Vec<StepCache>,
    bwd: Vec<StepCache>,
    rows: usize,
    len: usize,
}

fn columns(seq: &Tensor) -> Vec<Vec<f64>> {
    (0..seq.cols()).map(|c| seq.column(c)).collect()
}

/// Runs `fwd` over the columns of a `features × len` sequence left to right
/// and `bwd` right to left; returns `[h_fwd_final; h_bwd_final]`.
pub fn bilstm_forward(seq: &Tensor, fwd: &LstmCell, bwd: &LstmCell) -> Result<(Vec<f64>, BiLstmCache)> {
    if seq.shape().len() != 2 || seq.cols() == 0 {
        return Err(Error::EmptySequence("bidirectional LSTM needs at least one step".into()));
    }
    if seq.rows() != fwd.in_dim() || seq.rows() != bwd.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: fwd.in_dim(),
            found: seq.rows(),
        });
    }
    let cols = columns(seq);
    let (hf, fwd_cache) = fwd.run(cols.iter().map(Vec::as_slice));
    let (hb, bwd_cache) = bwd.run(cols.iter().rev().map(Vec::as_slice));
    let mut out = hf;
    out.extend(hb);
    Ok((
        out,
        BiLstmCache {
            fwd: fwd_cache,
            bwd: bwd_cache,
            rows: seq.rows(),
            len: seq.cols(),
        },
    ))
}

/// Backward pass of [`bilstm_forward`]; returns `dL/dseq`.
pub fn bilstm_backward(
    cache: &BiLstmCache,
    d_out: &[f64],
    fwd: &LstmCell,
    bwd: &LstmCell,
    grad_fwd: &mut LstmCell,
    grad_bwd: &mut LstmCell,
) -> Tensor {
    let h = fwd.hidden();
    let dx_f = fwd.backward(&cache.fwd, &d_out[..h], grad_fwd);
    let dx_b = bwd.backward(&cache.bwd, &d_out[h..], grad_bwd);
    let mut d_seq = Tensor::zeros(&[cache.rows, cache.len]);
    let len = cache.len;
    for t in 0..len {
        let tb = len - 1 - t;
        for r in 0..cache.rows {
            d_seq.data_mut()[r * len + t] += dx_f[t][r] + dx_b[tb][r];
        }
    }
    d_seq
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn zero_cell(in_dim: usize, h: usize) -> LstmCell {
        LstmCell {
            w: Tensor::zeros(&[4 * h, in_dim]),
            u: Tensor::zeros(&[4 * h, h]),
            b: Tensor::zeros(&[4 * h]),
        }
    }

    #[test]
    fn zero_everything_stays_zero() {
        let cell = zero_cell(2, 3);
        let (h, c, _) = cell.step(&[0.0, 0.0], &[0.0; 3], &[0.0; 3]);
        assert_eq!(h, vec![0.0; 3]);
        assert_eq!(c, vec![0.0; 3]);
    }

    #[test]
    fn saturated_forget_carries_memory() {
        let mut cell = zero_cell(1, 1);
        // i ≈ 0, f ≈ 1
        cell.b.data_mut()[0] = -800.0;
        cell.b.data_mut()[1] = 800.0;
        let (_, c, _) = cell.step(&[0.7], &[0.2], &[0.42]);
        assert_eq!(c, vec![0.42]);
    }

    #[test]
    fn one_dim_cell_by_hand() {
        // z = w·x + u·h + b per gate with x = 0.5, h_prev = -0.25, c_prev = 0.3
        let cell = LstmCell {
            w: Tensor::from_vec(&[4, 1], vec![0.4, -0.2, 0.9, 0.1]).unwrap(),
            u: Tensor::from_vec(&[4, 1], vec![0.3, 0.5, -0.6, 0.8]).unwrap(),
            b: Tensor::from_vec(&[4], vec![0.0, 1.0, 0.1, -0.2]).unwrap(),
        };
        let (x, hp, cp) = (0.5, -0.25, 0.3);
        let zi: f64 = 0.4 * x + 0.3 * hp;
        let zf: f64 = -0.2 * x + 0.5 * hp + 1.0;
        let zg: f64 = 0.9 * x - 0.6 * hp + 0.1;
        let zo: f64 = 0.1 * x + 0.8 * hp - 0.2;
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let c = sig(zf) * cp + sig(zi) * zg.tanh();
        let h = sig(zo) * c.tanh();
        let (hn, cn, _) = cell.step(&[x], &[hp], &[cp]);
        assert!((cn[0] - c).abs() < 1e-15);
        assert!((hn[0] - h).abs() < 1e-15);
    }

    #[test]
    fn forget_bias_initialized_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cell = LstmCell::new(4, 3, &mut rng);
        assert_eq!(&cell.b.data()[3..6], &[1.0, 1.0, 1.0]);
        assert!(cell.b.data()[..3].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn palindrome_gives_equal_halves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cell = LstmCell::new(2, 3, &mut rng);
        let seq = Tensor::from_vec(&[2, 3], vec![0.1, 0.5, 0.1, -0.3, 0.2, -0.3]).unwrap();
        let (out, _) = bilstm_forward(&seq, &cell, &cell).unwrap();
        for k in 0..3 {
            assert!((out[k] - out[3 + k]).abs() < 1e-15);
        }
    }

    #[test]
    fn first_half_matches_manual_unroll() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fwd = LstmCell::new(2, 3, &mut rng);
        let bwd = LstmCell::new(2, 3, &mut rng);
        let seq = Tensor::from_vec(&[2, 4], vec![0.1, 0.2, 0.3, 0.4, -0.5, 0.6, -0.7, 0.8]).unwrap();
        let (out, _) = bilstm_forward(&seq, &fwd, &bwd).unwrap();
        let (mut h, mut c) = (vec![0.0; 3], vec![0.0; 3]);
        for t in 0..4 {
            let (hn, cn, _) = fwd.step(&seq.column(t), &h, &c);
            h = hn;
            c = cn;
        }
        assert_eq!(&out[..3], h.as_slice());
    }

    #[test]
    fn single_step_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cell = LstmCell::new(2, 2, &mut rng);
        let seq = Tensor::from_vec(&[2, 1], vec![0.3, -0.1]).unwrap();
        let (out, _) = bilstm_forward(&seq, &cell, &cell).unwrap();
        assert_eq!(out[..2], out[2..]);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let cell = zero_cell(2, 2);
        let seq = Tensor::zeros(&[2, 0]);
        assert!(bilstm_forward(&seq, &cell, &cell).is_err());
    }
}

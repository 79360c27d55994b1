use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-8;

/// Per-coordinate squared-gradient accumulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdagradState {
    pub accumulators: Vec<Tensor>,
    pub lr: f64,
    pub eps: f64,
}

impl AdagradState {
    pub fn new<'a, I>(params: I, lr: f64) -> Self
    where
        I: IntoIterator<Item = &'a Tensor>,
    {
        AdagradState {
            accumulators: params.into_iter().map(Tensor::zeros_like).collect(),
            lr,
            eps: DEFAULT_EPS,
        }
    }

    /// `G += g²; θ -= lr · g / (sqrt(G) + eps)`, elementwise.
    pub fn update(&mut self, params: &mut [&mut Tensor], grads: &[&Tensor]) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.accumulators.len() {
            return Err(Error::ShapeMismatch(format!(
                "adagrad got {} params, {} grads, {} accumulators",
                params.len(),
                grads.len(),
                self.accumulators.len()
            )));
        }
        for ((p, g), acc) in params.iter().zip(grads).zip(&self.accumulators) {
            p.check_same_shape(g)?;
            p.check_same_shape(acc)?;
        }
        for ((p, g), acc) in params.iter_mut().zip(grads).zip(&mut self.accumulators) {
            for ((theta, &gi), gsum) in p.data_mut().iter_mut().zip(g.data()).zip(acc.data_mut()) {
                if gi == 0.0 {
                    continue;
                }
                *gsum += gi * gi;
                *theta -= self.lr * gi / (gsum.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Tensor {
        Tensor::from_vec(&[1], vec![v]).unwrap()
    }

    #[test]
    fn zero_gradient_changes_nothing() {
        let mut p = scalar(0.3);
        let g = scalar(0.0);
        let mut st = AdagradState::new([&p], 0.1);
        st.update(&mut [&mut p], &[&g]).unwrap();
        assert_eq!(p.data(), &[0.3]);
        assert_eq!(st.accumulators[0].data(), &[0.0]);
    }

    #[test]
    fn first_step_by_formula() {
        let mut p = scalar(0.0);
        let g = scalar(1.0);
        let mut st = AdagradState::new([&p], 0.1);
        st.update(&mut [&mut p], &[&g]).unwrap();
        assert!((p.data()[0] + 0.1 / (1.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn steps_shrink_and_accumulators_grow() {
        let mut p = scalar(0.0);
        let g = scalar(0.5);
        let mut st = AdagradState::new([&p], 0.1);
        let mut last_step = f64::INFINITY;
        let mut last_acc = 0.0;
        for _ in 0..10 {
            let before = p.data()[0];
            st.update(&mut [&mut p], &[&g]).unwrap();
            let step = (p.data()[0] - before).abs();
            assert!(step < last_step);
            assert!(st.accumulators[0].data()[0] >= last_acc);
            last_step = step;
            last_acc = st.accumulators[0].data()[0];
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut p = scalar(0.0);
        let g = Tensor::zeros(&[2]);
        let mut st = AdagradState::new([&p], 0.1);
        assert!(st.update(&mut [&mut p], &[&g]).is_err());
    }
}

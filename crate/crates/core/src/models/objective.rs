use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classifier::Classifier;
use crate::nnet::{Differentiable, Tensor};

/// Mean cross-entropy of a classifier on a fixed set of samples, exposed for
/// gradient checking.
#[derive(Debug, Clone)]
pub struct ClassifierObjective {
    pub model: Classifier,
    pub samples: Vec<(Vec<String>, usize)>,
}

impl ClassifierObjective {
    /// Redraws every parameter uniformly from `[-scale, scale]`.
    ///
    /// At the default init scale many recurrent gradients are around 1e-8,
    /// below what central differences can resolve against loss roundoff, so
    /// checks are more informative at a point with larger activations.
    pub fn randomize(&mut self, scale: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in self.model.params.tensors_mut() {
            for v in t.data_mut() {
                *v = rng.random_range(-scale..=scale);
            }
        }
    }
}

impl Differentiable for ClassifierObjective {
    fn param_names(&self) -> Vec<String> {
        self.model.params.named().into_iter().map(|(n, _)| n.to_string()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.model.params.tensors_mut()
    }

    fn loss(&self) -> f64 {
        self.model.loss(&self.samples).expect("samples match the model")
    }

    fn gradients(&self) -> Vec<Tensor> {
        let (_, grads) = self
            .model
            .loss_and_gradients(&self.samples)
            .expect("samples match the model");
        grads.tensors().into_iter().cloned().collect()
    }
}

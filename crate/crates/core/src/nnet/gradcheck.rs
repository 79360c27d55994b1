//! Central finite-difference gradient checking.

use super::tensor::Tensor;

/// A scalar loss over a fixed set of parameter tensors with analytic gradients.
pub trait Differentiable {
    fn param_names(&self) -> Vec<String>;
    fn params_mut(&mut self) -> Vec<&mut Tensor>;
    fn loss(&self) -> f64;
    /// Analytic gradients, one per parameter tensor, in `param_names` order.
    fn gradients(&self) -> Vec<Tensor>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Max relative error per parameter tensor.
    pub per_param: Vec<(String, f64)>,
    pub max_error: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }

    pub fn error_for(&self, name: &str) -> Option<f64> {
        self.per_param.iter().find(|(n, _)| n == name).map(|(_, e)| *e)
    }
}

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

fn nudge<M: Differentiable + ?Sized>(model: &mut M, p: usize, i: usize, delta: f64) {
    model.params_mut()[p].data_mut()[i] += delta;
}

/// Compares every coordinate's analytic gradient with
/// `(L(θ+h) - L(θ-h)) / 2h`.
pub fn grad_check<M: Differentiable + ?Sized>(model: &mut M, step: f64, tol: f64) -> GradCheckReport {
    let analytic = model.gradients();
    let names = model.param_names();
    let mut per_param = Vec::with_capacity(names.len());
    for (p, (name, grad)) in names.into_iter().zip(&analytic).enumerate() {
        let mut worst: f64 = 0.0;
        for i in 0..grad.len() {
            let original = model.params_mut()[p].data()[i];
            nudge(model, p, i, step);
            let plus = model.loss();
            model.params_mut()[p].data_mut()[i] = original - step;
            let minus = model.loss();
            model.params_mut()[p].data_mut()[i] = original;
            let numeric = (plus - minus) / (2.0 * step);
            worst = worst.max(relative_error(grad.data()[i], numeric));
        }
        per_param.push((name, worst));
    }
    let max_error = per_param.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    GradCheckReport {
        per_param,
        max_error,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `L = ½‖W·x - y‖²`
    struct LinearQuadratic {
        w: Tensor,
        x: Vec<f64>,
        y: Vec<f64>,
        corrupt: f64,
    }

    impl LinearQuadratic {
        fn residual(&self) -> Vec<f64> {
            let cols = self.x.len();
            self.w
                .data()
                .chunks(cols)
                .zip(&self.y)
                .map(|(row, yi)| row.iter().zip(&self.x).map(|(a, b)| a * b).sum::<f64>() - yi)
                .collect()
        }
    }

    impl Differentiable for LinearQuadratic {
        fn param_names(&self) -> Vec<String> {
            vec!["w".into()]
        }
        fn params_mut(&mut self) -> Vec<&mut Tensor> {
            vec![&mut self.w]
        }
        fn loss(&self) -> f64 {
            0.5 * self.residual().iter().map(|r| r * r).sum::<f64>()
        }
        fn gradients(&self) -> Vec<Tensor> {
            let r = self.residual();
            let mut g = self.w.zeros_like();
            let cols = self.x.len();
            for (k, v) in g.data_mut().iter_mut().enumerate() {
                *v = self.corrupt * r[k / cols] * self.x[k % cols];
            }
            vec![g]
        }
    }

    fn problem(corrupt: f64) -> LinearQuadratic {
        LinearQuadratic {
            w: Tensor::from_vec(&[2, 3], vec![0.3, -1.2, 0.8, 2.0, 0.1, -0.7]).unwrap(),
            x: vec![1.5, -0.5, 2.0],
            y: vec![0.25, -1.0],
            corrupt,
        }
    }

    #[test]
    fn exact_for_quadratic() {
        let report = grad_check(&mut problem(1.0), 1e-5, 1e-7);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn catches_scaled_gradient() {
        let report = grad_check(&mut problem(2.0), 1e-5, 1e-4);
        assert!(report.max_error > 0.3);
        assert!(!report.passed());
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1.0, 2.0) - 0.5).abs() < 1e-15);
    }
}

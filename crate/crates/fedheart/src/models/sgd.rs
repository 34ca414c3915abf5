//! Mini-batch (sub)gradient descent over flat parameter vectors, shared by
//! the centralized trainers and the federated local-step loop, plus the
//! finite-difference oracle used to verify every analytic gradient.

use rand::seq::index;
use rand::seq::SliceRandom;

use crate::models::TrainedModel;
use crate::rng;

/// A differentiable training objective over a fixed dataset. Parameters are
/// a single flat `Vec<f64>` so server-side aggregation can treat every
/// family uniformly.
pub trait Objective {
    /// Length of the flat parameter vector.
    fn dim(&self) -> usize;

    /// Number of training rows.
    fn n_rows(&self) -> usize;

    /// Seeded initial parameters.
    fn init(&self, seed: u64) -> Vec<f64>;

    /// Mean loss over the rows in `batch` (indices into the training set).
    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64;

    /// Gradient of [`Objective::loss`] at `theta` over `batch`.
    fn grad(&self, theta: &[f64], batch: &[usize]) -> Vec<f64>;

    /// Materialise parameters into a predictor.
    fn model(&self, theta: &[f64]) -> TrainedModel;
}

/// Epoch-based SGD: `epochs` passes over a per-epoch seeded shuffle, fixed
/// learning rate, last partial batch included.
pub fn run_epochs(
    obj: &dyn Objective,
    mut theta: Vec<f64>,
    lr: f64,
    batch_size: usize,
    epochs: usize,
    seed: u64,
) -> Vec<f64> {
    let n = obj.n_rows();
    let batch_size = batch_size.max(1).min(n);
    let mut rng = rng::chacha(rng::mix(seed, 0x5047));
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(batch_size) {
            let g = obj.grad(&theta, batch);
            for (t, gi) in theta.iter_mut().zip(&g) {
                *t -= lr * gi;
            }
        }
    }
    theta
}

/// Step-based SGD for the federated round loop: `steps` mini-batches drawn
/// by seeded sampling without replacement within each batch. When
/// `correction` is given (SCAFFOLD), each step descends along
/// `grad + correction`.
pub fn run_steps(
    obj: &dyn Objective,
    mut theta: Vec<f64>,
    lr: f64,
    batch_size: usize,
    steps: usize,
    correction: Option<&[f64]>,
    seed: u64,
) -> Vec<f64> {
    let n = obj.n_rows();
    let batch_size = batch_size.max(1).min(n);
    let mut rng = rng::chacha(rng::mix(seed, 0x57E9));
    for _ in 0..steps {
        let batch: Vec<usize> = index::sample(&mut rng, n, batch_size).into_vec();
        let mut g = obj.grad(&theta, &batch);
        if let Some(c) = correction {
            for (gi, ci) in g.iter_mut().zip(c) {
                *gi += ci;
            }
        }
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= lr * gi;
        }
    }
    theta
}

/// Central finite-difference gradient of `obj.loss` — the reference oracle
/// the analytic gradients are validated against (h = 1e-5 in the checks).
pub fn finite_difference_gradient(
    obj: &dyn Objective,
    theta: &[f64],
    batch: &[usize],
    h: f64,
) -> Vec<f64> {
    let mut g = vec![0.0; theta.len()];
    let mut probe = theta.to_vec();
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let up = obj.loss(&probe, batch);
        probe[i] = theta[i] - h;
        let down = obj.loss(&probe, batch);
        probe[i] = theta[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Max absolute component difference between the analytic and
/// finite-difference gradients at `theta` over `batch`.
pub fn gradient_check(obj: &dyn Objective, theta: &[f64], batch: &[usize], h: f64) -> f64 {
    let analytic = obj.grad(theta, batch);
    let numeric = finite_difference_gradient(obj, theta, batch, h);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

//! One-hidden-layer neural network (ReLU hidden, sigmoid output, binary
//! cross-entropy), trained by the shared SGD core.

use rand::Rng;

use crate::dataset::TabularDataset;
use crate::models::linear::sigmoid;
use crate::models::sgd::Objective;
use crate::models::TrainedModel;
use crate::rng;

/// Dense parameters of the p → h → 1 network. The flat layout is
/// `[w1 (h·p, row-major), b1 (h), w2 (h), b2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub inputs: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl Mlp {
    pub fn dim(inputs: usize, hidden: usize) -> usize {
        hidden * inputs + hidden + hidden + 1
    }

    pub fn from_theta(inputs: usize, hidden: usize, theta: &[f64]) -> Mlp {
        assert_eq!(theta.len(), Mlp::dim(inputs, hidden));
        let (w1, rest) = theta.split_at(hidden * inputs);
        let (b1, rest) = rest.split_at(hidden);
        let (w2, b2) = rest.split_at(hidden);
        Mlp {
            inputs,
            hidden,
            w1: w1.to_vec(),
            b1: b1.to_vec(),
            w2: w2.to_vec(),
            b2: b2[0],
        }
    }

    /// Hidden activations followed by the output logit.
    fn forward(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let mut a = vec![0.0; self.hidden];
        for h in 0..self.hidden {
            let row = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[h];
            a[h] = z.max(0.0);
        }
        let logit = self.w2.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>() + self.b2;
        (a, logit)
    }

    /// Probability of class 1.
    pub fn prob(&self, x: &[f64]) -> f64 {
        sigmoid(self.forward(x).1)
    }
}

/// BCE objective over the network parameters.
pub struct MlpObjective {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    inputs: usize,
    hidden: usize,
}

impl MlpObjective {
    pub fn new(train: &TabularDataset, hidden: usize) -> MlpObjective {
        MlpObjective {
            x: train.rows.clone(),
            y: train.labels.iter().map(|&l| l as f64).collect(),
            inputs: train.n_features(),
            hidden,
        }
    }
}

impl Objective for MlpObjective {
    fn dim(&self) -> usize {
        Mlp::dim(self.inputs, self.hidden)
    }

    fn n_rows(&self) -> usize {
        self.x.len()
    }

    /// Uniform init scaled by fan-in (±1/√fan_in); biases start at zero.
    fn init(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng::chacha(rng::mix(seed, 0x11717));
        let mut theta = vec![0.0; self.dim()];
        let s1 = 1.0 / (self.inputs as f64).sqrt();
        for v in theta.iter_mut().take(self.hidden * self.inputs) {
            *v = rng.gen_range(-s1..s1);
        }
        let s2 = 1.0 / (self.hidden as f64).sqrt();
        let off = self.hidden * self.inputs + self.hidden;
        for v in theta.iter_mut().skip(off).take(self.hidden) {
            *v = rng.gen_range(-s2..s2);
        }
        theta
    }

    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64 {
        let m = Mlp::from_theta(self.inputs, self.hidden, theta);
        let sum: f64 = batch
            .iter()
            .map(|&i| {
                let z = m.forward(&self.x[i]).1;
                z.max(0.0) - z * self.y[i] + (1.0 + (-z.abs()).exp()).ln()
            })
            .sum();
        sum / batch.len() as f64
    }

    fn grad(&self, theta: &[f64], batch: &[usize]) -> Vec<f64> {
        let m = Mlp::from_theta(self.inputs, self.hidden, theta);
        let (p, h) = (self.inputs, self.hidden);
        let mut g = vec![0.0; theta.len()];
        let (gw1, rest) = g.split_at_mut(h * p);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h);
        for &i in batch {
            let x = &self.x[i];
            let (a, logit) = m.forward(x);
            let d2 = sigmoid(logit) - self.y[i]; // dL/dlogit
            for k in 0..h {
                gw2[k] += d2 * a[k];
                if a[k] > 0.0 {
                    let d1 = d2 * m.w2[k];
                    gb1[k] += d1;
                    for j in 0..p {
                        gw1[k * p + j] += d1 * x[j];
                    }
                }
            }
            gb2[0] += d2;
        }
        let scale = 1.0 / batch.len() as f64;
        g.iter_mut().for_each(|v| *v *= scale);
        g
    }

    fn model(&self, theta: &[f64]) -> TrainedModel {
        TrainedModel::Nn1(Mlp::from_theta(self.inputs, self.hidden, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sgd::{gradient_check, run_epochs};
    use rand::Rng;

    fn random_dataset(n: usize, p: usize, seed: u64) -> TabularDataset {
        use crate::dataset::{preprocess, Center, FeatureSchema, RawRecord};
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = schema.names()[..p].to_vec();
        let mut rng = rng::chacha(seed);
        let recs: Vec<RawRecord> = (0..n)
            .map(|_| {
                let mut values: Vec<Option<f64>> =
                    (0..13).map(|_| Some(rng.gen_range(-2.0..2.0))).collect();
                values.push(Some(if rng.gen_bool(0.5) { 1.0 } else { 0.0 }));
                RawRecord {
                    values,
                    center: Center::Hungary,
                }
            })
            .collect();
        preprocess(&recs, &schema, &names).unwrap()
    }

    #[test]
    fn mlp_gradient_matches_finite_differences() {
        let ds = random_dataset(30, 5, 51);
        let obj = MlpObjective::new(&ds, 6);
        let mut rng = crate::rng::chacha(52);
        for trial in 0..20 {
            let theta: Vec<f64> = (0..obj.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let batch: Vec<usize> = (0..8).map(|_| rng.gen_range(0..ds.n_rows())).collect();
            let gap = gradient_check(&obj, &theta, &batch, 1e-5);
            // ReLU kinks are non-differentiable; random preactivations sit
            // away from zero with probability one, so 1e-4 still holds.
            assert!(gap < 1e-4, "trial {trial}: gap {gap}");
        }
    }

    #[test]
    fn mlp_init_is_seeded_and_leaves_biases_zero() {
        let ds = random_dataset(10, 4, 61);
        let obj = MlpObjective::new(&ds, 5);
        let a = obj.init(3);
        let b = obj.init(3);
        let c = obj.init(4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let m = Mlp::from_theta(4, 5, &a);
        assert!(m.b1.iter().all(|&v| v == 0.0));
        assert_eq!(m.b2, 0.0);
    }

    #[test]
    fn mlp_learns_xor_like_interaction() {
        // A single hidden layer must solve a problem LR cannot: y = sign(x0·x1).
        use crate::dataset::{preprocess, Center, FeatureSchema, RawRecord};
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = schema.names()[..2].to_vec();
        let mut rng = crate::rng::chacha(71);
        let recs: Vec<RawRecord> = (0..200)
            .map(|_| {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                let y = if a * b > 0.0 { 1.0 } else { 0.0 };
                let mut values = vec![Some(a), Some(b)];
                values.extend(std::iter::repeat(Some(0.0)).take(11));
                values.push(Some(y));
                RawRecord {
                    values,
                    center: Center::Va,
                }
            })
            .collect();
        let ds = preprocess(&recs, &schema, &names).unwrap();
        let obj = MlpObjective::new(&ds, 8);
        let theta = run_epochs(&obj, obj.init(0), 0.2, 16, 400, 0);
        let model = obj.model(&theta);
        let acc = crate::models::evaluate(&model, &ds).unwrap();
        assert!(acc > 0.9, "xor accuracy {acc}");
    }
}

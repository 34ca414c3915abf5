//! Logistic regression and linear SVM: shared parameter payload, two
//! objectives for the SGD core.

use crate::dataset::TabularDataset;
use crate::models::sgd::Objective;
use crate::models::TrainedModel;

/// Weights and bias of a linear decision function `w·x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Linear {
    pub fn from_theta(theta: &[f64]) -> Linear {
        let (w, b) = theta.split_at(theta.len() - 1);
        Linear {
            w: w.to_vec(),
            b: b[0],
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable binary cross-entropy with logits.
fn bce_with_logits(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (1.0 + (-z.abs()).exp()).ln()
}

/// Binary cross-entropy objective; parameters `[w.., b]`, zero-initialised.
pub struct LrObjective {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl LrObjective {
    pub fn new(train: &TabularDataset) -> LrObjective {
        LrObjective {
            x: train.rows.clone(),
            y: train.labels.iter().map(|&l| l as f64).collect(),
        }
    }
}

impl Objective for LrObjective {
    fn dim(&self) -> usize {
        self.x[0].len() + 1
    }

    fn n_rows(&self) -> usize {
        self.x.len()
    }

    fn init(&self, _seed: u64) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64 {
        let m = Linear::from_theta(theta);
        let sum: f64 = batch
            .iter()
            .map(|&i| bce_with_logits(m.margin(&self.x[i]), self.y[i]))
            .sum();
        sum / batch.len() as f64
    }

    fn grad(&self, theta: &[f64], batch: &[usize]) -> Vec<f64> {
        let m = Linear::from_theta(theta);
        let p = m.w.len();
        let mut g = vec![0.0; p + 1];
        for &i in batch {
            let err = sigmoid(m.margin(&self.x[i])) - self.y[i];
            for j in 0..p {
                g[j] += err * self.x[i][j];
            }
            g[p] += err;
        }
        let scale = 1.0 / batch.len() as f64;
        g.iter_mut().for_each(|v| *v *= scale);
        g
    }

    fn model(&self, theta: &[f64]) -> TrainedModel {
        TrainedModel::Lr(Linear::from_theta(theta))
    }
}

/// Primal hinge-loss SVM. The full objective is `½‖w‖² + C·Σᵢ hinge(i)`;
/// per batch we descend its per-row average `½‖w‖²/n + C·mean(hinge)`,
/// whose batch gradient is an unbiased estimate of the full gradient
/// scaled by 1/n. The bias is not regularised. Labels {0,1} map to {−1,+1}.
pub struct SvmObjective {
    x: Vec<Vec<f64>>,
    y: Vec<f64>, // ±1
    c: f64,
}

impl SvmObjective {
    pub fn new(train: &TabularDataset, c: f64) -> SvmObjective {
        SvmObjective {
            x: train.rows.clone(),
            y: train
                .labels
                .iter()
                .map(|&l| if l == 1 { 1.0 } else { -1.0 })
                .collect(),
            c,
        }
    }

    /// Construct from labels already mapped to ±1 (used to verify that the
    /// {0,1} mapping is exactly equivalent).
    pub fn from_signed(x: Vec<Vec<f64>>, y: Vec<f64>, c: f64) -> SvmObjective {
        assert!(y.iter().all(|&v| v == 1.0 || v == -1.0));
        SvmObjective { x, y, c }
    }
}

impl Objective for SvmObjective {
    fn dim(&self) -> usize {
        self.x[0].len() + 1
    }

    fn n_rows(&self) -> usize {
        self.x.len()
    }

    fn init(&self, _seed: u64) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64 {
        let m = Linear::from_theta(theta);
        let n = self.x.len() as f64;
        let reg = 0.5 * dot(&m.w, &m.w) / n;
        let hinge: f64 = batch
            .iter()
            .map(|&i| (1.0 - self.y[i] * m.margin(&self.x[i])).max(0.0))
            .sum();
        reg + self.c * hinge / batch.len() as f64
    }

    fn grad(&self, theta: &[f64], batch: &[usize]) -> Vec<f64> {
        let m = Linear::from_theta(theta);
        let p = m.w.len();
        let n = self.x.len() as f64;
        let mut g = vec![0.0; p + 1];
        for j in 0..p {
            g[j] = m.w[j] / n;
        }
        let scale = self.c / batch.len() as f64;
        for &i in batch {
            if self.y[i] * m.margin(&self.x[i]) < 1.0 {
                for j in 0..p {
                    g[j] -= scale * self.y[i] * self.x[i][j];
                }
                g[p] -= scale * self.y[i];
            }
        }
        g
    }

    fn model(&self, theta: &[f64]) -> TrainedModel {
        TrainedModel::Svm(Linear::from_theta(theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sgd::{gradient_check, run_epochs};
    use crate::rng;
    use rand::Rng;

    pub(crate) fn random_dataset(n: usize, p: usize, seed: u64) -> TabularDataset {
        use crate::dataset::{preprocess, FeatureSchema, RawRecord};
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
                    center: crate::dataset::Center::Cleveland,
                }
            })
            .collect();
        preprocess(&recs, &schema, &names).unwrap()
    }

    #[test]
    fn lr_gradient_matches_finite_differences() {
        let ds = random_dataset(40, 6, 11);
        let obj = LrObjective::new(&ds);
        let mut rng = rng::chacha(12);
        for trial in 0..20 {
            let theta: Vec<f64> = (0..obj.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let batch: Vec<usize> = (0..8).map(|_| rng.gen_range(0..ds.n_rows())).collect();
            let gap = gradient_check(&obj, &theta, &batch, 1e-5);
            assert!(gap < 1e-4, "trial {trial}: gap {gap}");
        }
    }

    #[test]
    fn svm_gradient_matches_finite_differences() {
        let ds = random_dataset(40, 6, 21);
        let obj = SvmObjective::new(&ds, 0.7);
        let mut rng = rng::chacha(22);
        for trial in 0..20 {
            let theta: Vec<f64> = (0..obj.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let batch: Vec<usize> = (0..8).map(|_| rng.gen_range(0..ds.n_rows())).collect();
            let gap = gradient_check(&obj, &theta, &batch, 1e-5);
            assert!(gap < 1e-4, "trial {trial}: gap {gap}");
        }
    }

    #[test]
    fn svm_label_mapping_is_equivalent_to_signed_labels() {
        let ds = random_dataset(30, 5, 31);
        let from01 = SvmObjective::new(&ds, 2.0);
        let signed: Vec<f64> = ds
            .labels
            .iter()
            .map(|&l| if l == 1 { 1.0 } else { -1.0 })
            .collect();
        let frompm = SvmObjective::from_signed(ds.rows.clone(), signed, 2.0);
        let a = run_epochs(&from01, from01.init(0), 0.05, 8, 12, 9);
        let b = run_epochs(&frompm, frompm.init(0), 0.05, 8, 12, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn svm_separates_two_separable_points() {
        use crate::dataset::{preprocess, FeatureSchema, RawRecord};
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = schema.names()[..2].to_vec();
        let mk = |a: f64, b: f64, y: f64| {
            let mut values: Vec<Option<f64>> = vec![Some(a), Some(b)];
            values.extend(std::iter::repeat(Some(0.0)).take(11));
            values.push(Some(y));
            RawRecord {
                values,
                center: crate::dataset::Center::Cleveland,
            }
        };
        let ds = preprocess(&[mk(1.0, 0.0, 1.0), mk(-1.0, 0.0, 0.0)], &schema, &names).unwrap();
        let obj = SvmObjective::new(&ds, 1.0);
        let theta = run_epochs(&obj, obj.init(0), 0.1, 2, 200, 0);
        let model = obj.model(&theta);
        let acc = crate::models::evaluate(&model, &ds).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn lr_loss_decreases_under_training() {
        let ds = random_dataset(60, 5, 41);
        let obj = LrObjective::new(&ds);
        let all: Vec<usize> = (0..ds.n_rows()).collect();
        let theta0 = obj.init(0);
        let before = obj.loss(&theta0, &all);
        let theta = run_epochs(&obj, theta0, 0.1, 8, 20, 1);
        let after = obj.loss(&theta, &all);
        assert!(after < before, "{after} !< {before}");
    }
}

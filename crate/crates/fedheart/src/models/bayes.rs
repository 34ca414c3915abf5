//! Gaussian / categorical Naive Bayes with Laplace smoothing.
//!
//! Continuous features get per-class Gaussian likelihoods (variance floored
//! at 1e-9); categorical and binary features get per-class frequency tables
//! smoothed by `alpha` over the training support of the feature.

use crate::dataset::{Kind, TabularDataset};
use crate::models::linear::sigmoid;

/// Variance floor for near-constant continuous features.
const VAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureDist {
    Gaussian {
        mean: [f64; 2],
        var: [f64; 2],
    },
    Table {
        support: Vec<f64>,
        /// `log_prob[class][support index]`; unseen values fall back to the
        /// smoothed pseudo-count `alpha / (n_class + alpha·|support|)`.
        log_prob: [Vec<f64>; 2],
        log_unseen: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    pub log_prior: [f64; 2],
    pub features: Vec<FeatureDist>,
}

pub fn fit(train: &TabularDataset, alpha: f64) -> NaiveBayes {
    let n = train.n_rows() as f64;
    let n1 = train.labels.iter().filter(|&&l| l == 1).count() as f64;
    let counts = [n - n1, n1];
    // An absent class keeps log-prior −inf and never wins the posterior.
    let log_prior = [counts[0].ln() - n.ln(), counts[1].ln() - n.ln()];

    let kinds = train.schema.kinds();
    let mut features = Vec::with_capacity(train.n_features());
    for (j, kind) in kinds.iter().enumerate() {
        let col = |class: u8| {
            train
                .rows
                .iter()
                .zip(&train.labels)
                .filter(move |(_, &l)| l == class)
                .map(move |(row, _)| row[j])
        };
        match kind {
            Kind::Continuous => {
                let mut mean = [0.0; 2];
                let mut var = [1.0; 2];
                for class in 0..2u8 {
                    let nc = counts[class as usize];
                    if nc == 0.0 {
                        continue;
                    }
                    let m: f64 = col(class).sum::<f64>() / nc;
                    let v: f64 = col(class).map(|x| (x - m) * (x - m)).sum::<f64>() / nc;
                    mean[class as usize] = m;
                    var[class as usize] = v.max(VAR_FLOOR);
                }
                features.push(FeatureDist::Gaussian { mean, var });
            }
            Kind::Categorical | Kind::Binary => {
                let mut support: Vec<f64> = train.rows.iter().map(|row| row[j]).collect();
                support.sort_by(|a, b| a.partial_cmp(b).unwrap());
                support.dedup();
                let k = support.len() as f64;
                let mut log_prob = [vec![0.0; support.len()], vec![0.0; support.len()]];
                let mut log_unseen = [0.0; 2];
                for class in 0..2usize {
                    let nc = counts[class];
                    let denom = (nc + alpha * k).ln();
                    for (s, &value) in support.iter().enumerate() {
                        let cnt = col(class as u8).filter(|&x| x == value).count() as f64;
                        log_prob[class][s] = (cnt + alpha).ln() - denom;
                    }
                    log_unseen[class] = alpha.ln() - denom;
                }
                features.push(FeatureDist::Table {
                    support,
                    log_prob,
                    log_unseen,
                });
            }
        }
    }
    NaiveBayes {
        log_prior,
        features,
    }
}

impl NaiveBayes {
    /// Posterior probability of class 1.
    pub fn posterior(&self, x: &[f64]) -> f64 {
        let mut log_like = self.log_prior;
        for (j, dist) in self.features.iter().enumerate() {
            for class in 0..2usize {
                log_like[class] += match dist {
                    FeatureDist::Gaussian { mean, var } => {
                        let d = x[j] - mean[class];
                        -0.5 * (2.0 * std::f64::consts::PI * var[class]).ln()
                            - d * d / (2.0 * var[class])
                    }
                    FeatureDist::Table {
                        support,
                        log_prob,
                        log_unseen,
                    } => match support.iter().position(|&v| v == x[j]) {
                        Some(s) => log_prob[class][s],
                        None => log_unseen[class],
                    },
                };
            }
        }
        sigmoid(log_like[1] - log_like[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{preprocess, Center, FeatureSchema, RawRecord};

    /// age (continuous) and sex (binary) carry the signal.
    fn toy(n: usize) -> TabularDataset {
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = vec!["age", "sex"];
        let recs: Vec<RawRecord> = (0..n)
            .map(|i| {
                let y = (i % 2) as f64;
                let age = if y == 1.0 { 60.0 + (i % 5) as f64 } else { 40.0 + (i % 5) as f64 };
                let sex = y; // perfectly informative category
                let mut values = vec![Some(age), Some(sex)];
                values.extend(std::iter::repeat(Some(0.0)).take(11));
                values.push(Some(y));
                RawRecord {
                    values,
                    center: Center::Cleveland,
                }
            })
            .collect();
        preprocess(&recs, &schema, &names).unwrap()
    }

    #[test]
    fn nb_separates_informative_toy_data() {
        let ds = toy(40);
        let nb = fit(&ds, 1.0);
        assert!(nb.posterior(&[62.0, 1.0]) > 0.9);
        assert!(nb.posterior(&[41.0, 0.0]) < 0.1);
    }

    #[test]
    fn nb_unseen_category_uses_smoothed_fallback() {
        let ds = toy(40);
        let nb = fit(&ds, 1.0);
        let p = nb.posterior(&[50.0, 7.0]); // category 7 never seen
        assert!(p.is_finite() && p > 0.0 && p < 1.0);
    }

    #[test]
    fn nb_handles_single_class_training_data() {
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = vec!["age"];
        let recs: Vec<RawRecord> = (0..10)
            .map(|i| {
                let mut values = vec![Some(50.0 + i as f64)];
                values.extend(std::iter::repeat(Some(0.0)).take(12));
                values.push(Some(1.0));
                RawRecord {
                    values,
                    center: Center::Switzerland,
                }
            })
            .collect();
        let ds = preprocess(&recs, &schema, &names).unwrap();
        let nb = fit(&ds, 1.0);
        assert_eq!(nb.posterior(&[55.0]), 1.0);
    }

    #[test]
    fn nb_variance_floor_keeps_posteriors_finite() {
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = vec!["age", "trestbps"];
        let recs: Vec<RawRecord> = (0..20)
            .map(|i| {
                let y = (i % 2) as f64;
                // trestbps constant: zero variance in both classes.
                let mut values = vec![Some(40.0 + y * 20.0 + (i % 3) as f64), Some(120.0)];
                values.extend(std::iter::repeat(Some(0.0)).take(11));
                values.push(Some(y));
                RawRecord {
                    values,
                    center: Center::Hungary,
                }
            })
            .collect();
        let ds = preprocess(&recs, &schema, &names).unwrap();
        let nb = fit(&ds, 0.5);
        let p = nb.posterior(&[58.0, 120.0]);
        assert!(p.is_finite());
        assert!(p > 0.5);
    }

    #[test]
    fn nb_laplace_alpha_shrinks_table_probabilities_toward_uniform() {
        let ds = toy(40);
        let weak = fit(&ds, 0.1);
        let strong = fit(&ds, 10.0);
        // Heavier smoothing pulls the decisive categorical evidence inward.
        let (pw, ps) = (weak.posterior(&[50.0, 1.0]), strong.posterior(&[50.0, 1.0]));
        assert!(pw > ps, "{pw} !> {ps}");
    }
}

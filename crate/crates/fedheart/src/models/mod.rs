//! Seven from-scratch binary classifiers behind one train / decide /
//! evaluate interface, plus seeded grid search.
//!
//! The differentiable families (LR, NN1, SVM) share the flat-parameter SGD
//! machinery in [`sgd`], which the federation module reuses for its local
//! client steps.

pub mod bayes;
pub mod knn;
pub mod linear;
pub mod nn;
pub mod sgd;
pub mod tree;

use std::fmt;

use crate::dataset::{split_train_test, standardize, TabularDataset};
use crate::error::{Error, Result};
use crate::models::sgd::Objective;

pub use linear::{Linear, LrObjective, SvmObjective};
pub use nn::{Mlp, MlpObjective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Lr,
    Nn1,
    Svm,
    Nb,
    Dt,
    Rf,
    Knn,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Lr,
        Family::Nn1,
        Family::Svm,
        Family::Nb,
        Family::Dt,
        Family::Rf,
        Family::Knn,
    ];

    /// Families trained by SGD on a flat parameter vector; the only ones
    /// admissible in the federated loop.
    pub fn differentiable(self) -> bool {
        matches!(self, Family::Lr | Family::Nn1 | Family::Svm)
    }

    /// Whether the train/test pipeline z-scores features for this family.
    /// Distance- and gradient-based families need comparable scales; the
    /// tree and Bayes families consume the raw feature codes.
    pub fn standardized(self) -> bool {
        matches!(self, Family::Lr | Family::Nn1 | Family::Svm | Family::Knn)
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(Family::Lr),
            "nn1" | "nn" => Ok(Family::Nn1),
            "svm" => Ok(Family::Svm),
            "nb" => Ok(Family::Nb),
            "dt" => Ok(Family::Dt),
            "rf" => Ok(Family::Rf),
            "knn" => Ok(Family::Knn),
            other => Err(Error::usage(format!("unknown model family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Lr => "LR",
            Family::Nn1 => "NN1",
            Family::Svm => "SVM",
            Family::Nb => "NB",
            Family::Dt => "DT",
            Family::Rf => "RF",
            Family::Knn => "KNN",
        };
        f.write_str(name)
    }
}

/// Hyperparameters for every family in one bag; each family reads the
/// fields it understands. Values produced by [`default_grid`] stay inside
/// the documented search ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub family: Family,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub hidden_units: usize,
    /// SVM regularization strength (hinge weight).
    pub c: f64,
    /// Naive Bayes Laplace smoothing.
    pub alpha: f64,
    /// Decision-tree depth cap; `None` grows to purity.
    pub max_depth: Option<usize>,
    /// Random-forest size.
    pub n_estimators: usize,
    /// KNN neighbour count.
    pub k: usize,
}

impl Hyperparams {
    /// Tuned per-family defaults: the grid-search winners on the pooled
    /// data, baked in so every experiment is reproducible without
    /// re-searching. See `default_grid` for the searched space.
    pub fn tuned(family: Family) -> Hyperparams {
        let mut hp = Hyperparams {
            family,
            learning_rate: 0.03,
            batch_size: 16,
            epochs: 30,
            hidden_units: 8,
            c: 1.0,
            alpha: 1.0,
            max_depth: Some(4),
            n_estimators: 200,
            k: 5,
        };
        match family {
            Family::Lr => {
                hp.learning_rate = 0.1;
                hp.batch_size = 16;
            }
            Family::Nn1 => {
                hp.learning_rate = 0.1;
                hp.batch_size = 16;
                hp.hidden_units = 8;
            }
            Family::Svm => {
                hp.learning_rate = 0.01;
                hp.batch_size = 16;
                hp.c = 1.0;
            }
            Family::Nb => hp.alpha = 1.0,
            Family::Dt => hp.max_depth = Some(4),
            Family::Rf => {
                hp.n_estimators = 200;
                hp.max_depth = None;
            }
            Family::Knn => hp.k = 5,
        }
        hp
    }

    /// The fixed reference configuration for logistic regression
    /// (lr = 0.001, batch 4, 30 epochs) reported alongside the tuned runs.
    pub fn reference_lr() -> Hyperparams {
        let mut hp = Hyperparams::tuned(Family::Lr);
        hp.learning_rate = 0.001;
        hp.batch_size = 4;
        hp.epochs = 30;
        hp
    }
}

/// Documented grid discretization inside the search ranges:
/// learning rate {0.001, 0.003, 0.01, 0.03, 0.1}; batch size {4, 16, 64};
/// hidden units {4, 8, 16}; C {0.01, 0.1, 1, 10}; alpha {0.1, 0.3, 1, 3, 10};
/// depth {None, 2, 4, 6, 8, 10}; trees {100, 200, 500}; k 1..=10.
pub fn default_grid(family: Family) -> Vec<Hyperparams> {
    const LRS: [f64; 5] = [0.001, 0.003, 0.01, 0.03, 0.1];
    const BATCHES: [usize; 3] = [4, 16, 64];
    let base = Hyperparams::tuned(family);
    let mut grid = Vec::new();
    match family {
        Family::Lr => {
            for &learning_rate in &LRS {
                for &batch_size in &BATCHES {
                    grid.push(Hyperparams {
                        learning_rate,
                        batch_size,
                        ..base.clone()
                    });
                }
            }
        }
        Family::Nn1 => {
            for &learning_rate in &LRS {
                for &batch_size in &BATCHES {
                    for hidden_units in [4, 8, 16] {
                        grid.push(Hyperparams {
                            learning_rate,
                            batch_size,
                            hidden_units,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        Family::Svm => {
            for &learning_rate in &LRS {
                for &batch_size in &BATCHES {
                    for c in [0.01, 0.1, 1.0, 10.0] {
                        grid.push(Hyperparams {
                            learning_rate,
                            batch_size,
                            c,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        Family::Nb => {
            for alpha in [0.1, 0.3, 1.0, 3.0, 10.0] {
                grid.push(Hyperparams {
                    alpha,
                    ..base.clone()
                });
            }
        }
        Family::Dt => {
            for max_depth in [None, Some(2), Some(4), Some(6), Some(8), Some(10)] {
                grid.push(Hyperparams {
                    max_depth,
                    ..base.clone()
                });
            }
        }
        Family::Rf => {
            for n_estimators in [100, 200, 500] {
                grid.push(Hyperparams {
                    n_estimators,
                    ..base.clone()
                });
            }
        }
        Family::Knn => {
            for k in 1..=10 {
                grid.push(Hyperparams { k, ..base.clone() });
            }
        }
    }
    grid
}

/// A fitted classifier: family tag plus its parameter payload.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Lr(Linear),
    Svm(Linear),
    Nn1(Mlp),
    Nb(bayes::NaiveBayes),
    Dt(tree::Tree),
    Rf(tree::Forest),
    Knn(knn::Knn),
}

impl TrainedModel {
    pub fn family(&self) -> Family {
        match self {
            TrainedModel::Lr(_) => Family::Lr,
            TrainedModel::Svm(_) => Family::Svm,
            TrainedModel::Nn1(_) => Family::Nn1,
            TrainedModel::Nb(_) => Family::Nb,
            TrainedModel::Dt(_) => Family::Dt,
            TrainedModel::Rf(_) => Family::Rf,
            TrainedModel::Knn(_) => Family::Knn,
        }
    }

    /// Input width the model was fitted on; `None` when any width works
    /// (trees only touch the feature indices present in their splits).
    pub fn expected_inputs(&self) -> Option<usize> {
        match self {
            TrainedModel::Lr(m) | TrainedModel::Svm(m) => Some(m.w.len()),
            TrainedModel::Nn1(m) => Some(m.inputs),
            TrainedModel::Nb(m) => Some(m.features.len()),
            TrainedModel::Knn(m) => m.x.first().map(Vec::len),
            TrainedModel::Dt(_) | TrainedModel::Rf(_) => None, // trees index sparsely
        }
    }
}

/// Continuous decision score for class 1: probabilities for LR/NN1/NB,
/// the raw margin `w·x + b` for SVM, leaf/vote fractions for DT/RF/KNN.
pub fn decision_value(model: &TrainedModel, x: &[f64]) -> Result<f64> {
    if let Some(p) = model.expected_inputs() {
        if x.len() != p {
            return Err(Error::usage(format!(
                "feature vector has {} entries, model expects {p}",
                x.len()
            )));
        }
    }
    Ok(match model {
        TrainedModel::Lr(m) => linear::sigmoid(m.margin(x)),
        TrainedModel::Svm(m) => m.margin(x),
        TrainedModel::Nn1(m) => m.prob(x),
        TrainedModel::Nb(m) => m.posterior(x),
        TrainedModel::Dt(m) => m.leaf_value(x),
        TrainedModel::Rf(m) => m.vote_fraction(x),
        TrainedModel::Knn(m) => m.vote_fraction(x),
    })
}

/// Hard label: probability/fraction families threshold at 0.5, SVM takes
/// the margin sign. Exact ties resolve to class 0.
pub fn predict(model: &TrainedModel, x: &[f64]) -> Result<u8> {
    let v = decision_value(model, x)?;
    let positive = match model {
        TrainedModel::Svm(_) => v > 0.0,
        _ => v > 0.5,
    };
    Ok(positive as u8)
}

/// Fraction of correctly classified rows.
pub fn evaluate(model: &TrainedModel, test: &TabularDataset) -> Result<f64> {
    if test.n_rows() == 0 {
        return Err(Error::usage("cannot evaluate on an empty test set"));
    }
    let mut hits = 0usize;
    for (row, &label) in test.rows.iter().zip(&test.labels) {
        if predict(model, row)? == label {
            hits += 1;
        }
    }
    Ok(hits as f64 / test.n_rows() as f64)
}

/// The SGD objective for a differentiable family over `train`.
pub fn objective_for(
    family: Family,
    train: &TabularDataset,
    hp: &Hyperparams,
) -> Result<Box<dyn Objective>> {
    match family {
        Family::Lr => Ok(Box::new(LrObjective::new(train))),
        Family::Svm => Ok(Box::new(SvmObjective::new(train, hp.c))),
        Family::Nn1 => Ok(Box::new(MlpObjective::new(train, hp.hidden_units))),
        other => Err(Error::usage(format!(
            "family {other} has no gradient; only LR, NN1 and SVM can take local SGD steps"
        ))),
    }
}

/// Train one model. Deterministic in `(hp, train, seed)`.
pub fn train_model(hp: &Hyperparams, train: &TabularDataset, seed: u64) -> Result<TrainedModel> {
    if train.n_rows() == 0 {
        return Err(Error::usage("cannot train on an empty dataset"));
    }
    let model = match hp.family {
        Family::Lr | Family::Svm | Family::Nn1 => {
            let obj = objective_for(hp.family, train, hp)?;
            let theta = sgd::run_epochs(
                obj.as_ref(),
                obj.init(seed),
                hp.learning_rate,
                hp.batch_size,
                hp.epochs,
                seed,
            );
            if theta.iter().any(|v| !v.is_finite()) {
                return Err(Error::numeric(format!(
                    "{} parameters diverged (non-finite) at lr={}",
                    hp.family, hp.learning_rate
                )));
            }
            obj.model(&theta)
        }
        Family::Nb => TrainedModel::Nb(bayes::fit(train, hp.alpha)),
        Family::Dt => TrainedModel::Dt(tree::fit(train, hp.max_depth)),
        Family::Rf => TrainedModel::Rf(tree::fit_forest(
            train,
            hp.n_estimators,
            hp.max_depth,
            seed,
        )),
        Family::Knn => TrainedModel::Knn(knn::fit(train, hp.k)),
    };
    Ok(model)
}

/// One full train/test cycle on the pooled dataset: seeded 66/34 split,
/// per-family standardisation, training, test accuracy.
pub fn centralized_accuracy(hp: &Hyperparams, ds: &TabularDataset, seed: u64) -> Result<f64> {
    let (train, test) = split_train_test(ds, seed, 0.66)?;
    let (train, test) = if hp.family.standardized() {
        let (a, b, _) = standardize(&train, &test)?;
        (a, b)
    } else {
        (train, test)
    };
    let model = train_model(hp, &train, seed)?;
    evaluate(&model, &test)
}

/// Mean test accuracy of `hp` over `seeds` (full pipeline per seed).
pub fn mean_accuracy(hp: &Hyperparams, ds: &TabularDataset, seeds: &[u64]) -> Result<f64> {
    if seeds.is_empty() {
        return Err(Error::usage("seed list must not be empty"));
    }
    let mut total = 0.0;
    for &seed in seeds {
        total += centralized_accuracy(hp, ds, seed)?;
    }
    Ok(total / seeds.len() as f64)
}

/// Exhaustive search over `grid`: every point is scored by mean accuracy
/// over `seeds`; the argmax wins, ties keeping the earliest grid entry.
pub fn grid_search(
    family: Family,
    grid: &[Hyperparams],
    seeds: &[u64],
    ds: &TabularDataset,
) -> Result<(Hyperparams, f64)> {
    if grid.is_empty() {
        return Err(Error::usage("hyperparameter grid must not be empty"));
    }
    if let Some(bad) = grid.iter().find(|hp| hp.family != family) {
        return Err(Error::usage(format!(
            "grid entry for {} inside a {} search",
            bad.family, family
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, hp) in grid.iter().enumerate() {
        let acc = mean_accuracy(hp, ds, seeds)?;
        if best.map_or(true, |(_, b)| acc > b) {
            best = Some((i, acc));
        }
    }
    let (i, acc) = best.unwrap();
    Ok((grid[i].clone(), acc))
}

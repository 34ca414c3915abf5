//! CART-style decision tree (Gini impurity, midpoint thresholds) and a
//! bagged random forest with per-split √p feature subsampling.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::dataset::TabularDataset;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Fraction of class-1 rows at the leaf.
        p1: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Class-1 fraction of the leaf that `x` falls into.
    pub fn leaf_value(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { p1 } => return *p1,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        if self.leaf_value(x) > 0.5 {
            1
        } else {
            0
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn gini(n0: f64, n1: f64) -> f64 {
    let n = n0 + n1;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (n0 / n, n1 / n);
    1.0 - p0 * p0 - p1 * p1
}

/// Best (cost, feature, threshold) over `features`, or None when every
/// candidate feature is constant on `idx`. Features must be given in
/// ascending order: ties on cost keep the first (lowest feature index,
/// then lowest threshold).
fn best_split(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    features: &[usize],
) -> Option<(f64, usize, f64)> {
    let n = idx.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    let total1 = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    let total0 = n - total1;
    for &j in features {
        let mut sorted: Vec<usize> = idx.to_vec();
        sorted.sort_by(|&a, &b| x[a][j].partial_cmp(&x[b][j]).unwrap());
        let (mut l0, mut l1) = (0.0, 0.0);
        for w in 0..sorted.len() - 1 {
            let i = sorted[w];
            if y[i] == 1 {
                l1 += 1.0;
            } else {
                l0 += 1.0;
            }
            let (va, vb) = (x[i][j], x[sorted[w + 1]][j]);
            if va == vb {
                continue; // not a boundary between distinct values
            }
            let threshold = va + (vb - va) / 2.0;
            let nl = l0 + l1;
            let cost = (nl * gini(l0, l1) + (n - nl) * gini(total0 - l0, total1 - l1)) / n;
            if best.map_or(true, |(c, _, _)| cost < c) {
                best = Some((cost, j, threshold));
            }
        }
    }
    best
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    max_depth: Option<usize>,
    /// Per-split feature subsampling for forests: (rng, how many features).
    subsample: Option<(ChaCha20Rng, usize)>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, idx: &[usize], depth: usize) -> usize {
        let n1 = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let p1 = n1 as f64 / idx.len() as f64;
        let pure = n1 == 0 || n1 == idx.len();
        let capped = self.max_depth.map_or(false, |d| depth >= d);
        if pure || capped {
            self.nodes.push(Node::Leaf { p1 });
            return self.nodes.len() - 1;
        }

        let p = self.x[0].len();
        let features: Vec<usize> = match &mut self.subsample {
            Some((rng, mtry)) => {
                let mut sample = index::sample(rng, p, (*mtry).min(p)).into_vec();
                sample.sort_unstable(); // ascending for deterministic tie-breaks
                sample
            }
            None => (0..p).collect(),
        };

        match best_split(self.x, self.y, idx, &features) {
            None => {
                self.nodes.push(Node::Leaf { p1 });
                self.nodes.len() - 1
            }
            Some((_, feature, threshold)) => {
                let (lidx, ridx): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
                let at = self.nodes.len();
                self.nodes.push(Node::Leaf { p1: 0.0 }); // placeholder
                let left = self.grow(&lidx, depth + 1);
                let right = self.grow(&ridx, depth + 1);
                self.nodes[at] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                at
            }
        }
    }
}

/// Fit a single tree on the full training set.
pub fn fit(train: &TabularDataset, max_depth: Option<usize>) -> Tree {
    let idx: Vec<usize> = (0..train.n_rows()).collect();
    let mut b = Builder {
        x: &train.rows,
        y: &train.labels,
        max_depth,
        subsample: None,
        nodes: Vec::new(),
    };
    b.grow(&idx, 0);
    Tree { nodes: b.nodes }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub tree_seeds: Vec<u64>,
}

/// Bagged forest: each tree sees a seeded bootstrap sample and considers
/// max(1, ⌊√p⌋) features per split. Tree t draws from seed `mix(seed, t)`.
pub fn fit_forest(
    train: &TabularDataset,
    n_estimators: usize,
    max_depth: Option<usize>,
    seed: u64,
) -> Forest {
    let n = train.n_rows();
    let p = train.n_features();
    let mtry = ((p as f64).sqrt().floor() as usize).max(1);
    let mut trees = Vec::with_capacity(n_estimators);
    let mut tree_seeds = Vec::with_capacity(n_estimators);
    for t in 0..n_estimators {
        let tree_seed = rng::mix(seed, t as u64);
        tree_seeds.push(tree_seed);
        let mut rng = rng::chacha(tree_seed);
        let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut b = Builder {
            x: &train.rows,
            y: &train.labels,
            max_depth,
            subsample: Some((rng, mtry)),
            nodes: Vec::new(),
        };
        b.grow(&bootstrap, 0);
        trees.push(Tree { nodes: b.nodes });
    }
    Forest { trees, tree_seeds }
}

impl Forest {
    /// Fraction of trees voting class 1.
    pub fn vote_fraction(&self, x: &[f64]) -> f64 {
        let votes: usize = self.trees.iter().map(|t| t.predict(x) as usize).sum();
        votes as f64 / self.trees.len() as f64
    }

    /// Majority vote; exact ties go to class 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        if self.vote_fraction(x) > 0.5 {
            1
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{preprocess, Center, FeatureSchema, RawRecord};

    fn dataset(rows: &[(f64, f64, f64)]) -> TabularDataset {
        let schema = FeatureSchema::uci();
        let names: Vec<&str> = vec!["age", "oldpeak"];
        let recs: Vec<RawRecord> = rows
            .iter()
            .map(|&(a, b, y)| {
                let mut values = vec![Some(a), Some(b)];
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
    fn tree_splits_at_midpoint_of_distinct_values() {
        let ds = dataset(&[(1.0, 0.0, 0.0), (3.0, 0.0, 1.0)]);
        let tree = fit(&ds, None);
        match &tree.nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 2.0);
            }
            other => panic!("expected a split, got {other:?}"),
        }
        assert_eq!(tree.predict(&[1.5, 0.0]), 0);
        assert_eq!(tree.predict(&[2.5, 0.0]), 1);
    }

    #[test]
    fn tree_tie_breaks_prefer_lower_feature_index() {
        // Both features separate the data perfectly with equal Gini cost.
        let ds = dataset(&[(0.0, 0.0, 0.0), (1.0, 1.0, 1.0)]);
        let tree = fit(&ds, None);
        match &tree.nodes[0] {
            Node::Split { feature, .. } => assert_eq!(*feature, 0),
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn tree_respects_max_depth() {
        let rows: Vec<(f64, f64, f64)> = (0..64)
            .map(|i| (i as f64, (i * 7 % 13) as f64, ((i / 2) % 2) as f64))
            .collect();
        let ds = dataset(&rows);
        for cap in [0, 1, 2, 3] {
            let tree = fit(&ds, Some(cap));
            assert!(tree.depth() <= cap, "depth {} over cap {cap}", tree.depth());
        }
    }

    #[test]
    fn unbounded_tree_leaves_are_pure_or_unsplittable() {
        let rows: Vec<(f64, f64, f64)> = (0..40)
            .map(|i| ((i % 10) as f64, (i % 4) as f64, ((i * 3 + i / 11) % 2) as f64))
            .collect();
        let ds = dataset(&rows);
        let tree = fit(&ds, None);
        // Every training row must land in a leaf consistent with purity or
        // with duplicate feature vectors of both classes.
        for (row, &label) in ds.rows.iter().zip(&ds.labels) {
            let p1 = tree.leaf_value(row);
            if p1 == 0.0 || p1 == 1.0 {
                assert_eq!(p1 as u8, label);
            } else {
                // impure leaf: must stem from identical rows with mixed labels
                let same: Vec<&u8> = ds
                    .rows
                    .iter()
                    .zip(&ds.labels)
                    .filter(|(r, _)| *r == row)
                    .map(|(_, l)| l)
                    .collect();
                assert!(same.iter().any(|&&l| l == 0) && same.iter().any(|&&l| l == 1));
            }
        }
    }

    #[test]
    fn tree_tie_on_probability_predicts_zero() {
        // Two identical rows with opposite labels: leaf p1 = 0.5 → class 0.
        let ds = dataset(&[(1.0, 1.0, 0.0), (1.0, 1.0, 1.0)]);
        let tree = fit(&ds, None);
        assert_eq!(tree.predict(&[1.0, 1.0]), 0);
    }

    #[test]
    fn forest_of_identical_trees_equals_single_tree() {
        // With max_depth 0 every tree is the bootstrap-majority leaf; on a
        // one-sided dataset all trees agree.
        let rows: Vec<(f64, f64, f64)> = (0..30).map(|i| (i as f64, 0.0, 1.0)).collect();
        let ds = dataset(&rows);
        let forest = fit_forest(&ds, 25, Some(0), 7);
        assert_eq!(forest.vote_fraction(&[3.0, 0.0]), 1.0);
        assert_eq!(forest.predict(&[3.0, 0.0]), 1);
    }

    #[test]
    fn forest_is_deterministic_in_seed() {
        let rows: Vec<(f64, f64, f64)> = (0..50)
            .map(|i| (i as f64, (i % 7) as f64, ((i / 3) % 2) as f64))
            .collect();
        let ds = dataset(&rows);
        let a = fit_forest(&ds, 20, Some(4), 9);
        let b = fit_forest(&ds, 20, Some(4), 9);
        let c = fit_forest(&ds, 20, Some(4), 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.tree_seeds[0], crate::rng::mix(9, 0));
    }

    #[test]
    fn forest_majority_tie_goes_to_class_zero() {
        let forest = Forest {
            trees: vec![
                Tree { nodes: vec![Node::Leaf { p1: 1.0 }] },
                Tree { nodes: vec![Node::Leaf { p1: 0.0 }] },
            ],
            tree_seeds: vec![0, 1],
        };
        assert_eq!(forest.vote_fraction(&[0.0]), 0.5);
        assert_eq!(forest.predict(&[0.0]), 0);
    }
}

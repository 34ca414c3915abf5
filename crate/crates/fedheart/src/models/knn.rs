//! k-nearest-neighbour classifier: Euclidean distance on the (standardized)
//! training rows, neighbour ties at identical distance broken by lower row
//! index.

use crate::dataset::TabularDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<u8>,
    pub k: usize,
}

pub fn fit(train: &TabularDataset, k: usize) -> Knn {
    Knn {
        x: train.rows.clone(),
        y: train.labels.clone(),
        k: k.max(1),
    }
}

impl Knn {
    /// Fraction of the k nearest training rows with label 1.
    pub fn vote_fraction(&self, q: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        // Sorting by (distance, index) realises the lower-index tie rule.
        dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = self.k.min(dist.len());
        let ones = dist[..k].iter().filter(|&&(_, i)| self.y[i] == 1).count();
        ones as f64 / k as f64
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
                let mut values = vec![Some(0.0); 13];
                values[0] = Some(a); // age
                values[9] = Some(b); // oldpeak
                values.push(Some(y));
                RawRecord {
                    values,
                    center: Center::Va,
                }
            })
            .collect();
        preprocess(&recs, &schema, &names).unwrap()
    }

    #[test]
    fn k1_memorises_distinct_training_points() {
        let ds = dataset(&[(0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (0.0, 1.0, 1.0)]);
        let knn = fit(&ds, 1);
        for (row, &label) in ds.rows.iter().zip(&ds.labels) {
            let frac = knn.vote_fraction(row);
            assert_eq!(if frac > 0.5 { 1 } else { 0 }, label);
        }
    }

    #[test]
    fn equal_distances_prefer_lower_row_index() {
        // Rows 0 and 1 are equidistant from the query; k=1 must take row 0.
        let ds = dataset(&[(1.0, 0.0, 1.0), (-1.0, 0.0, 0.0)]);
        let knn = fit(&ds, 1);
        assert_eq!(knn.vote_fraction(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn k_larger_than_training_set_uses_all_rows() {
        let ds = dataset(&[(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]);
        let knn = fit(&ds, 10);
        assert_eq!(knn.vote_fraction(&[0.4, 0.0]), 0.5);
    }
}

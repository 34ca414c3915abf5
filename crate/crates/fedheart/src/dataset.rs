//! Ingestion and preprocessing of the four-hospital UCI heart-disease files.
//!
//! The raw `processed.*.data` files are comma-separated text with 14 fields
//! per line (13 input features + the `num` label) and `?` marking missing
//! values. Preprocessing drops any row with a missing value among the
//! selected features or the label and binarises the label (`1`–`4` → `1`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Guard below which a feature is treated as constant during standardisation.
pub const STD_EPSILON: f64 = 1e-12;

/// The four collecting hospitals, in the fixed client order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Center {
    Cleveland,
    Hungary,
    Switzerland,
    Va,
}

impl Center {
    pub const ALL: [Center; 4] = [
        Center::Cleveland,
        Center::Hungary,
        Center::Switzerland,
        Center::Va,
    ];

    /// Canonical file name of this center's raw data file.
    pub fn file_name(self) -> &'static str {
        match self {
            Center::Cleveland => "processed.cleveland.data",
            Center::Hungary => "processed.hungarian.data",
            Center::Switzerland => "processed.switzerland.data",
            Center::Va => "processed.va.data",
        }
    }

    pub fn parse(s: &str) -> Result<Center> {
        match s.to_ascii_lowercase().as_str() {
            "cleveland" => Ok(Center::Cleveland),
            "hungary" | "hungarian" => Ok(Center::Hungary),
            "switzerland" | "swiss" => Ok(Center::Switzerland),
            "va" | "va-long-beach" => Ok(Center::Va),
            other => Err(Error::usage(format!("unknown center '{other}'"))),
        }
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Center::Cleveland => "cleveland",
            Center::Hungary => "hungary",
            Center::Switzerland => "switzerland",
            Center::Va => "va",
        };
        f.write_str(name)
    }
}

/// Statistical kind of a feature; decides how Naive Bayes models it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Continuous,
    Categorical,
    Binary,
}

/// Ordered feature names and kinds; the label column (`num`) is implicit
/// and always last in the raw files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    features: Vec<(String, Kind)>,
}

/// Name/kind table of the 13 standard input features, in file column order.
pub const UCI_FEATURES: [(&str, Kind); 13] = [
    ("age", Kind::Continuous),
    ("sex", Kind::Binary),
    ("cp", Kind::Categorical),
    ("trestbps", Kind::Continuous),
    ("chol", Kind::Continuous),
    ("fbs", Kind::Binary),
    ("restecg", Kind::Categorical),
    ("thalach", Kind::Continuous),
    ("exang", Kind::Binary),
    ("oldpeak", Kind::Continuous),
    ("slope", Kind::Categorical),
    ("ca", Kind::Categorical),
    ("thal", Kind::Categorical),
];

/// Number of fields per well-formed raw line (13 features + label).
pub const RAW_FIELDS: usize = 14;

/// Name of the label column.
pub const TARGET: &str = "num";

impl FeatureSchema {
    /// The standard 13-feature schema.
    pub fn uci() -> Self {
        FeatureSchema {
            features: UCI_FEATURES
                .iter()
                .map(|&(n, k)| (n.to_string(), k))
                .collect(),
        }
    }

    /// The ten features retained by the interpretability experiments
    /// (everything except `slope`, `ca`, `thal`).
    pub fn table4_names() -> Vec<&'static str> {
        UCI_FEATURES
            .iter()
            .map(|&(n, _)| n)
            .filter(|n| !matches!(*n, "slope" | "ca" | "thal"))
            .collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.features.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn kinds(&self) -> Vec<Kind> {
        self.features.iter().map(|&(_, k)| k).collect()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Index of `name` within this schema.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|(n, _)| n == name)
    }

    /// Restriction of the schema to `names`, preserving schema order.
    fn restrict(&self, names: &[&str]) -> Result<(FeatureSchema, Vec<usize>)> {
        if names.is_empty() {
            return Err(Error::usage("feature subset must not be empty"));
        }
        for n in names {
            if self.index_of(n).is_none() {
                return Err(Error::usage(format!("unknown feature '{n}'")));
            }
        }
        let mut features = Vec::new();
        let mut indices = Vec::new();
        for (i, (n, k)) in self.features.iter().enumerate() {
            if names.contains(&n.as_str()) {
                features.push((n.clone(), *k));
                indices.push(i);
            }
        }
        Ok((FeatureSchema { features }, indices))
    }
}

/// One raw line: 14 optional numeric fields plus the center it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub values: Vec<Option<f64>>,
    pub center: Center,
}

/// Fully preprocessed data: dense features, binary labels, center tags.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub centers: Vec<Center>,
    pub schema: FeatureSchema,
}

impl TabularDataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    /// New dataset holding the rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> TabularDataset {
        TabularDataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            centers: indices.iter().map(|&i| self.centers[i]).collect(),
            schema: self.schema.clone(),
        }
    }

    /// Fraction of rows with label 1.
    pub fn prevalence(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().map(|&l| l as usize).sum::<usize>() as f64 / self.labels.len() as f64
    }

    /// True when every label is identical (e.g. Switzerland after dropping).
    pub fn single_class(&self) -> bool {
        self.labels.windows(2).all(|w| w[0] == w[1])
    }
}

/// Per-feature mean/standard deviation derived from a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationStats {
    fn from_train(train: &TabularDataset) -> StandardizationStats {
        let p = train.n_features();
        let n = train.n_rows() as f64;
        let mut mean = vec![0.0; p];
        for row in &train.rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; p];
        for row in &train.rows {
            for j in 0..p {
                let d = row[j] - mean[j];
                var[j] += d * d;
            }
        }
        let std = var.iter().map(|v| (v / n).sqrt()).collect();
        StandardizationStats { mean, std }
    }

    /// z-score a single row in place; constant features map to 0.
    pub fn apply_row(&self, row: &mut [f64]) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if self.std[j] < STD_EPSILON {
                0.0
            } else {
                (*v - self.mean[j]) / self.std[j]
            };
        }
    }

    fn apply(&self, ds: &TabularDataset) -> TabularDataset {
        let mut out = ds.clone();
        for row in &mut out.rows {
            self.apply_row(row);
        }
        out
    }
}

/// Parse one raw center file. `?` and blank fields become missing markers;
/// anything else must be numeric. Errors carry the 1-based line number.
pub fn parse_uci_file(text: &str, center: Center) -> Result<Vec<RawRecord>> {
    let file = center.file_name();
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != RAW_FIELDS {
            return Err(Error::Parse {
                file: file.to_string(),
                line: idx + 1,
                msg: format!("expected {RAW_FIELDS} fields, found {}", fields.len()),
            });
        }
        let mut values = Vec::with_capacity(RAW_FIELDS);
        for f in fields {
            if f == "?" || f.is_empty() {
                values.push(None);
            } else {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    file: file.to_string(),
                    line: idx + 1,
                    msg: format!("unparsable numeric field '{f}'"),
                })?;
                values.push(Some(v));
            }
        }
        records.push(RawRecord { values, center });
    }
    Ok(records)
}

/// Read and parse all four center files from `dir`.
pub fn load_dir(dir: &Path) -> Result<Vec<RawRecord>> {
    let mut records = Vec::new();
    for center in Center::ALL {
        let path = dir.join(center.file_name());
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        records.extend(parse_uci_file(&text, center)?);
    }
    Ok(records)
}

/// Drop rows with missing values among `subset` features or the label and
/// binarise the label. `subset` is a list of feature names from `schema`.
pub fn preprocess(
    records: &[RawRecord],
    schema: &FeatureSchema,
    subset: &[&str],
) -> Result<TabularDataset> {
    let (sub_schema, indices) = schema.restrict(subset)?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut centers = Vec::new();
    for rec in records {
        let label = match rec.values.last().copied().flatten() {
            Some(v) => v,
            None => continue, // missing label drops the row
        };
        let feats: Option<Vec<f64>> = indices.iter().map(|&i| rec.values[i]).collect();
        if let Some(feats) = feats {
            rows.push(feats);
            labels.push(if label > 0.0 { 1 } else { 0 });
            centers.push(rec.center);
        }
    }
    Ok(TabularDataset {
        rows,
        labels,
        centers,
        schema: sub_schema,
    })
}

/// Seeded uniform shuffle followed by a prefix split with
/// `floor(N * train_frac)` training rows.
pub fn split_train_test(
    ds: &TabularDataset,
    seed: u64,
    train_frac: f64,
) -> Result<(TabularDataset, TabularDataset)> {
    let n = ds.n_rows();
    if n < 2 {
        return Err(Error::usage(format!("cannot split {n} row(s)")));
    }
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::usage(format!(
            "train fraction {train_frac} outside (0, 1)"
        )));
    }
    let n_train = (n as f64 * train_frac).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::usage(format!(
            "degenerate split: {n_train} train rows of {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    Ok((ds.select(&order[..n_train]), ds.select(&order[n_train..])))
}

/// z-score both sets using train-derived statistics. Features with
/// train standard deviation below [`STD_EPSILON`] map to all zeros.
pub fn standardize(
    train: &TabularDataset,
    test: &TabularDataset,
) -> Result<(TabularDataset, TabularDataset, StandardizationStats)> {
    if train.n_rows() == 0 {
        return Err(Error::usage("cannot standardize an empty training set"));
    }
    if train.schema != test.schema {
        return Err(Error::usage("train/test schema mismatch"));
    }
    let stats = StandardizationStats::from_train(train);
    Ok((stats.apply(train), stats.apply(test), stats))
}

/// Split a dataset into the four per-center datasets (possibly empty),
/// preserving row order within each center.
pub fn partition_by_center(ds: &TabularDataset) -> BTreeMap<Center, TabularDataset> {
    let mut map = BTreeMap::new();
    for center in Center::ALL {
        let idx: Vec<usize> = (0..ds.n_rows())
            .filter(|&i| ds.centers[i] == center)
            .collect();
        map.insert(center, ds.select(&idx));
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(values: Vec<Option<f64>>, center: Center) -> RawRecord {
        RawRecord { values, center }
    }

    /// A complete record with the given label; features are index+1.
    fn full_record(label: f64, center: Center) -> RawRecord {
        let mut values: Vec<Option<f64>> = (1..=13).map(|v| Some(v as f64)).collect();
        values.push(Some(label));
        record(values, center)
    }

    #[test]
    fn parse_reads_well_formed_lines() {
        let text = "63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n\
                    28,1,2,130,132,0,2,185,0,0,?,?,?,0\n";
        let recs = parse_uci_file(text, Center::Cleveland).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].values[0], Some(63.0));
        assert_eq!(recs[0].values[13], Some(0.0));
        assert_eq!(recs[1].values[10], None);
        assert!(recs.iter().all(|r| r.center == Center::Cleveland));
    }

    #[test]
    fn parse_empty_input_gives_empty_list() {
        assert!(parse_uci_file("", Center::Va).unwrap().is_empty());
        assert!(parse_uci_file("\n\n", Center::Va).unwrap().is_empty());
    }

    #[test]
    fn parse_rejects_wrong_field_count_with_line_number() {
        let text = "1,2,3\n";
        let err = parse_uci_file(text, Center::Hungary).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_unparsable_numeric() {
        let text = "63,1,1,145,233,1,2,150,0,2.3,3,0,abc,0\n";
        let err = parse_uci_file(text, Center::Cleveland).unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 1);
                assert!(msg.contains("abc"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_treats_blank_fields_as_missing() {
        let text = "63,1,1,145,233,1,2,150,0,2.3,3,,6,0\n";
        let recs = parse_uci_file(text, Center::Cleveland).unwrap();
        assert_eq!(recs[0].values[11], None);
    }

    #[test]
    fn preprocess_binarises_labels() {
        let schema = FeatureSchema::uci();
        let recs = vec![
            full_record(0.0, Center::Cleveland),
            full_record(1.0, Center::Cleveland),
            full_record(3.0, Center::Hungary),
            full_record(4.0, Center::Va),
        ];
        let ds = preprocess(&recs, &schema, &schema.names()).unwrap();
        assert_eq!(ds.labels, vec![0, 1, 1, 1]);
    }

    #[test]
    fn preprocess_drops_rows_with_missing_selected_features() {
        let schema = FeatureSchema::uci();
        let mut with_hole = full_record(1.0, Center::Cleveland);
        with_hole.values[4] = None; // chol missing
        let recs = vec![with_hole.clone(), full_record(0.0, Center::Cleveland)];

        let full = preprocess(&recs, &schema, &schema.names()).unwrap();
        assert_eq!(full.n_rows(), 1);

        // chol excluded from the subset: the holed row survives.
        let subset: Vec<&str> = schema
            .names()
            .into_iter()
            .filter(|n| *n != "chol")
            .collect();
        let partial = preprocess(&recs, &schema, &subset).unwrap();
        assert_eq!(partial.n_rows(), 2);
        assert_eq!(partial.n_features(), 12);
    }

    #[test]
    fn preprocess_drops_rows_with_missing_label() {
        let schema = FeatureSchema::uci();
        let mut rec = full_record(1.0, Center::Cleveland);
        rec.values[13] = None;
        let ds = preprocess(&[rec], &schema, &schema.names()).unwrap();
        assert_eq!(ds.n_rows(), 0);
    }

    #[test]
    fn preprocess_keeps_complete_rows_unchanged() {
        let schema = FeatureSchema::uci();
        let recs = vec![full_record(2.0, Center::Switzerland)];
        let ds = preprocess(&recs, &schema, &schema.names()).unwrap();
        assert_eq!(ds.rows[0], (1..=13).map(|v| v as f64).collect::<Vec<_>>());
        assert_eq!(ds.centers[0], Center::Switzerland);
    }

    #[test]
    fn preprocess_rejects_empty_subset() {
        let schema = FeatureSchema::uci();
        let err = preprocess(&[], &schema, &[]).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn preprocess_is_idempotent_at_record_level() {
        // After one pass nothing is missing, so a second filter pass with the
        // same subset keeps every row.
        let schema = FeatureSchema::uci();
        let mut recs = Vec::new();
        for i in 0..20 {
            let mut r = full_record((i % 5) as f64, Center::Hungary);
            if i % 3 == 0 {
                r.values[i % 13] = None;
            }
            recs.push(r);
        }
        let once = preprocess(&recs, &schema, &schema.names()).unwrap();
        let again: Vec<RawRecord> = once
            .rows
            .iter()
            .zip(&once.labels)
            .map(|(row, &l)| {
                let mut values: Vec<Option<f64>> = row.iter().map(|&v| Some(v)).collect();
                values.push(Some(l as f64));
                record(values, Center::Hungary)
            })
            .collect();
        let twice = preprocess(&again, &schema, &schema.names()).unwrap();
        assert_eq!(once.rows, twice.rows);
        assert_eq!(once.labels, twice.labels);
    }

    #[test]
    fn preprocess_conserves_rows() {
        let schema = FeatureSchema::uci();
        let mut recs = Vec::new();
        for i in 0..50 {
            let mut r = full_record((i % 2) as f64, Center::Va);
            if i % 7 == 0 {
                r.values[3] = None;
            }
            recs.push(r);
        }
        let kept = preprocess(&recs, &schema, &schema.names()).unwrap();
        let dropped = recs.len() - kept.n_rows();
        assert_eq!(kept.n_rows() + dropped, 50);
        assert_eq!(dropped, 8); // i = 0, 7, ..., 49
    }

    fn toy_dataset(n: usize) -> TabularDataset {
        let schema = FeatureSchema::uci();
        let names = schema.names();
        let recs: Vec<RawRecord> = (0..n)
            .map(|i| {
                let mut r = full_record((i % 2) as f64, Center::Cleveland);
                r.values[0] = Some(i as f64); // make rows distinguishable
                r
            })
            .collect();
        preprocess(&recs, &schema, &names).unwrap()
    }

    #[test]
    fn split_uses_floor_for_train_size() {
        let ds = toy_dataset(740);
        let (train, test) = split_train_test(&ds, 0, 0.66).unwrap();
        assert_eq!(train.n_rows(), 488); // floor(740 * 0.66)
        assert_eq!(test.n_rows(), 252);
    }

    #[test]
    fn split_is_deterministic_and_partitions_input() {
        let ds = toy_dataset(101);
        let (tr1, te1) = split_train_test(&ds, 42, 0.66).unwrap();
        let (tr2, te2) = split_train_test(&ds, 42, 0.66).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);

        let mut seen: Vec<f64> = tr1
            .rows
            .iter()
            .chain(te1.rows.iter())
            .map(|r| r[0])
            .collect();
        seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect: Vec<f64> = (0..101).map(|i| i as f64).collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn split_seed_changes_order() {
        let ds = toy_dataset(101);
        let (tr1, _) = split_train_test(&ds, 0, 0.66).unwrap();
        let (tr2, _) = split_train_test(&ds, 1, 0.66).unwrap();
        assert_ne!(tr1.rows, tr2.rows);
    }

    #[test]
    fn split_rejects_degenerate_fractions() {
        let ds = toy_dataset(10);
        assert!(split_train_test(&ds, 0, 0.01).is_err()); // floor(0.1) = 0 train rows
        assert!(split_train_test(&ds, 0, 0.0).is_err());
        assert!(split_train_test(&ds, 0, 1.0).is_err());
        assert!(split_train_test(&ds, 0, 1.2).is_err());
        let tiny = toy_dataset(1);
        assert!(split_train_test(&tiny, 0, 0.66).is_err());
        // The floor rule keeps the test side non-empty for any frac < 1.
        let (train, test) = split_train_test(&ds, 0, 0.999).unwrap();
        assert_eq!((train.n_rows(), test.n_rows()), (9, 1));
    }

    #[test]
    fn standardize_zero_means_unit_stds_on_train() {
        let ds = toy_dataset(50);
        let (train, test) = split_train_test(&ds, 3, 0.66).unwrap();
        let (strain, stest, stats) = standardize(&train, &test).unwrap();
        let n = strain.n_rows() as f64;
        // age varies; verify its transformed first/second moments.
        let mean: f64 = strain.rows.iter().map(|r| r[0]).sum::<f64>() / n;
        let var: f64 = strain.rows.iter().map(|r| r[0] * r[0]).sum::<f64>() / n - mean * mean;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);

        // test set transformed with train stats: mean generally nonzero.
        let tmean: f64 = stest.rows.iter().map(|r| r[0]).sum::<f64>() / stest.n_rows() as f64;
        assert!(tmean.abs() > 1e-12);
        assert_eq!(stats.mean.len(), ds.n_features());
    }

    #[test]
    fn standardize_maps_constant_columns_to_zero() {
        let ds = toy_dataset(20); // features 1..=12 are constant
        let (train, test) = split_train_test(&ds, 0, 0.5).unwrap();
        let (strain, stest, _) = standardize(&train, &test).unwrap();
        assert!(strain.rows.iter().all(|r| r[1] == 0.0));
        assert!(stest.rows.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn standardize_rejects_schema_mismatch() {
        let schema = FeatureSchema::uci();
        let ds = toy_dataset(10);
        let names: Vec<&str> = schema.names()[..5].to_vec();
        let recs = vec![full_record(0.0, Center::Cleveland); 4];
        let other = preprocess(&recs, &schema, &names).unwrap();
        assert!(standardize(&ds, &other).is_err());
    }

    #[test]
    fn partition_is_disjoint_and_total() {
        let schema = FeatureSchema::uci();
        let mut recs = Vec::new();
        for (count, center) in [(5, Center::Cleveland), (3, Center::Hungary), (2, Center::Va)] {
            for _ in 0..count {
                recs.push(full_record(1.0, center));
            }
        }
        let ds = preprocess(&recs, &schema, &schema.names()).unwrap();
        let parts = partition_by_center(&ds);
        assert_eq!(parts[&Center::Cleveland].n_rows(), 5);
        assert_eq!(parts[&Center::Hungary].n_rows(), 3);
        assert_eq!(parts[&Center::Switzerland].n_rows(), 0);
        assert_eq!(parts[&Center::Va].n_rows(), 2);
        let total: usize = parts.values().map(TabularDataset::n_rows).sum();
        assert_eq!(total, ds.n_rows());
    }

    #[test]
    fn single_class_and_prevalence_helpers() {
        let schema = FeatureSchema::uci();
        let recs = vec![
            full_record(1.0, Center::Switzerland),
            full_record(2.0, Center::Switzerland),
        ];
        let ds = preprocess(&recs, &schema, &schema.names()).unwrap();
        assert!(ds.single_class());
        assert_eq!(ds.prevalence(), 1.0);
    }

    #[test]
    fn table4_subset_has_ten_features() {
        let names = FeatureSchema::table4_names();
        assert_eq!(names.len(), 10);
        assert!(!names.contains(&"slope"));
        assert!(!names.contains(&"ca"));
        assert!(!names.contains(&"thal"));
        assert!(names.contains(&"oldpeak"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn split_always_partitions(n in 2usize..150, seed in 0u64..1000) {
                let ds = toy_dataset(n);
                if let Ok((train, test)) = split_train_test(&ds, seed, 0.66) {
                    prop_assert_eq!(train.n_rows() + test.n_rows(), n);
                    prop_assert_eq!(train.n_rows(), (n as f64 * 0.66).floor() as usize);
                }
            }

            #[test]
            fn labels_always_binary(labels in proptest::collection::vec(0.0f64..4.0, 1..40)) {
                let schema = FeatureSchema::uci();
                let recs: Vec<RawRecord> = labels
                    .iter()
                    .map(|&l| full_record(l.round(), Center::Hungary))
                    .collect();
                let ds = preprocess(&recs, &schema, &schema.names()).unwrap();
                prop_assert!(ds.labels.iter().all(|&l| l == 0 || l == 1));
            }
        }
    }
}

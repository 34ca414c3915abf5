//! Shapley-value feature attribution: exact enumeration over all 2^p
//! coalitions and the kernel-regression estimator, plus the two value
//! functions used to score coalitions against a trained model.
//!
//! Coalitions are `u32` bitmasks (bit i set ⇔ feature i present), which
//! caps exact enumeration at p ≤ 20 features.

use rayon::prelude::*;

use crate::dataset::TabularDataset;
use crate::error::{Error, Result};
use crate::models::{decision_value, predict, TrainedModel};
use crate::rng;
use rand::seq::index;
use rand::Rng;

/// Hard cap on exact enumeration: 2^20 coalition values.
pub const MAX_EXACT_FEATURES: usize = 20;

/// A cooperative game over feature subsets.
pub trait ValueFunction: Sync {
    /// Number of players (features).
    fn p(&self) -> usize;
    /// Worth of the coalition encoded by `mask`.
    fn value(&self, mask: u32) -> f64;
}

/// An explicit game given by its full value table, indexed by mask.
/// Mostly useful for tests and axiom checks.
#[derive(Debug, Clone)]
pub struct TableGame {
    pub p: usize,
    pub table: Vec<f64>,
}

impl TableGame {
    pub fn new(p: usize, table: Vec<f64>) -> TableGame {
        assert_eq!(table.len(), 1 << p, "table must cover all 2^p masks");
        TableGame { p, table }
    }
}

impl ValueFunction for TableGame {
    fn p(&self) -> usize {
        self.p
    }

    fn value(&self, mask: u32) -> f64 {
        self.table[mask as usize]
    }
}

/// Exact binomial coefficient; all inputs here stay far below u64 overflow.
fn binom(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// Guard shared by both estimators.
fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::usage("value function has no features"));
    }
    if p > MAX_EXACT_FEATURES {
        return Err(Error::usage(format!(
            "{p} features exceed the {MAX_EXACT_FEATURES}-feature enumeration cap"
        )));
    }
    Ok(())
}

/// Evaluate and cache the whole value table.
fn cache_values(vf: &dyn ValueFunction) -> Result<Vec<f64>> {
    let p = vf.p();
    let n_masks = 1usize << p;
    let mut table = vec![0.0; n_masks];
    for (mask, slot) in table.iter_mut().enumerate() {
        let v = vf.value(mask as u32);
        if !v.is_finite() {
            return Err(Error::numeric(format!(
                "value function returned {v} for coalition {mask:#b}"
            )));
        }
        *slot = v;
    }
    Ok(table)
}

/// Exact Shapley values by full subset enumeration:
/// φ_i = Σ_{S ∌ i} |S|!(p−|S|−1)!/p! · (v(S ∪ {i}) − v(S)).
/// The combinatorial weight is computed as 1/(p·C(p−1,|S|)), which is exact
/// in f64 for p ≤ 20.
pub fn exact_shapley(vf: &dyn ValueFunction) -> Result<Vec<f64>> {
    let p = vf.p();
    check_p(p)?;
    let table = cache_values(vf)?;
    let weights: Vec<f64> = (0..p)
        .map(|k| 1.0 / (p as f64 * binom(p - 1, k) as f64))
        .collect();
    let full = (1u32 << p) - 1;
    let mut phi = vec![0.0; p];
    for i in 0..p {
        let bit = 1u32 << i;
        let mut acc = 0.0;
        for mask in 0..=full {
            if mask & bit != 0 {
                continue;
            }
            let k = mask.count_ones() as usize;
            acc += weights[k] * (table[(mask | bit) as usize] - table[mask as usize]);
        }
        phi[i] = acc;
    }
    Ok(phi)
}

/// The Shapley kernel π(k) = (M−1) / (C(M,k) · k · (M−k)) for 1 ≤ k ≤ M−1.
/// The empty and full coalitions carry infinite weight and are enforced as
/// hard constraints by the regression instead.
pub fn kernel_weight(m: usize, k: usize) -> f64 {
    assert!(
        k >= 1 && k < m,
        "kernel weight is only defined for proper nonempty coalitions"
    );
    (m - 1) as f64 / (binom(m, k) as f64 * (k * (m - k)) as f64)
}

/// One regression row: coalition mask plus its least-squares weight.
struct KernelRow {
    mask: u32,
    weight: f64,
}

/// Kernel SHAP. With `nsamples ≥ 2^p − 2` every proper nonempty coalition
/// enters the regression once with its kernel weight, and the solution
/// equals the exact Shapley values. Otherwise `nsamples` coalitions are
/// drawn (seeded) with probability proportional to the kernel weights and
/// enter with unit weight.
///
/// The efficiency constraint Σφ = v(full) − v(∅) is enforced exactly by
/// eliminating the last feature's coefficient before solving.
pub fn kernel_shap(vf: &dyn ValueFunction, nsamples: usize, seed: u64) -> Result<Vec<f64>> {
    let p = vf.p();
    check_p(p)?;
    let full = (1u32 << p) - 1;
    let v_empty = vf.value(0);
    let v_full = vf.value(full);
    if !v_empty.is_finite() || !v_full.is_finite() {
        return Err(Error::numeric("value function is not finite at ∅ or full"));
    }
    let delta = v_full - v_empty;
    if p == 1 {
        return Ok(vec![delta]);
    }

    let n_proper = (1usize << p) - 2;
    let rows: Vec<KernelRow> = if nsamples >= n_proper {
        (1..full)
            .map(|mask| KernelRow {
                mask,
                weight: kernel_weight(p, mask.count_ones() as usize),
            })
            .collect()
    } else {
        sample_coalitions(p, nsamples, seed)
    };

    // Eliminate φ_{p−1} via the efficiency constraint: with
    // a_j = z_j − z_{p−1}, the model becomes
    // v(S) − v(∅) − Δ·z_{p−1} = Σ_{j<p−1} φ_j a_j.
    let d = p - 1;
    let last_bit = 1u32 << d;
    let mut g = vec![vec![0.0; d]; d];
    let mut r = vec![0.0; d];
    for row in &rows {
        let v = vf.value(row.mask);
        if !v.is_finite() {
            return Err(Error::numeric(format!(
                "value function returned {v} for coalition {:#b}",
                row.mask
            )));
        }
        let z_last = if row.mask & last_bit != 0 { 1.0 } else { 0.0 };
        let y = v - v_empty - delta * z_last;
        let a: Vec<f64> = (0..d)
            .map(|j| {
                let z_j = if row.mask & (1u32 << j) != 0 { 1.0 } else { 0.0 };
                z_j - z_last
            })
            .collect();
        for j in 0..d {
            if a[j] == 0.0 {
                continue;
            }
            r[j] += row.weight * a[j] * y;
            for l in 0..d {
                g[j][l] += row.weight * a[j] * a[l];
            }
        }
    }

    let reduced = solve_symmetric(&mut g, &mut r)?;
    let mut phi = reduced;
    let last = delta - phi.iter().sum::<f64>();
    phi.push(last);
    Ok(phi)
}

/// Draw coalition masks with probability proportional to the kernel weight.
/// A size k is picked ∝ C(p,k)·π(k) ∝ 1/(k(p−k)), then a uniform subset of
/// that size.
fn sample_coalitions(p: usize, nsamples: usize, seed: u64) -> Vec<KernelRow> {
    let mut rng = rng::chacha(rng::mix(seed, 0x5A9));
    let size_mass: Vec<f64> = (1..p).map(|k| 1.0 / (k * (p - k)) as f64).collect();
    let total: f64 = size_mass.iter().sum();
    let mut rows = Vec::with_capacity(nsamples);
    for _ in 0..nsamples {
        let mut u = rng.gen_range(0.0..total);
        let mut k = 1;
        for (i, m) in size_mass.iter().enumerate() {
            if u < *m {
                k = i + 1;
                break;
            }
            u -= m;
            k = i + 1;
        }
        let mut mask = 0u32;
        for idx in index::sample(&mut rng, p, k) {
            mask |= 1u32 << idx;
        }
        rows.push(KernelRow { mask, weight: 1.0 });
    }
    rows
}

/// Solve the symmetric normal system G·x = r by Gaussian elimination with
/// partial pivoting; a vanishing pivot means the sampled coalitions cannot
/// distinguish some feature and is reported as a numeric error.
fn solve_symmetric(g: &mut [Vec<f64>], r: &mut [f64]) -> Result<Vec<f64>> {
    let d = r.len();
    let scale = g
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    for col in 0..d {
        let (pivot_row, pivot_abs) = (col..d)
            .map(|i| (i, g[i][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_abs < 1e-12 * scale {
            return Err(Error::numeric(format!(
                "kernel regression is singular: feature {col} is not \
                 distinguishable from the sampled coalitions"
            )));
        }
        g.swap(col, pivot_row);
        r.swap(col, pivot_row);
        for i in (col + 1)..d {
            let f = g[i][col] / g[col][col];
            if f == 0.0 {
                continue;
            }
            for l in col..d {
                g[i][l] -= f * g[col][l];
            }
            r[i] -= f * r[col];
        }
    }
    let mut x = vec![0.0; d];
    for col in (0..d).rev() {
        let mut acc = r[col];
        for l in (col + 1)..d {
            acc -= g[col][l] * x[l];
        }
        x[col] = acc / g[col][col];
    }
    Ok(x)
}

/// Instance-level value function: the coalition keeps the instance's own
/// values, the remaining features are swapped in from each background row,
/// and the model's decision values are averaged over the background.
pub struct MarginalValue<'a> {
    model: &'a TrainedModel,
    instance: Vec<f64>,
    background: &'a [Vec<f64>],
}

impl<'a> MarginalValue<'a> {
    pub fn new(
        model: &'a TrainedModel,
        instance: Vec<f64>,
        background: &'a [Vec<f64>],
    ) -> Result<MarginalValue<'a>> {
        let p = instance.len();
        check_p(p)?;
        if let Some(want) = model.expected_inputs() {
            if want != p {
                return Err(Error::usage(format!(
                    "model expects {want} inputs, instance has {p}"
                )));
            }
        }
        if background.is_empty() {
            return Err(Error::usage("background set must not be empty"));
        }
        if let Some(row) = background.iter().find(|r| r.len() != p) {
            return Err(Error::usage(format!(
                "background row has {} values, expected {p}",
                row.len()
            )));
        }
        Ok(MarginalValue {
            model,
            instance,
            background,
        })
    }
}

impl ValueFunction for MarginalValue<'_> {
    fn p(&self) -> usize {
        self.instance.len()
    }

    fn value(&self, mask: u32) -> f64 {
        let p = self.instance.len();
        let mut hybrid = vec![0.0; p];
        let mut acc = 0.0;
        for row in self.background {
            for j in 0..p {
                hybrid[j] = if mask & (1u32 << j) != 0 {
                    self.instance[j]
                } else {
                    row[j]
                };
            }
            acc += decision_value(self.model, &hybrid)
                .expect("dimensions checked at construction");
        }
        acc / self.background.len() as f64
    }
}

/// Dataset-level value function: the coalition's worth is the model's
/// accuracy over an evaluation set in which every feature outside the
/// coalition is frozen at its background mean.
pub struct MaskedAccuracy<'a> {
    model: &'a TrainedModel,
    rows: &'a [Vec<f64>],
    labels: &'a [u8],
    means: Vec<f64>,
}

impl<'a> MaskedAccuracy<'a> {
    pub fn new(
        model: &'a TrainedModel,
        eval: &'a TabularDataset,
        background: &[Vec<f64>],
    ) -> Result<MaskedAccuracy<'a>> {
        let p = eval.n_features();
        check_p(p)?;
        if let Some(want) = model.expected_inputs() {
            if want != p {
                return Err(Error::usage(format!(
                    "model expects {want} inputs, evaluation set has {p}"
                )));
            }
        }
        if eval.n_rows() == 0 {
            return Err(Error::usage("evaluation set must not be empty"));
        }
        if background.is_empty() {
            return Err(Error::usage("background set must not be empty"));
        }
        let mut means = vec![0.0; p];
        for row in background {
            if row.len() != p {
                return Err(Error::usage("background row width mismatch"));
            }
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= background.len() as f64);
        Ok(MaskedAccuracy {
            model,
            rows: &eval.rows,
            labels: &eval.labels,
            means,
        })
    }
}

impl ValueFunction for MaskedAccuracy<'_> {
    fn p(&self) -> usize {
        self.means.len()
    }

    fn value(&self, mask: u32) -> f64 {
        let p = self.means.len();
        let mut masked = vec![0.0; p];
        let mut correct = 0usize;
        for (row, &label) in self.rows.iter().zip(self.labels) {
            for j in 0..p {
                masked[j] = if mask & (1u32 << j) != 0 {
                    row[j]
                } else {
                    self.means[j]
                };
            }
            let pred = predict(self.model, &masked)
                .expect("dimensions checked at construction");
            if pred == label {
                correct += 1;
            }
        }
        correct as f64 / self.rows.len() as f64
    }
}

/// Draw `b` distinct rows (all of them if the set is smaller) as the
/// background sample, in ascending row order for reproducibility.
pub fn background_sample(ds: &TabularDataset, b: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = ds.n_rows();
    if b >= n {
        return ds.rows.clone();
    }
    let mut rng = rng::chacha(rng::mix(seed, 0xBA5E));
    let mut idx = index::sample(&mut rng, n, b).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| ds.rows[i].clone()).collect()
}

/// Which estimator [`mean_abs_shap`] runs per instance.
#[derive(Debug, Clone, Copy)]
pub enum ShapMethod {
    Exact,
    Kernel { nsamples: usize, seed: u64 },
}

/// Per-feature attribution summary over a set of instances.
#[derive(Debug, Clone)]
pub struct ShapReport {
    pub names: Vec<String>,
    /// One φ vector per evaluated instance.
    pub phi: Vec<Vec<f64>>,
    /// Mean |φ_i| over instances, per feature.
    pub mean_abs: Vec<f64>,
    /// Feature indices sorted by descending mean |φ|; ties keep schema order.
    pub order: Vec<usize>,
    /// 1-based rank per feature (rank 1 = largest mean |φ|).
    pub ranks: Vec<usize>,
}

impl ShapReport {
    /// Names of the `k` highest-ranked features.
    pub fn top_names(&self, k: usize) -> Vec<&str> {
        self.order
            .iter()
            .take(k)
            .map(|&i| self.names[i].as_str())
            .collect()
    }

    /// 1-based rank of a feature by name.
    pub fn rank_of(&self, name: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.ranks[i])
    }
}

/// Shapley attributions with the instance-marginal value function for every
/// row of `instances`, summarized as mean absolute values and ranks.
pub fn mean_abs_shap(
    model: &TrainedModel,
    instances: &TabularDataset,
    background: &[Vec<f64>],
    method: ShapMethod,
) -> Result<ShapReport> {
    let p = instances.n_features();
    check_p(p)?;
    if instances.n_rows() == 0 {
        return Err(Error::usage("no instances to explain"));
    }
    let phi: Vec<Vec<f64>> = instances
        .rows
        .par_iter()
        .map(|row| -> Result<Vec<f64>> {
            let vf = MarginalValue::new(model, row.clone(), background)?;
            match method {
                ShapMethod::Exact => exact_shapley(&vf),
                ShapMethod::Kernel { nsamples, seed } => kernel_shap(&vf, nsamples, seed),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean_abs = vec![0.0; p];
    for row in &phi {
        for (m, v) in mean_abs.iter_mut().zip(row) {
            *m += v.abs();
        }
    }
    mean_abs.iter_mut().for_each(|m| *m /= phi.len() as f64);

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| mean_abs[b].total_cmp(&mean_abs[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; p];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }

    Ok(ShapReport {
        names: instances.schema.names().iter().map(|s| s.to_string()).collect(),
        phi,
        mean_abs,
        order,
        ranks,
    })
}

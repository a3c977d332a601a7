//! Classical reproduction studies: noisy-distance accuracy sweeps, dataset
//! generation and loading, the distance-gap study and the cost crossover.

use std::path::Path;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::classify::{theorem_bound, Bound, BoundParams};
use crate::oracle::{SparseVector, TrainingSet};
use crate::rng::{cell_stream, stream};
use crate::{Error, Result};

/// Dense labelled data, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Original label strings, indexed by label id.
    pub label_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.label_names.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rescales every feature to zero mean and unit variance (population
    /// variance). Constant features are only centered.
    pub fn standardize(&mut self) {
        let n = self.len() as f64;
        for f in 0..self.dim() {
            let mean = self.features.iter().map(|x| x[f]).sum::<f64>() / n;
            let var = self.features.iter().map(|x| (x[f] - mean).powi(2)).sum::<f64>() / n;
            let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
            for x in &mut self.features {
                x[f] = (x[f] - mean) / scale;
            }
        }
    }

    /// Training set over the given rows with a shared encoding: sparsity is
    /// the dimension and `r_max` the largest magnitude among the rows.
    pub fn to_training(&self, rows: &[usize]) -> Result<TrainingSet> {
        let r_max = self.max_magnitude(rows);
        let vectors = rows
            .iter()
            .map(|&i| self.vector_with(i, r_max))
            .collect::<Result<Vec<_>>>()?;
        TrainingSet::new(vectors, rows.iter().map(|&i| self.labels[i]).collect())
    }

    /// Row `i` as a vector encoded like [`Dataset::to_training`] would for
    /// `rows`, so that test and training vectors share sparsity and bound.
    pub fn vector(&self, i: usize, rows: &[usize]) -> Result<SparseVector> {
        self.vector_with(i, self.max_magnitude(rows))
    }

    fn max_magnitude(&self, rows: &[usize]) -> f64 {
        rows.iter()
            .flat_map(|&i| self.features[i].iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    fn vector_with(&self, i: usize, r_max: f64) -> Result<SparseVector> {
        let x = &self.features[i];
        let v = SparseVector::from_dense_real(x, 0.0)?.with_sparsity(x.len().max(1))?;
        let r = x.iter().fold(r_max, |m, v| m.max(v.abs()));
        if r > 0.0 {
            v.with_r_max(r)
        } else {
            Ok(v)
        }
    }
}

/// Two interleaved crescents in the plane, `m/2` points each, jittered by
/// isotropic Gaussian noise of scale `noise` and standardized. Angles are
/// drawn uniformly on `[0, π]`.
pub fn gen_halfmoon<R: Rng + ?Sized>(rng: &mut R, m: usize, noise: f64) -> Result<Dataset> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::domain(format!("half-moon size must be even and positive, got {m}")));
    }
    if !(noise >= 0.0) {
        return Err(Error::domain("noise scale must be nonnegative"));
    }
    let half = m / 2;
    let mut features = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for label in 0..2 {
        for _ in 0..half {
            let t = rng.random_range(0.0..std::f64::consts::PI);
            let (x, y) = if label == 0 {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), 0.5 - t.sin())
            };
            let jx: f64 = rng.sample(StandardNormal);
            let jy: f64 = rng.sample(StandardNormal);
            features.push(vec![x + noise * jx, y + noise * jy]);
            labels.push(label);
        }
    }
    let mut data = Dataset {
        features,
        labels,
        label_names: vec!["0".into(), "1".into()],
    };
    data.standardize();
    Ok(data)
}

/// Jitter scale at which the standardized crescents put about 14% of the
/// points closer to the other class's centroid.
pub const HALFMOON_NOISE: f64 = 0.05;

fn class_centroids(data: &Dataset, rows: &[usize]) -> Vec<Option<Vec<f64>>> {
    let k = data.label_names.len();
    let mut sums = vec![vec![0.0; data.dim()]; k];
    let mut counts = vec![0usize; k];
    for &i in rows {
        let l = data.labels[i];
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(&data.features[i]) {
            *s += x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s.into_iter().map(|x| x / c as f64).collect()))
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Fraction of points strictly closer to another class's centroid than to
/// their own.
pub fn opposite_centroid_fraction(data: &Dataset) -> f64 {
    let all: Vec<usize> = (0..data.len()).collect();
    let centroids = class_centroids(data, &all);
    let wrong = all
        .iter()
        .filter(|&&i| {
            let x = &data.features[i];
            let own = dist(x, centroids[data.labels[i]].as_ref().unwrap());
            centroids.iter().flatten().any(|c| dist(x, c) < own)
        })
        .count();
    wrong as f64 / data.len() as f64
}

/// Smallest distance between points of different classes.
pub fn interclass_gap(data: &Dataset) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            if data.labels[i] != data.labels[j] {
                best = best.min(dist(&data.features[i], &data.features[j]));
            }
        }
    }
    best
}

/// `m` Haar-random unit vectors in `C^n`, from normalized complex Gaussians.
/// Each component magnitude then has density `2(n−1)r(1−r²)^(n−2)`.
pub fn gen_hypersphere_uniform<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> Result<Vec<Vec<Complex64>>> {
    if n == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    Ok((0..m)
        .map(|_| loop {
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                break v.into_iter().map(|z| z / norm).collect();
            }
        })
        .collect())
}

/// CDF of one component magnitude of a Haar-random unit vector in `C^n`.
pub fn hypersphere_magnitude_cdf(n: usize, r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= 1.0 || n == 1 {
        1.0
    } else {
        1.0 - (1.0 - r * r).powi(n as i32 - 1)
    }
}

/// Clipped Gaussian distance noise: `max(0, d + ε·z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub epsilon: f64,
    /// Perturb squared distances instead of plain ones.
    pub squared: bool,
}

impl NoiseModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(format!("noise scale must be finite and >= 0, got {epsilon}")));
        }
        Ok(NoiseModel { epsilon, squared: false })
    }

    pub fn squared(self) -> Self {
        NoiseModel { squared: true, ..self }
    }

    /// Noisy version of the distance whose square is `dist_sqr`.
    pub fn apply<R: Rng + ?Sized>(&self, rng: &mut R, dist_sqr: f64) -> f64 {
        let base = if self.squared { dist_sqr } else { dist_sqr.sqrt() };
        let z: f64 = StandardNormal.sample(rng);
        (base + self.epsilon * z).max(0.0)
    }
}

/// Classifier run inside the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    Nn,
    Centroid,
}

/// One grid cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub param: f64,
    pub mean: f64,
    /// Sample standard deviation over trials, `n−1` denominator.
    pub std: f64,
    pub trials: usize,
    pub queries_mean: f64,
}

/// Rows in grid order plus fitted quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub columns: [&'static str; 5],
    pub rows: Vec<ReportRow>,
    pub seed: u64,
    pub fits: Vec<(String, f64)>,
}

/// Column names of accuracy sweeps.
pub const ACCURACY_COLUMNS: [&str; 5] = ["param", "accuracy_mean", "accuracy_std", "trials", "queries_mean"];

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares line `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain("a line fit needs at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("a line fit needs distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Default noise grid: 11 points log-spaced over `[1e-5, 1e5]`.
pub fn default_noise_grid() -> Vec<f64> {
    (0..11).map(|i| 10f64.powi(i - 5)).collect()
}

/// Stream id reserved for the train/test split of each trial, so every grid
/// cell of a sweep sees the same splits.
const SPLIT_CELL: u32 = u32::MAX;

/// Random split with `round(fraction·M)` training rows.
pub fn split<R: Rng + ?Sized>(rng: &mut R, m: usize, fraction: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!("train fraction {fraction} outside (0, 1)")));
    }
    let n_train = (fraction * m as f64).round() as usize;
    if n_train == 0 || n_train >= m {
        return Err(Error::domain(format!(
            "train fraction {fraction} of {m} rows leaves an empty train or test set"
        )));
    }
    let mut rows: Vec<usize> = (0..m).collect();
    rows.shuffle(rng);
    let test = rows.split_off(n_train);
    Ok((rows, test))
}

/// Index of the smallest value; exact ties are broken uniformly at random,
/// which matters once clipping maps many noisy distances to zero.
fn noisy_argmin<R: Rng + ?Sized>(rng: &mut R, values: impl Iterator<Item = f64>) -> usize {
    let (mut best, mut best_v, mut ties) = (0, f64::INFINITY, 0u32);
    for (i, v) in values.enumerate() {
        if v < best_v {
            (best, best_v, ties) = (i, v, 1);
        } else if v == best_v {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = i;
            }
        }
    }
    best
}

/// Accuracy of one trial and the number of noisy distances per test point.
fn run_trial<R: Rng + ?Sized>(
    rng: &mut R,
    data: &Dataset,
    train: &[usize],
    test: &[usize],
    method: SweepMethod,
    noise: NoiseModel,
) -> (f64, f64) {
    let centroids = match method {
        SweepMethod::Nn => Vec::new(),
        SweepMethod::Centroid => class_centroids(data, train),
    };
    let mut noisy = Vec::with_capacity(train.len().max(centroids.len()));
    let mut correct = 0usize;
    for &t in test {
        let x = &data.features[t];
        noisy.clear();
        let predicted = match method {
            SweepMethod::Nn => {
                for &j in train {
                    noisy.push(noise.apply(rng, dist_sqr(x, &data.features[j])));
                }
                data.labels[train[noisy_argmin(rng, noisy.iter().copied())]]
            }
            SweepMethod::Centroid => {
                for c in &centroids {
                    noisy.push(match c {
                        Some(c) => noise.apply(rng, dist_sqr(x, c)),
                        None => f64::INFINITY,
                    });
                }
                noisy_argmin(rng, noisy.iter().copied())
            }
        };
        correct += usize::from(predicted == data.labels[t]);
    }
    let per_point = match method {
        SweepMethod::Nn => train.len(),
        SweepMethod::Centroid => centroids.iter().flatten().count(),
    };
    (correct as f64 / test.len() as f64, per_point as f64)
}

fn dist_sqr(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One accuracy sweep cell: a fixed noise model and train fraction.
fn sweep_cell(
    seed: u64,
    cell: u32,
    data: &Dataset,
    method: SweepMethod,
    noise: NoiseModel,
    fraction: f64,
    trials: usize,
    param: f64,
) -> Result<ReportRow> {
    let results = (0..trials as u32)
        .into_par_iter()
        .map(|trial| {
            let (train, test) = split(&mut cell_stream(seed, SPLIT_CELL, trial), data.len(), fraction)?;
            let mut rng = cell_stream(seed, cell, trial);
            Ok(run_trial(&mut rng, data, &train, &test, method, noise))
        })
        .collect::<Result<Vec<_>>>()?;
    let acc: Vec<f64> = results.iter().map(|r| r.0).collect();
    let (mean, std) = mean_std(&acc);
    Ok(ReportRow {
        param,
        mean,
        std,
        trials,
        queries_mean: results.iter().map(|r| r.1).sum::<f64>() / trials as f64,
    })
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    Ok(())
}

/// Accuracy against the noise scale. Each trial draws one train/test split
/// shared by all grid cells; every distance gets fresh noise.
pub fn sweep_noise(
    seed: u64,
    data: &Dataset,
    method: SweepMethod,
    grid: &[f64],
    trials: usize,
    fraction: f64,
    squared: bool,
) -> Result<ExperimentReport> {
    if grid.is_empty() {
        return Err(Error::domain("noise grid is empty"));
    }
    check_trials(trials)?;
    let rows = grid
        .iter()
        .enumerate()
        .map(|(cell, &eps)| {
            let mut noise = NoiseModel::new(eps)?;
            noise.squared = squared;
            sweep_cell(seed, cell as u32, data, method, noise, fraction, trials, eps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        columns: ACCURACY_COLUMNS,
        rows,
        seed,
        fits: Vec::new(),
    })
}

/// Accuracy against the training fraction at a fixed noise scale.
pub fn sweep_trainsize(
    seed: u64,
    data: &Dataset,
    method: SweepMethod,
    fractions: &[f64],
    trials: usize,
    noise: NoiseModel,
) -> Result<ExperimentReport> {
    if fractions.is_empty() {
        return Err(Error::domain("fraction grid is empty"));
    }
    check_trials(trials)?;
    for &f in fractions {
        split(&mut stream(seed, 0), data.len(), f)?;
    }
    let rows = fractions
        .iter()
        .enumerate()
        .map(|(cell, &f)| sweep_cell(seed, cell as u32, data, method, noise, f, trials, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        columns: ACCURACY_COLUMNS,
        rows,
        seed,
        fits: Vec::new(),
    })
}

/// Gap between the two smallest distances from `e_1` to `m` Haar-random
/// unit vectors in `C^n`, averaged over trials for every `n`; the report
/// carries the fitted log-log slope of the mean gap against `n`.
pub fn distance_gap_study(seed: u64, ns: &[usize], m: usize, trials: usize) -> Result<ExperimentReport> {
    if ns.len() < 2 {
        return Err(Error::domain("the gap study needs at least two dimensions"));
    }
    if m < 2 {
        return Err(Error::domain("the gap needs at least two candidates"));
    }
    check_trials(trials)?;
    let mut rows = Vec::with_capacity(ns.len());
    for (cell, &n) in ns.iter().enumerate() {
        let gaps = (0..trials as u32)
            .into_par_iter()
            .map(|trial| {
                let mut rng = cell_stream(seed, cell as u32, trial);
                let ws = gen_hypersphere_uniform(&mut rng, n, m)?;
                // |e_1 − w|² = 2 − 2 Re w_1 for unit w.
                let mut d: Vec<f64> = ws.iter().map(|w| (2.0 - 2.0 * w[0].re).max(0.0).sqrt()).collect();
                d.sort_by(f64::total_cmp);
                Ok(d[1] - d[0])
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, std) = mean_std(&gaps);
        rows.push(ReportRow {
            param: n as f64,
            mean,
            std,
            trials,
            queries_mean: m as f64,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.param.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    let (slope, intercept) = fit_line(&xs, &ys)?;
    Ok(ExperimentReport {
        columns: ["n", "gap_mean", "gap_std", "trials", "m"],
        rows,
        seed,
        fits: vec![("slope".into(), slope), ("prefactor".into(), intercept.exp())],
    })
}

/// Crossover sizes for one bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverCurve {
    pub bound: Bound,
    /// `(N, M*)`; `None` when the bound never meets `N·M` in range.
    pub points: Vec<(f64, Option<f64>)>,
    pub exponent: f64,
    pub prefactor: f64,
}

/// Largest candidate count searched by [`cost_region`].
pub const MAX_CROSSOVER_M: f64 = 1e19;

/// Solves `bound(M) = N·M` for `M` by bisection on `ln M`, with
/// `ε = 1/√N`, `δ0 = 1/2`, `d·r_max² = 1` and `M′ = M`, then fits
/// `M* = c·N^p` over the bounded cells.
pub fn cost_region(ns: &[f64], which: Bound) -> Result<CrossoverCurve> {
    if ns.is_empty() {
        return Err(Error::domain("dimension grid is empty"));
    }
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        if !(n >= 1.0) {
            return Err(Error::domain(format!("dimension {n} must be at least 1")));
        }
        let excess = |log_m: f64| -> Result<f64> {
            let m = log_m.exp().round().max(1.0);
            let p = BoundParams {
                m: m as usize,
                k: m as usize,
                d: 1,
                r_max: 1.0,
                epsilon: 1.0 / n.sqrt(),
                delta0: 0.5,
            };
            Ok(theorem_bound(which, &p)?.ln() - (n * m).ln())
        };
        let (mut lo, mut hi) = (2f64.ln(), MAX_CROSSOVER_M.ln());
        let point = if excess(lo)? <= 0.0 || excess(hi)? > 0.0 {
            None
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if excess(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-9 {
                    break;
                }
            }
            Some(hi.exp())
        };
        points.push((n, point));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter_map(|&(n, m)| m.map(|m| (n.ln(), m.ln())))
        .unzip();
    let (exponent, intercept) = fit_line(&xs, &ys)?;
    Ok(CrossoverCurve {
        bound: which,
        points,
        exponent,
        prefactor: intercept.exp(),
    })
}

/// `count` log-spaced points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Options for [`load_csv_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    /// Header name or zero-based column index of the label.
    pub label_column: String,
    pub standardize: bool,
    /// Drop feature columns whose values are all 0 or 1.
    pub drop_boolean: bool,
    /// Header names or indices of columns to ignore, such as row ids.
    pub ignore: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "?" | "NA" | "NaN" | "nan")
}

fn resolve_column(column: &str, headers: &csv::StringRecord) -> Result<usize> {
    if let Some(i) = headers.iter().position(|h| h.trim() == column) {
        return Ok(i);
    }
    match column.parse::<usize>() {
        Ok(i) if i < headers.len() => Ok(i),
        _ => Err(Error::Data(format!("no column named {column:?}"))),
    }
}

/// Loads a headed CSV file. Rows with a missing cell are dropped; any other
/// non-numeric feature is a parse error carrying its 1-based line number.
/// Labels are numbered in sorted order of their strings.
pub fn load_csv_dataset(path: &Path, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let label = resolve_column(&options.label_column, &headers)?;
    let ignored = options
        .ignore
        .iter()
        .map(|c| resolve_column(c, &headers))
        .collect::<Result<Vec<_>>>()?;
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|c| *c != label && !ignored.contains(c))
        .collect();
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row: line,
                message: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        if is_missing(&record[label]) || feature_cols.iter().any(|&c| is_missing(&record[c])) {
            continue;
        }
        let features = feature_cols
            .iter()
            .map(|&c| {
                record[c].trim().parse::<f64>().map_err(|_| Error::Parse {
                    row: line,
                    message: format!("column {:?}: {:?} is not a number", &headers[c], &record[c]),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(features);
        raw_labels.push(record[label].trim().to_string());
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{} has no complete rows", path.display())));
    }
    if options.drop_boolean {
        let keep: Vec<usize> = (0..feature_cols.len())
            .filter(|&c| !rows.iter().all(|r| r[c] == 0.0 || r[c] == 1.0))
            .collect();
        for r in &mut rows {
            *r = keep.iter().map(|&c| r[c]).collect();
        }
    }
    if rows[0].is_empty() {
        return Err(Error::Data("no feature columns left".into()));
    }
    let mut label_names = raw_labels.clone();
    label_names.sort();
    label_names.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| label_names.binary_search(l).unwrap())
        .collect();
    let mut data = Dataset {
        features: rows,
        labels,
        label_names,
    };
    if options.standardize {
        data.standardize();
    }
    Ok(data)
}

/// Writes a dataset as CSV with columns `x0..x{N-1},label`.
pub fn write_dataset_csv<W: std::io::Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..data.dim()).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (x, &l) in data.features.iter().zip(&data.labels) {
        let mut rec: Vec<String> = x.iter().map(|v| crate::report::fmt_g(*v)).collect();
        rec.push(data.label_names[l].clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

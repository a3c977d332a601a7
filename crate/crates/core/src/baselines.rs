//! Classical comparators: brute-force nearest neighbor and the sampling
//! estimators for inner products and centroid distances.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::oracle::SparseVector;
use crate::{Error, Result};

/// Exact nearest neighbor by squared Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectNn {
    pub argmin: usize,
    pub distances: Vec<f64>,
    /// Components read in a merged pass over each pair's supports.
    pub accesses: u64,
    /// Component reads of a dense pass, `N·M`.
    pub dense_accesses: u64,
}

pub fn direct_nn(u: &SparseVector, training: &[SparseVector]) -> Result<DirectNn> {
    if training.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    let mut distances = Vec::with_capacity(training.len());
    let mut accesses = 0u64;
    for v in training {
        if v.dim() != u.dim() {
            return Err(Error::contract("dimension mismatch"));
        }
        distances.push(u.dist_sqr(v));
        accesses += union_size(u, v) as u64;
    }
    let mut argmin = 0;
    for (j, d) in distances.iter().enumerate() {
        if *d < distances[argmin] {
            argmin = j;
        }
    }
    Ok(DirectNn {
        argmin,
        distances,
        accesses,
        dense_accesses: (u.dim() * training.len()) as u64,
    })
}

fn union_size(a: &SparseVector, b: &SparseVector) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    let (ea, eb) = (a.entries(), b.entries());
    while i < ea.len() || j < eb.len() {
        n += 1;
        match (ea.get(i), eb.get(j)) {
            (Some(x), Some(y)) if x.index == y.index => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.index < y.index => i += 1,
            (Some(_), Some(_)) => j += 1,
            (Some(_), None) => i += 1,
            (None, _) => j += 1,
        }
    }
    n
}

/// A sampling estimate together with its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub samples: u64,
    pub accesses: u64,
    /// Exact variance of the estimator (inner product) or the variance
    /// premise used to size the sample (centroid distance).
    pub variance_bound: f64,
}

/// Size of the index universe when the joint support is unknown.
fn universe(a: &SparseVector, b: &SparseVector) -> usize {
    a.dim().max(2 * a.sparsity().max(b.sparsity()))
}

fn product(a: &SparseVector, b: &SparseVector, i: usize) -> f64 {
    if i >= a.dim() {
        return 0.0;
    }
    (a.value(i).conj() * b.value(i)).re
}

/// Unbiased estimator `X = (D/N_c) Σ_t a_{i_t} b_{i_t}` with `N_c` indices
/// drawn uniformly, with replacement, from a universe of size
/// `D = max(N, 2d)`. Complex inputs estimate `Re⟨a|b⟩`.
pub fn mc_inner_product<R: Rng + ?Sized>(
    rng: &mut R,
    a: &SparseVector,
    b: &SparseVector,
    samples: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    if a.dim() != b.dim() {
        return Err(Error::contract("dimension mismatch"));
    }
    let d = universe(a, b);
    let mut sum = 0.0;
    for _ in 0..samples {
        sum += product(a, b, rng.random_range(0..d));
    }
    let n_c = samples as f64;
    let df = d as f64;
    let exact = a.inner(b).re;
    let second: f64 = a
        .entries()
        .iter()
        .map(|e| product(a, b, e.index).powi(2))
        .sum();
    Ok(McEstimate {
        value: df / n_c * sum,
        samples,
        accesses: 2 * samples,
        variance_bound: (df * second - exact * exact) / n_c,
    })
}

/// Sample-size constants for [`mc_centroid_distance`]: `N_c = ⌈c_c d² r⁴/ε²⌉`
/// component samples and `N_s = ⌈c_s r² N_c²/ε²⌉` vector samples per
/// component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConstants {
    pub components: f64,
    pub vectors: f64,
}

impl Default for McConstants {
    fn default() -> Self {
        McConstants {
            components: 20.0,
            vectors: 1.0,
        }
    }
}

impl McConstants {
    pub fn sizes(&self, d: usize, r_max: f64, epsilon: f64) -> (u64, u64) {
        let d = d as f64;
        let n_c = (self.components * d * d * r_max.powi(4) / (epsilon * epsilon)).ceil().max(1.0);
        let n_s = (self.vectors * r_max * r_max * n_c * n_c / (epsilon * epsilon)).ceil().max(1.0);
        (n_c as u64, n_s as u64)
    }
}

/// Estimates `|u − mean(cluster)|²` by sampling `N_c` components uniformly
/// and estimating the centroid at each sampled component from `N_s` vectors
/// drawn uniformly with replacement.
///
/// The per-component vector counts are drawn as one multinomial, so the run
/// time does not depend on `N_s`.
pub fn mc_centroid_distance<R: Rng + ?Sized>(
    rng: &mut R,
    u: &SparseVector,
    cluster: &[&SparseVector],
    epsilon: f64,
    constants: McConstants,
) -> Result<McEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::domain("epsilon must be positive"));
    }
    if cluster.is_empty() {
        return Err(Error::domain("empty cluster"));
    }
    if cluster.iter().any(|v| v.dim() != u.dim()) {
        return Err(Error::contract("dimension mismatch"));
    }
    let d = cluster.iter().map(|v| v.sparsity()).fold(u.sparsity(), usize::max);
    let r_max = cluster
        .iter()
        .flat_map(|v| v.entries())
        .chain(u.entries())
        .map(|e| e.magnitude)
        .fold(0.0, f64::max);
    let (n_c, n_s) = constants.sizes(d, r_max, epsilon);
    let dim = u.dim();
    let mut sum = 0.0;
    for _ in 0..n_c {
        let i = rng.random_range(0..dim);
        let c_hat = sampled_mean(rng, cluster, i, n_s)?;
        sum += (u.value(i) - c_hat).norm_sqr();
    }
    Ok(McEstimate {
        value: dim as f64 / n_c as f64 * sum,
        samples: n_c,
        accesses: n_c.saturating_mul(n_s),
        variance_bound: 4.0 * r_max * r_max,
    })
}

/// Mean of component `i` over `n` vectors drawn uniformly from `cluster`.
fn sampled_mean<R: Rng + ?Sized>(
    rng: &mut R,
    cluster: &[&SparseVector],
    i: usize,
    n: u64,
) -> Result<Complex64> {
    let mut left = n;
    let mut acc = Complex64::new(0.0, 0.0);
    let m = cluster.len();
    for (pos, v) in cluster.iter().enumerate() {
        let count = if pos + 1 == m {
            left
        } else {
            let p = 1.0 / (m - pos) as f64;
            Binomial::new(left, p)
                .map_err(|e| Error::domain(e.to_string()))?
                .sample(rng)
        };
        left -= count;
        acc += v.value(i) * count as f64;
    }
    Ok(acc / n as f64)
}

/// Which ε convention a cost table uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `ε = 1/√N`, the accuracy random-like data needs.
    Typical,
    Atypical { epsilon: f64 },
}

/// The four asymptotic cost rows evaluated with unit constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTable {
    pub epsilon: f64,
    pub direct: f64,
    pub monte_carlo: f64,
    pub inner_product: f64,
    pub euclidean: f64,
}

/// Evaluates the asymptotic query costs of the four methods. Logarithms are
/// natural and floored at 1 so that single-candidate rows stay nonzero.
pub fn asymptotic_costs(
    n: usize,
    m: usize,
    m_prime: usize,
    d: usize,
    r_max: f64,
    regime: Regime,
) -> Result<CostTable> {
    if n == 0 || m == 0 || m_prime == 0 || d == 0 || !(r_max > 0.0) {
        return Err(Error::domain("cost parameters must be positive"));
    }
    let epsilon = match regime {
        Regime::Typical => 1.0 / (n as f64).sqrt(),
        Regime::Atypical { epsilon } if epsilon > 0.0 => epsilon,
        Regime::Atypical { .. } => return Err(Error::domain("epsilon must be positive")),
    };
    let (nf, mf, mp, df) = (n as f64, m as f64, m_prime as f64, d as f64);
    let log = |x: f64| x.ln().max(1.0);
    let dr2 = df * r_max * r_max;
    Ok(CostTable {
        epsilon,
        direct: nf * mf,
        monte_carlo: mf * dr2 * dr2 / (epsilon * epsilon),
        inner_product: mf.sqrt() * log(mf) * dr2 * dr2 / epsilon,
        euclidean: mp.sqrt() * log(mp) * dr2 / epsilon,
    })
}

//! End-to-end classifiers driven by simulated amplitude estimation and
//! minimum finding, plus the closed-form query bounds they are checked
//! against.
//!
//! Every classifier accepts a [`DistanceMode`]. `Exact` computes distances
//! directly and charges nothing; `Quantum` draws each candidate's value from
//! a median-voted amplitude estimate of the corresponding circuit and runs
//! Dürr–Høyer over those values, aborting a run that would exceed the
//! matching bound.

use std::f64::consts::PI;

use rand::Rng;

use crate::amplitude::{cost, required_copies, required_register, AeLaw, Method};
use crate::circuits::{
    clamped_inner_product_sq, euclidean_probability, intra_cluster_variance_probability,
    sign_recovering_embed, signed_inner_product, swap_test_probability, Encoding,
};
use crate::minfind::{corruption_budget, durr_hoyer_min, Estimate, Limits, ValueOracle};
use crate::oracle::{mode_lowest, QueryCount, QueryLedger, SparseVector, TrainingSet};
use crate::{Error, Result, AE_SUCCESS, EULER_GAMMA};

/// How candidate distances are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceMode {
    Exact,
    Quantum { epsilon: f64, delta0: f64 },
}

impl DistanceMode {
    fn check(&self) -> Result<()> {
        if let DistanceMode::Quantum { epsilon, delta0 } = *self {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
            }
            if !(delta0 > 0.0 && delta0 < 1.0) {
                return Err(Error::domain(format!("delta0 {delta0} outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Which closed-form query bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Nearest neighbor by inner products over `M` vectors.
    InnerProduct,
    /// Nearest centroid over `M′` clusters by the Euclidean method.
    Euclidean,
    /// One k-means assignment step over `M` vectors and `k` clusters.
    KMeans,
}

/// Parameters of [`theorem_bound`]; `k` is only read for [`Bound::KMeans`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub r_max: f64,
    pub epsilon: f64,
    pub delta0: f64,
}

/// Closed-form expected-query bound. Returned as `f64` because the values
/// overflow 64-bit integers in the scaling studies; both ceilings are
/// evaluated exactly.
pub fn theorem_bound(which: Bound, p: &BoundParams) -> Result<f64> {
    if p.m == 0 || p.d == 0 || !(p.r_max > 0.0) {
        return Err(Error::domain("bound parameters must be positive"));
    }
    let r = p.r_max;
    match which {
        Bound::InnerProduct => {
            let reg = required_register(p.epsilon, p.d, r, r, Method::InnerProduct)?;
            let k = required_copies(corruption_budget(p.m, p.delta0)?, AE_SUCCESS)?;
            Ok(1080.0 * (p.m as f64).sqrt() * reg as f64 * k as f64)
        }
        Bound::Euclidean => {
            let reg = required_register(p.epsilon, p.d, r, r, Method::Euclidean)?;
            let k = required_copies(corruption_budget(p.m, p.delta0)?, AE_SUCCESS * AE_SUCCESS)?;
            Ok(900.0 * (p.m as f64).sqrt() * reg as f64 * k as f64)
        }
        Bound::KMeans => {
            if p.k == 0 {
                return Err(Error::domain("k-means needs at least one cluster"));
            }
            let reg = required_register(p.epsilon, p.d, r, r, Method::Euclidean)?;
            let k = required_copies(corruption_budget(p.k, p.delta0)?, AE_SUCCESS)?;
            Ok(360.0 * p.m as f64 * (p.k as f64).sqrt() * reg as f64 * k as f64)
        }
    }
}

/// Result of classifying one test vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationOutcome {
    pub label: usize,
    /// Winning training vector or cluster.
    pub argmin: usize,
    /// All candidates chosen, nearest first (one entry except for k-NN).
    pub neighbors: Vec<usize>,
    /// Per-candidate distance values used for the decision.
    pub estimates: Vec<f64>,
    pub ledger: QueryLedger,
    /// Query bound for the configuration, absent in exact mode.
    pub bound: Option<f64>,
    pub aborted: bool,
    /// An amplitude estimate fell outside its admissible set.
    pub failure: bool,
}

impl ClassificationOutcome {
    pub fn within_bound(&self) -> bool {
        self.bound.is_none_or(|b| self.ledger.total() as f64 <= b)
    }
}

/// Candidate values backed by median-voted amplitude estimates. Candidate
/// `j` owns one or more circuit laws; `combine` turns their estimates into
/// the value being minimized.
struct AeValues<F> {
    laws: Vec<Vec<AeLaw>>,
    copies: u64,
    cost: QueryCount,
    combine: F,
}

impl<F: Fn(usize, &[f64]) -> f64> ValueOracle for AeValues<F> {
    fn len(&self) -> usize {
        self.laws.len()
    }

    fn evaluation_cost(&self) -> QueryCount {
        let register = self.laws.first().and_then(|l| l.first()).map_or(1, |l| l.register);
        self.cost * (2 * self.copies * register)
    }

    fn estimate<R: Rng + ?Sized>(&self, rng: &mut R, j: usize) -> Result<Estimate> {
        let mut corrupted = false;
        let mut a_hat = Vec::with_capacity(self.laws[j].len());
        for law in &self.laws[j] {
            let mut y = law.sample_median(rng, self.copies);
            if !law.is_admissible(y) {
                corrupted = true;
                y = law.fold(rng.random_range(0..law.register));
            }
            a_hat.push(law.estimate(y));
        }
        Ok(Estimate {
            value: (self.combine)(j, &a_hat),
            corrupted,
        })
    }
}

fn laws(probabilities: &[Vec<f64>], register: u64) -> Result<Vec<Vec<AeLaw>>> {
    probabilities
        .iter()
        .map(|ps| ps.iter().map(|&a| AeLaw::new(a.clamp(0.0, 1.0), register)).collect())
        .collect()
}

/// Candidates with values, produced once per classification.
struct Candidates {
    values: Vec<f64>,
    failure: bool,
    eval_cost: QueryCount,
    bound: Option<f64>,
}

fn draw<R: Rng + ?Sized, O: ValueOracle>(rng: &mut R, oracle: &O, bound: f64) -> Result<Candidates> {
    let (values, failure) = crate::minfind::draw_estimates(rng, oracle)?;
    Ok(Candidates {
        values,
        failure,
        eval_cost: oracle.evaluation_cost(),
        bound: Some(bound),
    })
}

fn exact(values: Vec<f64>) -> Candidates {
    Candidates {
        values,
        failure: false,
        eval_cost: QueryCount::ZERO,
        bound: None,
    }
}

fn precedes(values: &[f64], a: usize, b: usize) -> bool {
    values[a] < values[b] || (values[a] == values[b] && a < b)
}

/// Picks the `k` smallest candidates, quantum mode via repeated minimum
/// finding that skips earlier winners.
fn select<R: Rng + ?Sized>(
    rng: &mut R,
    c: &Candidates,
    k: usize,
    quantum: bool,
) -> Result<(Vec<usize>, QueryLedger, bool)> {
    let n = c.values.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("cannot select {k} of {n} candidates")));
    }
    let mut ledger = QueryLedger::new();
    if !quantum {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            if precedes(&c.values, a, b) {
                std::cmp::Ordering::Less
            } else if precedes(&c.values, b, a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        order.truncate(k);
        return Ok((order, ledger, false));
    }
    let budget = c.bound.map_or(u64::MAX, |b| b.floor() as u64);
    let mut chosen = Vec::with_capacity(k);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut aborted = false;
    for _ in 0..k {
        let sub: Vec<f64> = remaining.iter().map(|&j| c.values[j]).collect();
        let r = durr_hoyer_min(rng, &sub, c.eval_cost, Limits::budget(budget))?;
        ledger.absorb(&r.ledger);
        aborted |= r.aborted;
        chosen.push(remaining.remove(r.argmin));
    }
    Ok((chosen, ledger, aborted))
}

fn outcome<R: Rng + ?Sized>(
    rng: &mut R,
    c: Candidates,
    k: usize,
    quantum: bool,
    label_of: impl Fn(usize) -> usize,
) -> Result<ClassificationOutcome> {
    let (neighbors, ledger, aborted) = select(rng, &c, k, quantum)?;
    let label = mode_lowest(neighbors.iter().map(|&j| label_of(j)));
    let bound = c.bound.map(|b| b * k as f64);
    Ok(ClassificationOutcome {
        label,
        argmin: neighbors[0],
        neighbors,
        estimates: c.values,
        ledger,
        bound,
        aborted,
        failure: c.failure,
    })
}

/// Distance metric used by [`knn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Swap test on sign-recovering embeddings of the normalized vectors;
    /// distances are rebuilt from the stored norms.
    InnerProduct,
    /// Swap test without the embedding: ranks by `|⟨u|v⟩|`, so antiparallel
    /// vectors count as near.
    InnerProductUnsigned,
    /// Centroid-distance circuit with singleton clusters.
    Euclidean,
}

fn check_inputs(test: &SparseVector, training: &TrainingSet) -> Result<()> {
    if training.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    if training.dim() != Some(test.dim()) {
        return Err(Error::contract("test vector dimension differs from the training set"));
    }
    Ok(())
}

fn unit_or_basis(v: &SparseVector) -> Result<(SparseVector, f64)> {
    if v.norm_sqr() == 0.0 {
        Ok((SparseVector::basis(v.dim(), 0)?, 0.0))
    } else {
        v.normalized()
    }
}

/// Candidate values of the inner-product method.
fn inner_product_candidates<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
    signed: bool,
) -> Result<Candidates> {
    let vs = training.vectors();
    let direct: Vec<f64> = vs.iter().map(|v| test.dist_sqr(v)).collect();
    let DistanceMode::Quantum { epsilon, delta0 } = mode else {
        return Ok(exact(direct));
    };
    let d = vs.iter().map(SparseVector::sparsity).fold(test.sparsity(), usize::max);
    let prepare = |v: &SparseVector| -> Result<(SparseVector, f64)> {
        let (unit, norm) = unit_or_basis(v)?;
        let unit = unit.with_sparsity(d)?.with_r_max(1.0)?;
        let unit = if signed { sign_recovering_embed(&unit)? } else { unit };
        Ok((unit, norm))
    };
    let (u, u_norm) = prepare(test)?;
    let mut probs = Vec::with_capacity(vs.len());
    let mut norms = Vec::with_capacity(vs.len());
    for v in vs {
        let (w, n) = prepare(v)?;
        probs.push(vec![swap_test_probability(&u, &w)?]);
        norms.push(n);
    }
    let (d_enc, r_enc) = (u.sparsity(), u.r_max());
    let register = required_register(epsilon, d_enc, r_enc, r_enc, Method::InnerProduct)?;
    let copies = required_copies(corruption_budget(vs.len(), delta0)?, AE_SUCCESS)?;
    let oracle = AeValues {
        laws: laws(&probs, register)?,
        copies,
        cost: cost::INNER_PRODUCT,
        combine: |j: usize, a: &[f64]| {
            let sq = clamped_inner_product_sq(a[0], d_enc, r_enc, r_enc).min(1.0);
            let ip = if signed { signed_inner_product(sq) } else { sq.sqrt() };
            u_norm * u_norm + norms[j] * norms[j] - 2.0 * u_norm * norms[j] * ip
        },
    };
    let bound = theorem_bound(
        Bound::InnerProduct,
        &BoundParams {
            m: vs.len(),
            k: 1,
            d: d_enc,
            r_max: r_enc,
            epsilon,
            delta0,
        },
    )?;
    draw(rng, &oracle, bound)
}

/// Candidate values of the Euclidean method with singleton clusters.
fn euclidean_candidates<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
) -> Result<Candidates> {
    let vs = training.vectors();
    let DistanceMode::Quantum { epsilon, delta0 } = mode else {
        return Ok(exact(vs.iter().map(|v| test.dist_sqr(v)).collect()));
    };
    let enc = Encoding::covering(std::iter::once(test).chain(vs))?;
    let probs = vs
        .iter()
        .map(|v| Ok(vec![euclidean_probability(test, &[v], &enc)?]))
        .collect::<Result<Vec<_>>>()?;
    let register = required_register(epsilon, enc.sparsity, enc.r_max, enc.r_max, Method::Euclidean)?;
    let copies = required_copies(corruption_budget(vs.len(), delta0)?, AE_SUCCESS)?;
    let scale = enc.distance_scale();
    let oracle = AeValues {
        laws: laws(&probs, register)?,
        copies,
        cost: cost::DISTANCE,
        combine: |_: usize, a: &[f64]| scale * a[0],
    };
    let bound = theorem_bound(
        Bound::Euclidean,
        &BoundParams {
            m: vs.len(),
            k: 1,
            d: enc.sparsity,
            r_max: enc.r_max,
            epsilon,
            delta0,
        },
    )?;
    draw(rng, &oracle, bound)
}

/// Nearest neighbor through inner products (signed).
pub fn nn_inner_product<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
) -> Result<ClassificationOutcome> {
    knn(rng, test, training, mode, 1, Metric::InnerProduct)
}

/// Nearest neighbor through the Euclidean circuit.
pub fn nn_euclidean<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
) -> Result<ClassificationOutcome> {
    knn(rng, test, training, mode, 1, Metric::Euclidean)
}

/// Majority label among the `k` nearest training vectors, ties toward the
/// lowest label. The bound is `k` times the single-search bound.
pub fn knn<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
    k: usize,
    metric: Metric,
) -> Result<ClassificationOutcome> {
    mode.check()?;
    check_inputs(test, training)?;
    if k == 0 || k > training.len() {
        return Err(Error::domain(format!(
            "k = {k} must lie in 1..={}",
            training.len()
        )));
    }
    let c = match metric {
        Metric::InnerProduct => inner_product_candidates(rng, test, training, mode, true)?,
        Metric::InnerProductUnsigned => inner_product_candidates(rng, test, training, mode, false)?,
        Metric::Euclidean => euclidean_candidates(rng, test, training, mode)?,
    };
    let quantum = matches!(mode, DistanceMode::Quantum { .. });
    outcome(rng, c, k, quantum, |j| training.labels()[j])
}

fn centroid(members: &[&SparseVector]) -> Vec<num_complex::Complex64> {
    let mut c = vec![num_complex::Complex64::new(0.0, 0.0); members[0].dim()];
    for v in members {
        for e in v.entries() {
            c[e.index] += e.value();
        }
    }
    let m = members.len() as f64;
    c.iter_mut().for_each(|x| *x /= m);
    c
}

fn dist_sqr_dense(v: &SparseVector, c: &[num_complex::Complex64]) -> f64 {
    let mut total: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    for e in v.entries() {
        let x = e.value();
        total += x.norm_sqr() - 2.0 * (x.conj() * c[e.index]).re;
    }
    total.max(0.0)
}

fn mean_sq_deviation(members: &[&SparseVector]) -> f64 {
    let c = centroid(members);
    members.iter().map(|v| dist_sqr_dense(v, &c)).sum::<f64>() / members.len() as f64
}

/// Normalized statistic `dist² / σ`, with `σ = 1` for singletons.
fn normalized(dist: f64, sigma: f64, size: usize) -> f64 {
    if size <= 1 {
        dist
    } else if sigma > 0.0 {
        dist / sigma
    } else if dist > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Nearest cluster centroid, optionally normalized by each cluster's
/// mean squared deviation. Clusters default to one per class label.
pub fn nearest_centroid<R: Rng + ?Sized>(
    rng: &mut R,
    test: &SparseVector,
    training: &TrainingSet,
    mode: DistanceMode,
    normalize: bool,
) -> Result<ClassificationOutcome> {
    mode.check()?;
    check_inputs(test, training)?;
    let clusters = training.effective_clusters();
    let vs = training.vectors();
    let members: Vec<Vec<&SparseVector>> = clusters
        .iter()
        .map(|c| c.iter().map(|&j| &vs[j]).collect())
        .collect();
    let c = match mode {
        DistanceMode::Exact => exact(
            members
                .iter()
                .map(|m| {
                    let dist = dist_sqr_dense(test, &centroid(m));
                    if normalize {
                        normalized(dist, mean_sq_deviation(m), m.len())
                    } else {
                        dist
                    }
                })
                .collect(),
        ),
        DistanceMode::Quantum { epsilon, delta0 } => {
            let enc = Encoding::covering(std::iter::once(test).chain(vs))?;
            let mut probs = Vec::with_capacity(members.len());
            for m in &members {
                let mut p = vec![euclidean_probability(test, m, &enc)?];
                if normalize {
                    p.push(intra_cluster_variance_probability(m, &enc)?);
                }
                probs.push(p);
            }
            let register =
                required_register(epsilon, enc.sparsity, enc.r_max, enc.r_max, Method::Euclidean)?;
            let delta = corruption_budget(members.len(), delta0)?;
            let (a0, grover_cost) = if normalize {
                (AE_SUCCESS * AE_SUCCESS, cost::DISTANCE_AND_VARIANCE)
            } else {
                (AE_SUCCESS, cost::DISTANCE)
            };
            let scale = enc.distance_scale();
            let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
            let oracle = AeValues {
                laws: laws(&probs, register)?,
                copies: required_copies(delta, a0)?,
                cost: grover_cost,
                combine: |j: usize, a: &[f64]| {
                    let dist = scale * a[0];
                    if normalize {
                        normalized(dist, scale * a[1], sizes[j])
                    } else {
                        dist
                    }
                },
            };
            let bound = theorem_bound(
                Bound::Euclidean,
                &BoundParams {
                    m: members.len(),
                    k: 1,
                    d: enc.sparsity,
                    r_max: enc.r_max,
                    epsilon,
                    delta0,
                },
            )?;
            draw(rng, &oracle, bound)?
        }
    };
    let quantum = matches!(mode, DistanceMode::Quantum { .. });
    outcome(rng, c, 1, quantum, |m| training.cluster_label(&clusters[m]))
}

/// Result of one k-means assignment step.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansStep {
    pub assignment: Vec<usize>,
    /// Clusters that came out empty and were re-seeded, with the vector
    /// moved into each.
    pub reseeded: Vec<(usize, usize)>,
    pub ledger: QueryLedger,
    pub bound: Option<f64>,
    /// Number of vectors whose minimum search hit its budget.
    pub aborted: usize,
    pub failure: bool,
}

impl KMeansStep {
    pub fn within_bound(&self) -> bool {
        self.bound.is_none_or(|b| self.ledger.total() as f64 <= b)
    }
}

fn cluster_members<'a>(
    vectors: &'a [SparseVector],
    k: usize,
    assignment: &[usize],
) -> Result<Vec<Vec<&'a SparseVector>>> {
    if assignment.len() != vectors.len() {
        return Err(Error::contract("assignment length differs from the vector count"));
    }
    let mut members: Vec<Vec<&SparseVector>> = vec![Vec::new(); k];
    for (v, &c) in vectors.iter().zip(assignment) {
        if c >= k {
            return Err(Error::OutOfRange {
                what: "cluster",
                index: c,
                limit: k,
            });
        }
        members[c].push(v);
    }
    if let Some(empty) = members.iter().position(Vec::is_empty) {
        return Err(Error::contract(format!("cluster {empty} is empty")));
    }
    Ok(members)
}

/// Moves, for each empty cluster, the vector farthest from its current
/// centroid into it. Only clusters with more than one member give up a vector.
fn reseed_empty(
    vectors: &[SparseVector],
    centroids: &[Vec<num_complex::Complex64>],
    assignment: &mut [usize],
    k: usize,
) -> Vec<(usize, usize)> {
    let mut moved = Vec::new();
    loop {
        let mut sizes = vec![0usize; k];
        for &c in assignment.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            break;
        };
        let mut best: Option<(usize, f64)> = None;
        for (p, v) in vectors.iter().enumerate() {
            if sizes[assignment[p]] <= 1 {
                continue;
            }
            let d = dist_sqr_dense(v, &centroids[assignment[p]]);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((p, d));
            }
        }
        let Some((p, _)) = best else {
            break;
        };
        assignment[p] = empty;
        moved.push((empty, p));
    }
    moved
}

/// Textbook Lloyd assignment step with exact distances.
pub fn lloyd_step_exact(
    vectors: &[SparseVector],
    k: usize,
    assignment: &[usize],
) -> Result<KMeansStep> {
    let mut rng = crate::rng::seeded(0);
    kmeans_iteration(&mut rng, vectors, k, assignment, DistanceMode::Exact)
}

/// One k-means assignment step: every vector moves to its nearest current
/// centroid (unnormalized distances). Centroids are kept classically as
/// member lists.
pub fn kmeans_iteration<R: Rng + ?Sized>(
    rng: &mut R,
    vectors: &[SparseVector],
    k: usize,
    assignment: &[usize],
    mode: DistanceMode,
) -> Result<KMeansStep> {
    mode.check()?;
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let members = cluster_members(vectors, k, assignment)?;
    let centroids: Vec<_> = members.iter().map(|m| centroid(m)).collect();
    let mut next = Vec::with_capacity(vectors.len());
    let mut ledger = QueryLedger::new();
    let (mut aborted, mut failure) = (0, false);
    let mut bound = None;
    match mode {
        DistanceMode::Exact => {
            for v in vectors {
                let values: Vec<f64> = centroids.iter().map(|c| dist_sqr_dense(v, c)).collect();
                let best = (0..k).fold(0, |b, c| if precedes(&values, c, b) { c } else { b });
                next.push(best);
            }
        }
        DistanceMode::Quantum { epsilon, delta0 } => {
            let enc = Encoding::covering(vectors)?;
            let register =
                required_register(epsilon, enc.sparsity, enc.r_max, enc.r_max, Method::Euclidean)?;
            let copies = required_copies(corruption_budget(k, delta0)?, AE_SUCCESS)?;
            let total = theorem_bound(
                Bound::KMeans,
                &BoundParams {
                    m: vectors.len(),
                    k,
                    d: enc.sparsity,
                    r_max: enc.r_max,
                    epsilon,
                    delta0,
                },
            )?;
            bound = Some(total);
            let per_vector = (total / vectors.len() as f64).floor() as u64;
            let scale = enc.distance_scale();
            for v in vectors {
                let probs = members
                    .iter()
                    .map(|m| Ok(vec![euclidean_probability(v, m, &enc)?]))
                    .collect::<Result<Vec<_>>>()?;
                let oracle = AeValues {
                    laws: laws(&probs, register)?,
                    copies,
                    cost: cost::DISTANCE,
                    combine: |_: usize, a: &[f64]| scale * a[0],
                };
                let (values, corrupted) = crate::minfind::draw_estimates(rng, &oracle)?;
                failure |= corrupted;
                let r = durr_hoyer_min(rng, &values, oracle.evaluation_cost(), Limits::budget(per_vector))?;
                ledger.absorb(&r.ledger);
                aborted += usize::from(r.aborted);
                next.push(r.argmin);
            }
        }
    }
    let reseeded = reseed_empty(vectors, &centroids, &mut next, k);
    Ok(KMeansStep {
        assignment: next,
        reseeded,
        ledger,
        bound,
        aborted,
        failure,
    })
}

/// Chebyshev tail bounds for a test point at distances `ξ_A`, `ξ_B` from two
/// class centroids with standard deviations `σ_A`, `σ_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevReport {
    /// `σ_A²/ξ_A²`, `+∞` when `ξ_A = 0`.
    pub bound_a: f64,
    pub bound_b: f64,
    /// `0` for class A, `1` for class B: the class whose bound leaves the
    /// point more plausible, i.e. the smaller normalized distance `ξ/σ`.
    pub decision: usize,
    /// Set when the two bounds are within the looseness factor of each other,
    /// so the tail bounds alone do not separate the classes convincingly.
    pub advisory: bool,
}

pub fn chebyshev_report(
    xi_a: f64,
    sigma_a: f64,
    xi_b: f64,
    sigma_b: f64,
    looseness: f64,
) -> Result<ChebyshevReport> {
    if [xi_a, sigma_a, xi_b, sigma_b].iter().any(|x| !(*x >= 0.0)) || !(looseness >= 1.0) {
        return Err(Error::domain("distances and deviations must be nonnegative, looseness ≥ 1"));
    }
    let bound = |xi: f64, sigma: f64| {
        if xi == 0.0 {
            f64::INFINITY
        } else {
            (sigma / xi).powi(2)
        }
    };
    let (bound_a, bound_b) = (bound(xi_a, sigma_a), bound(xi_b, sigma_b));
    let decision = usize::from(bound_b > bound_a);
    let (hi, lo) = if bound_a >= bound_b { (bound_a, bound_b) } else { (bound_b, bound_a) };
    let advisory = if hi.is_infinite() {
        lo.is_infinite()
    } else {
        hi <= looseness * lo
    };
    Ok(ChebyshevReport {
        bound_a,
        bound_b,
        decision,
        advisory,
    })
}

/// `4π(π+1)`, the register constant of the inner-product method.
pub const INNER_PRODUCT_REGISTER_CONSTANT: f64 = 4.0 * PI * (PI + 1.0);

/// Ratio `ln(81 M (ln M + γ)/δ0)`, shared by all bounds.
pub fn failure_log_factor(m: usize, delta0: f64) -> f64 {
    let m = m as f64;
    (81.0 * m * (m.ln() + EULER_GAMMA) / delta0).ln()
}

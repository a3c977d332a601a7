//! Black-box data access over sparse vectors.
//!
//! Vectors are stored in polar form `v_i = r_i e^{iφ_i}` so that the
//! state-preparation rotations `R_y(2 asin(r/r_max))` and `R_z(2φ)` can be
//! evaluated without round-off from a Cartesian conversion. All indices are
//! zero-based. Vector index `0` of a [`DataOracle`] is always the test vector
//! `u`; training vectors follow at `1..=M`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;

use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// One stored nonzero component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub index: usize,
    pub magnitude: f64,
    pub phase: f64,
}

impl Entry {
    pub fn new(index: usize, magnitude: f64, phase: f64) -> Self {
        Entry {
            index,
            magnitude,
            phase,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// A `d`-sparse complex vector with a known component bound `r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<Entry>,
    sparsity: usize,
    r_max: f64,
}

impl SparseVector {
    /// Builds a vector and checks every structural invariant.
    pub fn new(dim: usize, entries: Vec<Entry>, sparsity: usize, r_max: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("vector dimension must be positive"));
        }
        if sparsity == 0 || sparsity > dim {
            return Err(Error::contract(format!(
                "sparsity {sparsity} must lie in 1..={dim}"
            )));
        }
        if entries.len() > sparsity {
            return Err(Error::contract(format!(
                "{} stored entries exceed declared sparsity {sparsity}",
                entries.len()
            )));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::contract(format!("r_max must be positive, got {r_max}")));
        }
        let mut prev: Option<usize> = None;
        for e in &entries {
            if e.index >= dim {
                return Err(Error::OutOfRange {
                    what: "component",
                    index: e.index,
                    limit: dim,
                });
            }
            if prev.is_some_and(|p| e.index <= p) {
                return Err(Error::contract("entry indices must be strictly increasing"));
            }
            if !(e.magnitude >= 0.0) || !e.phase.is_finite() {
                return Err(Error::contract("entry magnitudes must be nonnegative"));
            }
            if e.magnitude > r_max * (1.0 + 1e-12) {
                return Err(Error::contract(format!(
                    "component magnitude {} exceeds r_max {r_max}",
                    e.magnitude
                )));
            }
            prev = Some(e.index);
        }
        Ok(SparseVector {
            dim,
            entries,
            sparsity,
            r_max,
        })
    }

    /// Converts a dense complex vector, dropping components with magnitude
    /// `<= zero_threshold`. Sparsity and `r_max` are taken tight.
    pub fn from_dense(values: &[Complex64], zero_threshold: f64) -> Result<Self> {
        let entries: Vec<Entry> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > zero_threshold)
            .map(|(i, v)| {
                let (r, phi) = v.to_polar();
                Entry::new(i, r, phi)
            })
            .collect();
        let sparsity = entries.len().max(1);
        let r_max = entries
            .iter()
            .map(|e| e.magnitude)
            .fold(0.0_f64, f64::max);
        let r_max = if r_max > 0.0 { r_max } else { 1.0 };
        Self::new(values.len(), entries, sparsity, r_max)
    }

    pub fn from_dense_real(values: &[f64], zero_threshold: f64) -> Result<Self> {
        let complex: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_dense(&complex, zero_threshold)
    }

    /// Standard basis vector `e_index` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Self::new(dim, vec![Entry::new(index, 1.0, 0.0)], 1, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Same vector under a looser sparsity declaration.
    pub fn with_sparsity(&self, sparsity: usize) -> Result<Self> {
        Self::new(self.dim, self.entries.clone(), sparsity, self.r_max)
    }

    /// Same vector under a different component bound.
    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::new(self.dim, self.entries.clone(), self.sparsity, r_max)
    }

    pub fn value(&self, index: usize) -> Complex64 {
        match self.entries.binary_search_by_key(&index, |e| e.index) {
            Ok(pos) => self.entries[pos].value(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for e in &self.entries {
            out[e.index] = e.value();
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.magnitude * e.magnitude).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= UNIT_TOL
    }

    /// Unit-norm copy together with the original norm. The bound `r_max` is
    /// rescaled by the same factor so it stays valid.
    pub fn normalized(&self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| Entry::new(e.index, e.magnitude / norm, e.phase))
            .collect();
        let v = Self::new(self.dim, entries, self.sparsity, (self.r_max / norm).min(1.0))?;
        Ok((v, norm))
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &SparseVector) -> Complex64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = Complex64::new(0.0, 0.0);
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            match x.index.cmp(&y.index) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x.value().conj() * y.value();
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn dist_sqr(&self, other: &SparseVector) -> f64 {
        (self.norm_sqr() + other.norm_sqr() - 2.0 * self.inner(other).re).max(0.0)
    }

    /// Location of the `ell`-th slot enumerated by `F`.
    ///
    /// Slots beyond the true support map to the smallest indices outside the
    /// support, in increasing order, so that `ell ↦ f(ell)` stays injective
    /// and the padded branches carry amplitude zero.
    pub fn slot_index(&self, ell: usize) -> Result<usize> {
        if ell >= self.sparsity {
            return Err(Error::OutOfRange {
                what: "sparsity slot",
                index: ell,
                limit: self.sparsity,
            });
        }
        if ell < self.entries.len() {
            return Ok(self.entries[ell].index);
        }
        let mut skip = ell - self.entries.len();
        let mut support = self.entries.iter().map(|e| e.index).peekable();
        for i in 0..self.dim {
            if support.peek() == Some(&i) {
                support.next();
                continue;
            }
            if skip == 0 {
                return Ok(i);
            }
            skip -= 1;
        }
        unreachable!("sparsity never exceeds the dimension")
    }

    /// Slot list `f(0..d)` including padding.
    pub fn slots(&self) -> Vec<usize> {
        (0..self.sparsity)
            .map(|l| self.slot_index(l).expect("slot in range"))
            .collect()
    }
}

/// Query counts against the two oracles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct QueryCount {
    pub o: u64,
    pub f: u64,
}

impl QueryCount {
    pub const ZERO: QueryCount = QueryCount { o: 0, f: 0 };

    pub const fn new(o: u64, f: u64) -> Self {
        QueryCount { o, f }
    }

    pub fn total(&self) -> u64 {
        self.o + self.f
    }
}

impl Add for QueryCount {
    type Output = QueryCount;
    fn add(self, rhs: QueryCount) -> QueryCount {
        QueryCount::new(self.o + rhs.o, self.f + rhs.f)
    }
}

impl AddAssign for QueryCount {
    fn add_assign(&mut self, rhs: QueryCount) {
        self.o += rhs.o;
        self.f += rhs.f;
    }
}

impl Mul<u64> for QueryCount {
    type Output = QueryCount;
    fn mul(self, rhs: u64) -> QueryCount {
        QueryCount::new(self.o * rhs, self.f * rhs)
    }
}

/// Accounting label for a block of queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// Direct oracle reads and state preparation.
    StatePrep,
    /// Amplitude-estimation runs charged outside a search.
    AmplitudeEstimation,
    /// Oracle evaluations inside Grover iterations.
    GroverIteration,
    /// Evaluation of a measured search candidate.
    Verification,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::StatePrep => "state_prep",
            Phase::AmplitudeEstimation => "amplitude_estimation",
            Phase::GroverIteration => "grover_iteration",
            Phase::Verification => "verification",
        };
        f.write_str(s)
    }
}

/// Running count of oracle calls, broken down by phase.
///
/// Totals always equal the sum over the phase map; charges only ever add.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    totals: QueryCount,
    phases: BTreeMap<Phase, QueryCount>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, phase: Phase, count: QueryCount) {
        self.totals += count;
        *self.phases.entry(phase).or_default() += count;
    }

    pub fn o_queries(&self) -> u64 {
        self.totals.o
    }

    pub fn f_queries(&self) -> u64 {
        self.totals.f
    }

    pub fn totals(&self) -> QueryCount {
        self.totals
    }

    pub fn total(&self) -> u64 {
        self.totals.total()
    }

    pub fn phase(&self, phase: Phase) -> QueryCount {
        self.phases.get(&phase).copied().unwrap_or_default()
    }

    pub fn phases(&self) -> impl Iterator<Item = (Phase, QueryCount)> + '_ {
        self.phases.iter().map(|(p, c)| (*p, *c))
    }

    pub fn absorb(&mut self, other: &QueryLedger) {
        for (phase, count) in other.phases() {
            self.charge(phase, count);
        }
    }
}

/// Component-wise sum of two ledgers.
pub fn merge_ledgers(a: &QueryLedger, b: &QueryLedger) -> QueryLedger {
    let mut out = a.clone();
    out.absorb(b);
    out
}

/// Labeled training vectors, optionally grouped into clusters.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    vectors: Vec<SparseVector>,
    labels: Vec<usize>,
    clusters: Option<Vec<Vec<usize>>>,
}

impl TrainingSet {
    pub fn new(vectors: Vec<SparseVector>, labels: Vec<usize>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::contract(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if let Some(first) = vectors.first() {
            if let Some(bad) = vectors.iter().find(|v| v.dim() != first.dim()) {
                return Err(Error::contract(format!(
                    "mixed dimensions {} and {}",
                    first.dim(),
                    bad.dim()
                )));
            }
        }
        Ok(TrainingSet {
            vectors,
            labels,
            clusters: None,
        })
    }

    /// Attaches a partition of the training indices into clusters.
    pub fn with_clusters(mut self, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; self.vectors.len()];
        for c in &clusters {
            if c.is_empty() {
                return Err(Error::contract("clusters must be nonempty"));
            }
            for &j in c {
                if j >= seen.len() {
                    return Err(Error::OutOfRange {
                        what: "training vector",
                        index: j,
                        limit: seen.len(),
                    });
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(Error::contract(format!("vector {j} in two clusters")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::contract("cluster sizes must sum to M"));
        }
        self.clusters = Some(clusters);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(SparseVector::dim)
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn clusters(&self) -> Option<&[Vec<usize>]> {
        self.clusters.as_deref()
    }

    /// Explicit clusters if present, otherwise one cluster per class label in
    /// increasing label order.
    pub fn effective_clusters(&self) -> Vec<Vec<usize>> {
        if let Some(c) = &self.clusters {
            return c.clone();
        }
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (j, &l) in self.labels.iter().enumerate() {
            by_label.entry(l).or_default().push(j);
        }
        by_label.into_values().collect()
    }

    /// Majority label of a cluster, lowest label on ties.
    pub fn cluster_label(&self, members: &[usize]) -> usize {
        mode_lowest(members.iter().map(|&j| self.labels[j]))
    }
}

/// Most frequent value, ties resolved toward the smallest.
pub(crate) fn mode_lowest(items: impl IntoIterator<Item = usize>) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for x in items {
        *counts.entry(x).or_default() += 1;
    }
    let mut best = (0usize, 0usize);
    for (value, count) in counts {
        if count > best.1 {
            best = (value, count);
        }
    }
    best.0
}

/// Oracles `O` and `F` over the test vector and a training set.
#[derive(Debug, Clone, Copy)]
pub struct DataOracle<'a> {
    test: &'a SparseVector,
    training: &'a [SparseVector],
}

impl<'a> DataOracle<'a> {
    pub fn new(test: &'a SparseVector, training: &'a [SparseVector]) -> Self {
        DataOracle { test, training }
    }

    /// Number of training vectors `M`.
    pub fn len(&self) -> usize {
        self.training.len()
    }

    pub fn is_empty(&self) -> bool {
        self.training.is_empty()
    }

    /// Vector `j`, with `j = 0` denoting the test vector.
    pub fn vector(&self, j: usize) -> Result<&'a SparseVector> {
        if j == 0 {
            Ok(self.test)
        } else {
            self.training.get(j - 1).ok_or(Error::OutOfRange {
                what: "vector",
                index: j,
                limit: self.training.len() + 1,
            })
        }
    }

    /// `O|j⟩|i⟩|0⟩ = |j⟩|i⟩|v_ji⟩`.
    pub fn query_o(&self, ledger: &mut QueryLedger, j: usize, i: usize) -> Result<Complex64> {
        let v = self.vector(j)?;
        if i >= v.dim() {
            return Err(Error::OutOfRange {
                what: "component",
                index: i,
                limit: v.dim(),
            });
        }
        ledger.charge(Phase::StatePrep, QueryCount::new(1, 0));
        Ok(v.value(i))
    }

    /// `F|j⟩|ℓ⟩ = |j⟩|f(j, ℓ)⟩`.
    pub fn query_f(&self, ledger: &mut QueryLedger, j: usize, ell: usize) -> Result<usize> {
        let v = self.vector(j)?;
        let idx = v.slot_index(ell)?;
        ledger.charge(Phase::StatePrep, QueryCount::new(0, 1));
        Ok(idx)
    }
}

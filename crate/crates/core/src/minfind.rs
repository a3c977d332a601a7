//! Grover search with an unknown number of marked items and Dürr–Høyer
//! minimum finding on top of it.
//!
//! Searches are simulated at the probability level: after `j` Grover
//! iterations the marked subspace carries probability `sin²((2j+1)θ)`,
//! `sin²θ = m/M`, and a successful measurement returns a uniformly random
//! marked index.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::oracle::{Phase, QueryCount, QueryLedger};
use crate::{Error, Result, EULER_GAMMA};

/// Growth factor of the iteration cap between search rounds.
pub const GROWTH: f64 = 8.0 / 7.0;

/// Grover iterations after which an exact-value minimum search gives up,
/// as a multiple of `√M`.
pub const EXACT_CUTOFF_FACTOR: f64 = 90.0;

/// Expected-iteration bound for learning the minimum, as a multiple of `√M`.
pub const EXPECTED_ITERATIONS_FACTOR: f64 = 22.5;

/// Per-evaluation failure probability that keeps a whole minimum search
/// below `delta0`.
pub fn corruption_budget(m: usize, delta0: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("need at least one candidate"));
    }
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::domain(format!("delta0 {delta0} outside (0, 1)")));
    }
    let m = m as f64;
    Ok(delta0 / (81.0 * m * (m.ln() + EULER_GAMMA)))
}

/// Resource limits of one minimum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_iterations: u64,
    /// Total oracle calls the search may charge before it must stop.
    pub max_queries: Option<u64>,
}

impl Limits {
    /// The fixed iteration cutoff used with exact values.
    pub fn exact(m: usize) -> Self {
        Limits {
            max_iterations: (EXACT_CUTOFF_FACTOR * (m as f64).sqrt()).ceil() as u64,
            max_queries: None,
        }
    }

    /// Stop only when the query budget would be exceeded.
    pub fn budget(max_queries: u64) -> Self {
        Limits {
            max_iterations: u64::MAX,
            max_queries: Some(max_queries),
        }
    }
}

/// Accounting state shared between the searches of one run.
struct Meter<'a> {
    ledger: &'a mut QueryLedger,
    eval_cost: QueryCount,
    iterations: u64,
    limits: Limits,
}

impl Meter<'_> {
    fn fits(&self, extra: QueryCount) -> bool {
        self.limits
            .max_queries
            .is_none_or(|cap| self.ledger.total() + extra.total() <= cap)
    }

    /// Charges `j` Grover iterations (two evaluations each) if allowed.
    fn iterate(&mut self, j: u64) -> bool {
        let cost = self.eval_cost * (2 * j);
        if self.iterations.saturating_add(j) > self.limits.max_iterations || !self.fits(cost) {
            return false;
        }
        self.iterations += j;
        self.ledger.charge(Phase::GroverIteration, cost);
        true
    }

    /// Charges one evaluation of a measured candidate if allowed.
    fn read(&mut self) -> bool {
        if !self.fits(self.eval_cost) {
            return false;
        }
        self.ledger.charge(Phase::Verification, self.eval_cost);
        true
    }
}

/// Result of one exponential search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { index: usize, iterations: u64 },
    Exhausted { iterations: u64 },
}

fn search<R: Rng + ?Sized>(
    rng: &mut R,
    marked: &[usize],
    total: usize,
    meter: &mut Meter<'_>,
) -> SearchOutcome {
    let start = meter.iterations;
    let theta = ((marked.len() as f64 / total as f64).sqrt()).min(1.0).asin();
    let ceiling = (total as f64).sqrt();
    let mut cap = 1.0_f64;
    // Rounds with zero iterations are free of Grover cost, so bound them too.
    let max_rounds = 64 + 4 * meter.limits.max_iterations.min(1 << 40);
    for _ in 0..max_rounds {
        let j = rng.random_range(0..cap.ceil() as u64);
        if !meter.iterate(j) || !meter.read() {
            break;
        }
        let p = ((2 * j + 1) as f64 * theta).sin().powi(2);
        if !marked.is_empty() && rng.random::<f64>() < p {
            let index = *marked.choose(rng).expect("nonempty");
            return SearchOutcome::Found {
                index,
                iterations: meter.iterations - start,
            };
        }
        cap = (cap * GROWTH).min(ceiling);
    }
    SearchOutcome::Exhausted {
        iterations: meter.iterations - start,
    }
}

/// Exponential Grover search for one of the `marked` indices among `total`.
///
/// Each Grover iteration charges two evaluations of cost `eval_cost`; each
/// measured candidate is checked with one more evaluation.
pub fn grover_search_marked<R: Rng + ?Sized>(
    rng: &mut R,
    marked: &[usize],
    total: usize,
    max_iterations: u64,
    ledger: &mut QueryLedger,
    eval_cost: QueryCount,
) -> Result<SearchOutcome> {
    if total == 0 || marked.len() > total || marked.iter().any(|&i| i >= total) {
        return Err(Error::contract("marked set must be a subset of the candidates"));
    }
    let mut meter = Meter {
        ledger,
        eval_cost,
        iterations: 0,
        limits: Limits {
            max_iterations,
            max_queries: None,
        },
    };
    Ok(search(rng, marked, total, &mut meter))
}

/// Result of a minimum search.
#[derive(Debug, Clone, PartialEq)]
pub struct MinFindResult {
    pub argmin: usize,
    pub value: f64,
    pub grover_iterations: u64,
    pub searches: u64,
    /// Some evaluation returned a corrupted value.
    pub failure_flag: bool,
    /// The run hit its iteration or query limit before the threshold
    /// reached the minimum.
    pub aborted: bool,
    pub ledger: QueryLedger,
}

fn precedes(values: &[f64], a: usize, b: usize) -> bool {
    values[a] < values[b] || (values[a] == values[b] && a < b)
}

/// Dürr–Høyer minimum finding over `values`, ties toward the lowest index.
///
/// The loop stops once no index beats the threshold, i.e. at the point the
/// minimum has been learned, or when `limits` are hit.
pub fn durr_hoyer_min<R: Rng + ?Sized>(
    rng: &mut R,
    values: &[f64],
    eval_cost: QueryCount,
    limits: Limits,
) -> Result<MinFindResult> {
    if values.is_empty() {
        return Err(Error::domain("minimum of an empty list"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("values must not be NaN"));
    }
    let mut ledger = QueryLedger::new();
    let mut meter = Meter {
        ledger: &mut ledger,
        eval_cost,
        iterations: 0,
        limits,
    };
    let mut threshold = rng.random_range(0..values.len());
    let mut aborted = !meter.read();
    let mut searches = 0;
    while !aborted {
        let marked: Vec<usize> = (0..values.len())
            .filter(|&j| precedes(values, j, threshold))
            .collect();
        if marked.is_empty() {
            break;
        }
        searches += 1;
        match search(rng, &marked, values.len(), &mut meter) {
            SearchOutcome::Found { index, .. } => threshold = index,
            SearchOutcome::Exhausted { .. } => aborted = true,
        }
    }
    let grover_iterations = meter.iterations;
    Ok(MinFindResult {
        argmin: threshold,
        value: values[threshold],
        grover_iterations,
        searches,
        failure_flag: false,
        aborted,
        ledger,
    })
}

/// One evaluation of an approximate value oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub corrupted: bool,
}

/// Source of per-candidate estimates for [`min_with_approximate_oracle`].
pub trait ValueOracle {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Oracle calls charged for one coherent evaluation.
    fn evaluation_cost(&self) -> QueryCount;

    fn estimate<R: Rng + ?Sized>(&self, rng: &mut R, j: usize) -> Result<Estimate>;
}

/// Error-free values at a fixed per-evaluation cost.
#[derive(Debug, Clone)]
pub struct ExactValues {
    pub values: Vec<f64>,
    pub cost: QueryCount,
}

impl ValueOracle for ExactValues {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn evaluation_cost(&self) -> QueryCount {
        self.cost
    }

    fn estimate<R: Rng + ?Sized>(&self, _rng: &mut R, j: usize) -> Result<Estimate> {
        Ok(Estimate {
            value: self.values[j],
            corrupted: false,
        })
    }
}

/// Draws one estimate per candidate. The coherent oracle is deterministic up
/// to its failure probability, so a run reuses these values for every Grover
/// iteration; the flag reports whether any of them was corrupted.
pub fn draw_estimates<R: Rng + ?Sized, O: ValueOracle>(
    rng: &mut R,
    oracle: &O,
) -> Result<(Vec<f64>, bool)> {
    let mut values = Vec::with_capacity(oracle.len());
    let mut corrupted = false;
    for j in 0..oracle.len() {
        let e = oracle.estimate(rng, j)?;
        corrupted |= e.corrupted;
        values.push(e.value);
    }
    Ok((values, corrupted))
}

/// Minimum search where every candidate value comes from an approximate
/// coherent oracle. Returns the result and the values it searched over.
pub fn min_with_approximate_oracle<R: Rng + ?Sized, O: ValueOracle>(
    rng: &mut R,
    oracle: &O,
    limits: Limits,
) -> Result<(MinFindResult, Vec<f64>)> {
    let (values, corrupted) = draw_estimates(rng, oracle)?;
    let mut result = durr_hoyer_min(rng, &values, oracle.evaluation_cost(), limits)?;
    result.failure_flag = corrupted;
    Ok((result, values))
}

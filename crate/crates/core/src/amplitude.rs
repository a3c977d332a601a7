//! Amplitude estimation with an exact outcome distribution.
//!
//! Phase estimation of the Grover operator only ever sees the two eigenphases
//! `±θ`, `a = sin²θ`, so the outcome law over an `R`-point register is a
//! mixture of two Fejér kernels. Sampling inverts that law directly, walking
//! outward from the kernel peak, which costs `O(log R)` kernel evaluations on
//! average instead of `O(R)`.

use std::f64::consts::PI;

use rand::Rng;

use crate::oracle::{Phase, QueryCount, QueryLedger};
use crate::{Error, Result};

/// Grover-iteration oracle costs of the distance circuits.
pub mod cost {
    use crate::oracle::QueryCount;

    /// Swap test on two density states: two preparations and their inverses.
    pub const INNER_PRODUCT: QueryCount = QueryCount::new(8, 4);
    /// Centroid distance only.
    pub const DISTANCE: QueryCount = QueryCount::new(2, 2);
    /// Intra-cluster variance only.
    pub const VARIANCE: QueryCount = QueryCount::new(4, 2);
    /// Distance and variance evaluated together.
    pub const DISTANCE_AND_VARIANCE: QueryCount = QueryCount::new(6, 4);
}

/// Which distance circuit a register size is chosen for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    InnerProduct,
    Euclidean,
}

/// Register size giving additive error `epsilon` on the recovered quantity.
pub fn required_register(
    epsilon: f64,
    d: usize,
    r0_max: f64,
    rj_max: f64,
    method: Method,
) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = d as f64;
    let c = PI * (PI + 1.0);
    let raw = match method {
        Method::InnerProduct => 4.0 * c * d * d * r0_max.powi(2) * rj_max.powi(2) / epsilon,
        Method::Euclidean => 8.0 * c * d * r0_max.max(rj_max).powi(2) / epsilon,
    };
    Ok(raw.ceil().max(1.0) as u64)
}

/// Median copies needed so that the vote fails with probability at most
/// `delta` when each copy is right with probability `a0`.
pub fn required_copies(delta: f64, a0: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("failure budget {delta} outside (0, 1)")));
    }
    if !(a0 > 0.5 && a0 <= 1.0) {
        return Err(Error::domain(format!("success amplitude {a0} outside (1/2, 1]")));
    }
    let k = (1.0 / delta).ln() / (2.0 * (a0 - 0.5).powi(2));
    Ok(k.ceil().max(1.0) as u64)
}

/// Parameters of one coherent estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeConfig {
    pub register: u64,
    pub copies: u64,
    pub grover_cost: QueryCount,
    pub a0: f64,
}

impl AeConfig {
    pub fn new(register: u64, copies: u64, grover_cost: QueryCount, a0: f64) -> Result<Self> {
        if register == 0 || copies == 0 {
            return Err(Error::domain("register size and copies must be positive"));
        }
        if !(a0 > 0.5 && a0 <= 1.0) {
            return Err(Error::domain(format!("success amplitude {a0} outside (1/2, 1]")));
        }
        Ok(AeConfig {
            register,
            copies,
            grover_cost,
            a0,
        })
    }

    /// Oracle calls of one coherent estimate: compute and uncompute of `k`
    /// runs with `R` Grover iterations each.
    pub fn evaluation_cost(&self) -> QueryCount {
        self.grover_cost * (2 * self.copies * self.register)
    }
}

/// Result of one estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeOutcome {
    pub y: u64,
    pub a_hat: f64,
    pub true_a: f64,
    /// Probability that the reported outcome lies in the admissible set.
    pub median_fidelity: f64,
    /// Whether this particular outcome lies in the admissible set.
    pub admissible: bool,
}

/// Normalized Fejér kernel at an offset of `x` grid bins, `R` bins total.
fn kernel(x: f64, r: f64) -> f64 {
    if x.fract() == 0.0 {
        return if x.rem_euclid(r) == 0.0 { 1.0 } else { 0.0 };
    }
    let den = (PI * x / r).sin();
    if den.abs() < 1e-14 {
        return 1.0;
    }
    let num = (PI * x).sin();
    (num * num) / (r * r * den * den)
}

/// Exact distribution of a single estimate for a fixed `(a, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeLaw {
    pub a: f64,
    pub register: u64,
    /// `ωR` with `ω = asin(√a)/π`.
    center: f64,
}

impl AeLaw {
    pub fn new(a: f64, register: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::domain(format!("amplitude {a} outside [0, 1]")));
        }
        if register == 0 {
            return Err(Error::domain("register size must be positive"));
        }
        let omega = a.sqrt().asin() / PI;
        Ok(AeLaw {
            a,
            register,
            center: omega * register as f64,
        })
    }

    pub fn probability(&self, y: u64) -> f64 {
        let r = self.register as f64;
        let y = y as f64;
        0.5 * (kernel(y - self.center, r) + kernel(y + self.center, r))
    }

    pub fn fold(&self, y: u64) -> u64 {
        y.min(self.register - y)
    }

    pub fn estimate(&self, y: u64) -> f64 {
        (PI * y as f64 / self.register as f64).sin().powi(2)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let r = self.register as f64;
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let c = sign * self.center;
        let u: f64 = rng.random();
        let y0 = c.floor();
        let mut acc = 0.0;
        let mut y = y0;
        for step in 0..self.register {
            // y0, y0+1, y0−1, y0+2, … covers R consecutive integers.
            let off = (step as f64 + 1.0) / 2.0;
            y = if step % 2 == 1 { y0 + off.floor() } else { y0 - off.floor() };
            acc += kernel(y - c, r);
            if acc > u {
                break;
            }
        }
        y.rem_euclid(r) as u64
    }

    /// Folded mode `ŷ*`, the likelier of the two grid points around `ωR`.
    pub fn folded_mode(&self) -> u64 {
        let lo = self.center.floor() as u64;
        let hi = self.center.ceil() as u64;
        let y = if hi >= self.register || self.probability(lo) >= self.probability(hi) {
            lo
        } else {
            hi
        };
        self.fold(y % self.register)
    }

    /// Folded admissible interval `[ŷ* − 1, ŷ* + 1]`.
    pub fn admissible(&self) -> (u64, u64) {
        let m = self.folded_mode();
        (m.saturating_sub(1), (m + 1).min(self.register / 2))
    }

    pub fn is_admissible(&self, folded: u64) -> bool {
        let (lo, hi) = self.admissible();
        (lo..=hi).contains(&folded)
    }

    /// Probability that one outcome folds into the admissible interval.
    pub fn admissible_mass(&self) -> f64 {
        let (lo, hi) = self.admissible();
        (lo..=hi)
            .map(|f| {
                let p = self.probability(f);
                let mirror = self.register - f;
                if f == 0 || mirror == f {
                    p
                } else {
                    p + self.probability(mirror)
                }
            })
            .sum::<f64>()
            .min(1.0)
    }

    /// Masses folding strictly below and strictly above the admissible
    /// interval. Costs `O(R)`.
    pub fn tail_masses(&self) -> (f64, f64) {
        let (lo, hi) = self.admissible();
        let (mut below, mut above) = (0.0, 0.0);
        for y in 0..self.register {
            let f = self.fold(y);
            if f < lo {
                below += self.probability(y);
            } else if f > hi {
                above += self.probability(y);
            }
        }
        (below, above)
    }

    /// Exact probability that the lower median of `k` folded outcomes is
    /// admissible.
    pub fn median_fidelity(&self, k: u64) -> f64 {
        let (below, above) = self.tail_masses();
        let m = (k - 1) / 2;
        let fail = binomial_upper_tail(k, below, m + 1) + binomial_upper_tail(k, above, k - m);
        (1.0 - fail).clamp(0.0, 1.0)
    }

    /// Lower median of `k` folded samples.
    pub fn sample_median<R: Rng + ?Sized>(&self, rng: &mut R, k: u64) -> u64 {
        let mut ys: Vec<u64> = (0..k).map(|_| self.fold(self.sample(rng))).collect();
        ys.sort_unstable();
        ys[((k - 1) / 2) as usize]
    }
}

/// `P(Bin(n, p) ≥ t)`.
pub fn binomial_upper_tail(n: u64, p: f64, t: u64) -> f64 {
    if t == 0 {
        return 1.0;
    }
    if t > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_choose = ln_choose(n, t);
    let mut total = 0.0;
    for i in t..=n {
        if i > t {
            // C(n, i) = C(n, i−1)·(n−i+1)/i
            log_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        total += (log_choose + i as f64 * lp + (n - i) as f64 * lq).exp();
    }
    total.min(1.0)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Hoeffding lower bound on the median fidelity.
pub fn hoeffding_fidelity(k: u64, p: f64) -> f64 {
    1.0 - (-2.0 * k as f64 * (p - 0.5).powi(2)).exp()
}

/// Outcome distribution over `y ∈ [0, R)`.
pub fn ae_outcome_distribution(a: f64, register: u64) -> Result<Vec<f64>> {
    let law = AeLaw::new(a, register)?;
    Ok((0..register).map(|y| law.probability(y)).collect())
}

/// One measured estimate, charging `R` Grover iterations.
pub fn sample_ae<R: Rng + ?Sized>(
    rng: &mut R,
    a: f64,
    register: u64,
    ledger: &mut QueryLedger,
    grover_cost: QueryCount,
) -> Result<AeOutcome> {
    let law = AeLaw::new(a, register)?;
    let y = law.sample(rng);
    ledger.charge(Phase::AmplitudeEstimation, grover_cost * register);
    Ok(AeOutcome {
        y,
        a_hat: law.estimate(y),
        true_a: a,
        median_fidelity: law.admissible_mass(),
        admissible: law.is_admissible(law.fold(y)),
    })
}

/// Median of `k` estimates, charged as the measurement-free vote
/// (`2kR` Grover iterations). The fidelity is computed exactly.
pub fn coherent_ae<R: Rng + ?Sized>(
    rng: &mut R,
    a: f64,
    register: u64,
    copies: u64,
    ledger: &mut QueryLedger,
    grover_cost: QueryCount,
) -> Result<AeOutcome> {
    if copies == 0 {
        return Err(Error::domain("at least one copy is required"));
    }
    let law = AeLaw::new(a, register)?;
    let y = law.sample_median(rng, copies);
    ledger.charge(
        Phase::AmplitudeEstimation,
        grover_cost * (2 * copies * register),
    );
    Ok(AeOutcome {
        y,
        a_hat: law.estimate(y),
        true_a: a,
        median_fidelity: law.median_fidelity(copies),
        admissible: law.is_admissible(y),
    })
}

/// Error bound `2π√(a(1−a))/R + π²/R²` met by a single estimate with
/// probability at least 8/π².
pub fn single_run_error_bound(a: f64, register: u64) -> f64 {
    let r = register as f64;
    2.0 * PI * (a * (1.0 - a)).sqrt() / r + (PI / r).powi(2)
}

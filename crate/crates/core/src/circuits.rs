//! Exact success probabilities of the distance circuits.
//!
//! Everything here is evaluated at the probability level. The swap-test path
//! can additionally be replayed gate by gate on a dense statevector through
//! [`statevector_validate`].

use num_complex::Complex64;

use crate::oracle::{DataOracle, Phase, QueryCount, QueryLedger, SparseVector};
use crate::statevector::{self, StateVector};
use crate::{Error, Result};

/// Tolerance for the probability identities checked at run time.
pub const PROBABILITY_TOL: f64 = 1e-10;

/// Shared state-preparation parameters for a group of vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encoding {
    pub sparsity: usize,
    pub r_max: f64,
}

impl Encoding {
    pub fn new(sparsity: usize, r_max: f64) -> Result<Self> {
        if sparsity == 0 || !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::contract(format!(
                "invalid encoding d={sparsity}, r_max={r_max}"
            )));
        }
        Ok(Encoding { sparsity, r_max })
    }

    /// Smallest encoding valid for every vector: the largest declared
    /// sparsity and the largest component magnitude actually present.
    pub fn covering<'a>(vectors: impl IntoIterator<Item = &'a SparseVector>) -> Result<Self> {
        let mut d = 0;
        let mut r = 0.0_f64;
        for v in vectors {
            d = d.max(v.sparsity());
            for e in v.entries() {
                r = r.max(e.magnitude);
            }
        }
        if d == 0 {
            return Err(Error::domain("cannot encode an empty vector set"));
        }
        Encoding::new(d, if r > 0.0 { r } else { 1.0 })
    }

    fn admits(&self, v: &SparseVector) -> Result<()> {
        if v.support_len() > self.sparsity || self.sparsity > v.dim() {
            return Err(Error::contract(format!(
                "vector with {} nonzeros in dimension {} does not fit sparsity {}",
                v.support_len(),
                v.dim(),
                self.sparsity
            )));
        }
        if v.entries().iter().any(|e| e.magnitude > self.r_max * (1.0 + 1e-12)) {
            return Err(Error::contract("component exceeds the encoding r_max"));
        }
        Ok(())
    }

    /// Scale `4 d r_max²` that converts circuit probabilities to squared
    /// distances.
    pub fn distance_scale(&self) -> f64 {
        4.0 * self.sparsity as f64 * self.r_max * self.r_max
    }
}

/// Which of the two trailing qubits carries the component amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagPlacement {
    /// `|i⟩|value⟩|1⟩`, used for the training vector.
    ValueThenFlag,
    /// `|i⟩|1⟩|value⟩`, used for the test vector.
    FlagThenValue,
}

/// Amplitudes on one index branch: `(√(1−r²/r_max²) e^{−iφ}, (r/r_max) e^{iφ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub index: usize,
    pub amplitudes: [Complex64; 2],
}

impl Branch {
    fn new(index: usize, value: Complex64, r_max: f64) -> Self {
        let (r, phi) = value.to_polar();
        let s = (r / r_max).min(1.0);
        let c = (1.0 - s * s).max(0.0).sqrt();
        Branch {
            index,
            amplitudes: [Complex64::from_polar(c, -phi), Complex64::from_polar(s, phi)],
        }
    }
}

/// Output of the density state preparation for one vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub sparsity: usize,
    pub r_max: f64,
    pub placement: FlagPlacement,
    pub branches: Vec<Branch>,
}

impl DensityState {
    fn of(v: &SparseVector, placement: FlagPlacement) -> Self {
        let branches = v
            .slots()
            .into_iter()
            .map(|i| Branch::new(i, v.value(i), v.r_max()))
            .collect();
        DensityState {
            sparsity: v.sparsity(),
            r_max: v.r_max(),
            placement,
            branches,
        }
    }

    /// Two-qubit state of the trailing pair on one branch, indexed by
    /// `first + 2·second` in register order.
    fn local(&self, b: &Branch) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        let [a0, a1] = b.amplitudes;
        match self.placement {
            FlagPlacement::ValueThenFlag => [z, z, a0, a1],
            FlagPlacement::FlagThenValue => [z, a0, z, a1],
        }
    }
}

/// The two states entering the swap test.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedStatePair {
    pub psi: DensityState,
    pub phi: DensityState,
}

impl PreparedStatePair {
    /// Builds `|ψ⟩` from the training vector and `|φ⟩` from the test vector.
    pub fn new(test: &SparseVector, training: &SparseVector) -> Result<Self> {
        if test.dim() != training.dim() {
            return Err(Error::contract("vectors must share a dimension"));
        }
        if test.sparsity() != training.sparsity() {
            return Err(Error::contract("vectors must share a declared sparsity"));
        }
        Ok(PreparedStatePair {
            psi: DensityState::of(training, FlagPlacement::ValueThenFlag),
            phi: DensityState::of(test, FlagPlacement::FlagThenValue),
        })
    }

    /// `⟨φ|ψ⟩`.
    pub fn overlap(&self) -> Complex64 {
        let d = self.psi.sparsity as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for bp in &self.psi.branches {
            if let Some(bf) = self.phi.branches.iter().find(|b| b.index == bp.index) {
                let lp = self.psi.local(bp);
                let lf = self.phi.local(bf);
                acc += lf.iter().zip(&lp).map(|(f, p)| f.conj() * p).sum::<Complex64>();
            }
        }
        acc / d
    }
}

/// Runs the density state preparation for vector `j` and charges its three
/// oracle calls.
pub fn prepare_density_state(
    oracle: &DataOracle<'_>,
    ledger: &mut QueryLedger,
    j: usize,
    placement: FlagPlacement,
) -> Result<DensityState> {
    let v = oracle.vector(j)?;
    ledger.charge(Phase::StatePrep, QueryCount::new(2, 1));
    Ok(DensityState::of(v, placement))
}

fn require_unit(v: &SparseVector) -> Result<()> {
    if v.is_unit() {
        Ok(())
    } else {
        Err(Error::contract(format!(
            "expected a unit vector, squared norm is {}",
            v.norm_sqr()
        )))
    }
}

/// Probability of reading 0 on the swap-test ancilla.
pub fn swap_test_probability(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    require_unit(u)?;
    require_unit(v)?;
    let pair = PreparedStatePair::new(u, v)?;
    Ok(0.5 * (1.0 + pair.overlap().norm_sqr()))
}

/// `|⟨u|v⟩|²` from a swap-test probability.
pub fn recover_inner_product_sq(a: f64, d: usize, r0_max: f64, rj_max: f64) -> Result<f64> {
    if !(a >= 0.5 - PROBABILITY_TOL && a <= 1.0 + PROBABILITY_TOL) {
        return Err(Error::domain(format!(
            "swap-test probability {a} outside [1/2, 1]"
        )));
    }
    Ok(clamped_inner_product_sq(a, d, r0_max, rj_max))
}

/// Same as [`recover_inner_product_sq`] but clamps estimates below `1/2`
/// to zero instead of failing; estimated probabilities can land there.
pub fn clamped_inner_product_sq(a: f64, d: usize, r0_max: f64, rj_max: f64) -> f64 {
    let d = d as f64;
    ((2.0 * a - 1.0).max(0.0) * d * d * r0_max * r0_max * rj_max * rj_max).max(0.0)
}

/// Maps a unit vector to `(|0⟩|0⟩ + |1⟩|v⟩)/√2` in dimension `2N`.
pub fn sign_recovering_embed(v: &SparseVector) -> Result<SparseVector> {
    require_unit(v)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let n = v.dim();
    let mut entries = Vec::with_capacity(v.support_len() + 1);
    entries.push(crate::oracle::Entry::new(0, h, 0.0));
    for e in v.entries() {
        entries.push(crate::oracle::Entry::new(n + e.index, e.magnitude * h, e.phase));
    }
    SparseVector::new(2 * n, entries, v.sparsity() + 1, h.max(v.r_max() * h))
}

/// Signed inner product from the squared overlap of two embedded vectors,
/// `|⟨ũ|ṽ⟩|² = |1 + ⟨u|v⟩|²/4`.
pub fn signed_inner_product(embedded_sq: f64) -> f64 {
    2.0 * embedded_sq.max(0.0).sqrt() - 1.0
}

/// First column of `V = e^{−iHt}` for a Hermitian unitary `H` whose first
/// column is uniform over `M + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct VWeights {
    pub m: usize,
    pub t: f64,
    pub amplitudes: Vec<Complex64>,
}

impl VWeights {
    /// `|V_{j0}|²`.
    pub fn weight(&self, j: usize) -> f64 {
        self.amplitudes[j].norm_sqr()
    }
}

pub fn synthesize_v(m: usize) -> Result<VWeights> {
    if m == 0 {
        return Err(Error::domain("V needs at least one training vector"));
    }
    let mf = m as f64;
    let t = ((mf + 1.0) / (2.0 * mf)).sqrt().min(1.0).asin();
    let h = 1.0 / (mf + 1.0).sqrt();
    let (s, c) = t.sin_cos();
    let mut amplitudes = Vec::with_capacity(m + 1);
    amplitudes.push(Complex64::new(c, -s * h));
    amplitudes.extend(std::iter::repeat_n(Complex64::new(0.0, -s * h), m));
    Ok(VWeights { m, t, amplitudes })
}

fn check_group(enc: &Encoding, dim: usize, vs: &[&SparseVector]) -> Result<()> {
    for v in vs {
        if v.dim() != dim {
            return Err(Error::contract("vectors must share a dimension"));
        }
        enc.admits(v)?;
    }
    Ok(())
}

/// `Σ_j |V_{j0}|² v_j` with `v_0 = −u`, as a dense vector.
fn weighted_sum(u: &SparseVector, cluster: &[&SparseVector], w: &VWeights) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); u.dim()];
    for e in u.entries() {
        acc[e.index] -= w.weight(0) * e.value();
    }
    for (j, v) in cluster.iter().enumerate() {
        let wj = w.weight(j + 1);
        for e in v.entries() {
            acc[e.index] += wj * e.value();
        }
    }
    acc
}

/// Success probability of the centroid-distance circuit,
/// `|u − mean(cluster)|² / (4 d r_max²)`.
///
/// Vectors need not be normalized, only bounded componentwise by `r_max`.
pub fn euclidean_probability(
    u: &SparseVector,
    cluster: &[&SparseVector],
    enc: &Encoding,
) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::domain("empty cluster"));
    }
    check_group(enc, u.dim(), &[u])?;
    check_group(enc, u.dim(), cluster)?;
    let w = synthesize_v(cluster.len())?;
    let acc = weighted_sum(u, cluster, &w);
    let p: f64 = acc.iter().map(Complex64::norm_sqr).sum();
    Ok((p / (enc.sparsity as f64 * enc.r_max * enc.r_max)).min(1.0))
}

/// Success probability of the intra-cluster variance circuit,
/// `σ / (4 d r_max²)` with `σ` the mean squared deviation from the centroid.
pub fn intra_cluster_variance_probability(
    cluster: &[&SparseVector],
    enc: &Encoding,
) -> Result<f64> {
    let Some(first) = cluster.first() else {
        return Err(Error::domain("empty cluster"));
    };
    check_group(enc, first.dim(), cluster)?;
    let w = synthesize_v(cluster.len())?;
    // Twice the V-weighted sum over training branches is the centroid.
    let mut centroid = vec![Complex64::new(0.0, 0.0); first.dim()];
    for (j, v) in cluster.iter().enumerate() {
        let wj = 2.0 * w.weight(j + 1);
        for e in v.entries() {
            centroid[e.index] += wj * e.value();
        }
    }
    let norm = enc.sparsity as f64 * enc.r_max * enc.r_max;
    let mut total = 0.0;
    for v in cluster {
        let mut dev = centroid.clone();
        for e in v.entries() {
            dev[e.index] -= e.value();
        }
        total += 0.25 * dev.iter().map(Complex64::norm_sqr).sum::<f64>() / norm;
    }
    Ok((total / cluster.len() as f64).min(1.0))
}

/// Analytic versus gate-level swap-test probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub qubits: usize,
    pub analytic: f64,
    pub simulated: f64,
}

impl ValidationReport {
    pub fn difference(&self) -> f64 {
        (self.analytic - self.simulated).abs()
    }
}

pub const DEFAULT_MAX_QUBITS: usize = 16;

/// Replays the swap-test circuit on a dense statevector and compares with
/// [`swap_test_probability`].
pub fn statevector_validate(
    u: &SparseVector,
    v: &SparseVector,
    max_qubits: usize,
) -> Result<ValidationReport> {
    let analytic = swap_test_probability(u, v)?;
    let n_idx = index_qubits(u.dim());
    let qubits = 1 + 2 * (n_idx + 2);
    if qubits > max_qubits {
        return Err(Error::RegisterTooLarge {
            qubits,
            limit: max_qubits,
        });
    }
    let mut sv = StateVector::zero(qubits);
    let psi: Vec<usize> = (1..n_idx + 3).collect();
    let phi: Vec<usize> = (n_idx + 3..qubits).collect();
    // ψ block: [idx.., value, flag]; φ block: [idx.., flag, value].
    prepare_block(&mut sv, &psi[..n_idx], psi[n_idx], psi[n_idx + 1], v);
    prepare_block(&mut sv, &phi[..n_idx], phi[n_idx + 1], phi[n_idx], u);
    let h = statevector::hadamard();
    let cswap = statevector::cswap();
    sv.apply(&[0], &h);
    for (&a, &b) in psi.iter().zip(&phi) {
        sv.apply(&[0, a, b], &cswap);
    }
    sv.apply(&[0], &h);
    let report = ValidationReport {
        qubits,
        analytic,
        simulated: sv.prob_zero(0),
    };
    if report.difference() > PROBABILITY_TOL {
        return Err(Error::ValidationMismatch {
            analytic: report.analytic,
            simulated: report.simulated,
        });
    }
    Ok(report)
}

fn index_qubits(dim: usize) -> usize {
    let mut n = 0;
    while (1usize << n) < dim {
        n += 1;
    }
    n
}

fn prepare_block(sv: &mut StateVector, idx: &[usize], value: usize, flag: usize, v: &SparseVector) {
    let size = 1usize << idx.len();
    let d = v.sparsity();
    if !idx.is_empty() {
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        let target: Vec<Complex64> = (0..size)
            .map(|l| if l < d { amp } else { Complex64::new(0.0, 0.0) })
            .collect();
        sv.apply(idx, &statevector::reflection_from_zero(&target));

        // F on slots, completed to a permutation of the whole register.
        let slots = v.slots();
        let mut used = vec![false; size];
        for &s in &slots {
            used[s] = true;
        }
        let mut rest = (0..size).filter(|i| !used[*i]);
        let perm: Vec<usize> = (0..size)
            .map(|l| if l < d { slots[l] } else { rest.next().expect("bijection") })
            .collect();
        sv.apply(idx, &statevector::permutation_gate(size, |l| perm[l]));
    }

    // R_z(2φ) R_y(2 asin(r/r_max)) on the value qubit, controlled by index.
    let blocks: Vec<[[Complex64; 2]; 2]> = (0..size)
        .map(|i| {
            let z = if i < v.dim() { v.value(i) } else { Complex64::new(0.0, 0.0) };
            let (r, phi) = z.to_polar();
            let s = (r / v.r_max()).min(1.0);
            let c = (1.0 - s * s).max(0.0).sqrt();
            let em = Complex64::from_polar(1.0, -phi);
            let ep = Complex64::from_polar(1.0, phi);
            [[em * c, -em * s], [ep * s, ep * c]]
        })
        .collect();
    let mut targets = vec![value];
    targets.extend_from_slice(idx);
    sv.apply(&targets, &statevector::multiplexed(&blocks));
    sv.apply(&[flag], &statevector::pauli_x());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Entry;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn unit(dim: usize, entries: &[(usize, f64, f64)], d: usize) -> SparseVector {
        let norm: f64 = entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        let es: Vec<Entry> = entries
            .iter()
            .map(|&(i, r, p)| Entry::new(i, r / norm, p))
            .collect();
        let rmax = es.iter().map(|e| e.magnitude).fold(0.0, f64::max);
        SparseVector::new(dim, es, d, rmax).unwrap()
    }

    #[test]
    fn density_state_branches() {
        let e1 = SparseVector::basis(4, 0).unwrap();
        let s = DensityState::of(&e1, FlagPlacement::ValueThenFlag);
        assert_eq!(s.branches.len(), 1);
        assert!(s.branches[0].amplitudes[0].norm() < 1e-15);
        assert!((s.branches[0].amplitudes[1].re - 1.0).abs() < 1e-15);

        let half = SparseVector::new(4, vec![Entry::new(1, 0.5, 0.0)], 1, 1.0).unwrap();
        let b = DensityState::of(&half, FlagPlacement::ValueThenFlag).branches[0];
        assert!((b.amplitudes[0].re - 0.75_f64.sqrt()).abs() < 1e-15);
        assert!((b.amplitudes[1].re - 0.5).abs() < 1e-15);
        let n: f64 = b.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);

        let training = vec![half.clone()];
        let oracle = DataOracle::new(&e1, &training);
        let mut ledger = QueryLedger::new();
        prepare_density_state(&oracle, &mut ledger, 1, FlagPlacement::ValueThenFlag).unwrap();
        assert_eq!(ledger.totals(), QueryCount::new(2, 1));
    }

    #[test]
    fn swap_test_examples() {
        let e1 = SparseVector::basis(4, 0).unwrap();
        let e2 = SparseVector::basis(4, 1).unwrap();
        let a = swap_test_probability(&e1, &e1).unwrap();
        assert!((recover_inner_product_sq(a, 1, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test_probability(&e1, &e2).unwrap() - 0.5).abs() < 1e-15);

        let u = SparseVector::new(
            4,
            vec![Entry::new(0, FRAC_1_SQRT_2, 0.0), Entry::new(1, FRAC_1_SQRT_2, 0.0)],
            2,
            FRAC_1_SQRT_2,
        )
        .unwrap();
        let v = e1.with_sparsity(2).unwrap();
        let a = swap_test_probability(&u, &v).unwrap();
        assert!((a - 5.0 / 8.0).abs() < 1e-12);
        // (2a − 1) d² r0² rj² = ¼ · 4 · ½ = ½ = |⟨u|v⟩|².
        let ip = recover_inner_product_sq(a, 2, FRAC_1_SQRT_2, 1.0).unwrap();
        assert!((ip - 0.5).abs() < 1e-12);
        assert!((ip - u.inner(&v).norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn swap_test_rejects_non_unit() {
        let v = SparseVector::new(4, vec![Entry::new(0, 0.5, 0.0)], 1, 1.0).unwrap();
        assert!(matches!(swap_test_probability(&v, &v), Err(Error::Contract(_))));
        assert!(matches!(
            recover_inner_product_sq(0.4, 1, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert_eq!(recover_inner_product_sq(0.5, 3, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(recover_inner_product_sq(1.0, 1, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn embedding_examples() {
        let e1 = SparseVector::basis(4, 0).unwrap();
        let emb = sign_recovering_embed(&e1).unwrap();
        assert_eq!(emb.dim(), 8);
        let es = emb.entries();
        assert_eq!((es[0].index, es[1].index), (0, 4));
        assert!((es[0].magnitude - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((es[1].magnitude - FRAC_1_SQRT_2).abs() < 1e-15);

        let neg = SparseVector::new(4, vec![Entry::new(0, 1.0, PI)], 1, 1.0).unwrap();
        let en = sign_recovering_embed(&neg).unwrap();
        assert!(emb.inner(&en).norm_sqr() < 1e-30);
        assert!((emb.inner(&emb).norm_sqr() - 1.0).abs() < 1e-12);
        let a = swap_test_probability(&emb, &emb).unwrap();
        let sq = recover_inner_product_sq(a, 2, FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert!((signed_inner_product(sq) - 1.0).abs() < 1e-12);
    }

    /// `e^{−iHt}` by Taylor series, with `H` the Sylvester–Hadamard matrix.
    fn hadamard_exp_first_column(m_qubits: u32, t: f64) -> Vec<Complex64> {
        let n = 1usize << m_qubits;
        let scale = 1.0 / (n as f64).sqrt();
        let h = |r: usize, c: usize| {
            let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            sign * scale
        };
        let mut term = vec![Complex64::new(0.0, 0.0); n];
        term[0] = Complex64::new(1.0, 0.0);
        let mut sum = term.clone();
        for k in 1..80 {
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for (r, x) in next.iter_mut().enumerate() {
                for (c, y) in term.iter().enumerate() {
                    *x += h(r, c) * y;
                }
                *x *= Complex64::new(0.0, -t) / k as f64;
            }
            term = next;
            for (s, x) in sum.iter_mut().zip(&term) {
                *s += x;
            }
        }
        sum
    }

    #[test]
    fn v_matches_matrix_exponential() {
        for q in 1..=5u32 {
            let m = (1usize << q) - 1;
            let w = synthesize_v(m).unwrap();
            let oracle = hadamard_exp_first_column(q, w.t);
            for (x, y) in w.amplitudes.iter().zip(&oracle) {
                assert!((x - y).norm() < 1e-12, "M={m}");
            }
        }
    }

    #[test]
    fn v_weight_profile() {
        let w1 = synthesize_v(1).unwrap();
        assert!((w1.amplitudes[0].norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((w1.amplitudes[1].norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        let w4 = synthesize_v(4).unwrap();
        for j in 1..=4 {
            assert!((w4.amplitudes[j].norm() - 8f64.sqrt().recip()).abs() < 1e-12);
        }
        for m in 1..=1024 {
            let w = synthesize_v(m).unwrap();
            let total: f64 = (0..=m).map(|j| w.weight(j)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((w.weight(0) - 0.5).abs() < 1e-12);
            assert!((w.weight(m) - 0.5 / m as f64).abs() < 1e-12);
        }
        assert!(synthesize_v(0).is_err());
    }

    #[test]
    fn euclidean_examples() {
        let e1 = SparseVector::basis(4, 0).unwrap();
        let e2 = SparseVector::basis(4, 1).unwrap();
        let enc = Encoding::new(1, 1.0).unwrap();
        assert!(euclidean_probability(&e1, &[&e1], &enc).unwrap().abs() < 1e-15);
        assert!((euclidean_probability(&e1, &[&e2], &enc).unwrap() - 0.5).abs() < 1e-15);
        let a = euclidean_probability(&e1, &[&e1, &e2], &enc).unwrap();
        assert!((a - 0.125).abs() < 1e-15);
        assert!(euclidean_probability(&e1, &[], &enc).is_err());

        assert!(intra_cluster_variance_probability(&[&e1, &e1], &enc).unwrap().abs() < 1e-15);
        let s = intra_cluster_variance_probability(&[&e1, &e2], &enc).unwrap();
        assert!((s - 0.125).abs() < 1e-15);
    }

    #[test]
    fn statevector_examples() {
        let e1 = SparseVector::basis(4, 0).unwrap();
        let e2 = SparseVector::basis(4, 1).unwrap();
        let r = statevector_validate(&e1, &e1, DEFAULT_MAX_QUBITS).unwrap();
        assert!((r.simulated - 1.0).abs() < 1e-10);
        let (a, b) = (e1.with_sparsity(2).unwrap(), e2.with_sparsity(2).unwrap());
        let r = statevector_validate(&a, &b, DEFAULT_MAX_QUBITS).unwrap();
        assert!((r.simulated - 0.5).abs() < 1e-10);

        let u = unit(4, &[(0, 0.3, 0.4), (2, 0.9, -1.1)], 2);
        let v = unit(4, &[(2, 0.5, 2.0), (3, 0.7, 0.3)], 2);
        statevector_validate(&u, &v, DEFAULT_MAX_QUBITS).unwrap();

        let big = SparseVector::basis(64, 0).unwrap();
        assert!(matches!(
            statevector_validate(&big, &big, DEFAULT_MAX_QUBITS),
            Err(Error::RegisterTooLarge { qubits: 17, .. })
        ));
    }

    fn arb_unit(dim: usize, d: usize) -> impl Strategy<Value = SparseVector> {
        proptest::sample::subsequence((0..dim).collect::<Vec<_>>(), 1..=d)
            .prop_flat_map(move |idx| {
                let n = idx.len();
                (
                    Just(idx),
                    proptest::collection::vec(0.05f64..1.0, n),
                    proptest::collection::vec(-PI..PI, n),
                )
            })
            .prop_map(move |(idx, r, p)| {
                let entries: Vec<_> = idx
                    .iter()
                    .zip(&r)
                    .zip(&p)
                    .map(|((&i, &r), &p)| (i, r, p))
                    .collect();
                unit(dim, &entries, d)
            })
    }

    proptest! {
        #[test]
        fn recovery_identity(u in arb_unit(16, 4), v in arb_unit(16, 4)) {
            let a = swap_test_probability(&u, &v).unwrap();
            prop_assert!((0.5..=1.0 + 1e-12).contains(&a));
            let ip = recover_inner_product_sq(a, 4, u.r_max(), v.r_max()).unwrap();
            prop_assert!((ip - u.inner(&v).norm_sqr()).abs() < 1e-10);
        }

        #[test]
        fn euclidean_identity(
            u in arb_unit(8, 3),
            cluster in proptest::collection::vec(arb_unit(8, 3), 1..=8),
        ) {
            let refs: Vec<&SparseVector> = cluster.iter().collect();
            let enc = Encoding::covering(std::iter::once(&u).chain(cluster.iter())).unwrap();
            let a = euclidean_probability(&u, &refs, &enc).unwrap();
            let mut mean = vec![Complex64::new(0.0, 0.0); 8];
            for v in &cluster {
                for (m, x) in mean.iter_mut().zip(v.to_dense()) {
                    *m += x / cluster.len() as f64;
                }
            }
            let dist: f64 = u.to_dense().iter().zip(&mean).map(|(a, b)| (a - b).norm_sqr()).sum();
            prop_assert!((enc.distance_scale() * a - dist).abs() < 1e-10);
        }

        #[test]
        fn orderings_agree(u in arb_unit(6, 6), vs in proptest::collection::vec(arb_unit(6, 6), 2..6)) {
            // Real vectors so that the signed inner product is well defined.
            let real = |v: &SparseVector| {
                let d: Vec<f64> = v.to_dense().iter().map(|z| z.re).collect();
                let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                let d: Vec<f64> = d.iter().map(|x| x / n).collect();
                SparseVector::from_dense_real(&d, 0.0).unwrap().with_sparsity(6).unwrap()
            };
            let u = real(&u);
            let vs: Vec<SparseVector> = vs.iter().map(real).collect();
            let eu = sign_recovering_embed(&u).unwrap();
            let mut by_ip = Vec::new();
            let mut by_dist = Vec::new();
            for v in &vs {
                let ev = sign_recovering_embed(&v.with_r_max(1.0).unwrap()).unwrap();
                let eu = eu.with_r_max(ev.r_max().max(eu.r_max())).unwrap();
                let ev = ev.with_r_max(eu.r_max()).unwrap();
                let a = swap_test_probability(&eu, &ev).unwrap();
                let sq = recover_inner_product_sq(a, 7, eu.r_max(), ev.r_max()).unwrap();
                by_ip.push(-signed_inner_product(sq));
                let enc = Encoding::new(6, 1.0).unwrap();
                by_dist.push(euclidean_probability(&u, &[v], &enc).unwrap());
            }
            let argmin = |xs: &[f64]| {
                let mut best = 0;
                for (i, x) in xs.iter().enumerate() {
                    if *x < xs[best] { best = i; }
                }
                best
            };
            let (i, j) = (argmin(&by_ip), argmin(&by_dist));
            // Equal up to floating-point near-ties.
            prop_assert!(i == j || (by_dist[i] - by_dist[j]).abs() < 1e-9);
        }
    }
}

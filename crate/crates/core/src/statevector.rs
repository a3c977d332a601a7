//! Dense statevector simulation for small registers.
//!
//! Qubit `q` is bit `q` of the basis index. Only used to cross-check the
//! analytic circuit probabilities, so there is no attempt at speed beyond
//! avoiding full-register matrices.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone)]
pub(crate) struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

/// Row-major square matrix acting on `2^k` amplitudes.
pub(crate) type Gate = Vec<Vec<Complex64>>;

impl StateVector {
    pub fn zero(qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { qubits, amps }
    }

    #[cfg(test)]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies `gate` to the listed qubits; `targets[0]` is the least
    /// significant bit of the gate's local index.
    pub fn apply(&mut self, targets: &[usize], gate: &Gate) {
        let k = targets.len();
        let dim = 1usize << k;
        debug_assert_eq!(gate.len(), dim);
        debug_assert!(targets.iter().all(|&q| q < self.qubits));
        let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..dim)
            .map(|local| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| local >> b & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect();
        let mut scratch = vec![ZERO; dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (s, off) in scratch.iter_mut().zip(&offsets) {
                *s = self.amps[base | off];
            }
            for (row, off) in gate.iter().zip(&offsets) {
                self.amps[base | off] = row.iter().zip(&scratch).map(|(g, s)| g * s).sum();
            }
        }
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> q & 1 == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    #[cfg(test)]
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }
}

pub(crate) fn hadamard() -> Gate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ]
}

pub(crate) fn pauli_x() -> Gate {
    vec![
        vec![ZERO, Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0), ZERO],
    ]
}

/// Controlled swap with local ordering (control, a, b).
pub(crate) fn cswap() -> Gate {
    permutation_gate(8, |i| {
        if i & 1 == 1 {
            let a = i >> 1 & 1;
            let b = i >> 2 & 1;
            (i & 1) | b << 1 | a << 2
        } else {
            i
        }
    })
}

/// Gate sending `|i⟩` to `|perm(i)⟩`; `perm` must be a bijection.
pub(crate) fn permutation_gate(dim: usize, perm: impl Fn(usize) -> usize) -> Gate {
    let mut g = vec![vec![ZERO; dim]; dim];
    for i in 0..dim {
        g[perm(i)][i] = Complex64::new(1.0, 0.0);
    }
    g
}

/// Householder reflection sending `|0⟩` to the normalized `target`, whose
/// first component must be real. The result is Hermitian as well as unitary.
pub(crate) fn reflection_from_zero(target: &[Complex64]) -> Gate {
    let dim = target.len();
    debug_assert!(target[0].im.abs() < 1e-15);
    let mut w: Vec<Complex64> = target.iter().map(|x| -x).collect();
    w[0] += Complex64::new(1.0, 0.0);
    let wn: f64 = w.iter().map(Complex64::norm_sqr).sum();
    let mut g = vec![vec![ZERO; dim]; dim];
    for (r, row) in g.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let id = if r == c { 1.0 } else { 0.0 };
            *cell = Complex64::new(id, 0.0);
            if wn > 1e-30 {
                *cell -= 2.0 * w[r] * w[c].conj() / wn;
            }
        }
    }
    g
}

/// Block-diagonal gate: the target qubit (local bit 0) receives the 2×2
/// unitary `blocks[c]` when the control register (remaining bits) reads `c`.
pub(crate) fn multiplexed(blocks: &[[[Complex64; 2]; 2]]) -> Gate {
    let dim = 2 * blocks.len();
    let mut g = vec![vec![ZERO; dim]; dim];
    for (c, b) in blocks.iter().enumerate() {
        for r in 0..2 {
            for s in 0..2 {
                g[2 * c + r][2 * c + s] = b[r][s];
            }
        }
    }
    g
}

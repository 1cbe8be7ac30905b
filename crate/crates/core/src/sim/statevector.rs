// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;

use super::gates::{Action, Gate, Mat2, C64};
use crate::error::{CqError, Result};

/// Dense pure state of `n` qubits.
///
/// Qubit `i` is bit `i` of the basis-state index (little-endian), so the
/// amplitude of `|q_{n-1} ... q_1 q_0>` lives at `Σ q_i 2^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(CqError::SizeMismatch {
                expected: len.next_power_of_two(),
                actual: len,
            });
        }
        Ok(StateVector {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Normalised state with Gaussian-random amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut amps: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Overwrites the whole vector with the basis state `index`.
    pub fn set_basis(&mut self, index: usize) {
        self.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        self.amps[index] = C64::new(1.0, 0.0);
    }

    pub(crate) fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(CqError::TargetOutOfRange {
                    target: q,
                    nqubits: self.n,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(CqError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Applies `gate` with qubits listed as `[controls..., targets...]`.
    pub fn apply_gate(&mut self, gate: &Gate, qubits: &[usize]) -> Result<()> {
        let arity = gate.num_qubits();
        if qubits.len() != arity {
            return Err(CqError::GateArity {
                expected: arity,
                actual: qubits.len(),
            });
        }
        self.check_qubits(qubits)?;
        match gate.action() {
            Action::Controlled { controls, base } => {
                self.apply_controlled(&qubits[..controls], qubits[controls], &base)
            }
            Action::Swap { controls } => {
                self.apply_swap(&qubits[..controls], qubits[controls], qubits[controls + 1])
            }
        }
        Ok(())
    }

    fn apply_controlled(&mut self, controls: &[usize], target: usize, m: &Mat2) {
        let cmask = controls.iter().fold(0usize, |acc, &c| acc | (1 << c));
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tbit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn apply_swap(&mut self, controls: &[usize], qa: usize, qb: usize) {
        let cmask = controls.iter().fold(0usize, |acc, &c| acc | (1 << c));
        let (ba, bb) = (1usize << qa, 1usize << qb);
        for i in 0..self.amps.len() {
            // visit each |..a=1..b=0..> once and exchange with |..a=0..b=1..>
            if i & cmask == cmask && i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
    }

    /// Applies a dense `2^k x 2^k` matrix to `qubits` (bit `k` of the local index is `qubits[k]`).
    pub fn apply_matrix(&mut self, m: &DMatrix<C64>, qubits: &[usize]) -> Result<()> {
        let dim = 1usize << qubits.len();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(CqError::SizeMismatch {
                expected: dim,
                actual: m.nrows(),
            });
        }
        self.check_qubits(qubits)?;
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| l >> k & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | (1 << q))
            })
            .collect();
        let qmask = offsets[dim - 1];
        let mut local = vec![C64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & qmask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, v) in local.iter().enumerate() {
                    acc += m[(r, c)] * v;
                }
                self.amps[base | off] = acc;
            }
        }
        Ok(())
    }

    /// Multiplies every amplitude by `f(index)`; used for diagonal evolutions.
    pub fn apply_diagonal<F: Fn(usize) -> C64>(&mut self, f: F) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= f(i);
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projective computational-basis measurement of qubit `q` driven by the
    /// uniform sample `u` in `[0, 1)`. Collapses and renormalises.
    pub fn measure_with(&mut self, q: usize, u: f64) -> bool {
        let p1 = self.prob_one(q);
        let outcome = u < p1;
        self.collapse(q, outcome, if outcome { p1 } else { 1.0 - p1 });
        outcome
    }

    fn collapse(&mut self, q: usize, outcome: bool, p: f64) {
        let bit = 1usize << q;
        let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    /// Forces qubit `q` into `value` by measuring then flipping if needed.
    pub fn reset_with(&mut self, q: usize, value: bool, u: f64) {
        if self.measure_with(q, u) != value {
            self.apply_controlled(
                &[],
                q,
                &[
                    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
                    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                ],
            );
        }
    }

    /// Marginal distribution over `qubits` (bit `k` of the result index is `qubits[k]`).
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let l = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &q)| acc | ((i >> q & 1) << k));
            probs[l] += a.norm_sqr();
        }
        probs
    }

    /// `index: re im` per amplitude, 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i}: {:.16e} {:.16e}", a.re, a.im);
        }
        out
    }
}

/// Draws an index from a discrete distribution given a uniform sample.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return i;
        }
    }
    // rounding can leave target == total; fall back to the last non-zero entry
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

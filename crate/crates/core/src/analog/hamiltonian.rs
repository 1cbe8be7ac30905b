// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Neutral-atom style Hamiltonians for the two analogue modes.
//!
//! Both modes share the drive term on every addressed qubit
//!
//! ```text
//! Σ_i (Ω/2)(cos φ σx_i − sin φ σy_i) − δ n_i
//! ```
//!
//! and differ in the pair interaction between addressed qubits:
//! `(C6/r⁶) n_i n_j` for ISING, `(C3/r³)(σ+_i σ−_j + h.c.)` for XY.

use nalgebra::DMatrix;

use super::AnalogMode;
use crate::config::AnalogConfig;
use crate::sim::C64;

pub type Position = [f64; 3];

pub fn distance(a: &Position, b: &Position) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Pair coupling in rad/ns for qubits at `a` and `b`.
pub fn coupling(mode: AnalogMode, cfg: &AnalogConfig, a: &Position, b: &Position) -> f64 {
    let r = distance(a, b);
    match mode {
        AnalogMode::Ising => cfg.c6 / r.powi(6),
        AnalogMode::Xy => cfg.c3 / r.powi(3),
    }
}

/// Dense Hamiltonian over the addressed qubits, local bit `k` ↔ `positions[k]`.
pub fn hamiltonian(
    mode: AnalogMode,
    cfg: &AnalogConfig,
    positions: &[Position],
    omega: f64,
    phi: f64,
    delta: f64,
) -> DMatrix<C64> {
    let k = positions.len();
    let dim = 1usize << k;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let up = C64::from_polar(omega / 2.0, phi);
    for l in 0..dim {
        for j in 0..k {
            let bit = 1usize << j;
            if l & bit == 0 {
                // <0|H|1> = (Ω/2) e^{iφ}
                h[(l, l | bit)] += up;
                h[(l | bit, l)] += up.conj();
            } else {
                h[(l, l)] -= C64::new(delta, 0.0);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                let c = coupling(mode, cfg, &positions[i], &positions[j]);
                let (bi, bj) = (1usize << i, 1usize << j);
                match mode {
                    AnalogMode::Ising => {
                        if l & bi != 0 && l & bj != 0 {
                            h[(l, l)] += C64::new(c, 0.0);
                        }
                    }
                    AnalogMode::Xy => {
                        // σ+_i σ−_j : |i=0, j=1> → |i=1, j=0>, plus the conjugate
                        if l & bi == 0 && l & bj != 0 {
                            let to = l ^ bi ^ bj;
                            h[(to, l)] += C64::new(c, 0.0);
                            h[(l, to)] += C64::new(c, 0.0);
                        }
                    }
                }
            }
        }
    }
    h
}

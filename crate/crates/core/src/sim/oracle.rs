// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference for the gate engine.
//!
//! Gate matrices here are assembled from Pauli/projector Kronecker products
//! and then embedded column by column into the full space. None of it goes
//! through the engine's amplitude-pair update, so it can check that path.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::gates::{Gate, C64};
use crate::error::{CqError, Result};

pub const ORACLE_MAX_QUBITS: usize = 6;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn m2(a: C64, b: C64, cc: C64, d: C64) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn eye(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

fn pauli(which: char) -> DMatrix<C64> {
    match which {
        'x' => m2(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
        'y' => m2(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
        'z' => m2(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
        _ => eye(2),
    }
}

/// `exp(-i θ/2 σ)` = `cos(θ/2) I − i sin(θ/2) σ`.
fn rotation(axis: char, theta: f64) -> DMatrix<C64> {
    eye(2) * c((theta / 2.0).cos(), 0.0) - pauli(axis) * c(0.0, (theta / 2.0).sin())
}

fn phase(lambda: f64) -> DMatrix<C64> {
    m2(
        c(1., 0.),
        c(0., 0.),
        c(0., 0.),
        C64::from_polar(1.0, lambda),
    )
}

/// `u(θ, φ, λ) = p(φ) · ry(θ) · p(λ)`.
fn u3(theta: f64, phi: f64, lambda: f64) -> DMatrix<C64> {
    phase(phi) * rotation('y', theta) * phase(lambda)
}

/// `a ⊗ b` with `b` on the low-order bits.
fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Local matrix for `base` on the top qubit controlled by `k` lower qubits.
fn controlled(base: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let p1 = m2(c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.));
    let mut proj = DMatrix::from_element(1, 1, c(1., 0.));
    for _ in 0..k {
        proj = kron(&p1, &proj);
    }
    let dim_t = base.nrows();
    let dim = dim_t << k;
    eye(dim) - kron(&eye(dim_t), &proj) + kron(base, &proj)
}

fn swap_matrix() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (2, 1), (1, 2), (3, 3)] {
        m[(r, col)] = c(1., 0.);
    }
    m
}

/// Local matrix of `gate`, built independently of [`Gate::matrix`].
pub fn local_matrix(gate: &Gate) -> DMatrix<C64> {
    use Gate::*;
    let h = (pauli('x') + pauli('z')) * c(1.0 / 2f64.sqrt(), 0.0);
    match *gate {
        Id => eye(2),
        X => pauli('x'),
        Y => pauli('y'),
        Z => pauli('z'),
        H => h,
        S => phase(PI / 2.0),
        Sdg => phase(-PI / 2.0),
        T => phase(PI / 4.0),
        Tdg => phase(-PI / 4.0),
        // sx = e^{iπ/4} rx(π/2)
        Sx => rotation('x', PI / 2.0) * C64::from_polar(1.0, PI / 4.0),
        Rx(t) => rotation('x', t),
        Ry(t) => rotation('y', t),
        Rz(t) => rotation('z', t),
        P(l) => phase(l),
        U(t, p, l) => u3(t, p, l),
        CX => controlled(&pauli('x'), 1),
        CY => controlled(&pauli('y'), 1),
        CZ => controlled(&pauli('z'), 1),
        CH => controlled(&h, 1),
        CP(l) => controlled(&phase(l), 1),
        CRx(t) => controlled(&rotation('x', t), 1),
        CRy(t) => controlled(&rotation('y', t), 1),
        CRz(t) => controlled(&rotation('z', t), 1),
        CU(t, p, l, g) => controlled(&(u3(t, p, l) * C64::from_polar(1.0, g)), 1),
        Swap => swap_matrix(),
        CCX => controlled(&pauli('x'), 2),
        CSwap => controlled(&swap_matrix(), 1),
    }
}

/// Embeds a local matrix acting on `qubits` into the full `2^n` space.
pub fn embed(local: &DMatrix<C64>, qubits: &[usize], n: usize) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut full = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let lin = qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| ((col >> q) & 1) << k)
            .sum::<usize>();
        let cleared = qubits.iter().fold(col, |acc, &q| acc & !(1 << q));
        for lout in 0..local.nrows() {
            let row = qubits
                .iter()
                .enumerate()
                .fold(cleared, |acc, (k, &q)| acc | (((lout >> k) & 1) << q));
            full[(row, col)] += local[(lout, lin)];
        }
    }
    full
}

/// Product of full-space gate matrices in application order.
pub fn build_unitary_oracle(gates: &[(Gate, Vec<usize>)], n: usize) -> Result<DMatrix<C64>> {
    if n > ORACLE_MAX_QUBITS {
        return Err(CqError::TooLarge {
            requested: n,
            max: ORACLE_MAX_QUBITS,
        });
    }
    let mut u = eye(1 << n);
    for (g, qs) in gates {
        if qs.len() != g.num_qubits() {
            return Err(CqError::GateArity {
                expected: g.num_qubits(),
                actual: qs.len(),
            });
        }
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(CqError::TargetOutOfRange {
                target: q,
                nqubits: n,
            });
        }
        u = embed(&local_matrix(g), qs, n) * u;
    }
    Ok(u)
}

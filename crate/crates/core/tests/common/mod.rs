// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent reference models shared by the integration tests.

#![allow(dead_code)]

pub mod executors;
pub mod programs;

use cq::analog::Position;
use cq::C64;
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

pub fn sx() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sy() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

/// `|1><1|`
pub fn num() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
}

/// `|1><0|`
pub fn raise() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// `op` on qubit `i` of `n` (qubit 0 is the rightmost Kronecker factor).
pub fn on(op: &DMatrix<C64>, i: usize, n: usize) -> DMatrix<C64> {
    let mut m = DMatrix::identity(1, 1);
    for q in (0..n).rev() {
        m = if q == i {
            m.kronecker(op)
        } else {
            m.kronecker(&eye(2))
        };
    }
    m
}

pub fn dist(a: &Position, b: &Position) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Ising { c6: f64 },
    Xy { c3: f64 },
}

/// Hamiltonian on `positions.len()` qubits assembled from Pauli products.
pub fn hamiltonian(
    family: Family,
    positions: &[Position],
    omega: f64,
    phi: f64,
    delta: f64,
) -> DMatrix<C64> {
    let n = positions.len();
    let dim = 1 << n;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let drive = sx() * c(phi.cos(), 0.0) - sy() * c(phi.sin(), 0.0);
    for i in 0..n {
        h += on(&drive, i, n) * c(omega / 2.0, 0.0);
        h -= on(&num(), i, n) * c(delta, 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let r = dist(&positions[i], &positions[j]);
            match family {
                Family::Ising { c6 } => {
                    h += on(&num(), i, n) * on(&num(), j, n) * c(c6 / r.powi(6), 0.0);
                }
                Family::Xy { c3 } => {
                    let hop = on(&raise(), i, n) * on(&raise().adjoint(), j, n);
                    h += (&hop + hop.adjoint()) * c(c3 / r.powi(3), 0.0);
                }
            }
        }
    }
    h
}

/// `exp(−iHt)` for Hermitian `H` by eigendecomposition.
pub fn propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn basis(n: usize, index: usize) -> DVector<C64> {
    let mut v = DVector::zeros(1 << n);
    v[index] = c(1.0, 0.0);
    v
}

/// Upper-tail p-value of Pearson's statistic against `probs` (zero-probability cells dropped).
pub fn chi_square_p(observed: &[usize], probs: &[f64]) -> f64 {
    let total: usize = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p < 1e-12 {
            assert_eq!(o, 0, "outcome with zero probability observed");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

pub fn mat_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

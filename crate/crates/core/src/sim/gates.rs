// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! The OpenQASM 3 standard gate set.
//!
//! Multi-qubit gates take their qubits as `[controls..., targets...]`, the
//! same order OpenQASM uses. Local matrices returned by [`Gate::matrix`] are
//! little-endian in that list: bit `k` of a local index is the state of the
//! `k`-th listed qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CqError, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Sx,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Phase gate `p(λ)`.
    P(f64),
    /// `u(θ, φ, λ)`.
    U(f64, f64, f64),
    CX,
    CY,
    CZ,
    CH,
    /// Controlled phase, `cp(λ)`.
    CP(f64),
    CRx(f64),
    CRy(f64),
    CRz(f64),
    /// `cu(θ, φ, λ, γ)`: controlled `e^{iγ} u(θ, φ, λ)`.
    CU(f64, f64, f64, f64),
    Swap,
    CCX,
    CSwap,
}

/// How the engine applies a gate to a statevector.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Action {
    /// A 2x2 unitary on the last qubit, conditioned on all preceding qubits being 1.
    Controlled { controls: usize, base: Mat2 },
    /// Exchange of the last two qubits, conditioned on all preceding qubits.
    Swap { controls: usize },
}

impl Gate {
    pub const NAMES: [&'static str; 27] = [
        "id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx", "rx", "ry", "rz", "p", "u", "cx",
        "cy", "cz", "ch", "cp", "crx", "cry", "crz", "cu", "swap", "ccx", "cswap",
    ];

    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            Id => "id",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Sx => "sx",
            Rx(_) => "rx",
            Ry(_) => "ry",
            Rz(_) => "rz",
            P(_) => "p",
            U(..) => "u",
            CX => "cx",
            CY => "cy",
            CZ => "cz",
            CH => "ch",
            CP(_) => "cp",
            CRx(_) => "crx",
            CRy(_) => "cry",
            CRz(_) => "crz",
            CU(..) => "cu",
            Swap => "swap",
            CCX => "ccx",
            CSwap => "cswap",
        }
    }

    /// Builds a gate from its OpenQASM name and angle list.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Gate> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(CqError::BadParams(format!(
                    "gate {name} takes {k} parameters, got {}",
                    params.len()
                )))
            }
        };
        let g = match name.to_ascii_lowercase().as_str() {
            "id" => Gate::Id,
            "x" => Gate::X,
            "y" => Gate::Y,
            "z" => Gate::Z,
            "h" | "hadamard" => Gate::H,
            "s" => Gate::S,
            "sdg" => Gate::Sdg,
            "t" => Gate::T,
            "tdg" => Gate::Tdg,
            "sx" => Gate::Sx,
            "rx" => return want(1).map(|_| Gate::Rx(params[0])),
            "ry" => return want(1).map(|_| Gate::Ry(params[0])),
            "rz" => return want(1).map(|_| Gate::Rz(params[0])),
            "p" | "phase" => return want(1).map(|_| Gate::P(params[0])),
            "u" => return want(3).map(|_| Gate::U(params[0], params[1], params[2])),
            "cx" | "cnot" => Gate::CX,
            "cy" => Gate::CY,
            "cz" => Gate::CZ,
            "ch" => Gate::CH,
            "cp" | "cphase" => return want(1).map(|_| Gate::CP(params[0])),
            "crx" => return want(1).map(|_| Gate::CRx(params[0])),
            "cry" => return want(1).map(|_| Gate::CRy(params[0])),
            "crz" => return want(1).map(|_| Gate::CRz(params[0])),
            "cu" => return want(4).map(|_| Gate::CU(params[0], params[1], params[2], params[3])),
            "swap" => Gate::Swap,
            "ccx" | "toffoli" => Gate::CCX,
            "cswap" | "fredkin" => Gate::CSwap,
            other => return Err(CqError::BadParams(format!("unknown gate {other}"))),
        };
        want(0)?;
        Ok(g)
    }

    pub fn params(&self) -> Vec<f64> {
        use Gate::*;
        match *self {
            Rx(a) | Ry(a) | Rz(a) | P(a) | CP(a) | CRx(a) | CRy(a) | CRz(a) => vec![a],
            U(a, b, c) => vec![a, b, c],
            CU(a, b, c, d) => vec![a, b, c, d],
            _ => Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self.action() {
            Action::Controlled { controls, .. } => controls + 1,
            Action::Swap { controls } => controls + 2,
        }
    }

    pub fn num_controls(&self) -> usize {
        match self.action() {
            Action::Controlled { controls, .. } | Action::Swap { controls } => controls,
        }
    }

    pub(crate) fn action(&self) -> Action {
        use Gate::*;
        let single = |base| Action::Controlled { controls: 0, base };
        let ctrl = |controls, base| Action::Controlled { controls, base };
        match *self {
            Id => single(identity()),
            X => single(pauli_x()),
            Y => single(pauli_y()),
            Z => single(diag(ONE, -ONE)),
            H => single(hadamard()),
            S => single(diag(ONE, I)),
            Sdg => single(diag(ONE, -I)),
            T => single(diag(ONE, C64::from_polar(1.0, FRAC_PI_4))),
            Tdg => single(diag(ONE, C64::from_polar(1.0, -FRAC_PI_4))),
            Sx => single(sqrt_x()),
            Rx(t) => single(rx(t)),
            Ry(t) => single(ry(t)),
            Rz(t) => single(rz(t)),
            P(l) => single(phase(l)),
            U(t, p, l) => single(u3(t, p, l)),
            CX => ctrl(1, pauli_x()),
            CY => ctrl(1, pauli_y()),
            CZ => ctrl(1, diag(ONE, -ONE)),
            CH => ctrl(1, hadamard()),
            CP(l) => ctrl(1, phase(l)),
            CRx(t) => ctrl(1, rx(t)),
            CRy(t) => ctrl(1, ry(t)),
            CRz(t) => ctrl(1, rz(t)),
            CU(t, p, l, g) => {
                let mut m = u3(t, p, l);
                let gp = C64::from_polar(1.0, g);
                for row in m.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= gp;
                    }
                }
                ctrl(1, m)
            }
            Swap => Action::Swap { controls: 0 },
            CCX => ctrl(2, pauli_x()),
            CSwap => Action::Swap { controls: 1 },
        }
    }

    /// Local `2^k x 2^k` unitary over the gate's own qubits.
    pub fn matrix(&self) -> DMatrix<C64> {
        let k = self.num_qubits();
        let dim = 1usize << k;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        match self.action() {
            Action::Controlled { controls, base } => {
                let cmask = (1usize << controls) - 1;
                let tbit = 1usize << controls;
                for col in 0..dim {
                    if col & cmask != cmask {
                        m[(col, col)] = ONE;
                        continue;
                    }
                    let tin = (col & tbit != 0) as usize;
                    for tout in 0..2 {
                        let row = (col & !tbit) | (tout * tbit);
                        m[(row, col)] = base[tout][tin];
                    }
                }
            }
            Action::Swap { controls } => {
                let cmask = (1usize << controls) - 1;
                let a = 1usize << controls;
                let b = a << 1;
                for col in 0..dim {
                    let row = if col & cmask == cmask && ((col & a != 0) != (col & b != 0)) {
                        col ^ a ^ b
                    } else {
                        col
                    };
                    m[(row, col)] = ONE;
                }
            }
        }
        m
    }
}

fn identity() -> Mat2 {
    diag(ONE, ONE)
}

fn diag(a: C64, b: C64) -> Mat2 {
    [[a, ZERO], [ZERO, b]]
}

fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn sqrt_x() -> Mat2 {
    let a = C64::new(0.5, 0.5);
    let b = C64::new(0.5, -0.5);
    [[a, b], [b, a]]
}

fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

fn rz(lambda: f64) -> Mat2 {
    diag(
        C64::from_polar(1.0, -lambda / 2.0),
        C64::from_polar(1.0, lambda / 2.0),
    )
}

fn phase(lambda: f64) -> Mat2 {
    diag(ONE, C64::from_polar(1.0, lambda))
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

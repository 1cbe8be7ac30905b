// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Random digital circuits and analogue pulse programs with reference results.

use std::f64::consts::PI;
use std::sync::Arc;

use cq::sim::oracle::embed;
use cq::{
    Addressing, AnalogConfig, AnalogMode, CState, Gate, KernelCtx, KernelResult, PulseField, QKern,
    QuantumKernel, QubitHandle, Runtime, Waveform, C64,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{basis, c, hamiltonian, on, propagator, Family};

/// Angle count per entry of `Gate::NAMES`.
const PARAMS: [usize; 27] = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 3, 0, 0, 0, 0, 1, 1, 1, 1, 4, 0, 0, 0,
];

pub fn random_gate(rng: &mut impl Rng, n: usize) -> Option<(Gate, Vec<usize>)> {
    let k = rng.random_range(0..Gate::NAMES.len());
    let params: Vec<f64> = (0..PARAMS[k]).map(|_| rng.random_range(-PI..PI)).collect();
    let gate = Gate::from_name(Gate::NAMES[k], &params).unwrap();
    if gate.num_qubits() > n {
        return None;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut qubits = Vec::new();
    for _ in 0..gate.num_qubits() {
        qubits.push(pool.swap_remove(rng.random_range(0..pool.len())));
    }
    Some((gate, qubits))
}

pub fn random_circuit(seed: u64, n: usize, depth: usize) -> Vec<(Gate, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < depth {
        if let Some(g) = random_gate(&mut rng, n) {
            out.push(g);
        }
    }
    out
}

const NSAMPLES: usize = 64;

#[derive(Debug, Clone)]
pub enum Amp {
    Const(f64),
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Op {
    /// `None` plays on the GLOBAL channel.
    pub target: Option<usize>,
    /// Zero-drive idle instead of a pulse.
    pub idle: bool,
    pub duration: f64,
    pub amp: Amp,
    pub phi: f64,
    pub delta: Option<f64>,
}

/// A random program: `ry` preparation, positions, then pulses and idles in order.
#[derive(Debug, Clone)]
pub struct Program {
    pub mode: AnalogMode,
    pub n: usize,
    pub coords: Vec<[f64; 3]>,
    pub init: Vec<f64>,
    pub ops: Vec<Op>,
}

impl Program {
    pub fn random(rng: &mut impl Rng) -> Program {
        let n = rng.random_range(1..=3);
        let mode = if rng.random_bool(0.5) {
            AnalogMode::Ising
        } else {
            AnalogMode::Xy
        };
        let mut coords: Vec<[f64; 3]> = Vec::new();
        while coords.len() < n {
            let p = [
                rng.random_range(0.0..12.0),
                rng.random_range(0.0..12.0),
                0.0,
            ];
            if coords.iter().all(|q| super::dist(q, &p) > 4.0) {
                coords.push(p);
            }
        }
        let init = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
        let ops = (0..rng.random_range(1..=3))
            .map(|_| Op {
                target: if rng.random_bool(0.3) {
                    Some(rng.random_range(0..n))
                } else {
                    None
                },
                idle: rng.random_bool(0.25),
                duration: rng.random_range(1.0..20.0),
                amp: if rng.random_bool(0.5) {
                    Amp::Const(rng.random_range(0.0..1.0))
                } else {
                    Amp::Sine {
                        amplitude: rng.random_range(0.0..1.0),
                        frequency: rng.random_range(0.0..0.2),
                        phase: rng.random_range(0.0..PI),
                    }
                },
                phi: rng.random_range(-PI..PI),
                delta: rng.random_bool(0.5).then(|| rng.random_range(-0.5..0.5)),
            })
            .collect();
        Program {
            mode,
            n,
            coords,
            init,
            ops,
        }
    }

    fn waveform(amp: &Amp) -> Waveform {
        match *amp {
            Amp::Const(value) => Waveform::Constant { value },
            Amp::Sine {
                amplitude,
                frequency,
                phase,
            } => Waveform::Sine {
                amplitude,
                frequency,
                phase,
            },
        }
    }

    /// Final state from an independent model: Kronecker-built Hamiltonians,
    /// segment means of the sampled drive, eigendecomposition propagators.
    pub fn oracle(&self, cfg: &AnalogConfig) -> DVector<C64> {
        let n = self.n;
        let mut psi = basis(n, 0);
        for (q, &theta) in self.init.iter().enumerate() {
            let (s, co) = (theta / 2.0).sin_cos();
            let ry =
                DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]);
            psi = on(&ry, q, n) * psi;
        }
        let family = match self.mode {
            AnalogMode::Ising => Family::Ising { c6: cfg.c6 },
            AnalogMode::Xy => Family::Xy { c3: cfg.c3 },
        };
        for op in &self.ops {
            let targets: Vec<usize> = match op.target {
                Some(t) => vec![t],
                None => (0..n).collect(),
            };
            let pos: Vec<[f64; 3]> = targets.iter().map(|&t| self.coords[t]).collect();
            if op.idle {
                let h = hamiltonian(family, &pos, 0.0, 0.0, 0.0);
                psi = embed(&propagator(&h, op.duration), &targets, n) * psi;
                continue;
            }
            let dt = op.duration / (NSAMPLES - 1) as f64;
            let sample = |k: usize| match op.amp {
                Amp::Const(v) => v,
                Amp::Sine {
                    amplitude,
                    frequency,
                    phase,
                } => amplitude * (2.0 * PI * frequency * k as f64 * dt + phase).sin(),
            };
            for k in 0..NSAMPLES - 1 {
                let omega = 0.5 * (sample(k) + sample(k + 1));
                let h = hamiltonian(family, &pos, omega, op.phi, op.delta.unwrap_or(0.0));
                psi = embed(&propagator(&h, dt), &targets, n) * psi;
            }
        }
        psi
    }
}

impl QuantumKernel for Program {
    fn run(&self, ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
        ctx.set_qureg(qr, 0, n)?;
        for (q, &theta) in self.init.iter().enumerate() {
            ctx.ry(qr.at(q)?, theta)?;
        }
        ctx.enable_analog_qreg(qr)?;
        let flat: Vec<f64> = self.coords.iter().flatten().copied().collect();
        ctx.set_qubit_pos(qr, &flat)?;
        let mut global = ctx.get_channel(qr, Addressing::Global, None)?;
        let mut local = ctx.get_channel(qr, Addressing::Local, Some(qr.at(0)?))?;
        for op in &self.ops {
            let ch = match op.target {
                Some(t) => {
                    ctx.retarget_channel(&mut local, qr.at(t)?)?;
                    &mut local
                }
                None => &mut global,
            };
            if op.idle {
                ctx.delay(ch, op.duration)?;
                continue;
            }
            let mut pulse = ctx.init_pulse(op.duration)?;
            pulse.fill(PulseField::Amplitude, &Self::waveform(&op.amp))?;
            pulse.fill(PulseField::Phase, &Waveform::Constant { value: op.phi })?;
            if let Some(d) = op.delta {
                pulse.fill(PulseField::Detuning, &Waveform::Constant { value: d })?;
            }
            ctx.play(ch, &pulse)?;
        }
        ctx.disable_analog_qreg(qr)
    }
}

/// Runs `kernel` once on a fresh `n`-qubit register and returns the final amplitudes.
pub fn run_state(
    rt: &mut Runtime,
    mode: AnalogMode,
    n: usize,
    kernel: Arc<dyn QuantumKernel>,
) -> cq::Result<Vec<C64>> {
    rt.enable_analog_mode(mode)?;
    let qr = rt.alloc_qureg(n)?;
    let k = QKern::shared(kernel);
    rt.register_qkern(&k)?;
    let mut none: [CState; 0] = [];
    rt.s_qrun(&k, &qr, n, &mut none, 0)?;
    let amps = rt.peek_state(&qr, 0)?.amplitudes().to_vec();
    rt.free_qureg(&qr)?;
    Ok(amps)
}

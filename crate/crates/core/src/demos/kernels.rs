// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Ready-made kernels, addressable by name for bindings and the demo binary.

use std::f64::consts::PI;
use std::time::Duration;

use crate::analog::{Addressing, PulseField, Waveform};
use crate::device::KernelCtx;
use crate::error::{CqError, Result};
use crate::handle::{CState, QubitHandle};
use crate::kernel::{KernelResult, ParamPack, PqKern, QKern};

/// Quantum Fourier transform on `qr` (little-endian), ending with the
/// qubit-order reversal.
pub fn full_qft_circuit(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> Result<()> {
    for j in (0..nqubits).rev() {
        ctx.hadamard(qr.at(j)?)?;
        for k in (0..j).rev() {
            let angle = PI / (1u64 << (j - k)) as f64;
            ctx.cphase(qr.at(k)?, qr.at(j)?, angle)?;
        }
    }
    for i in 0..nqubits / 2 {
        ctx.swap(qr.at(i)?, qr.at(nqubits - 1 - i)?)?;
    }
    Ok(())
}

/// Zero the register, apply the QFT, measure every qubit.
pub fn zero_init_full_qft(
    ctx: &mut KernelCtx<'_>,
    nqubits: usize,
    qr: QubitHandle,
) -> KernelResult {
    ctx.set_qureg(qr, 0, nqubits)?;
    full_qft_circuit(ctx, nqubits, qr)?;
    ctx.measure_qureg(qr)?;
    Ok(())
}

/// `(|00> + |11>)/√2` on the first two qubits, both measured.
pub fn bell(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    if nqubits < 2 {
        return Err(CqError::SizeMismatch {
            expected: 2,
            actual: nqubits,
        });
    }
    let (a, b) = (qr.at(0)?, qr.at(1)?);
    ctx.set_qureg(qr, 0, nqubits)?;
    ctx.hadamard(a)?;
    ctx.cnot(a, b)?;
    ctx.measure_qubit(a)?;
    ctx.measure_qubit(b)?;
    Ok(())
}

pub fn ghz(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    ctx.set_qureg(qr, 0, nqubits)?;
    ctx.hadamard(qr.at(0)?)?;
    for i in 1..nqubits {
        ctx.cnot(qr.at(i - 1)?, qr.at(i)?)?;
    }
    ctx.measure_qureg(qr)?;
    Ok(())
}

/// Hadamard on every qubit, then measure all.
pub fn coin(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    ctx.set_qureg(qr, 0, nqubits)?;
    for q in qr.qubits() {
        ctx.hadamard(q)?;
    }
    ctx.measure_qureg(qr)?;
    Ok(())
}

/// [`coin`] after a 1 ms pause, for exercising sync and halt.
pub fn slow_coin(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    std::thread::sleep(Duration::from_millis(1));
    coin(ctx, nqubits, qr)
}

/// Two synchronised and three device-local measurements.
pub fn mixed_measure(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    ctx.set_qureg(qr, 0, nqubits)?;
    let q = qr.at(0)?;
    ctx.hadamard(q)?;
    for _ in 0..3 {
        ctx.dmeasure_qubit(q)?;
    }
    ctx.measure_qubit(q)?;
    ctx.measure_qubit(q)?;
    Ok(())
}

/// Measures qubit 1 only when a device-local measurement of qubit 0 gives 1,
/// so most result slots may stay unset.
pub fn conditional(ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
    ctx.set_qureg(qr, 0, nqubits)?;
    let q0 = qr.at(0)?;
    ctx.hadamard(q0)?;
    if ctx.dmeasure_qubit(q0)? == CState::ONE {
        ctx.measure_qubit(q0)?;
    }
    Ok(())
}

/// `rx(params[0])` on every qubit, then measure all.
pub fn rx_all(
    ctx: &mut KernelCtx<'_>,
    nqubits: usize,
    qr: QubitHandle,
    params: &ParamPack,
) -> KernelResult {
    let theta = *params
        .f64s()?
        .first()
        .ok_or_else(|| CqError::BadParams("rx_all needs an angle".into()))?;
    ctx.set_qureg(qr, 0, nqubits)?;
    for q in qr.qubits() {
        ctx.rx(q, theta)?;
    }
    ctx.measure_qureg(qr)?;
    Ok(())
}

/// Constant drive `params = [omega, duration]` on a GLOBAL channel from `|0...0>`.
/// Needs the analogue mode. Measures nothing; inspect the state afterwards.
pub fn rabi_pulse(
    ctx: &mut KernelCtx<'_>,
    nqubits: usize,
    qr: QubitHandle,
    params: &ParamPack,
) -> KernelResult {
    let p = params.f64s()?;
    let [omega, duration] = p[..] else {
        return Err(CqError::BadParams(
            "rabi_pulse expects [omega, duration]".into(),
        ));
    };
    ctx.set_qureg(qr, 0, nqubits)?;
    if duration > 0.0 {
        ctx.enable_analog_qreg(qr)?;
        let mut ch = ctx.get_channel(qr, Addressing::Global, None)?;
        let mut pulse = ctx.init_pulse(duration)?;
        pulse.fill(PulseField::Amplitude, &Waveform::Constant { value: omega })?;
        ctx.play(&mut ch, &pulse)?;
        ctx.disable_analog_qreg(qr)?;
    }
    Ok(())
}

/// Layout of the [`anneal`] parameter pack.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    /// Peak Rabi frequency, rad/ns.
    pub omega: f64,
    pub delta_start: f64,
    pub delta_end: f64,
    /// Duration of each amplitude ramp, ns.
    pub ramp_ns: f64,
    /// Duration of the detuning sweep, ns.
    pub sweep_ns: f64,
    pub shots: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            omega: 0.1,
            delta_start: -0.3,
            delta_end: 0.3,
            ramp_ns: 100.0,
            sweep_ns: 1000.0,
            shots: 200,
        }
    }
}

impl AnnealSchedule {
    /// Packs the schedule followed by flattened `x, y, z` coordinates.
    pub fn pack(&self, coords: &[[f64; 3]]) -> ParamPack {
        let mut v = vec![
            self.omega,
            self.delta_start,
            self.delta_end,
            self.ramp_ns,
            self.sweep_ns,
            self.shots as f64,
        ];
        v.extend(coords.iter().flatten());
        ParamPack::from_f64s(&v)
    }
}

fn linear(from: f64, to: f64, duration: f64) -> Waveform {
    Waveform::Interpolated {
        times: vec![0.0, duration],
        values: vec![from, to],
    }
}

/// Annealing schedule on a GLOBAL channel in ISING mode: ramp the drive up,
/// sweep the detuning, ramp the drive down, then capture `shots` samples.
/// The samples are stored as results, shot-major with one entry per qubit.
pub fn anneal(
    ctx: &mut KernelCtx<'_>,
    nqubits: usize,
    qr: QubitHandle,
    params: &ParamPack,
) -> KernelResult {
    let p = params.f64s()?;
    if p.len() != 6 + 3 * nqubits {
        return Err(CqError::BadParams(format!(
            "anneal expects {} values, got {}",
            6 + 3 * nqubits,
            p.len()
        )));
    }
    let (omega, d0, d1, ramp, sweep) = (p[0], p[1], p[2], p[3], p[4]);
    let shots = p[5] as usize;

    ctx.set_qureg(qr, 0, nqubits)?;
    ctx.enable_analog_qreg(qr)?;
    ctx.set_qubit_pos(qr, &p[6..])?;
    let mut ch = ctx.get_channel(qr, Addressing::Global, None)?;

    let mut up = ctx.init_pulse(ramp)?;
    up.fill(PulseField::Amplitude, &linear(0.0, omega, ramp))?;
    up.fill(PulseField::Detuning, &Waveform::Constant { value: d0 })?;
    let mut mid = ctx.init_pulse(sweep)?;
    mid.fill(PulseField::Amplitude, &Waveform::Constant { value: omega })?;
    mid.fill(PulseField::Detuning, &linear(d0, d1, sweep))?;
    let mut down = ctx.init_pulse(ramp)?;
    down.fill(PulseField::Amplitude, &linear(omega, 0.0, ramp))?;
    down.fill(PulseField::Detuning, &Waveform::Constant { value: d1 })?;
    for pulse in [&up, &mid, &down] {
        ctx.play(&mut ch, pulse)?;
    }

    // a short undriven window: readout only
    let readout = ctx.init_pulse(1.0)?;
    let samples = ctx.capture(&mut ch, &readout, shots)?;
    let results: Vec<CState> = samples.iter().map(|&s| CState(s as i16)).collect();
    ctx.store_results(&results)?;
    ctx.disable_analog_qreg(qr)?;
    Ok(())
}

type Plain = fn(&mut KernelCtx<'_>, usize, QubitHandle) -> KernelResult;
type Param = fn(&mut KernelCtx<'_>, usize, QubitHandle, &ParamPack) -> KernelResult;

const PLAIN: [(&str, Plain); 7] = [
    ("zero_init_full_qft", zero_init_full_qft),
    ("bell", bell),
    ("ghz", ghz),
    ("coin", coin),
    ("slow_coin", slow_coin),
    ("mixed_measure", mixed_measure),
    ("conditional", conditional),
];

const PARAM: [(&str, Param); 3] = [
    ("rx_all", rx_all),
    ("rabi_pulse", rabi_pulse),
    ("anneal", anneal),
];

/// Names of the built-in plain kernels.
pub fn kernel_names() -> Vec<&'static str> {
    PLAIN.iter().map(|(n, _)| *n).collect()
}

pub fn param_kernel_names() -> Vec<&'static str> {
    PARAM.iter().map(|(n, _)| *n).collect()
}

pub fn kernel_by_name(name: &str) -> Option<QKern> {
    PLAIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| QKern::new(*f))
}

pub fn param_kernel_by_name(name: &str) -> Option<PqKern> {
    PARAM
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| PqKern::new(*f))
}

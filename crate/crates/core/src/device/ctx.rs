// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{DeviceState, GateEvent, MeasurementRecord};
use crate::analog::evolve::Evolution;
use crate::analog::{
    hamiltonian::distance, Addressing, AnalogRegister, Channel, Position, Pulse, Segment,
};
use crate::error::{CqError, Result};
use crate::handle::{CState, QubitHandle};
use crate::sim::{sample_index, Gate, StateVector};

/// Device-side operations available to a running kernel.
///
/// A context only exists while the device is executing a kernel shot, so
/// every method here is device code by construction.
pub struct KernelCtx<'a> {
    dev: &'a mut DeviceState,
    staging: &'a mut Vec<CState>,
    nmeasure: usize,
    shot: usize,
    verbose: bool,
}

macro_rules! single_qubit_gates {
    ($($(#[$m:meta])* $name:ident => $gate:expr;)*) => {
        $(
            $(#[$m])*
            pub fn $name(&mut self, q: QubitHandle) -> Result<()> {
                self.gate($gate, &[q])
            }
        )*
    };
}

impl<'a> KernelCtx<'a> {
    pub(crate) fn new(
        dev: &'a mut DeviceState,
        staging: &'a mut Vec<CState>,
        nmeasure: usize,
        shot: usize,
    ) -> Self {
        let verbose = dev.diag.enabled(2);
        KernelCtx {
            dev,
            staging,
            nmeasure,
            shot,
            verbose,
        }
    }

    /// Index of the shot being executed, from 0.
    pub fn shot(&self) -> usize {
        self.shot
    }

    /// Synchronised results recorded so far in this shot.
    pub fn staged(&self) -> &[CState] {
        self.staging
    }

    /// Read-only view of a device state. Only a simulator can offer this.
    pub fn state(&self, qr: QubitHandle) -> Result<&StateVector> {
        self.dev
            .states
            .get(qr.registry_index)
            .and_then(|s| s.as_ref())
            .ok_or(CqError::InvalidHandle)
    }

    fn state_mut(&mut self, idx: usize) -> Result<&mut StateVector> {
        self.dev
            .states
            .get_mut(idx)
            .and_then(|s| s.as_mut())
            .ok_or(CqError::InvalidHandle)
    }

    /// Absolute indices of every qubit of `qr`, checked against the live state.
    fn resolve(&self, qr: QubitHandle) -> Result<Vec<usize>> {
        let n = self.state(qr)?.num_qubits();
        if qr.n == 0 || qr.offset + qr.n > n {
            return Err(CqError::InvalidHandle);
        }
        Ok((0..qr.n).map(|i| qr.absolute(i)).collect())
    }

    fn resolve_one(&self, q: QubitHandle) -> Result<usize> {
        if q.n != 1 {
            return Err(CqError::SizeMismatch {
                expected: 1,
                actual: q.n,
            });
        }
        Ok(self.resolve(q)?[0])
    }

    fn uniform(&mut self) -> f64 {
        self.dev.rng.random::<f64>()
    }

    fn trace(&self, msg: impl FnOnce() -> String) {
        if self.verbose {
            self.dev.diag.log(2, msg);
        }
    }

    // ---- state preparation ----

    /// Forces a single qubit into `value`. An entangled qubit is projected
    /// first, which also collapses its partners.
    pub fn set_qubit(&mut self, q: QubitHandle, value: CState) -> Result<()> {
        let bit = value.bit()?;
        let abs = self.resolve_one(q)?;
        let u = self.uniform();
        self.state_mut(q.registry_index)?.reset_with(abs, bit, u);
        self.trace(|| format!("set qubit {abs} of register {} to {bit}", q.registry_index));
        Ok(())
    }

    /// Prepares the basis state `state` (bit `i` → qubit `i` of `qr`).
    pub fn set_qureg(&mut self, qr: QubitHandle, state: u64, nqubits: usize) -> Result<()> {
        if nqubits != qr.n {
            return Err(CqError::SizeMismatch {
                expected: qr.n,
                actual: nqubits,
            });
        }
        if nqubits < 64 && state >> nqubits != 0 {
            return Err(CqError::StateOutOfRange { state, nqubits });
        }
        let qubits = self.resolve(qr)?;
        let whole = qr.offset == 0 && qubits.len() == self.state(qr)?.num_qubits();
        if whole {
            self.state_mut(qr.registry_index)?.set_basis(state as usize);
        } else {
            for (i, &abs) in qubits.iter().enumerate() {
                let u = self.uniform();
                self.state_mut(qr.registry_index)?
                    .reset_with(abs, state >> i & 1 == 1, u);
            }
        }
        self.trace(|| format!("set register {} to |{state}>", qr.registry_index));
        Ok(())
    }

    /// Prepares `qr` from one classical value per qubit.
    pub fn set_qureg_cstate(&mut self, qr: QubitHandle, values: &[CState]) -> Result<()> {
        if values.len() != qr.n {
            return Err(CqError::SizeMismatch {
                expected: qr.n,
                actual: values.len(),
            });
        }
        let mut state = 0u64;
        for (i, v) in values.iter().enumerate() {
            state |= (v.bit()? as u64) << i;
        }
        self.set_qureg(qr, state, qr.n)
    }

    // ---- gates ----

    /// Applies `gate` to single-qubit handles listed as `[controls..., targets...]`.
    pub fn gate(&mut self, gate: Gate, qubits: &[QubitHandle]) -> Result<()> {
        if qubits.len() != gate.num_qubits() {
            return Err(CqError::GateArity {
                expected: gate.num_qubits(),
                actual: qubits.len(),
            });
        }
        let reg = qubits[0].registry_index;
        if qubits.iter().any(|q| q.registry_index != reg) {
            return Err(CqError::CrossRegister);
        }
        let abs = qubits
            .iter()
            .map(|&q| self.resolve_one(q))
            .collect::<Result<Vec<_>>>()?;
        self.state_mut(reg)?.apply_gate(&gate, &abs)?;
        if self.dev.trace_gates {
            self.dev.gate_trace.push(GateEvent {
                exec_id: self.dev.current_exec,
                gate: gate.name(),
                registry_index: reg,
                qubits: abs.clone(),
            });
        }
        self.trace(|| format!("{} on register {reg} qubits {abs:?}", gate.name()));
        Ok(())
    }

    single_qubit_gates! {
        y => Gate::Y;
        z => Gate::Z;
        hadamard => Gate::H;
        s => Gate::S;
        sdg => Gate::Sdg;
        t => Gate::T;
        tdg => Gate::Tdg;
        sx => Gate::Sx;
    }

    pub fn x(&mut self, q: QubitHandle) -> Result<()> {
        self.gate(Gate::X, &[q])
    }

    pub fn h(&mut self, q: QubitHandle) -> Result<()> {
        self.gate(Gate::H, &[q])
    }

    pub fn rx(&mut self, q: QubitHandle, theta: f64) -> Result<()> {
        self.gate(Gate::Rx(theta), &[q])
    }

    pub fn ry(&mut self, q: QubitHandle, theta: f64) -> Result<()> {
        self.gate(Gate::Ry(theta), &[q])
    }

    pub fn rz(&mut self, q: QubitHandle, lambda: f64) -> Result<()> {
        self.gate(Gate::Rz(lambda), &[q])
    }

    pub fn phase(&mut self, q: QubitHandle, lambda: f64) -> Result<()> {
        self.gate(Gate::P(lambda), &[q])
    }

    pub fn u(&mut self, q: QubitHandle, theta: f64, phi: f64, lambda: f64) -> Result<()> {
        self.gate(Gate::U(theta, phi, lambda), &[q])
    }

    pub fn cnot(&mut self, control: QubitHandle, target: QubitHandle) -> Result<()> {
        self.gate(Gate::CX, &[control, target])
    }

    pub fn cy(&mut self, control: QubitHandle, target: QubitHandle) -> Result<()> {
        self.gate(Gate::CY, &[control, target])
    }

    pub fn cz(&mut self, control: QubitHandle, target: QubitHandle) -> Result<()> {
        self.gate(Gate::CZ, &[control, target])
    }

    pub fn ch(&mut self, control: QubitHandle, target: QubitHandle) -> Result<()> {
        self.gate(Gate::CH, &[control, target])
    }

    pub fn cphase(&mut self, control: QubitHandle, target: QubitHandle, lambda: f64) -> Result<()> {
        self.gate(Gate::CP(lambda), &[control, target])
    }

    pub fn crx(&mut self, control: QubitHandle, target: QubitHandle, theta: f64) -> Result<()> {
        self.gate(Gate::CRx(theta), &[control, target])
    }

    pub fn cry(&mut self, control: QubitHandle, target: QubitHandle, theta: f64) -> Result<()> {
        self.gate(Gate::CRy(theta), &[control, target])
    }

    pub fn crz(&mut self, control: QubitHandle, target: QubitHandle, lambda: f64) -> Result<()> {
        self.gate(Gate::CRz(lambda), &[control, target])
    }

    pub fn swap(&mut self, a: QubitHandle, b: QubitHandle) -> Result<()> {
        self.gate(Gate::Swap, &[a, b])
    }

    pub fn toffoli(&mut self, c0: QubitHandle, c1: QubitHandle, target: QubitHandle) -> Result<()> {
        self.gate(Gate::CCX, &[c0, c1, target])
    }

    pub fn cswap(&mut self, control: QubitHandle, a: QubitHandle, b: QubitHandle) -> Result<()> {
        self.gate(Gate::CSwap, &[control, a, b])
    }

    // ---- measurement ----

    fn reserve(&self, k: usize) -> Result<()> {
        if self.staging.len() + k > self.nmeasure {
            return Err(CqError::StagingOverflow(self.nmeasure));
        }
        Ok(())
    }

    fn collapse(&mut self, reg: usize, abs: usize, synchronised: bool) -> Result<CState> {
        let u = self.uniform();
        let bit = self.state_mut(reg)?.measure_with(abs, u);
        let outcome = CState::from(bit);
        if synchronised {
            self.staging.push(outcome);
            self.dev.sync_measurements += 1;
        } else {
            self.dev.device_measurements += 1;
        }
        self.dev.dmeasure_log.push(MeasurementRecord {
            outcome,
            registry_index: reg,
            qubit: abs,
            synchronised,
            shot: self.shot,
        });
        self.trace(|| format!("measured qubit {abs} of register {reg}: {outcome}"));
        Ok(outcome)
    }

    /// Measures one qubit and stages the outcome for the host.
    pub fn measure_qubit(&mut self, q: QubitHandle) -> Result<CState> {
        let abs = self.resolve_one(q)?;
        self.reserve(1)?;
        self.collapse(q.registry_index, abs, true)
    }

    /// Measures every qubit of `qr` (qubit 0 first) and stages the outcomes.
    pub fn measure_qureg(&mut self, qr: QubitHandle) -> Result<Vec<CState>> {
        let qubits = self.resolve(qr)?;
        self.reserve(qubits.len())?;
        qubits
            .into_iter()
            .map(|abs| self.collapse(qr.registry_index, abs, true))
            .collect()
    }

    fn targets(&self, qr: QubitHandle, nqubits: usize, targets: &[usize]) -> Result<Vec<usize>> {
        if nqubits != qr.n {
            return Err(CqError::SizeMismatch {
                expected: qr.n,
                actual: nqubits,
            });
        }
        let qubits = self.resolve(qr)?;
        for (k, &t) in targets.iter().enumerate() {
            if t >= nqubits {
                return Err(CqError::TargetOutOfRange { target: t, nqubits });
            }
            if targets[..k].contains(&t) {
                return Err(CqError::DuplicateTarget(t));
            }
        }
        Ok(targets.iter().map(|&t| qubits[t]).collect())
    }

    /// Measures `targets` (indices into `qr`) in order and stages the outcomes.
    pub fn measure(
        &mut self,
        qr: QubitHandle,
        nqubits: usize,
        targets: &[usize],
    ) -> Result<Vec<CState>> {
        let abs = self.targets(qr, nqubits, targets)?;
        self.reserve(abs.len())?;
        abs.into_iter()
            .map(|a| self.collapse(qr.registry_index, a, true))
            .collect()
    }

    /// As [`KernelCtx::measure`], but the outcomes stay on the device and do
    /// not count towards `nmeasure`.
    pub fn dmeasure(
        &mut self,
        qr: QubitHandle,
        nqubits: usize,
        targets: &[usize],
    ) -> Result<Vec<CState>> {
        let abs = self.targets(qr, nqubits, targets)?;
        abs.into_iter()
            .map(|a| self.collapse(qr.registry_index, a, false))
            .collect()
    }

    /// Measures one qubit; the outcome stays on the device.
    pub fn dmeasure_qubit(&mut self, q: QubitHandle) -> Result<CState> {
        let abs = self.resolve_one(q)?;
        self.collapse(q.registry_index, abs, false)
    }

    pub fn dmeasure_qureg(&mut self, qr: QubitHandle) -> Result<Vec<CState>> {
        let qubits = self.resolve(qr)?;
        qubits
            .into_iter()
            .map(|abs| self.collapse(qr.registry_index, abs, false))
            .collect()
    }

    /// Stages classical values computed on the device.
    pub fn store_results(&mut self, values: &[CState]) -> Result<()> {
        self.reserve(values.len())?;
        self.staging.extend_from_slice(values);
        Ok(())
    }

    // ---- analogue ----

    fn analog_register(&self, idx: usize) -> Result<&AnalogRegister> {
        self.dev.analog.mode.ok_or(CqError::ModeNotEnabled)?;
        match self.dev.analog.registers.get(&idx) {
            Some(r) if r.enabled => Ok(r),
            _ => Err(CqError::ModeNotEnabled),
        }
    }

    fn live_channel(&self, ch: &Channel) -> Result<()> {
        match self.dev.analog.registers.get(&ch.register.registry_index) {
            Some(r) if r.enabled && r.epoch == ch.epoch => Ok(()),
            _ => Err(CqError::InvalidChannel),
        }
    }

    /// Switches the state behind `qr` to analogue operation. Qubits start on
    /// a line at the default spacing.
    pub fn enable_analog_qreg(&mut self, qr: QubitHandle) -> Result<()> {
        self.dev.analog.mode.ok_or(CqError::ModeNotEnabled)?;
        let n = self.state(qr)?.num_qubits();
        self.resolve(qr)?;
        let defaults = self.dev.analog.default_positions(n);
        let reg = self
            .dev
            .analog
            .registers
            .entry(qr.registry_index)
            .or_insert_with(|| AnalogRegister {
                enabled: false,
                epoch: 0,
                channels_issued: 0,
                positions: defaults,
            });
        reg.enabled = true;
        self.trace(|| format!("register {} in analogue mode", qr.registry_index));
        Ok(())
    }

    /// Returns `qr` to digital operation. Channels issued on it become invalid.
    pub fn disable_analog_qreg(&mut self, qr: QubitHandle) -> Result<()> {
        self.analog_register(qr.registry_index)?;
        let reg = self
            .dev
            .analog
            .registers
            .get_mut(&qr.registry_index)
            .expect("checked above");
        reg.enabled = false;
        reg.epoch += 1;
        reg.channels_issued = 0;
        Ok(())
    }

    /// Moves the qubits of `qr` to new coordinates (µm), given as `x, y, z`
    /// triples in qubit order.
    pub fn set_qubit_pos(&mut self, qr: QubitHandle, coords: &[f64]) -> Result<()> {
        let qubits = self.resolve(qr)?;
        if coords.len() != 3 * qubits.len() {
            return Err(CqError::SizeMismatch {
                expected: 3 * qubits.len(),
                actual: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(CqError::BadParams("non-finite qubit coordinate".into()));
        }
        let mut positions = self.analog_register(qr.registry_index)?.positions.clone();
        for (k, &abs) in qubits.iter().enumerate() {
            positions[abs] = [coords[3 * k], coords[3 * k + 1], coords[3 * k + 2]];
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if distance(&positions[i], &positions[j]) == 0.0 {
                    return Err(CqError::CoincidentQubits(i, j));
                }
            }
        }
        self.dev
            .analog
            .registers
            .get_mut(&qr.registry_index)
            .expect("checked above")
            .positions = positions;
        Ok(())
    }

    /// Current coordinates of every qubit of `qr`.
    pub fn qubit_pos(&self, qr: QubitHandle) -> Result<Vec<Position>> {
        let qubits = self.resolve(qr)?;
        let reg = self.analog_register(qr.registry_index)?;
        Ok(qubits.iter().map(|&a| reg.positions[a]).collect())
    }

    /// Opens a channel on `qr`. LOCAL channels need a single-qubit `target` inside `qr`.
    pub fn get_channel(
        &mut self,
        qr: QubitHandle,
        addressing: Addressing,
        target: Option<QubitHandle>,
    ) -> Result<Channel> {
        self.resolve(qr)?;
        let reg = self.analog_register(qr.registry_index)?;
        let target = match addressing {
            Addressing::Global => None,
            Addressing::Local => {
                let t = target.ok_or(CqError::MissingTarget)?;
                Some(self.target_in(qr, t)?)
            }
        };
        let max = self.dev.analog.config.max_channels;
        if reg.channels_issued >= max {
            return Err(CqError::ChannelLimit(max));
        }
        let epoch = reg.epoch;
        self.dev
            .analog
            .registers
            .get_mut(&qr.registry_index)
            .expect("checked above")
            .channels_issued += 1;
        let id = self.dev.analog.next_channel;
        self.dev.analog.next_channel += 1;
        Ok(Channel {
            id,
            addressing,
            register: qr,
            target,
            clock: 0.0,
            epoch,
        })
    }

    fn target_in(&self, qr: QubitHandle, t: QubitHandle) -> Result<usize> {
        if t.n != 1 {
            return Err(CqError::SizeMismatch {
                expected: 1,
                actual: t.n,
            });
        }
        if t.registry_index != qr.registry_index
            || t.offset < qr.offset
            || t.offset >= qr.offset + qr.n
        {
            return Err(CqError::TargetOutOfRegister);
        }
        Ok(t.offset)
    }

    /// Points a LOCAL channel at another qubit of its register.
    pub fn retarget_channel(&mut self, ch: &mut Channel, target: QubitHandle) -> Result<()> {
        self.live_channel(ch)?;
        if ch.addressing == Addressing::Global {
            return Err(CqError::GlobalChannel);
        }
        ch.target = Some(self.target_in(ch.register, target)?);
        Ok(())
    }

    fn evolve(&mut self, ch: &Channel, segments: &[Segment]) -> Result<()> {
        let mode = self.dev.analog.mode.ok_or(CqError::ModeNotEnabled)?;
        let targets = ch.targets();
        let reg = self.analog_register(ch.register.registry_index)?;
        let positions: Vec<Position> = targets.iter().map(|&t| reg.positions[t]).collect();
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if distance(&positions[i], &positions[j]) == 0.0 {
                    return Err(CqError::CoincidentQubits(targets[i], targets[j]));
                }
            }
        }
        let cfg = self.dev.analog.config.clone();
        let state = self
            .dev
            .states
            .get_mut(ch.register.registry_index)
            .and_then(|s| s.as_mut())
            .ok_or(CqError::InvalidHandle)?;
        Evolution {
            mode,
            cfg: &cfg,
            targets: &targets,
            positions: &positions,
        }
        .run(state, segments)
    }

    /// Zero pulse with the device's configured sample count.
    pub fn init_pulse(&self, duration: f64) -> Result<Pulse> {
        Pulse::with_samples(duration, self.dev.analog.config.default_nsamples)
    }

    /// Evolves the channel's qubits under `pulse` and advances its clock.
    pub fn play(&mut self, ch: &mut Channel, pulse: &Pulse) -> Result<()> {
        self.live_channel(ch)?;
        let segments = pulse.segments()?;
        self.evolve(ch, &segments)?;
        ch.clock += pulse.duration();
        self.trace(|| {
            format!(
                "played {} ns on channel {}, clock {} ns",
                pulse.duration(),
                ch.id,
                ch.clock
            )
        });
        Ok(())
    }

    /// Plays `pulse`, then samples the channel's qubits `nshots` times from
    /// their joint distribution without disturbing the state. The result is
    /// shot-major: entry `s * k + j` is target `j` of sample `s`.
    pub fn capture(&mut self, ch: &mut Channel, pulse: &Pulse, nshots: usize) -> Result<Vec<i32>> {
        if nshots == 0 {
            return Err(CqError::ShotsZero);
        }
        self.play(ch, pulse)?;
        let targets = ch.targets();
        let probs = self.state(ch.register)?.marginal(&targets);
        let k = targets.len();
        let mut out = Vec::with_capacity(nshots * k);
        for _ in 0..nshots {
            let idx = sample_index(&probs, self.uniform());
            out.extend((0..k).map(|j| (idx >> j & 1) as i32));
        }
        Ok(out)
    }

    /// Idles the channel for `duration` ns. Interactions keep acting.
    pub fn delay(&mut self, ch: &mut Channel, duration: f64) -> Result<()> {
        if !(duration >= 0.0) {
            return Err(CqError::NegativeDelay(duration));
        }
        self.live_channel(ch)?;
        if duration > 0.0 {
            let idle = Segment {
                dt: duration,
                omega: 0.0,
                phi: 0.0,
                delta: 0.0,
            };
            self.evolve(ch, &[idle])?;
            ch.clock += duration;
        }
        Ok(())
    }

    /// Delays every channel up to the latest clock among them.
    pub fn barrier(&mut self, channels: &mut [&mut Channel]) -> Result<()> {
        let first = channels.first().ok_or(CqError::EmptyChannelList)?;
        let reg = first.register.registry_index;
        if channels.iter().any(|c| c.register.registry_index != reg) {
            return Err(CqError::MixedRegisters);
        }
        for c in channels.iter() {
            self.live_channel(c)?;
        }
        let latest = channels.iter().map(|c| c.clock).fold(f64::MIN, f64::max);
        for c in channels.iter_mut() {
            let gap = latest - c.clock;
            self.delay(c, gap)?;
            c.clock = latest;
        }
        Ok(())
    }
}

// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! The simulated device context.
//!
//! Each backend owns a FIFO queue of [`ControlOp`]s. An op is an integer
//! opcode plus a self-describing payload; the device indexes a fixed handler
//! table with the opcode, so the host only needs to ship the integer and the
//! data the op needs (a kernel key, a qubit count, ...). Ops are applied
//! strictly in enqueue order and at most one kernel runs at a time.

mod ctx;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use ctx::KernelCtx;

use crate::analog::{AnalogDevice, AnalogMode};
use crate::config::{AnalogConfig, DeviceMode};
use crate::diag::Diagnostics;
use crate::error::{CqError, Result};
use crate::exec::{ExecShared, ExecStatus, KernelSel};
use crate::handle::{CState, QubitHandle};
use crate::kernel::{KernelKey, KernelRegistry, PqKern, QKern};
use crate::sim::StateVector;

/// Control routine selector. The discriminant is the wire value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    Alloc = 0,
    Free = 1,
    RegisterKernel = 2,
    RegisterParamKernel = 3,
    RunKernel = 4,
    SetAnalogMode = 5,
    Reseed = 6,
    Probe = 7,
    Inspect = 8,
    PeekState = 9,
    Shutdown = 10,
}

impl Opcode {
    pub const COUNT: usize = 11;
}

impl TryFrom<u8> for Opcode {
    type Error = CqError;

    fn try_from(v: u8) -> Result<Self> {
        use Opcode::*;
        Ok(match v {
            0 => Alloc,
            1 => Free,
            2 => RegisterKernel,
            3 => RegisterParamKernel,
            4 => RunKernel,
            5 => SetAnalogMode,
            6 => Reseed,
            7 => Probe,
            8 => Inspect,
            9 => PeekState,
            10 => Shutdown,
            other => return Err(CqError::UnknownOpcode(other)),
        })
    }
}

/// Kernel launch shipped by an executor.
#[derive(Debug, Clone)]
pub(crate) struct RunRequest {
    pub kernel: KernelSel,
    pub qr: QubitHandle,
    pub nqubits: usize,
    pub exec: Arc<ExecShared>,
}

/// Data carried by a control op.
#[derive(Debug)]
pub enum Payload {
    Alloc {
        n: usize,
        reply: Sender<Result<usize>>,
    },
    Free {
        registry_index: usize,
        reply: Sender<Result<()>>,
    },
    RegisterKernel {
        key: KernelKey,
        kernel: QKern,
    },
    RegisterParamKernel {
        key: KernelKey,
        kernel: PqKern,
    },
    #[allow(private_interfaces)]
    RunKernel(RunRequest),
    SetAnalogMode {
        mode: AnalogMode,
    },
    Reseed {
        seed: u64,
    },
    /// Instrumented no-op: appends `tag` to the probe log.
    Probe {
        tag: u64,
    },
    Inspect {
        reply: Sender<DeviceSnapshot>,
    },
    PeekState {
        registry_index: usize,
        reply: Sender<Result<StateVector>>,
    },
    Shutdown,
}

impl Payload {
    /// Delivers `err` to whoever is waiting on this op, if anyone.
    fn reject(self, err: CqError) -> Option<CqError> {
        match self {
            Payload::Alloc { reply, .. } => reply.send(Err(err)).err().map(|_| CqError::DeviceDown),
            Payload::Free { reply, .. } => reply.send(Err(err)).err().map(|_| CqError::DeviceDown),
            Payload::PeekState { reply, .. } => {
                reply.send(Err(err)).err().map(|_| CqError::DeviceDown)
            }
            Payload::RunKernel(req) => {
                req.exec.finish(
                    ExecStatus::Failed,
                    Some(CqError::KernelError {
                        shot: 0,
                        source: Box::new(err),
                    }),
                );
                None
            }
            _ => Some(err),
        }
    }
}

#[derive(Debug)]
pub struct ControlOp {
    pub opcode: u8,
    pub payload: Payload,
}

impl ControlOp {
    pub fn new(opcode: u8, payload: Payload) -> Self {
        ControlOp { opcode, payload }
    }

    fn of(opcode: Opcode, payload: Payload) -> Self {
        ControlOp::new(opcode as u8, payload)
    }

    pub fn alloc(n: usize) -> (Self, Receiver<Result<usize>>) {
        let (reply, rx) = channel();
        (Self::of(Opcode::Alloc, Payload::Alloc { n, reply }), rx)
    }

    pub fn free(registry_index: usize) -> (Self, Receiver<Result<()>>) {
        let (reply, rx) = channel();
        (
            Self::of(
                Opcode::Free,
                Payload::Free {
                    registry_index,
                    reply,
                },
            ),
            rx,
        )
    }

    pub fn register(key: KernelKey, kernel: QKern) -> Self {
        Self::of(
            Opcode::RegisterKernel,
            Payload::RegisterKernel { key, kernel },
        )
    }

    pub fn register_param(key: KernelKey, kernel: PqKern) -> Self {
        Self::of(
            Opcode::RegisterParamKernel,
            Payload::RegisterParamKernel { key, kernel },
        )
    }

    pub(crate) fn run(req: RunRequest) -> Self {
        Self::of(Opcode::RunKernel, Payload::RunKernel(req))
    }

    pub fn analog_mode(mode: AnalogMode) -> Self {
        Self::of(Opcode::SetAnalogMode, Payload::SetAnalogMode { mode })
    }

    pub fn reseed(seed: u64) -> Self {
        Self::of(Opcode::Reseed, Payload::Reseed { seed })
    }

    pub fn probe(tag: u64) -> Self {
        Self::of(Opcode::Probe, Payload::Probe { tag })
    }

    pub fn inspect() -> (Self, Receiver<DeviceSnapshot>) {
        let (reply, rx) = channel();
        (Self::of(Opcode::Inspect, Payload::Inspect { reply }), rx)
    }

    pub fn peek_state(registry_index: usize) -> (Self, Receiver<Result<StateVector>>) {
        let (reply, rx) = channel();
        (
            Self::of(
                Opcode::PeekState,
                Payload::PeekState {
                    registry_index,
                    reply,
                },
            ),
            rx,
        )
    }

    pub fn shutdown() -> Self {
        Self::of(Opcode::Shutdown, Payload::Shutdown)
    }
}

/// One entry of the optional gate trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GateEvent {
    pub exec_id: u64,
    pub gate: &'static str,
    pub registry_index: usize,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: CState,
    pub registry_index: usize,
    pub qubit: usize,
    pub synchronised: bool,
    pub shot: usize,
}

/// Point-in-time view of a device, for tests and debugging.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSnapshot {
    pub backend: usize,
    /// `(registry_index, qubits)` of every live state.
    pub live_registers: Vec<(usize, usize)>,
    pub kernels: usize,
    pub param_kernels: usize,
    pub probe_log: Vec<u64>,
    pub gate_trace: Vec<GateEvent>,
    pub sync_measurements: u64,
    pub device_measurements: u64,
    pub kernels_run: u64,
    pub analog_mode: Option<AnalogMode>,
    pub protocol_errors: Vec<CqError>,
    /// Every measurement of the most recent shot, synchronised or not.
    pub dmeasure_log: Vec<MeasurementRecord>,
}

#[derive(Debug, Clone)]
pub struct DeviceOptions {
    pub backend: usize,
    pub seed: u64,
    pub max_kernels: usize,
    pub scramble_new_registers: bool,
    pub trace_gates: bool,
    pub mode: DeviceMode,
    pub analog: AnalogConfig,
}

impl Default for DeviceOptions {
    fn default() -> Self {
        DeviceOptions {
            backend: 0,
            seed: 0,
            max_kernels: 1024,
            scramble_new_registers: false,
            trace_gates: false,
            mode: DeviceMode::Threaded,
            analog: AnalogConfig::default(),
        }
    }
}

pub(crate) fn seeded_rng(seed: u64, backend: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(backend as u64);
    rng
}

pub(crate) struct DeviceState {
    backend: usize,
    pub(crate) states: Vec<Option<StateVector>>,
    kernels: KernelRegistry,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) analog: AnalogDevice,
    scramble: bool,
    pub(crate) trace_gates: bool,
    pub(crate) diag: Diagnostics,
    probe_log: Vec<u64>,
    pub(crate) gate_trace: Vec<GateEvent>,
    pub(crate) dmeasure_log: Vec<MeasurementRecord>,
    pub(crate) sync_measurements: u64,
    pub(crate) device_measurements: u64,
    kernels_run: u64,
    protocol_errors: Vec<CqError>,
    pub(crate) current_exec: u64,
}

enum Flow {
    Continue,
    Stop,
}

type Handler = fn(&mut DeviceState, Payload) -> Flow;

const HANDLERS: [Handler; Opcode::COUNT] = [
    DeviceState::op_alloc,
    DeviceState::op_free,
    DeviceState::op_register,
    DeviceState::op_register_param,
    DeviceState::op_run,
    DeviceState::op_analog_mode,
    DeviceState::op_reseed,
    DeviceState::op_probe,
    DeviceState::op_inspect,
    DeviceState::op_peek,
    DeviceState::op_shutdown,
];

impl DeviceState {
    fn new(opts: &DeviceOptions, diag: Diagnostics) -> Self {
        DeviceState {
            backend: opts.backend,
            states: Vec::new(),
            kernels: KernelRegistry::new(opts.max_kernels),
            rng: seeded_rng(opts.seed, opts.backend),
            analog: AnalogDevice::new(opts.analog.clone()),
            scramble: opts.scramble_new_registers,
            trace_gates: opts.trace_gates,
            diag,
            probe_log: Vec::new(),
            gate_trace: Vec::new(),
            dmeasure_log: Vec::new(),
            sync_measurements: 0,
            device_measurements: 0,
            kernels_run: 0,
            protocol_errors: Vec::new(),
            current_exec: 0,
        }
    }

    fn dispatch(&mut self, op: ControlOp) -> Flow {
        match Opcode::try_from(op.opcode) {
            Ok(code) => HANDLERS[code as usize](self, op.payload),
            Err(e) => {
                self.protocol_error(op.payload, e);
                Flow::Continue
            }
        }
    }

    fn protocol_error(&mut self, payload: Payload, err: CqError) {
        self.diag.log(1, || {
            format!("backend {}: protocol error: {err}", self.backend)
        });
        self.protocol_errors.push(err.clone());
        if let Some(e) = payload.reject(err) {
            // nobody to report to beyond the device error log
            let _ = e;
        }
    }

    fn mismatch(&mut self, code: Opcode, payload: Payload) -> Flow {
        self.protocol_error(payload, CqError::ProtocolError(code as u8));
        Flow::Continue
    }

    fn op_alloc(&mut self, payload: Payload) -> Flow {
        let Payload::Alloc { n, reply } = payload else {
            return self.mismatch(Opcode::Alloc, payload);
        };
        let state = if self.scramble {
            StateVector::random(n, &mut self.rng)
        } else {
            StateVector::new(n)
        };
        self.states.push(Some(state));
        let index = self.states.len() - 1;
        self.diag.log(2, || {
            format!(
                "backend {}: allocated {n} qubits as register {index}",
                self.backend
            )
        });
        let _ = reply.send(Ok(index));
        Flow::Continue
    }

    fn op_free(&mut self, payload: Payload) -> Flow {
        let Payload::Free {
            registry_index,
            reply,
        } = payload
        else {
            return self.mismatch(Opcode::Free, payload);
        };
        let result = match self.states.get_mut(registry_index) {
            Some(slot @ Some(_)) => {
                *slot = None;
                self.analog.registers.remove(&registry_index);
                Ok(())
            }
            _ => Err(CqError::InvalidHandle),
        };
        let _ = reply.send(result);
        Flow::Continue
    }

    fn op_register(&mut self, payload: Payload) -> Flow {
        let Payload::RegisterKernel { key, kernel } = payload else {
            return self.mismatch(Opcode::RegisterKernel, payload);
        };
        self.kernels.install(key, kernel);
        Flow::Continue
    }

    fn op_register_param(&mut self, payload: Payload) -> Flow {
        let Payload::RegisterParamKernel { key, kernel } = payload else {
            return self.mismatch(Opcode::RegisterParamKernel, payload);
        };
        self.kernels.install_param(key, kernel);
        Flow::Continue
    }

    fn op_analog_mode(&mut self, payload: Payload) -> Flow {
        let Payload::SetAnalogMode { mode } = payload else {
            return self.mismatch(Opcode::SetAnalogMode, payload);
        };
        self.analog.mode = Some(mode);
        Flow::Continue
    }

    fn op_reseed(&mut self, payload: Payload) -> Flow {
        let Payload::Reseed { seed } = payload else {
            return self.mismatch(Opcode::Reseed, payload);
        };
        self.rng = seeded_rng(seed, self.backend);
        Flow::Continue
    }

    fn op_probe(&mut self, payload: Payload) -> Flow {
        let Payload::Probe { tag } = payload else {
            return self.mismatch(Opcode::Probe, payload);
        };
        self.probe_log.push(tag);
        Flow::Continue
    }

    fn op_inspect(&mut self, payload: Payload) -> Flow {
        let Payload::Inspect { reply } = payload else {
            return self.mismatch(Opcode::Inspect, payload);
        };
        let _ = reply.send(self.snapshot());
        Flow::Continue
    }

    fn op_peek(&mut self, payload: Payload) -> Flow {
        let Payload::PeekState {
            registry_index,
            reply,
        } = payload
        else {
            return self.mismatch(Opcode::PeekState, payload);
        };
        let state = self
            .states
            .get(registry_index)
            .and_then(|s| s.clone())
            .ok_or(CqError::InvalidHandle);
        let _ = reply.send(state);
        Flow::Continue
    }

    fn op_shutdown(&mut self, payload: Payload) -> Flow {
        if !matches!(payload, Payload::Shutdown) {
            return self.mismatch(Opcode::Shutdown, payload);
        }
        self.diag
            .log(2, || format!("backend {}: shutting down", self.backend));
        Flow::Stop
    }

    fn snapshot(&self) -> DeviceSnapshot {
        DeviceSnapshot {
            backend: self.backend,
            live_registers: self
                .states
                .iter()
                .enumerate()
                .filter_map(|(i, s)| s.as_ref().map(|s| (i, s.num_qubits())))
                .collect(),
            kernels: self.kernels.len(),
            param_kernels: self.kernels.len_param(),
            probe_log: self.probe_log.clone(),
            gate_trace: self.gate_trace.clone(),
            sync_measurements: self.sync_measurements,
            device_measurements: self.device_measurements,
            kernels_run: self.kernels_run,
            analog_mode: self.analog.mode,
            protocol_errors: self.protocol_errors.clone(),
            dmeasure_log: self.dmeasure_log.clone(),
        }
    }

    fn op_run(&mut self, payload: Payload) -> Flow {
        let Payload::RunKernel(req) = payload else {
            return self.mismatch(Opcode::RunKernel, payload);
        };
        self.run_kernel(req);
        Flow::Continue
    }

    fn run_kernel(&mut self, req: RunRequest) {
        let exec = req.exec.clone();
        exec.start();
        let fail = |shot: usize, e: CqError| {
            exec.finish(
                ExecStatus::Failed,
                Some(CqError::KernelError {
                    shot,
                    source: Box::new(e),
                }),
            );
        };

        enum Entry {
            Plain(QKern),
            Param(PqKern, crate::kernel::ParamPack),
        }
        let entry = match &req.kernel {
            KernelSel::Plain(key) => match self.kernels.get(*key) {
                Some(k) => Entry::Plain(k.clone()),
                None => return fail(0, CqError::UnknownKey(*key)),
            },
            KernelSel::Param(key, params) => match (self.kernels.get_param(*key), params) {
                (None, _) => return fail(0, CqError::UnknownKey(*key)),
                (Some(_), None) => return fail(0, CqError::MissingParams),
                (Some(k), Some(p)) => Entry::Param(k.clone(), p.clone()),
            },
        };
        let live = self
            .states
            .get(req.qr.registry_index)
            .and_then(|s| s.as_ref())
            .is_some_and(|s| req.qr.offset + req.qr.n <= s.num_qubits());
        if !live {
            return fail(0, CqError::InvalidHandle);
        }

        self.current_exec = exec.id;
        let nmeasure = exec.nmeasure;
        let mut staging: Vec<CState> = Vec::with_capacity(nmeasure);
        for shot in 0..exec.nshots {
            if exec.halt_requested() {
                self.diag.log(2, || {
                    format!(
                        "backend {}: execution {} halted after {shot} shots",
                        self.backend, exec.id
                    )
                });
                exec.finish(ExecStatus::Halted, None);
                return;
            }
            staging.clear();
            self.dmeasure_log.clear();
            self.kernels_run += 1;
            let outcome = {
                let mut ctx = KernelCtx::new(self, &mut staging, nmeasure, shot);
                catch_unwind(AssertUnwindSafe(|| match &entry {
                    Entry::Plain(k) => k.call(&mut ctx, req.nqubits, req.qr),
                    Entry::Param(k, p) => k.call(&mut ctx, req.nqubits, req.qr, p),
                }))
                .unwrap_or_else(|_| Err(CqError::KernelFailure("kernel panicked".into())))
            };
            if let Err(e) = outcome {
                self.diag.log(1, || {
                    format!(
                        "backend {}: execution {} failed on shot {shot}: {e}",
                        self.backend, exec.id
                    )
                });
                return fail(shot, e);
            }
            staging.resize(nmeasure, CState::UNSET);
            exec.push_row(&staging);
            if self.diag.enabled(3) {
                if let Some(Some(s)) = self.states.get(req.qr.registry_index) {
                    let dump = s.dump();
                    self.diag.log(3, || {
                        format!(
                            "register {} after shot {shot}:\n{dump}",
                            req.qr.registry_index
                        )
                    });
                }
            }
        }
        exec.finish(ExecStatus::Done, None);
    }
}

enum DeviceKind {
    Threaded {
        tx: Mutex<Option<Sender<ControlOp>>>,
        join: Mutex<Option<JoinHandle<()>>>,
    },
    Inline {
        state: Mutex<Box<DeviceState>>,
    },
}

/// Host-side handle to one simulated device.
pub struct Device {
    backend: usize,
    kind: DeviceKind,
    down: AtomicBool,
}

impl std::fmt::Debug for Device {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Device")
            .field("backend", &self.backend)
            .field("down", &self.down.load(Ordering::SeqCst))
            .finish()
    }
}

impl Device {
    /// Starts the device context and leaves it idle.
    pub fn spawn(opts: DeviceOptions, diag: Diagnostics) -> Result<Device> {
        let state = DeviceState::new(&opts, diag);
        let kind = match opts.mode {
            DeviceMode::Inline => DeviceKind::Inline {
                state: Mutex::new(Box::new(state)),
            },
            DeviceMode::Threaded => {
                let (tx, rx) = channel::<ControlOp>();
                let join = std::thread::Builder::new()
                    .name(format!("cq-device-{}", opts.backend))
                    .spawn(move || device_loop(state, rx))
                    .map_err(|e| CqError::DeviceStartFailure(e.to_string()))?;
                DeviceKind::Threaded {
                    tx: Mutex::new(Some(tx)),
                    join: Mutex::new(Some(join)),
                }
            }
        };
        Ok(Device {
            backend: opts.backend,
            kind,
            down: AtomicBool::new(false),
        })
    }

    pub fn backend(&self) -> usize {
        self.backend
    }

    /// Appends `op` to the queue and returns without waiting for it to run.
    pub fn enqueue(&self, op: ControlOp) -> Result<()> {
        if self.down.load(Ordering::SeqCst) {
            return Err(CqError::DeviceDown);
        }
        if op.opcode == Opcode::Shutdown as u8 {
            self.down.store(true, Ordering::SeqCst);
        }
        match &self.kind {
            DeviceKind::Inline { state } => {
                let mut st = state.lock().unwrap_or_else(|e| e.into_inner());
                st.dispatch(op);
                Ok(())
            }
            DeviceKind::Threaded { tx, .. } => {
                let guard = tx.lock().unwrap_or_else(|e| e.into_inner());
                match guard.as_ref() {
                    Some(tx) => tx.send(op).map_err(|_| CqError::DeviceDown),
                    None => Err(CqError::DeviceDown),
                }
            }
        }
    }

    /// Enqueues an op built around a reply channel and blocks for the answer.
    pub fn request<T>(&self, (op, rx): (ControlOp, Receiver<T>)) -> Result<T> {
        self.enqueue(op)?;
        rx.recv().map_err(|_| CqError::DeviceDown)
    }

    pub fn inspect(&self) -> Result<DeviceSnapshot> {
        self.request(ControlOp::inspect())
    }

    /// Enqueues shutdown behind all pending work and waits for the context to exit.
    pub fn shutdown(&self) -> Result<()> {
        if !self.down.load(Ordering::SeqCst) {
            self.enqueue(ControlOp::shutdown())?;
        }
        if let DeviceKind::Threaded { tx, join } = &self.kind {
            tx.lock().unwrap_or_else(|e| e.into_inner()).take();
            if let Some(j) = join.lock().unwrap_or_else(|e| e.into_inner()).take() {
                j.join()
                    .map_err(|_| CqError::DeviceStartFailure("device thread panicked".into()))?;
            }
        }
        Ok(())
    }

    pub fn is_down(&self) -> bool {
        self.down.load(Ordering::SeqCst)
    }
}

impl Drop for Device {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}

fn device_loop(mut state: DeviceState, rx: Receiver<ControlOp>) {
    while let Ok(op) = rx.recv() {
        if let Flow::Stop = state.dispatch(op) {
            break;
        }
    }
}

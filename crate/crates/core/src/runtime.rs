// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Host-side environment: lifecycle, quantum resources and kernel registration.

use std::sync::Arc;

use rand::Rng;

use crate::analog::AnalogMode;
use crate::config::RuntimeConfig;
use crate::device::{ControlOp, Device, DeviceOptions, DeviceSnapshot, RunRequest};
use crate::diag::Diagnostics;
use crate::error::{CqError, Result};
use crate::exec::{ExecHandle, ExecRequest, ExecShared, KernelSel};
use crate::handle::{CState, QubitHandle, Verbosity};
use crate::kernel::{KernelKey, KernelRegistry, PqKern, QKern};
use crate::sim::StateVector;

/// The CQ environment of one host program.
///
/// Registry and lifecycle operations take `&mut self`; sharing a runtime
/// between host threads needs external serialisation.
///
/// ```
/// use cq::{CState, KernelCtx, KernelResult, QKern, QubitHandle, Runtime, RuntimeConfig};
///
/// fn flip(ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
///     ctx.set_qureg(qr, 0, n)?;
///     ctx.x(qr.at(0)?)?;
///     ctx.measure_qureg(qr)?;
///     Ok(())
/// }
///
/// let mut rt = Runtime::new(RuntimeConfig::default().with_seed(1));
/// rt.init(0).unwrap();
/// let qr = rt.alloc_qureg(2).unwrap();
/// let k = QKern::new(flip);
/// rt.register_qkern(&k).unwrap();
/// let mut out = [CState::UNSET; 2];
/// rt.s_qrun(&k, &qr, 2, &mut out, 2).unwrap();
/// assert_eq!(out, [CState::ONE, CState::ZERO]);
/// rt.finalise(0).unwrap();
/// ```
#[derive(Debug)]
pub struct Runtime {
    config: RuntimeConfig,
    diag: Diagnostics,
    env: Option<Env>,
}

#[derive(Debug)]
struct Env {
    devices: Vec<Device>,
    kernels: KernelRegistry,
    /// Qubit count per registry index; `None` once freed. Indices are never reused.
    registers: Vec<Option<usize>>,
    in_flight: Vec<Arc<ExecShared>>,
    seed: u64,
}

impl Default for Runtime {
    fn default() -> Self {
        Runtime::new(RuntimeConfig::default())
    }
}

impl Runtime {
    pub fn new(config: RuntimeConfig) -> Self {
        Runtime {
            config,
            diag: Diagnostics::new(true),
            env: None,
        }
    }

    /// Default configuration overridden by `CQ_VERBOSITY` and `CQ_SEED`.
    pub fn from_env() -> Result<Self> {
        Ok(Runtime::new(RuntimeConfig::default().with_env()?))
    }

    pub fn config(&self) -> &RuntimeConfig {
        &self.config
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diag
    }

    pub fn is_initialised(&self) -> bool {
        self.env.is_some()
    }

    fn env(&self) -> Result<&Env> {
        self.env.as_ref().ok_or(CqError::NotInitialised)
    }

    fn env_mut(&mut self) -> Result<&mut Env> {
        self.env.as_mut().ok_or(CqError::NotInitialised)
    }

    fn apply_verbosity(&self, v: u32) {
        let v = self.config.verbosity_override.unwrap_or(Verbosity(v));
        self.diag.set_verbosity(v);
    }

    /// Starts one idle device context per configured backend.
    pub fn init(&mut self, verbosity: u32) -> Result<()> {
        if self.env.is_some() {
            return Err(CqError::AlreadyInitialised);
        }
        self.config.validate()?;
        self.apply_verbosity(verbosity);
        let seed = self.config.seed.unwrap_or_else(|| rand::rng().random());
        let mut devices = Vec::with_capacity(self.config.backends);
        for backend in 0..self.config.backends {
            let opts = DeviceOptions {
                backend,
                seed,
                max_kernels: self.config.max_kernels,
                scramble_new_registers: self.config.scramble_new_registers,
                trace_gates: self.config.trace_gates,
                mode: self.config.device_mode,
                analog: self.config.analog.clone(),
            };
            devices.push(Device::spawn(opts, self.diag.clone())?);
        }
        self.diag.log(1, || {
            format!(
                "initialised {} device(s) ({:?}), seed {seed}",
                devices.len(),
                self.config.device_mode
            )
        });
        self.env = Some(Env {
            devices,
            kernels: KernelRegistry::new(self.config.max_kernels),
            registers: Vec::new(),
            in_flight: Vec::new(),
            seed,
        });
        Ok(())
    }

    /// Stops every device after its queued work. In-flight executions are
    /// halted at their next shot boundary first.
    pub fn finalise(&mut self, verbosity: u32) -> Result<()> {
        self.env()?;
        self.apply_verbosity(verbosity);
        let env = self.env.take().expect("checked above");
        for exec in env.in_flight.iter().filter(|e| !e.status().is_terminal()) {
            self.diag.log(1, || {
                format!(
                    "warning: halting in-flight execution {} at finalise",
                    exec.id
                )
            });
            exec.request_halt();
        }
        let mut first_err = None;
        for dev in &env.devices {
            if let Err(e) = dev.shutdown() {
                first_err.get_or_insert(e);
            }
        }
        self.diag.log(1, || "finalised".to_string());
        first_err.map_or(Ok(()), Err)
    }

    /// Seed the device RNG streams were derived from.
    pub fn seed(&self) -> Result<u64> {
        Ok(self.env()?.seed)
    }

    pub fn num_backends(&self) -> Result<usize> {
        Ok(self.env()?.devices.len())
    }

    fn device(&self, backend: usize) -> Result<&Device> {
        self.env()?
            .devices
            .get(backend)
            .ok_or(CqError::UnknownBackend(backend))
    }

    /// Restarts every device RNG stream from `seed`, behind already queued work.
    pub fn reseed(&mut self, seed: u64) -> Result<()> {
        let env = self.env_mut()?;
        for dev in &env.devices {
            dev.enqueue(ControlOp::reseed(seed))?;
        }
        env.seed = seed;
        Ok(())
    }

    // ---- resources ----

    /// Allocates `n` qubits. Contents are undefined until a kernel initialises them.
    pub fn alloc_qureg(&mut self, n: usize) -> Result<QubitHandle> {
        let max = self.config.max_qubits;
        let env = self.env_mut()?;
        if n == 0 || n > max {
            return Err(CqError::TooManyQubits { requested: n, max });
        }
        // every backend holds its own copy so that indices agree everywhere
        let mut index = None;
        for dev in &env.devices {
            let got = dev.request(ControlOp::alloc(n))??;
            debug_assert!(index.is_none_or(|i| i == got));
            index = Some(got);
        }
        let index = index.expect("at least one backend");
        debug_assert_eq!(index, env.registers.len());
        env.registers.push(Some(n));
        self.diag
            .log(2, || format!("alloc_qureg({n}) -> register {index}"));
        Ok(QubitHandle::root(index, n))
    }

    pub fn alloc_qubit(&mut self) -> Result<QubitHandle> {
        self.alloc_qureg(1)
    }

    /// Releases a register returned by [`Runtime::alloc_qureg`]. Sub-register
    /// views cannot be freed.
    pub fn free_qureg(&mut self, qr: &QubitHandle) -> Result<()> {
        let env = self.env_mut()?;
        match env.registers.get(qr.registry_index) {
            Some(Some(n)) if qr.offset == 0 && qr.n == *n => {}
            _ => return Err(CqError::InvalidHandle),
        }
        env.in_flight.retain(|e| !e.status().is_terminal());
        if env
            .in_flight
            .iter()
            .any(|e| e.registry_index == qr.registry_index)
        {
            return Err(CqError::RegisterInUse(qr.registry_index));
        }
        for dev in &env.devices {
            dev.request(ControlOp::free(qr.registry_index))??;
        }
        env.registers[qr.registry_index] = None;
        Ok(())
    }

    pub fn free_qubit(&mut self, q: &QubitHandle) -> Result<()> {
        self.free_qureg(q)
    }

    fn check_handle(&self, qr: &QubitHandle) -> Result<()> {
        match self.env()?.registers.get(qr.registry_index) {
            Some(Some(n)) if qr.n >= 1 && qr.offset + qr.n <= *n => Ok(()),
            _ => Err(CqError::InvalidHandle),
        }
    }

    // ---- kernels ----

    /// Registers a kernel with the host and every device; idempotent.
    pub fn register_qkern(&mut self, k: &QKern) -> Result<KernelKey> {
        let env = self.env_mut()?;
        let (key, fresh) = env.kernels.register(k)?;
        if fresh {
            for dev in &env.devices {
                dev.enqueue(ControlOp::register(key, k.clone()))?;
            }
            self.diag
                .log(2, || format!("registered kernel {k:?} as key {key}"));
        }
        Ok(key)
    }

    pub fn register_pqkern(&mut self, k: &PqKern) -> Result<KernelKey> {
        let env = self.env_mut()?;
        let (key, fresh) = env.kernels.register_param(k)?;
        if fresh {
            for dev in &env.devices {
                dev.enqueue(ControlOp::register_param(key, k.clone()))?;
            }
            self.diag.log(2, || {
                format!("registered parameterised kernel {k:?} as key {key}")
            });
        }
        Ok(key)
    }

    pub fn kernel_key(&self, k: &QKern) -> Result<KernelKey> {
        self.env()?
            .kernels
            .key_of(k)
            .ok_or(CqError::KernelNotRegistered)
    }

    pub fn param_kernel_key(&self, k: &PqKern) -> Result<KernelKey> {
        self.env()?
            .kernels
            .key_of_param(k)
            .ok_or(CqError::KernelNotRegistered)
    }

    // ---- analogue ----

    /// Selects the analogue Hamiltonian on every device. The latest call wins.
    pub fn enable_analog_mode(&mut self, mode: AnalogMode) -> Result<()> {
        let env = self.env()?;
        for dev in &env.devices {
            dev.enqueue(ControlOp::analog_mode(mode))?;
        }
        self.diag.log(2, || format!("analogue mode {mode:?}"));
        Ok(())
    }

    /// Integer form: 0 = ISING, 1 = XY.
    pub fn enable_analog_mode_id(&mut self, mode: i32) -> Result<()> {
        self.env()?;
        self.enable_analog_mode(AnalogMode::try_from(mode)?)
    }

    // ---- execution ----

    /// Validates `req` and queues it on its backend. Returns once queued.
    ///
    /// `buffer` becomes the handle's host result buffer and must hold at
    /// least `nmeasure * nshots` entries.
    pub fn execute(
        &mut self,
        req: ExecRequest,
        buffer: Vec<CState>,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let env = self.env()?;
        if req.backend >= env.devices.len() {
            return Err(CqError::UnknownBackend(req.backend));
        }
        if req.nshots == 0 {
            return Err(CqError::ZeroShots);
        }
        let required = req.required_capacity();
        if buffer.len() < required {
            return Err(CqError::BufferTooSmall {
                capacity: buffer.len(),
                required,
            });
        }
        match &req.kernel {
            KernelSel::Plain(key) => {
                env.kernels.get(*key).ok_or(CqError::UnknownKey(*key))?;
            }
            KernelSel::Param(key, params) => {
                env.kernels
                    .get_param(*key)
                    .ok_or(CqError::UnknownKey(*key))?;
                if params.is_none() {
                    return Err(CqError::MissingParams);
                }
            }
        }
        self.check_handle(&req.qr)?;
        if exec.is_in_flight() {
            return Err(CqError::HandleBusy);
        }

        let shared = Arc::new(ExecShared::new(
            req.qr.registry_index,
            req.nmeasure,
            req.nshots,
        ));
        exec.bind(shared.clone(), buffer)?;
        let env = self.env_mut()?;
        env.in_flight.retain(|e| !e.status().is_terminal());
        env.in_flight.push(shared.clone());
        let backend = req.backend;
        self.diag.log(2, || {
            format!(
                "execution {} of {:?}: {} shot(s) on backend {backend}",
                shared.id, req.kernel, req.nshots
            )
        });
        let op = ControlOp::run(RunRequest {
            kernel: req.kernel,
            qr: req.qr,
            nqubits: req.nqubits,
            exec: shared,
        });
        self.device(backend)?.enqueue(op)
    }

    /// Executes `req` and blocks until every shot is synchronised into `result`.
    pub fn run_blocking(&mut self, req: ExecRequest, result: &mut [CState]) -> Result<()> {
        let mut exec = ExecHandle::new();
        self.execute(req, result.to_vec(), &mut exec)?;
        let outcome = exec.wait();
        result.copy_from_slice(exec.results());
        outcome
    }

    // ---- introspection ----

    /// Snapshot of one device, taken after every op queued before this call.
    pub fn inspect(&self, backend: usize) -> Result<DeviceSnapshot> {
        self.device(backend)?.inspect()
    }

    /// Copy of the device state behind `qr` on `backend`. Simulator only.
    pub fn peek_state(&self, qr: &QubitHandle, backend: usize) -> Result<StateVector> {
        self.check_handle(qr)?;
        self.device(backend)?
            .request(ControlOp::peek_state(qr.registry_index))?
    }

    /// Appends an instrumented no-op to a device queue.
    pub fn probe(&self, backend: usize, tag: u64) -> Result<()> {
        self.device(backend)?.enqueue(ControlOp::probe(tag))
    }
}

impl Drop for Runtime {
    fn drop(&mut self) {
        if self.env.is_some() {
            let v = self.diag.verbosity();
            let _ = self.finalise(v.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DeviceMode;
    use crate::device::KernelCtx;
    use crate::exec::ExecStatus;
    use crate::kernel::KernelResult;

    fn rt() -> Runtime {
        let mut rt = Runtime::new(RuntimeConfig::default().with_seed(3));
        rt.init(0).unwrap();
        rt
    }

    fn nop(_: &mut KernelCtx<'_>, _: usize, _: QubitHandle) -> KernelResult {
        Ok(())
    }

    fn slow(ctx: &mut KernelCtx<'_>, _: usize, qr: QubitHandle) -> KernelResult {
        std::thread::sleep(std::time::Duration::from_millis(2));
        ctx.measure_qubit(qr.at(0)?)?;
        Ok(())
    }

    #[test]
    fn lifecycle() {
        let mut rt = Runtime::new(RuntimeConfig::default().with_seed(1));
        assert_eq!(rt.finalise(0), Err(CqError::NotInitialised));
        assert_eq!(rt.alloc_qureg(1), Err(CqError::NotInitialised));
        rt.init(0).unwrap();
        assert_eq!(rt.init(0), Err(CqError::AlreadyInitialised));
        rt.finalise(0).unwrap();
        assert_eq!(rt.alloc_qureg(1), Err(CqError::NotInitialised));
        assert_eq!(
            rt.register_qkern(&QKern::new(nop)),
            Err(CqError::NotInitialised)
        );
        assert_eq!(
            rt.enable_analog_mode(AnalogMode::Ising),
            Err(CqError::NotInitialised)
        );
    }

    #[test]
    fn verbose_init_logs() {
        let mut rt = Runtime::new(RuntimeConfig::default().with_seed(1));
        rt.diag = Diagnostics::new(false);
        rt.init(2).unwrap();
        assert!(!rt.diagnostics().lines().is_empty());
    }

    #[test]
    fn allocation_rules() {
        let mut rt = rt();
        assert_eq!(
            rt.alloc_qureg(0),
            Err(CqError::TooManyQubits {
                requested: 0,
                max: 24
            })
        );
        let qr = rt.alloc_qureg(10).unwrap();
        assert_eq!((qr.offset, qr.n), (0, 10));
        let q = rt.alloc_qubit().unwrap();
        assert_eq!(q.n, 1);
        assert_ne!(q.registry_index, qr.registry_index);
        assert_eq!(
            rt.free_qureg(&qr.at(3).unwrap()),
            Err(CqError::InvalidHandle)
        );
        rt.free_qureg(&qr).unwrap();
        assert_eq!(rt.free_qureg(&qr), Err(CqError::InvalidHandle));
        assert_eq!(
            rt.inspect(0).unwrap().live_registers,
            vec![(q.registry_index, 1)]
        );
    }

    #[test]
    fn registration_has_no_device_side_effects() {
        let mut rt = rt();
        let before = rt.inspect(0).unwrap();
        assert_eq!(rt.register_qkern(&QKern::new(nop)).unwrap(), 0);
        assert_eq!(rt.register_qkern(&QKern::new(nop)).unwrap(), 0);
        assert_eq!(rt.register_qkern(&QKern::new(slow)).unwrap(), 1);
        let after = rt.inspect(0).unwrap();
        assert_eq!(after.kernels, 2);
        assert_eq!(after.kernels_run, before.kernels_run);
        assert_eq!(after.sync_measurements + after.device_measurements, 0);
        assert_eq!(after.live_registers, before.live_registers);
    }

    #[test]
    fn free_while_in_flight_is_rejected() {
        let mut rt = rt();
        let qr = rt.alloc_qureg(1).unwrap();
        let k = QKern::new(slow);
        rt.register_qkern(&k).unwrap();
        let mut h = ExecHandle::new();
        rt.am_qrun(&k, &qr, 1, vec![CState::UNSET; 200], 1, 200, &mut h)
            .unwrap();
        assert_eq!(
            rt.free_qureg(&qr),
            Err(CqError::RegisterInUse(qr.registry_index))
        );
        h.halt().unwrap();
        rt.free_qureg(&qr).unwrap();
    }

    #[test]
    fn finalise_halts_in_flight_work() {
        let mut rt = Runtime::new(RuntimeConfig::default().with_seed(3));
        rt.diag = Diagnostics::new(false);
        rt.init(1).unwrap();
        let qr = rt.alloc_qureg(1).unwrap();
        let k = QKern::new(slow);
        rt.register_qkern(&k).unwrap();
        let mut h = ExecHandle::new();
        rt.am_qrun(&k, &qr, 1, vec![CState::UNSET; 5000], 1, 5000, &mut h)
            .unwrap();
        rt.finalise(1).unwrap();
        assert_eq!(h.status().unwrap(), ExecStatus::Halted);
        assert!(rt
            .diagnostics()
            .lines()
            .iter()
            .any(|l| l.contains("warning")));
    }

    #[test]
    fn executor_validation() {
        let mut rt = rt();
        let qr = rt.alloc_qureg(1).unwrap();
        let k = QKern::new(nop);
        let mut out = [CState::UNSET; 1];
        assert_eq!(
            rt.s_qrun(&k, &qr, 1, &mut out, 1),
            Err(CqError::KernelNotRegistered)
        );
        rt.register_qkern(&k).unwrap();
        assert_eq!(
            rt.sm_qrun(&k, &qr, 1, &mut out, 1, 2),
            Err(CqError::BufferTooSmall {
                capacity: 1,
                required: 2
            })
        );
        assert_eq!(
            rt.sm_qrun(&k, &qr, 1, &mut out, 1, 0),
            Err(CqError::ZeroShots)
        );
        assert_eq!(
            rt.sb_qrun(&k, &qr, 1, &mut out, 1, 4),
            Err(CqError::UnknownBackend(4))
        );
        let req = ExecRequest::plain(999, qr, 1, 1);
        assert_eq!(
            rt.run_blocking(req, &mut out),
            Err(CqError::UnknownKey(999))
        );
        let req = ExecRequest {
            kernel: KernelSel::Param(0, None),
            ..ExecRequest::plain(0, qr, 1, 1)
        };
        let p = PqKern::new(|_, _, _, _| Ok(()));
        rt.register_pqkern(&p).unwrap();
        assert_eq!(rt.run_blocking(req, &mut out), Err(CqError::MissingParams));
    }

    #[test]
    fn inline_mode_matches_threaded() {
        fn coin(ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
            ctx.set_qureg(qr, 0, n)?;
            for q in qr.qubits() {
                ctx.hadamard(q)?;
            }
            ctx.measure_qureg(qr)?;
            Ok(())
        }
        let run = |mode| {
            let mut rt = Runtime::new(RuntimeConfig::default().with_seed(11).with_mode(mode));
            rt.init(0).unwrap();
            let qr = rt.alloc_qureg(4).unwrap();
            let k = QKern::new(coin);
            rt.register_qkern(&k).unwrap();
            let mut out = vec![CState::UNSET; 4 * 50];
            rt.sm_qrun(&k, &qr, 4, &mut out, 4, 50).unwrap();
            out
        };
        assert_eq!(run(DeviceMode::Threaded), run(DeviceMode::Inline));
    }
}

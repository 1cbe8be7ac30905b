// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Offload executors, execution handles and the sync/wait/halt interface.
//!
//! Every named executor (`s_qrun`, `am_qrun`, `ampb_qrun`, ...) is a thin
//! wrapper over [`Runtime::execute`]. The prefix letters select:
//!
//! | letter | meaning |
//! |--------|---------|
//! | `s`/`a` | block until results are on the host / return immediately |
//! | `m` | run `nshots` times |
//! | `b` | run on backend `backend` instead of backend 0 |
//! | `p` | parameterised kernel plus a [`ParamPack`] |
//!
//! Argument order for every wrapper is the common prefix
//! `(kernel, qr, nqubits, result, nmeasure)` followed, when present, by
//! `nshots`, `params`, `backend` and finally the execution handle.
//!
//! Results of shot `k`, synchronised measurement `j` live at index
//! `k * nmeasure + j` of the result buffer. Slots a shot did not fill hold
//! [`CState::UNSET`]. Halting and snapshotting both happen at shot
//! boundaries, so a row visible on the host is always complete.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};

use crate::error::{CqError, Result};
use crate::handle::{CState, QubitHandle};
use crate::kernel::{KernelKey, ParamPack, PqKern, QKern};
use crate::runtime::Runtime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecStatus {
    Pending,
    Running,
    Done,
    Halted,
    Failed,
}

impl ExecStatus {
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            ExecStatus::Done | ExecStatus::Halted | ExecStatus::Failed
        )
    }
}

/// Which registry the kernel key refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSel {
    Plain(KernelKey),
    Param(KernelKey, Option<ParamPack>),
}

/// Everything an executor ships to the device.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecRequest {
    pub kernel: KernelSel,
    pub qr: QubitHandle,
    pub nqubits: usize,
    /// Maximum synchronised results of one shot.
    pub nmeasure: usize,
    pub nshots: usize,
    pub backend: usize,
    pub asynchronous: bool,
}

impl ExecRequest {
    pub fn plain(key: KernelKey, qr: QubitHandle, nqubits: usize, nmeasure: usize) -> Self {
        ExecRequest {
            kernel: KernelSel::Plain(key),
            qr,
            nqubits,
            nmeasure,
            nshots: 1,
            backend: 0,
            asynchronous: false,
        }
    }

    pub fn param(
        key: KernelKey,
        params: ParamPack,
        qr: QubitHandle,
        nqubits: usize,
        nmeasure: usize,
    ) -> Self {
        ExecRequest {
            kernel: KernelSel::Param(key, Some(params)),
            ..Self::plain(key, qr, nqubits, nmeasure)
        }
    }

    pub fn shots(mut self, nshots: usize) -> Self {
        self.nshots = nshots;
        self
    }

    pub fn backend(mut self, backend: usize) -> Self {
        self.backend = backend;
        self
    }

    pub fn asynchronous(mut self, yes: bool) -> Self {
        self.asynchronous = yes;
        self
    }

    pub fn required_capacity(&self) -> usize {
        self.nmeasure * self.nshots
    }
}

#[derive(Debug)]
struct Progress {
    status: ExecStatus,
    shots_completed: usize,
    /// Device-side copy of the result buffer, written one full shot at a time.
    rows: Vec<CState>,
    failure: Option<CqError>,
}

/// State shared between the host handle and the device executing it.
#[derive(Debug)]
pub(crate) struct ExecShared {
    pub id: u64,
    pub registry_index: usize,
    pub nmeasure: usize,
    pub nshots: usize,
    halt: AtomicBool,
    progress: Mutex<Progress>,
    changed: Condvar,
}

static NEXT_EXEC_ID: AtomicU64 = AtomicU64::new(1);

impl ExecShared {
    pub fn new(registry_index: usize, nmeasure: usize, nshots: usize) -> Self {
        ExecShared {
            id: NEXT_EXEC_ID.fetch_add(1, Ordering::Relaxed),
            registry_index,
            nmeasure,
            nshots,
            halt: AtomicBool::new(false),
            progress: Mutex::new(Progress {
                status: ExecStatus::Pending,
                shots_completed: 0,
                rows: vec![CState::UNSET; nmeasure * nshots],
                failure: None,
            }),
            changed: Condvar::new(),
        }
    }

    fn lock(&self) -> MutexGuard<'_, Progress> {
        self.progress.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn status(&self) -> ExecStatus {
        self.lock().status
    }

    pub fn shots_completed(&self) -> usize {
        self.lock().shots_completed
    }

    pub fn request_halt(&self) {
        self.halt.store(true, Ordering::SeqCst);
    }

    pub fn halt_requested(&self) -> bool {
        self.halt.load(Ordering::SeqCst)
    }

    /// Pending → Running.
    pub fn start(&self) {
        let mut p = self.lock();
        debug_assert_eq!(p.status, ExecStatus::Pending);
        p.status = ExecStatus::Running;
        drop(p);
        self.changed.notify_all();
    }

    /// Publishes one completed shot.
    pub fn push_row(&self, row: &[CState]) {
        let mut p = self.lock();
        let k = p.shots_completed;
        let n = self.nmeasure;
        p.rows[k * n..(k + 1) * n].copy_from_slice(row);
        p.shots_completed += 1;
        drop(p);
        self.changed.notify_all();
    }

    pub fn finish(&self, status: ExecStatus, failure: Option<CqError>) {
        debug_assert!(status.is_terminal());
        let mut p = self.lock();
        // a request that never started (e.g. rejected on the device) still ends terminal
        p.status = status;
        p.failure = failure;
        drop(p);
        self.changed.notify_all();
    }

    /// Copies every completed row into `dest`.
    fn snapshot_into(&self, dest: &mut [CState]) -> ExecStatus {
        let p = self.lock();
        let filled = p.shots_completed * self.nmeasure;
        dest[..filled].copy_from_slice(&p.rows[..filled]);
        p.status
    }

    fn wait_terminal(&self) -> MutexGuard<'_, Progress> {
        let mut p = self.lock();
        while !p.status.is_terminal() {
            p = self.changed.wait(p).unwrap_or_else(|e| e.into_inner());
        }
        p
    }
}

/// Host record of one offloaded execution.
///
/// A fresh handle is unused; executors bind it to an execution and it may be
/// reused once that execution is terminal. The handle owns the host result
/// buffer of asynchronous executions, which is only updated by
/// [`ExecHandle::sync`], [`ExecHandle::wait`] and [`ExecHandle::halt`].
#[derive(Debug, Default)]
pub struct ExecHandle {
    shared: Option<Arc<ExecShared>>,
    results: Vec<CState>,
}

impl ExecHandle {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn bind(&mut self, shared: Arc<ExecShared>, buffer: Vec<CState>) -> Result<()> {
        if self.is_in_flight() {
            return Err(CqError::HandleBusy);
        }
        self.shared = Some(shared);
        self.results = buffer;
        self.results.iter_mut().for_each(|c| *c = CState::UNSET);
        Ok(())
    }

    fn live(&self) -> Result<&Arc<ExecShared>> {
        self.shared.as_ref().ok_or(CqError::InvalidHandle)
    }

    pub fn is_in_flight(&self) -> bool {
        self.shared
            .as_ref()
            .is_some_and(|s| !s.status().is_terminal())
    }

    pub fn status(&self) -> Result<ExecStatus> {
        Ok(self.live()?.status())
    }

    pub fn shots_completed(&self) -> Result<usize> {
        Ok(self.live()?.shots_completed())
    }

    /// Host result buffer as of the last synchronisation.
    pub fn results(&self) -> &[CState] {
        &self.results
    }

    pub fn take_results(&mut self) -> Vec<CState> {
        std::mem::take(&mut self.results)
    }

    /// Copies every completed shot to the host buffer without waiting.
    pub fn sync(&mut self) -> Result<()> {
        let shared = self.live()?.clone();
        shared.snapshot_into(&mut self.results);
        Ok(())
    }

    /// Blocks until the execution is terminal, then synchronises the final results.
    pub fn wait(&mut self) -> Result<()> {
        let shared = self.live()?.clone();
        let failure = {
            let p = shared.wait_terminal();
            p.failure.clone()
        };
        shared.snapshot_into(&mut self.results);
        match failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Requests a stop at the next shot boundary, then behaves like [`ExecHandle::wait`].
    pub fn halt(&mut self) -> Result<()> {
        self.live()?.request_halt();
        self.wait()
    }
}

pub fn sync_qrun(exec: &mut ExecHandle) -> Result<()> {
    exec.sync()
}

pub fn wait_qrun(exec: &mut ExecHandle) -> Result<()> {
    exec.wait()
}

pub fn halt_qrun(exec: &mut ExecHandle) -> Result<()> {
    exec.halt()
}

// The sixteen named executors.
#[allow(clippy::too_many_arguments)]
impl Runtime {
    fn plain_request(
        &self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        nmeasure: usize,
        nshots: usize,
        backend: usize,
        asynchronous: bool,
    ) -> Result<ExecRequest> {
        let key = self.kernel_key(kernel)?;
        Ok(ExecRequest {
            kernel: KernelSel::Plain(key),
            qr: *qr,
            nqubits,
            nmeasure,
            nshots,
            backend,
            asynchronous,
        })
    }

    fn param_request(
        &self,
        kernel: &PqKern,
        params: &ParamPack,
        qr: &QubitHandle,
        nqubits: usize,
        nmeasure: usize,
        nshots: usize,
        backend: usize,
        asynchronous: bool,
    ) -> Result<ExecRequest> {
        let key = self.param_kernel_key(kernel)?;
        Ok(ExecRequest {
            kernel: KernelSel::Param(key, Some(params.clone())),
            qr: *qr,
            nqubits,
            nmeasure,
            nshots,
            backend,
            asynchronous,
        })
    }

    pub fn s_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, 1, 0, false)?;
        self.run_blocking(req, result)
    }

    pub fn a_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, 1, 0, true)?;
        self.execute(req, result, exec)
    }

    pub fn sm_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        nshots: usize,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, nshots, 0, false)?;
        self.run_blocking(req, result)
    }

    pub fn am_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        nshots: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, nshots, 0, true)?;
        self.execute(req, result, exec)
    }

    pub fn sb_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        backend: usize,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, 1, backend, false)?;
        self.run_blocking(req, result)
    }

    pub fn ab_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        backend: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, 1, backend, true)?;
        self.execute(req, result, exec)
    }

    pub fn smb_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        nshots: usize,
        backend: usize,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, nshots, backend, false)?;
        self.run_blocking(req, result)
    }

    pub fn amb_qrun(
        &mut self,
        kernel: &QKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        nshots: usize,
        backend: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.plain_request(kernel, qr, nqubits, nmeasure, nshots, backend, true)?;
        self.execute(req, result, exec)
    }

    pub fn sp_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        params: &ParamPack,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, 1, 0, false)?;
        self.run_blocking(req, result)
    }

    pub fn ap_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        params: &ParamPack,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, 1, 0, true)?;
        self.execute(req, result, exec)
    }

    pub fn smp_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        nshots: usize,
        params: &ParamPack,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, nshots, 0, false)?;
        self.run_blocking(req, result)
    }

    pub fn amp_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        nshots: usize,
        params: &ParamPack,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, nshots, 0, true)?;
        self.execute(req, result, exec)
    }

    pub fn spb_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        params: &ParamPack,
        backend: usize,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, 1, backend, false)?;
        self.run_blocking(req, result)
    }

    pub fn apb_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        params: &ParamPack,
        backend: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req = self.param_request(kernel, params, qr, nqubits, nmeasure, 1, backend, true)?;
        self.execute(req, result, exec)
    }

    pub fn smpb_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: &mut [CState],
        nmeasure: usize,
        nshots: usize,
        params: &ParamPack,
        backend: usize,
    ) -> Result<()> {
        let req = self.param_request(
            kernel, params, qr, nqubits, nmeasure, nshots, backend, false,
        )?;
        self.run_blocking(req, result)
    }

    pub fn ampb_qrun(
        &mut self,
        kernel: &PqKern,
        qr: &QubitHandle,
        nqubits: usize,
        result: Vec<CState>,
        nmeasure: usize,
        nshots: usize,
        params: &ParamPack,
        backend: usize,
        exec: &mut ExecHandle,
    ) -> Result<()> {
        let req =
            self.param_request(kernel, params, qr, nqubits, nmeasure, nshots, backend, true)?;
        self.execute(req, result, exec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unused_handle_is_invalid() {
        let mut h = ExecHandle::new();
        assert_eq!(h.sync(), Err(CqError::InvalidHandle));
        assert_eq!(h.wait(), Err(CqError::InvalidHandle));
        assert_eq!(h.halt(), Err(CqError::InvalidHandle));
        assert_eq!(h.status(), Err(CqError::InvalidHandle));
    }

    #[test]
    fn snapshot_exposes_only_complete_rows() {
        let shared = Arc::new(ExecShared::new(0, 2, 3));
        let mut h = ExecHandle::new();
        h.bind(shared.clone(), vec![CState::ZERO; 6]).unwrap();
        assert_eq!(h.results(), &[CState::UNSET; 6]);
        shared.start();
        shared.push_row(&[CState::ONE, CState::ZERO]);
        h.sync().unwrap();
        assert_eq!(&h.results()[..2], &[CState::ONE, CState::ZERO]);
        assert!(h.results()[2..].iter().all(|c| *c == CState::UNSET));
        assert_eq!(h.shots_completed().unwrap(), 1);
        // a second bind while running is refused
        assert_eq!(h.bind(shared.clone(), vec![]), Err(CqError::HandleBusy));
        shared.finish(ExecStatus::Halted, None);
        h.wait().unwrap();
        assert_eq!(h.status().unwrap(), ExecStatus::Halted);
    }

    #[test]
    fn wait_reports_failure() {
        let shared = Arc::new(ExecShared::new(0, 1, 1));
        let mut h = ExecHandle::new();
        h.bind(shared.clone(), vec![CState::UNSET]).unwrap();
        let err = CqError::KernelError {
            shot: 0,
            source: Box::new(CqError::StagingOverflow(1)),
        };
        shared.finish(ExecStatus::Failed, Some(err.clone()));
        assert_eq!(h.wait(), Err(err));
        assert_eq!(h.status().unwrap(), ExecStatus::Failed);
    }
}

// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! CQ: offload quantum kernels from a classical host to a simulated quantum device.
//!
//! The host allocates qubit registers and registers kernels with a
//! [`Runtime`]; executors (`s_qrun`, `am_qrun`, `ampb_qrun`, ...) ship a
//! kernel key to a device context that runs the kernel on a statevector
//! simulator and streams synchronised measurement results back.
//!
//! Qubit `i` of a register is bit `i` of the basis-state index.

pub mod analog;
pub mod circuit;
pub mod config;
pub mod demos;
pub mod device;
pub mod diag;
pub mod error;
pub mod exec;
pub mod handle;
pub mod kernel;
pub mod runtime;
pub mod sim;

pub use analog::{Addressing, AnalogMode, Channel, Pulse, PulseField, Waveform};
pub use circuit::{Circuit, Instruction};
pub use config::{AnalogConfig, DeviceMode, RuntimeConfig};
pub use device::{DeviceSnapshot, KernelCtx};
pub use error::{CqError, Result};
pub use exec::{halt_qrun, sync_qrun, wait_qrun, ExecHandle, ExecRequest, ExecStatus, KernelSel};
pub use handle::{CState, QubitHandle, Verbosity};
pub use kernel::{
    KernelKey, KernelRegistry, KernelResult, ParamPack, ParamQuantumKernel, PqKern, PqKernFn,
    QKern, QKernFn, QuantumKernel,
};
pub use runtime::Runtime;
pub use sim::{build_unitary_oracle, Gate, StateVector, C64};

// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse-level (analogue) extension of the device.
//!
//! The host picks a Hamiltonian family with `Runtime::enable_analog_mode`.
//! Inside a kernel, registers are switched into analogue operation, channels
//! are requested on them, and pulses are played, captured or delayed through
//! those channels. Device-side operations live on [`crate::KernelCtx`].
//!
//! Simultaneous drives on different channels are not composed: plays execute
//! in call order, and each channel keeps its own clock that `barrier` aligns.

mod channel;
pub(crate) mod evolve;
pub mod hamiltonian;
mod pulse;
mod waveform;

use std::collections::HashMap;

pub use channel::{Addressing, Channel};
pub use hamiltonian::Position;
pub use pulse::{Pulse, PulseField, Segment, DEFAULT_NSAMPLES};
pub use waveform::{NaturalSpline, Waveform};

use crate::config::AnalogConfig;
use crate::error::CqError;

/// Hamiltonian family of the analogue device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i32)]
pub enum AnalogMode {
    Ising = 0,
    Xy = 1,
}

impl TryFrom<i32> for AnalogMode {
    type Error = CqError;

    fn try_from(v: i32) -> Result<Self, CqError> {
        match v {
            0 => Ok(AnalogMode::Ising),
            1 => Ok(AnalogMode::Xy),
            other => Err(CqError::UnknownMode(other)),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AnalogRegister {
    pub enabled: bool,
    pub epoch: u64,
    pub channels_issued: usize,
    /// One position per qubit of the device state.
    pub positions: Vec<Position>,
}

/// Device-side analogue bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct AnalogDevice {
    pub mode: Option<AnalogMode>,
    pub config: AnalogConfig,
    pub registers: HashMap<usize, AnalogRegister>,
    pub next_channel: usize,
}

impl AnalogDevice {
    pub fn new(config: AnalogConfig) -> Self {
        AnalogDevice {
            mode: None,
            config,
            registers: HashMap::new(),
            next_channel: 0,
        }
    }

    pub fn default_positions(&self, n: usize) -> Vec<Position> {
        (0..n)
            .map(|i| [i as f64 * self.config.default_spacing_um, 0.0, 0.0])
            .collect()
    }
}

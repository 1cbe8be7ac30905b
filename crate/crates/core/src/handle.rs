// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Host-visible handles: qubit addressing, classical outcomes and verbosity.

use std::fmt;

use crate::error::{CqError, Result};

/// Addresses a run of qubits inside one allocated device state.
///
/// A handle is plain data. Indexing a register with [`QubitHandle::at`] yields
/// a non-owning single-qubit view into the same device state, so `qr.at(i)`
/// plays the role of `qr[i]` in a C host program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitHandle {
    pub registry_index: usize,
    pub offset: usize,
    pub n: usize,
}

impl QubitHandle {
    pub(crate) fn root(registry_index: usize, n: usize) -> Self {
        QubitHandle {
            registry_index,
            offset: 0,
            n,
        }
    }

    /// Single-qubit view of qubit `i` of this register.
    pub fn at(&self, i: usize) -> Result<QubitHandle> {
        if i >= self.n {
            return Err(CqError::TargetOutOfRange {
                target: i,
                nqubits: self.n,
            });
        }
        Ok(QubitHandle {
            registry_index: self.registry_index,
            offset: self.offset + i,
            n: 1,
        })
    }

    /// Contiguous sub-register `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<QubitHandle> {
        if len == 0 || start + len > self.n {
            return Err(CqError::TargetOutOfRange {
                target: start + len,
                nqubits: self.n,
            });
        }
        Ok(QubitHandle {
            registry_index: self.registry_index,
            offset: self.offset + start,
            n: len,
        })
    }

    /// Iterator over the single-qubit views of this register.
    pub fn qubits(&self) -> impl Iterator<Item = QubitHandle> + '_ {
        (0..self.n).map(move |i| QubitHandle {
            registry_index: self.registry_index,
            offset: self.offset + i,
            n: 1,
        })
    }

    /// Absolute qubit index inside the device state for qubit `i` of the view.
    pub(crate) fn absolute(&self, i: usize) -> usize {
        self.offset + i
    }
}

/// One classical measurement outcome. Valid outcomes are 0 and 1; negative
/// values flag an unset or invalid entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
#[repr(transparent)]
pub struct CState(pub i16);

impl CState {
    pub const ZERO: CState = CState(0);
    pub const ONE: CState = CState(1);
    pub const UNSET: CState = CState(-1);

    pub fn is_valid(self) -> bool {
        self.0 == 0 || self.0 == 1
    }

    pub fn bit(self) -> Result<bool> {
        match self.0 {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(CqError::InvalidCState(v)),
        }
    }
}

impl From<bool> for CState {
    fn from(b: bool) -> Self {
        CState(b as i16)
    }
}

impl fmt::Display for CState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Diagnostic output level; 0 is silent and every level includes the output of the levels below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Verbosity(pub u32);

impl Verbosity {
    pub const SILENT: Verbosity = Verbosity(0);
}

impl From<u32> for Verbosity {
    fn from(v: u32) -> Self {
        Verbosity(v)
    }
}

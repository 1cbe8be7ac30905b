// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::CqError;
use crate::handle::QubitHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i32)]
pub enum Addressing {
    /// Drives every qubit of the bound register.
    Global = 0,
    /// Drives a single target qubit.
    Local = 1,
}

impl TryFrom<i32> for Addressing {
    type Error = CqError;

    fn try_from(v: i32) -> Result<Self, CqError> {
        match v {
            0 => Ok(Addressing::Global),
            1 => Ok(Addressing::Local),
            other => Err(CqError::BadParams(format!(
                "unknown channel addressing {other}"
            ))),
        }
    }
}

/// An addressing lane with its own clock (ns).
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub(crate) id: usize,
    pub(crate) addressing: Addressing,
    pub(crate) register: QubitHandle,
    pub(crate) target: Option<usize>,
    pub(crate) clock: f64,
    pub(crate) epoch: u64,
}

impl Channel {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn addressing(&self) -> Addressing {
        self.addressing
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn register(&self) -> QubitHandle {
        self.register
    }

    /// Current target of a LOCAL channel.
    pub fn target(&self) -> Option<QubitHandle> {
        self.target.map(|abs| QubitHandle {
            registry_index: self.register.registry_index,
            offset: abs,
            n: 1,
        })
    }

    /// Absolute qubit indices driven by this channel.
    pub(crate) fn targets(&self) -> Vec<usize> {
        match self.target {
            Some(t) => vec![t],
            None => (0..self.register.n)
                .map(|i| self.register.absolute(i))
                .collect(),
        }
    }
}

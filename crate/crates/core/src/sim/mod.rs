// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Statevector engine standing in for the quantum computer.

pub mod gates;
pub mod oracle;
mod statevector;

pub use gates::{Gate, C64};
pub use oracle::build_unitary_oracle;
pub(crate) use statevector::sample_index;
pub use statevector::StateVector;

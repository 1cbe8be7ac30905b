// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Kernels described as data: a fixed list of instructions on register-relative qubits.

use std::sync::Arc;

use crate::device::KernelCtx;
use crate::error::{CqError, Result};
use crate::handle::{CState, QubitHandle};
use crate::kernel::{KernelResult, QKern, QuantumKernel};
use crate::sim::Gate;

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    /// Qubits are `[controls..., targets...]`, as indices into the register.
    Gate(Gate, Vec<usize>),
    SetQureg(u64),
    SetQubit(usize, CState),
    Measure(Vec<usize>),
    MeasureAll,
    DMeasure(Vec<usize>),
}

/// Instruction list run against whatever register it is dispatched on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    nqubits: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(nqubits: usize) -> Self {
        Circuit {
            nqubits,
            instructions: Vec::new(),
        }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    fn check(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.nqubits {
                return Err(CqError::TargetOutOfRange {
                    target: q,
                    nqubits: self.nqubits,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(CqError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, inst: Instruction) -> Result<&mut Self> {
        match &inst {
            Instruction::Gate(g, qs) => {
                if qs.len() != g.num_qubits() {
                    return Err(CqError::GateArity {
                        expected: g.num_qubits(),
                        actual: qs.len(),
                    });
                }
                self.check(qs)?;
            }
            Instruction::SetQureg(state) => {
                if self.nqubits < 64 && state >> self.nqubits != 0 {
                    return Err(CqError::StateOutOfRange {
                        state: *state,
                        nqubits: self.nqubits,
                    });
                }
            }
            Instruction::SetQubit(q, v) => {
                self.check(&[*q])?;
                v.bit()?;
            }
            Instruction::Measure(qs) | Instruction::DMeasure(qs) => self.check(qs)?,
            Instruction::MeasureAll => {}
        }
        self.instructions.push(inst);
        Ok(self)
    }

    pub fn gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<&mut Self> {
        self.push(Instruction::Gate(gate, qubits.to_vec()))
    }

    /// Synchronised results produced by one run.
    pub fn nmeasure(&self) -> usize {
        self.instructions
            .iter()
            .map(|i| match i {
                Instruction::Measure(qs) => qs.len(),
                Instruction::MeasureAll => self.nqubits,
                _ => 0,
            })
            .sum()
    }

    /// Gates in order, for comparison against the dense oracle.
    pub fn gates(&self) -> Vec<(Gate, Vec<usize>)> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Gate(g, qs) => Some((*g, qs.clone())),
                _ => None,
            })
            .collect()
    }

    /// Shared kernel reference; registering the same reference twice is idempotent.
    pub fn into_kernel(self) -> QKern {
        QKern::shared(Arc::new(self))
    }
}

impl QuantumKernel for Circuit {
    fn run(&self, ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult {
        if nqubits != self.nqubits || qr.n != self.nqubits {
            return Err(CqError::SizeMismatch {
                expected: self.nqubits,
                actual: qr.n,
            });
        }
        let mut handles = Vec::with_capacity(4);
        for inst in &self.instructions {
            match inst {
                Instruction::Gate(g, qs) => {
                    handles.clear();
                    for &q in qs {
                        handles.push(qr.at(q)?);
                    }
                    ctx.gate(*g, &handles)?;
                }
                Instruction::SetQureg(state) => ctx.set_qureg(qr, *state, nqubits)?,
                Instruction::SetQubit(q, v) => ctx.set_qubit(qr.at(*q)?, *v)?,
                Instruction::Measure(qs) => {
                    ctx.measure(qr, nqubits, qs)?;
                }
                Instruction::MeasureAll => {
                    ctx.measure_qureg(qr)?;
                }
                Instruction::DMeasure(qs) => {
                    ctx.dmeasure(qr, nqubits, qs)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let mut c = Circuit::new(2);
        assert_eq!(
            c.gate(Gate::CX, &[0, 0]).unwrap_err(),
            CqError::DuplicateQubit(0)
        );
        assert_eq!(
            c.gate(Gate::H, &[0, 1]).unwrap_err(),
            CqError::GateArity {
                expected: 1,
                actual: 2
            }
        );
        assert!(c.push(Instruction::SetQureg(4)).is_err());
        c.gate(Gate::H, &[0])
            .unwrap()
            .gate(Gate::CX, &[0, 1])
            .unwrap();
        c.push(Instruction::MeasureAll).unwrap();
        c.push(Instruction::DMeasure(vec![1])).unwrap();
        assert_eq!(c.nmeasure(), 2);
        assert_eq!(c.gates().len(), 2);
    }
}

// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum kernel references and the key registry shared by host and device.
//!
//! A kernel is a device entry point. The host never calls it; it registers the
//! reference, receives a dense integer key, and executors ship only that key
//! to the device, which looks the entry point up in its own copy of the table.

use std::fmt;
use std::sync::Arc;

use crate::device::KernelCtx;
use crate::error::{CqError, Result};
use crate::handle::QubitHandle;

/// Dense integer naming a registered kernel.
pub type KernelKey = usize;

/// Status returned by a kernel body.
pub type KernelResult = Result<()>;

/// Plain kernel entry point: `(ctx, nqubits, register)`.
pub type QKernFn = fn(&mut KernelCtx<'_>, usize, QubitHandle) -> KernelResult;

/// Parameterised kernel entry point: `(ctx, nqubits, register, params)`.
pub type PqKernFn = fn(&mut KernelCtx<'_>, usize, QubitHandle, &ParamPack) -> KernelResult;

/// Kernels whose body is data rather than a function item.
pub trait QuantumKernel: Send + Sync {
    fn run(&self, ctx: &mut KernelCtx<'_>, nqubits: usize, qr: QubitHandle) -> KernelResult;
}

pub trait ParamQuantumKernel: Send + Sync {
    fn run(
        &self,
        ctx: &mut KernelCtx<'_>,
        nqubits: usize,
        qr: QubitHandle,
        params: &ParamPack,
    ) -> KernelResult;
}

enum Entry<F: Copy, T: ?Sized> {
    Fn(F),
    Shared(Arc<T>),
}

impl<F: Copy, T: ?Sized> Clone for Entry<F, T> {
    fn clone(&self) -> Self {
        match self {
            Entry::Fn(f) => Entry::Fn(*f),
            Entry::Shared(a) => Entry::Shared(a.clone()),
        }
    }
}

impl<F: Copy, T: ?Sized> Entry<F, T> {
    fn address(&self) -> usize
    where
        F: Into<usize>,
    {
        match self {
            Entry::Fn(f) => (*f).into(),
            Entry::Shared(a) => Arc::as_ptr(a) as *const () as usize,
        }
    }
}

#[derive(Clone, Copy)]
struct PlainAddr(QKernFn);
impl From<PlainAddr> for usize {
    fn from(f: PlainAddr) -> usize {
        f.0 as usize
    }
}

#[derive(Clone, Copy)]
struct ParamAddr(PqKernFn);
impl From<ParamAddr> for usize {
    fn from(f: ParamAddr) -> usize {
        f.0 as usize
    }
}

/// Reference to an unparameterised kernel. Equality is identity of the entry point.
#[derive(Clone)]
pub struct QKern(Entry<PlainAddr, dyn QuantumKernel>);

/// Reference to a parameterised kernel.
#[derive(Clone)]
pub struct PqKern(Entry<ParamAddr, dyn ParamQuantumKernel>);

impl QKern {
    pub fn new(f: QKernFn) -> Self {
        QKern(Entry::Fn(PlainAddr(f)))
    }

    pub fn shared(k: Arc<dyn QuantumKernel>) -> Self {
        QKern(Entry::Shared(k))
    }

    pub(crate) fn call(
        &self,
        ctx: &mut KernelCtx<'_>,
        nqubits: usize,
        qr: QubitHandle,
    ) -> KernelResult {
        match &self.0 {
            Entry::Fn(f) => (f.0)(ctx, nqubits, qr),
            Entry::Shared(k) => k.run(ctx, nqubits, qr),
        }
    }
}

impl PqKern {
    pub fn new(f: PqKernFn) -> Self {
        PqKern(Entry::Fn(ParamAddr(f)))
    }

    pub fn shared(k: Arc<dyn ParamQuantumKernel>) -> Self {
        PqKern(Entry::Shared(k))
    }

    pub(crate) fn call(
        &self,
        ctx: &mut KernelCtx<'_>,
        nqubits: usize,
        qr: QubitHandle,
        params: &ParamPack,
    ) -> KernelResult {
        match &self.0 {
            Entry::Fn(f) => (f.0)(ctx, nqubits, qr, params),
            Entry::Shared(k) => k.run(ctx, nqubits, qr, params),
        }
    }
}

impl PartialEq for QKern {
    fn eq(&self, other: &Self) -> bool {
        self.0.address() == other.0.address()
    }
}

impl PartialEq for PqKern {
    fn eq(&self, other: &Self) -> bool {
        self.0.address() == other.0.address()
    }
}

impl fmt::Debug for QKern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QKern({:#x})", self.0.address())
    }
}

impl fmt::Debug for PqKern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PqKern({:#x})", self.0.address())
    }
}

impl From<QKernFn> for QKern {
    fn from(f: QKernFn) -> Self {
        QKern::new(f)
    }
}

impl From<PqKernFn> for PqKern {
    fn from(f: PqKernFn) -> Self {
        PqKern::new(f)
    }
}

/// Opaque, immutable parameter bytes handed to a parameterised kernel.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ParamPack(Arc<[u8]>);

impl ParamPack {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        ParamPack(Arc::from(bytes))
    }

    /// Packs doubles as little-endian bytes.
    pub fn from_f64s(values: &[f64]) -> Self {
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        ParamPack(Arc::from(bytes))
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn f64s(&self) -> Result<Vec<f64>> {
        if self.0.len() % 8 != 0 {
            return Err(CqError::BadParams(format!(
                "parameter pack of {} bytes is not a list of doubles",
                self.0.len()
            )));
        }
        Ok(self
            .0
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }
}

impl fmt::Debug for ParamPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamPack({} bytes)", self.0.len())
    }
}

/// Key tables for plain and parameterised kernels. Keys are dense from 0 in
/// registration order; re-registering a kernel returns its existing key.
///
/// Not safe for concurrent mutation; the runtime serialises access.
#[derive(Debug, Clone)]
pub struct KernelRegistry {
    plain: Vec<QKern>,
    param: Vec<PqKern>,
    capacity: usize,
}

impl KernelRegistry {
    pub fn new(capacity: usize) -> Self {
        KernelRegistry {
            plain: Vec::new(),
            param: Vec::new(),
            capacity,
        }
    }

    /// Returns `(key, newly_added)`.
    pub fn register(&mut self, k: &QKern) -> Result<(KernelKey, bool)> {
        if let Some(key) = self.plain.iter().position(|e| e == k) {
            return Ok((key, false));
        }
        if self.plain.len() >= self.capacity {
            return Err(CqError::RegistryFull(self.capacity));
        }
        self.plain.push(k.clone());
        Ok((self.plain.len() - 1, true))
    }

    pub fn register_param(&mut self, k: &PqKern) -> Result<(KernelKey, bool)> {
        if let Some(key) = self.param.iter().position(|e| e == k) {
            return Ok((key, false));
        }
        if self.param.len() >= self.capacity {
            return Err(CqError::RegistryFull(self.capacity));
        }
        self.param.push(k.clone());
        Ok((self.param.len() - 1, true))
    }

    pub fn key_of(&self, k: &QKern) -> Option<KernelKey> {
        self.plain.iter().position(|e| e == k)
    }

    pub fn key_of_param(&self, k: &PqKern) -> Option<KernelKey> {
        self.param.iter().position(|e| e == k)
    }

    pub fn get(&self, key: KernelKey) -> Option<&QKern> {
        self.plain.get(key)
    }

    pub fn get_param(&self, key: KernelKey) -> Option<&PqKern> {
        self.param.get(key)
    }

    /// Installs `k` at exactly `key`; used by the device to mirror host registration.
    pub(crate) fn install(&mut self, key: KernelKey, k: QKern) {
        if key >= self.plain.len() {
            self.plain.resize(key + 1, k.clone());
        }
        self.plain[key] = k;
    }

    pub(crate) fn install_param(&mut self, key: KernelKey, k: PqKern) {
        if key >= self.param.len() {
            self.param.resize(key + 1, k.clone());
        }
        self.param[key] = k;
    }

    pub fn len(&self) -> usize {
        self.plain.len()
    }

    pub fn len_param(&self) -> usize {
        self.param.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plain.is_empty() && self.param.is_empty()
    }
}

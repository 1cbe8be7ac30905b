// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Every failure the runtime, the simulated device and the analogue layer can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CqError {
    // lifecycle
    #[error("CQ environment is already initialised")]
    AlreadyInitialised,
    #[error("CQ environment is not initialised")]
    NotInitialised,
    #[error("device failed to start: {0}")]
    DeviceStartFailure(String),
    #[error("device context is down")]
    DeviceDown,

    // resources
    #[error("cannot allocate {requested} qubits (allowed range 1..={max})")]
    TooManyQubits { requested: usize, max: usize },
    #[error("invalid qubit handle")]
    InvalidHandle,
    #[error("register {0} is in use by an in-flight execution")]
    RegisterInUse(usize),
    #[error("kernel registry is full ({0} entries)")]
    RegistryFull(usize),

    // device protocol
    #[error("unknown control opcode {0}")]
    UnknownOpcode(u8),
    #[error("control payload does not match opcode {0}")]
    ProtocolError(u8),
    #[error("no kernel registered under key {0}")]
    UnknownKey(usize),
    #[error("parameterised kernel dispatched without a parameter pack")]
    MissingParams,
    #[error("kernel kind does not match the executor")]
    WrongKernelKind,
    #[error("kernel failed on shot {shot}: {source}")]
    KernelError { shot: usize, source: Box<CqError> },
    #[error("kernel has not been registered")]
    KernelNotRegistered,
    #[error("kernel returned failure: {0}")]
    KernelFailure(String),

    // state preparation and measurement
    #[error("invalid classical state {0}")]
    InvalidCState(i16),
    #[error("basis state {state} does not fit in {nqubits} qubits")]
    StateOutOfRange { state: u64, nqubits: usize },
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("qubits belong to different registers")]
    CrossRegister,
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),
    #[error("target {target} out of range for {nqubits} qubits")]
    TargetOutOfRange { target: usize, nqubits: usize },
    #[error("target {0} listed more than once")]
    DuplicateTarget(usize),
    #[error("more than {0} synchronised results in a single execution")]
    StagingOverflow(usize),
    #[error("gate expects {expected} qubits, got {actual}")]
    GateArity { expected: usize, actual: usize },
    #[error("oracle limited to {max} qubits, got {requested}")]
    TooLarge { requested: usize, max: usize },

    // executors
    #[error("result buffer holds {capacity} entries, need {required}")]
    BufferTooSmall { capacity: usize, required: usize },
    #[error("unknown backend {0}")]
    UnknownBackend(usize),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("execution handle is still in flight")]
    HandleBusy,

    // analogue
    #[error("unknown analogue mode {0}")]
    UnknownMode(i32),
    #[error("analogue mode is not enabled")]
    ModeNotEnabled,
    #[error("LOCAL channel requires a target qubit")]
    MissingTarget,
    #[error("channel limit of {0} reached")]
    ChannelLimit(usize),
    #[error("GLOBAL channels cannot be retargeted")]
    GlobalChannel,
    #[error("target qubit is outside the channel's register")]
    TargetOutOfRegister,
    #[error("channel is no longer valid")]
    InvalidChannel,
    #[error("qubits {0} and {1} share the same position")]
    CoincidentQubits(usize, usize),
    #[error("pulse duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("pulse is invalid or has been freed")]
    InvalidPulse,
    #[error("bad waveform parameters: {0}")]
    BadParams(String),
    #[error("interpolation needs at least 2 knots, got {0}")]
    KnotCountTooSmall(usize),
    #[error("capture needs at least one shot")]
    ShotsZero,
    #[error("delay must be non-negative, got {0}")]
    NegativeDelay(f64),
    #[error("barrier channels belong to different registers")]
    MixedRegisters,
    #[error("barrier needs at least one channel")]
    EmptyChannelList,

    #[error("configuration error: {0}")]
    Config(String),
}

impl CqError {
    /// The failure underneath a [`CqError::KernelError`] wrapper, or `self`.
    pub fn root_cause(&self) -> &CqError {
        match self {
            CqError::KernelError { source, .. } => source.root_cause(),
            other => other,
        }
    }

    /// Negative integer status for C-style boundaries. `0` is reserved for success.
    pub fn code(&self) -> i32 {
        use CqError::*;
        match self {
            AlreadyInitialised => -1,
            NotInitialised => -2,
            DeviceStartFailure(_) => -3,
            DeviceDown => -4,
            TooManyQubits { .. } => -10,
            InvalidHandle => -11,
            RegisterInUse(_) => -12,
            RegistryFull(_) => -13,
            UnknownOpcode(_) => -20,
            ProtocolError(_) => -21,
            UnknownKey(_) => -22,
            MissingParams => -23,
            WrongKernelKind => -24,
            KernelError { .. } => -25,
            KernelFailure(_) => -26,
            KernelNotRegistered => -27,
            InvalidCState(_) => -30,
            StateOutOfRange { .. } => -31,
            SizeMismatch { .. } => -32,
            DuplicateQubit(_) => -33,
            TargetOutOfRange { .. } => -34,
            DuplicateTarget(_) => -35,
            StagingOverflow(_) => -36,
            GateArity { .. } => -37,
            TooLarge { .. } => -38,
            CrossRegister => -39,
            BufferTooSmall { .. } => -40,
            UnknownBackend(_) => -41,
            ZeroShots => -42,
            HandleBusy => -43,
            UnknownMode(_) => -50,
            ModeNotEnabled => -51,
            MissingTarget => -52,
            ChannelLimit(_) => -53,
            GlobalChannel => -54,
            TargetOutOfRegister => -55,
            InvalidChannel => -56,
            CoincidentQubits(..) => -57,
            NonPositiveDuration(_) => -58,
            InvalidPulse => -59,
            BadParams(_) => -60,
            KnotCountTooSmall(_) => -61,
            ShotsZero => -62,
            NegativeDelay(_) => -63,
            MixedRegisters => -64,
            EmptyChannelList => -65,
            Config(_) => -70,
        }
    }
}

pub type Result<T, E = CqError> = std::result::Result<T, E>;

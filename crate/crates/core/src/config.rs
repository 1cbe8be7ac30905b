// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Runtime and analogue-device configuration.

use std::path::Path;

use crate::error::{CqError, Result};
use crate::handle::Verbosity;

pub const ENV_VERBOSITY: &str = "CQ_VERBOSITY";
pub const ENV_SEED: &str = "CQ_SEED";

/// Upper bound on `max_qubits`: 2^32 amplitudes already need 64 GiB.
pub const MAX_SIMULATED_QUBITS: usize = 32;

/// How the device context executes control operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeviceMode {
    /// A dedicated device thread per backend consuming a FIFO queue.
    #[default]
    Threaded,
    /// Operations run inline on the enqueuing thread. For debugging; results
    /// match threaded mode for equal seeds.
    Inline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeConfig {
    pub max_qubits: usize,
    pub max_kernels: usize,
    /// Number of simulated devices; backend ids are `0..backends`.
    pub backends: usize,
    /// Device RNG seed. `None` draws one from the OS at `init`.
    pub seed: Option<u64>,
    /// Replaces the verbosity passed to `init`/`finalise` when set.
    pub verbosity_override: Option<Verbosity>,
    pub device_mode: DeviceMode,
    /// Fill freshly allocated registers with a random state instead of `|0...0>`
    /// to expose kernels that skip initialisation.
    pub scramble_new_registers: bool,
    /// Record every gate applied on the device (see `DeviceSnapshot::gate_trace`).
    pub trace_gates: bool,
    pub analog: AnalogConfig,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        RuntimeConfig {
            max_qubits: 24,
            max_kernels: 1024,
            backends: 1,
            seed: None,
            verbosity_override: None,
            device_mode: DeviceMode::Threaded,
            scramble_new_registers: false,
            trace_gates: false,
            analog: AnalogConfig::default(),
        }
    }
}

impl RuntimeConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_backends(mut self, n: usize) -> Self {
        self.backends = n;
        self
    }

    pub fn with_mode(mut self, mode: DeviceMode) -> Self {
        self.device_mode = mode;
        self
    }

    /// Applies `CQ_VERBOSITY` and `CQ_SEED` from the process environment.
    pub fn with_env(self) -> Result<Self> {
        self.with_env_from(|k| std::env::var(k).ok())
    }

    pub fn with_env_from<F: Fn(&str) -> Option<String>>(mut self, lookup: F) -> Result<Self> {
        if let Some(v) = lookup(ENV_VERBOSITY) {
            let level = v.trim().parse::<u32>().map_err(|_| {
                CqError::Config(format!("{ENV_VERBOSITY}={v} is not a non-negative integer"))
            })?;
            self.verbosity_override = Some(Verbosity(level));
        }
        if let Some(v) = lookup(ENV_SEED) {
            let seed = v.trim().parse::<u64>().map_err(|_| {
                CqError::Config(format!("{ENV_SEED}={v} is not an unsigned integer"))
            })?;
            self.seed = Some(seed);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_qubits == 0 || self.max_qubits > MAX_SIMULATED_QUBITS {
            return Err(CqError::Config(format!(
                "max_qubits must be in 1..={MAX_SIMULATED_QUBITS}"
            )));
        }
        if self.backends == 0 {
            return Err(CqError::Config("at least one backend is required".into()));
        }
        if self.max_kernels == 0 {
            return Err(CqError::Config("max_kernels must be positive".into()));
        }
        self.analog.validate()
    }
}

/// Parameters of the simulated analogue device.
///
/// Units: time in ns, angular frequencies in rad/ns, distances in µm.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogConfig {
    pub max_channels: usize,
    /// Van der Waals coefficient for ISING mode, rad/ns·µm⁶.
    pub c6: f64,
    /// Dipolar coefficient for XY mode, rad/ns·µm³.
    pub c3: f64,
    pub trotter_step_ns: f64,
    pub default_nsamples: usize,
    /// Largest addressed qubit count evolved by exact exponentiation; larger sets are Trotterised.
    pub exact_max_qubits: usize,
    /// Spacing of the default linear qubit chain, µm.
    pub default_spacing_um: f64,
}

impl Default for AnalogConfig {
    fn default() -> Self {
        AnalogConfig {
            max_channels: 8,
            // 2π × 862690 MHz·µm⁶ (Rb 70S), expressed in rad/ns
            c6: 5420.158_53,
            c3: 3.7,
            trotter_step_ns: 0.1,
            default_nsamples: 64,
            exact_max_qubits: 10,
            default_spacing_um: 5.0,
        }
    }
}

impl AnalogConfig {
    /// Parses `key value` lines. Blank lines and `#` comments are ignored;
    /// unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = AnalogConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let value = parts.next().ok_or_else(|| {
                CqError::Config(format!("line {}: missing value for {key}", lineno + 1))
            })?;
            if parts.next().is_some() {
                return Err(CqError::Config(format!(
                    "line {}: trailing tokens",
                    lineno + 1
                )));
            }
            let bad = |what: &str| CqError::Config(format!("line {}: {key} {what}", lineno + 1));
            let float = || value.parse::<f64>().map_err(|_| bad("expects a number"));
            let count = || value.parse::<usize>().map_err(|_| bad("expects a count"));
            match key {
                "max_channels" => cfg.max_channels = count()?,
                "C6" | "c6" => cfg.c6 = float()?,
                "C3" | "c3" => cfg.c3 = float()?,
                "trotter_step_ns" => cfg.trotter_step_ns = float()?,
                "default_nsamples" => cfg.default_nsamples = count()?,
                "exact_max_qubits" => cfg.exact_max_qubits = count()?,
                "default_spacing_um" => cfg.default_spacing_um = float()?,
                _ => return Err(bad("is not a known key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CqError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trotter_step_ns <= 0.0 {
            return Err(CqError::Config("trotter_step_ns must be positive".into()));
        }
        if self.default_nsamples < 2 {
            return Err(CqError::Config(
                "default_nsamples must be at least 2".into(),
            ));
        }
        if self.default_spacing_um <= 0.0 {
            return Err(CqError::Config(
                "default_spacing_um must be positive".into(),
            ));
        }
        Ok(())
    }
}

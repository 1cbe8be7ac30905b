// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use super::waveform::Waveform;
use crate::error::{CqError, Result};

pub const DEFAULT_NSAMPLES: usize = 64;

/// Which sample array of a pulse a waveform writes into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseField {
    /// Rabi frequency Ω(t), rad/ns.
    Amplitude,
    /// Drive phase φ(t), radians.
    Phase,
    /// Detuning δ(t), rad/ns.
    Detuning,
}

/// Sampled drive of fixed duration (ns). Sample `k` sits at `k·duration/(nsamples−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    duration: f64,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    detuning: Option<Vec<f64>>,
    freed: bool,
}

/// Constant drive over one piece of a pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub dt: f64,
    pub omega: f64,
    pub phi: f64,
    pub delta: f64,
}

impl Pulse {
    /// Zero pulse with the default sample count.
    pub fn new(duration: f64) -> Result<Self> {
        Self::with_samples(duration, DEFAULT_NSAMPLES)
    }

    pub fn with_samples(duration: f64, nsamples: usize) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(CqError::NonPositiveDuration(duration));
        }
        if nsamples < 2 {
            return Err(CqError::BadParams(
                "a pulse needs at least 2 samples".into(),
            ));
        }
        Ok(Pulse {
            duration,
            amplitude: vec![0.0; nsamples],
            phase: vec![0.0; nsamples],
            detuning: None,
            freed: false,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn nsamples(&self) -> usize {
        self.amplitude.len()
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn detuning(&self) -> Option<&[f64]> {
        self.detuning.as_deref()
    }

    pub fn is_valid(&self) -> bool {
        !self.freed
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.freed {
            Err(CqError::InvalidPulse)
        } else {
            Ok(())
        }
    }

    /// Writes `waveform` into one sample array.
    pub fn fill(&mut self, field: PulseField, waveform: &Waveform) -> Result<()> {
        self.check()?;
        let n = self.nsamples();
        let target = match field {
            PulseField::Amplitude => &mut self.amplitude,
            PulseField::Phase => &mut self.phase,
            PulseField::Detuning => self.detuning.get_or_insert_with(|| vec![0.0; n]),
        };
        waveform.fill(target, self.duration)
    }

    /// Linearly resamples every array onto `nsamples` points.
    pub fn resample(&mut self, nsamples: usize) -> Result<()> {
        self.check()?;
        if nsamples < 2 {
            return Err(CqError::BadParams(
                "a pulse needs at least 2 samples".into(),
            ));
        }
        let resample = |src: &[f64]| -> Vec<f64> {
            let w = Waveform::Custom {
                samples: src.to_vec(),
            };
            (0..nsamples)
                .map(|k| w.eval(k as f64 / (nsamples - 1) as f64, 1.0))
                .collect()
        };
        self.amplitude = resample(&self.amplitude);
        self.phase = resample(&self.phase);
        if let Some(d) = &self.detuning {
            self.detuning = Some(resample(d));
        }
        Ok(())
    }

    /// Releases the sample storage; the pulse is unusable afterwards.
    pub fn free(&mut self) -> Result<()> {
        self.check()?;
        self.freed = true;
        self.amplitude = Vec::new();
        self.phase = Vec::new();
        self.detuning = None;
        Ok(())
    }

    /// Piecewise-constant drive between consecutive samples. Each piece uses
    /// the mean of its two bounding samples.
    pub fn segments(&self) -> Result<Vec<Segment>> {
        self.check()?;
        let n = self.nsamples();
        let dt = self.duration / (n - 1) as f64;
        let mid = |v: &[f64], k: usize| 0.5 * (v[k] + v[k + 1]);
        Ok((0..n - 1)
            .map(|k| Segment {
                dt,
                omega: mid(&self.amplitude, k),
                phi: mid(&self.phase, k),
                delta: self.detuning.as_deref().map_or(0.0, |d| mid(d, k)),
            })
            .collect())
    }

    /// Pulse area `∫ Ω dt` under the piecewise-constant rule.
    pub fn area(&self) -> Result<f64> {
        Ok(self.segments()?.iter().map(|s| s.omega * s.dt).sum())
    }
}

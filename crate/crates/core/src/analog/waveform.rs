// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Parametric waveform shapes used to fill pulse sample arrays.

use std::f64::consts::PI;

use crate::error::{CqError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    Constant {
        value: f64,
    },
    /// Peak `amplitude` at the centre of the pulse.
    Gaussian {
        amplitude: f64,
        sigma: f64,
    },
    /// `amplitude · sin(2π·frequency·t + phase)`, frequency in 1/ns.
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    Cosine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Rising ramp from 0 to `amplitude` repeated every `period` ns.
    Saw {
        amplitude: f64,
        period: f64,
    },
    /// Blackman window scaled to `amplitude` at the centre.
    Blackman {
        amplitude: f64,
    },
    /// Natural cubic spline through `(times[i], values[i])`.
    Interpolated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
    /// Sub-waveforms played back to back, each over its own duration.
    Composite {
        segments: Vec<(Waveform, f64)>,
    },
    /// Verbatim samples.
    Custom {
        samples: Vec<f64>,
    },
}

impl Waveform {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CqError::BadParams(m.to_string()));
        match self {
            Waveform::Gaussian { sigma, .. } if !(*sigma > 0.0) => {
                bad("gaussian sigma must be positive")
            }
            Waveform::Saw { period, .. } if !(*period > 0.0) => bad("saw period must be positive"),
            Waveform::Interpolated { times, values } => {
                if times.len() != values.len() {
                    return bad("interpolation times and values differ in length");
                }
                if times.len() < 2 {
                    return Err(CqError::KnotCountTooSmall(times.len()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("interpolation knots must be strictly increasing");
                }
                Ok(())
            }
            Waveform::Composite { segments } => {
                if segments.is_empty() {
                    return bad("composite waveform needs at least one segment");
                }
                for (w, d) in segments {
                    if !(*d > 0.0) {
                        return bad("composite segment durations must be positive");
                    }
                    w.validate()?;
                }
                Ok(())
            }
            Waveform::Custom { samples } if samples.is_empty() => {
                bad("custom waveform has no samples")
            }
            _ => Ok(()),
        }
    }

    /// Value at time `t` within a waveform of length `duration`.
    pub fn eval(&self, t: f64, duration: f64) -> f64 {
        match self {
            Waveform::Constant { value } => *value,
            Waveform::Gaussian { amplitude, sigma } => {
                let x = t - duration / 2.0;
                amplitude * (-(x * x) / (2.0 * sigma * sigma)).exp()
            }
            Waveform::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin(),
            Waveform::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).cos(),
            Waveform::Saw { amplitude, period } => amplitude * (t / period).rem_euclid(1.0),
            Waveform::Blackman { amplitude } => {
                let x = t / duration;
                amplitude * (0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos())
            }
            Waveform::Interpolated { times, values } => NaturalSpline::new(times, values).eval(t),
            Waveform::Composite { segments } => {
                let mut start = 0.0;
                for (k, (w, d)) in segments.iter().enumerate() {
                    if t < start + d || k == segments.len() - 1 {
                        return w.eval(t - start, *d);
                    }
                    start += d;
                }
                0.0
            }
            Waveform::Custom { samples } => {
                if samples.len() == 1 {
                    return samples[0];
                }
                let pos = (t / duration).clamp(0.0, 1.0) * (samples.len() - 1) as f64;
                let i = (pos.floor() as usize).min(samples.len() - 2);
                let frac = pos - i as f64;
                samples[i] * (1.0 - frac) + samples[i + 1] * frac
            }
        }
    }

    /// Fills `samples` over `duration`; sample `k` sits at `k·duration/(len−1)`.
    pub fn fill(&self, samples: &mut [f64], duration: f64) -> Result<()> {
        self.validate()?;
        let n = samples.len();
        if n < 2 {
            return Err(CqError::BadParams("at least 2 samples required".into()));
        }
        if let Waveform::Custom { samples: src } = self {
            if src.len() != n {
                return Err(CqError::BadParams(format!(
                    "custom waveform has {} samples, pulse has {n}",
                    src.len()
                )));
            }
            samples.copy_from_slice(src);
            return Ok(());
        }
        if let Waveform::Composite { segments } = self {
            let total: f64 = segments.iter().map(|(_, d)| d).sum();
            if (total - duration).abs() > 1e-9 * duration.max(1.0) {
                return Err(CqError::BadParams(format!(
                    "composite segments span {total} ns, pulse lasts {duration} ns"
                )));
            }
        }
        let step = duration / (n - 1) as f64;
        if let Waveform::Interpolated { times, values } = self {
            let spline = NaturalSpline::new(times, values);
            for (k, s) in samples.iter_mut().enumerate() {
                *s = spline.eval(k as f64 * step);
            }
            return Ok(());
        }
        for (k, s) in samples.iter_mut().enumerate() {
            *s = self.eval(k as f64 * step, duration);
        }
        Ok(())
    }
}

/// Natural cubic spline (zero second derivative at both ends).
#[derive(Debug, Clone)]
pub struct NaturalSpline<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    second: Vec<f64>,
}

impl<'a> NaturalSpline<'a> {
    /// `xs` must be strictly increasing with at least two knots.
    pub fn new(xs: &'a [f64], ys: &'a [f64]) -> Self {
        let n = xs.len();
        let mut second = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..m {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; m];
            sol[m - 1] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            second[1..n - 1].copy_from_slice(&sol);
        }
        NaturalSpline { xs, ys, second }
    }

    /// Evaluates the spline, clamping `x` to the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let x = x.clamp(self.xs[0], self.xs[n - 1]);
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }
}

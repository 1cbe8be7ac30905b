// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant time evolution of addressed qubits.
//!
//! Small qubit sets are evolved segment by segment with the exact propagator
//! `exp(−iHΔt)`. Larger sets fall back to symmetric second-order Trotter
//! steps no longer than `trotter_step_ns`.

use nalgebra::DMatrix;

use super::hamiltonian::{coupling, hamiltonian, Position};
use super::pulse::Segment;
use super::AnalogMode;
use crate::config::AnalogConfig;
use crate::error::Result;
use crate::sim::{StateVector, C64};

pub(crate) struct Evolution<'a> {
    pub mode: AnalogMode,
    pub cfg: &'a AnalogConfig,
    /// Absolute qubit indices in the state.
    pub targets: &'a [usize],
    /// Positions of `targets`, same order.
    pub positions: &'a [Position],
}

fn propagator(h: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    (h * C64::new(0.0, -dt)).exp()
}

impl Evolution<'_> {
    pub fn run(&self, state: &mut StateVector, segments: &[Segment]) -> Result<()> {
        if self.targets.len() <= self.cfg.exact_max_qubits {
            self.run_exact(state, segments)
        } else {
            for seg in segments {
                self.trotter_segment(state, seg)?;
            }
            Ok(())
        }
    }

    fn run_exact(&self, state: &mut StateVector, segments: &[Segment]) -> Result<()> {
        let mut cached: Option<(Segment, DMatrix<C64>)> = None;
        for seg in segments {
            if seg.dt == 0.0 {
                continue;
            }
            let reuse = matches!(&cached, Some((s, _)) if s == seg);
            if !reuse {
                let h = hamiltonian(
                    self.mode,
                    self.cfg,
                    self.positions,
                    seg.omega,
                    seg.phi,
                    seg.delta,
                );
                cached = Some((*seg, propagator(&h, seg.dt)));
            }
            let (_, u) = cached.as_ref().expect("propagator cached above");
            state.apply_matrix(u, self.targets)?;
        }
        Ok(())
    }

    fn trotter_segment(&self, state: &mut StateVector, seg: &Segment) -> Result<()> {
        if seg.dt == 0.0 {
            return Ok(());
        }
        let nsteps = (seg.dt / self.cfg.trotter_step_ns).ceil().max(1.0) as usize;
        let h = seg.dt / nsteps as f64;

        let single = hamiltonian(
            self.mode,
            self.cfg,
            &[[0.0; 3]],
            seg.omega,
            seg.phi,
            seg.delta,
        );
        let u_single = propagator(&single, h);

        let mut pairs = Vec::new();
        for i in 0..self.targets.len() {
            for j in i + 1..self.targets.len() {
                let c = coupling(self.mode, self.cfg, &self.positions[i], &self.positions[j]);
                pairs.push((self.targets[i], self.targets[j], c));
            }
        }

        for _ in 0..nsteps {
            self.half_interaction(state, &pairs, h / 2.0, false)?;
            for &t in self.targets {
                state.apply_matrix(&u_single, &[t])?;
            }
            self.half_interaction(state, &pairs, h / 2.0, true)?;
        }
        Ok(())
    }

    fn half_interaction(
        &self,
        state: &mut StateVector,
        pairs: &[(usize, usize, f64)],
        t: f64,
        reversed: bool,
    ) -> Result<()> {
        match self.mode {
            AnalogMode::Ising => {
                // all terms diagonal and commuting
                state.apply_diagonal(|idx| {
                    let energy: f64 = pairs
                        .iter()
                        .filter(|(a, b, _)| idx >> a & 1 == 1 && idx >> b & 1 == 1)
                        .map(|(_, _, c)| c)
                        .sum();
                    C64::from_polar(1.0, -energy * t)
                });
                Ok(())
            }
            AnalogMode::Xy => {
                let apply = |state: &mut StateVector, &(a, b, c): &(usize, usize, f64)| {
                    let (s, co) = (c * t).sin_cos();
                    let mut u = DMatrix::<C64>::identity(4, 4);
                    u[(1, 1)] = C64::new(co, 0.0);
                    u[(2, 2)] = C64::new(co, 0.0);
                    u[(1, 2)] = C64::new(0.0, -s);
                    u[(2, 1)] = C64::new(0.0, -s);
                    state.apply_matrix(&u, &[a, b])
                };
                if reversed {
                    pairs.iter().rev().try_for_each(|p| apply(state, p))
                } else {
                    pairs.iter().try_for_each(|p| apply(state, p))
                }
            }
        }
    }
}

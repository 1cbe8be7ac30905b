// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Demonstration programs and the built-in kernel catalogue.

mod kernels;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

pub use kernels::{
    anneal, bell, coin, conditional, full_qft_circuit, ghz, kernel_by_name, kernel_names,
    mixed_measure, param_kernel_by_name, param_kernel_names, rabi_pulse, rx_all, slow_coin,
    zero_init_full_qft, AnnealSchedule,
};

use crate::analog::{AnalogMode, Position};
use crate::config::RuntimeConfig;
use crate::error::{CqError, Result};
use crate::exec::ExecHandle;
use crate::handle::CState;
use crate::kernel::{ParamPack, PqKern, QKern};
use crate::runtime::Runtime;

#[derive(Debug, Clone)]
pub struct DemoConfig {
    pub qubits: usize,
    pub shots: usize,
    /// Run the primary path through the asynchronous executors.
    pub asynchronous: bool,
    pub verbosity: u32,
    pub runtime: RuntimeConfig,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            qubits: 10,
            shots: 10,
            asynchronous: false,
            verbosity: 0,
            runtime: RuntimeConfig::default(),
        }
    }
}

impl DemoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.runtime.seed = Some(seed);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(CqError::TooManyQubits {
                requested: 0,
                max: self.runtime.max_qubits,
            });
        }
        if self.shots == 0 {
            return Err(CqError::ZeroShots);
        }
        Ok(())
    }

    fn start(&self) -> Result<Runtime> {
        self.validate()?;
        let mut rt = Runtime::new(self.runtime.clone());
        rt.init(self.verbosity)?;
        Ok(rt)
    }
}

fn rows(flat: &[CState], width: usize) -> Vec<Vec<CState>> {
    flat.chunks(width.max(1)).map(<[CState]>::to_vec).collect()
}

// ---- QFT ----

#[derive(Debug, Clone, PartialEq)]
pub struct QftReport {
    pub qubits: usize,
    /// One row of outcomes per shot, qubit 0 first.
    pub shots: Vec<Vec<CState>>,
}

impl fmt::Display for QftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Running QFT circuit on quantum device.")?;
        writeln!(f, "Reporting measurement outcomes:")?;
        for (k, row) in self.shots.iter().enumerate() {
            write!(f, "Shot [{k}]:")?;
            for c in row {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Zero-initialised QFT over `cfg.shots` shots, then the same run through the
/// other executor family after reseeding; the two must agree.
pub fn demo_qft(cfg: &DemoConfig) -> Result<QftReport> {
    let mut rt = cfg.start()?;
    let n = cfg.qubits;
    let qr = rt.alloc_qureg(n)?;
    let k = QKern::new(zero_init_full_qft);
    rt.register_qkern(&k)?;
    let seed = rt.seed()?;

    let run = |rt: &mut Runtime, asynchronous: bool| -> Result<Vec<CState>> {
        rt.reseed(seed)?;
        let len = n * cfg.shots;
        if asynchronous {
            let mut h = ExecHandle::new();
            rt.am_qrun(&k, &qr, n, vec![CState::UNSET; len], n, cfg.shots, &mut h)?;
            h.wait()?;
            Ok(h.take_results())
        } else {
            let mut out = vec![CState::UNSET; len];
            rt.sm_qrun(&k, &qr, n, &mut out, n, cfg.shots)?;
            Ok(out)
        }
    };
    let primary = run(&mut rt, cfg.asynchronous)?;
    let check = run(&mut rt, !cfg.asynchronous)?;
    if primary != check {
        return Err(CqError::KernelFailure(
            "synchronous and asynchronous QFT runs disagree".into(),
        ));
    }
    rt.free_qureg(&qr)?;
    rt.finalise(cfg.verbosity)?;
    Ok(QftReport {
        qubits: n,
        shots: rows(&primary, n),
    })
}

// ---- Bell ----

#[derive(Debug, Clone, PartialEq)]
pub struct BellReport {
    pub shots: usize,
    /// Counts of `00`, `01`, `10`, `11` (qubit 0 first).
    pub counts: [usize; 4],
    /// Shots completed by the early-stopped run.
    pub halted_after: usize,
    /// Every row the early-stopped run reported held a valid, correlated pair.
    pub halted_rows_valid: bool,
}

impl BellReport {
    pub fn correlated(&self) -> usize {
        self.counts[0] + self.counts[3]
    }
}

impl fmt::Display for BellReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Bell pair over {} shots:", self.shots)?;
        for (i, label) in ["00", "01", "10", "11"].iter().enumerate() {
            let c = self.counts[i];
            writeln!(f, "  {label}: {c:>8} ({:.4})", c as f64 / self.shots as f64)?;
        }
        writeln!(
            f,
            "Correlated outcomes: {}/{}",
            self.correlated(),
            self.shots
        )?;
        // the stop point depends on thread timing, so it is not printed
        writeln!(
            f,
            "Early stop after first synchronised shot: {}",
            if self.halted_rows_valid && self.halted_after >= 1 {
                "rows valid"
            } else {
                "FAILED"
            }
        )
    }
}

pub fn demo_bell(cfg: &DemoConfig) -> Result<BellReport> {
    let mut rt = cfg.start()?;
    let qr = rt.alloc_qureg(2)?;
    let k = QKern::new(bell);
    rt.register_qkern(&k)?;

    let flat = if cfg.asynchronous {
        let mut h = ExecHandle::new();
        rt.am_qrun(
            &k,
            &qr,
            2,
            vec![CState::UNSET; 2 * cfg.shots],
            2,
            cfg.shots,
            &mut h,
        )?;
        h.wait()?;
        h.take_results()
    } else {
        let mut out = vec![CState::UNSET; 2 * cfg.shots];
        rt.sm_qrun(&k, &qr, 2, &mut out, 2, cfg.shots)?;
        out
    };
    let mut counts = [0usize; 4];
    for row in flat.chunks(2) {
        counts[(row[0].bit()? as usize) | (row[1].bit()? as usize) << 1] += 1;
    }

    // early stop: poll until one shot is visible, then halt
    let total = cfg.shots.max(1000);
    let mut h = ExecHandle::new();
    rt.am_qrun(&k, &qr, 2, vec![CState::UNSET; 2 * total], 2, total, &mut h)?;
    loop {
        h.sync()?;
        if h.shots_completed()? >= 1 || h.status()?.is_terminal() {
            break;
        }
        std::thread::yield_now();
    }
    h.halt()?;
    let done = h.shots_completed()?;
    let res = h.results();
    let halted_rows_valid = res[..2 * done]
        .chunks(2)
        .all(|r| r[0].is_valid() && r[0] == r[1])
        && res[2 * done..].iter().all(|c| *c == CState::UNSET);

    rt.finalise(cfg.verbosity)?;
    Ok(BellReport {
        shots: cfg.shots,
        counts,
        halted_after: done,
        halted_rows_valid,
    })
}

// ---- Rabi ----

pub const RABI_POINTS: usize = 50;
/// Drive strength of the Rabi sweep, rad/ns.
pub const RABI_OMEGA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RabiReport {
    pub omega: f64,
    /// `(t, simulated P(1), sin²(Ωt/2))`.
    pub points: Vec<(f64, f64, f64)>,
}

impl RabiReport {
    pub fn max_deviation(&self) -> f64 {
        self.points
            .iter()
            .map(|(_, p, e)| (p - e).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for RabiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Rabi oscillation, ISING mode, Omega = {} rad/ns, delta = 0",
            self.omega
        )?;
        writeln!(f, "{:>12} {:>12} {:>12}", "t [ns]", "P(1)", "sin^2(Wt/2)")?;
        for (t, p, e) in &self.points {
            writeln!(f, "{t:>12.4} {p:>12.8} {e:>12.8}")?;
        }
        writeln!(f, "Max deviation: {:.3e}", self.max_deviation())
    }
}

/// Single-qubit Rabi sweep over two full periods. P(1) is read from the
/// simulated state.
pub fn demo_rabi(cfg: &DemoConfig) -> Result<RabiReport> {
    let mut rt = cfg.start()?;
    rt.enable_analog_mode(AnalogMode::Ising)?;
    let qr = rt.alloc_qubit()?;
    let k = PqKern::new(rabi_pulse);
    rt.register_pqkern(&k)?;
    let omega = RABI_OMEGA;
    let t_max = 4.0 * PI / omega;
    let mut points = Vec::with_capacity(RABI_POINTS);
    for i in 0..RABI_POINTS {
        let t = t_max * i as f64 / (RABI_POINTS - 1) as f64;
        let params = ParamPack::from_f64s(&[omega, t]);
        if cfg.asynchronous {
            let mut h = ExecHandle::new();
            rt.ap_qrun(&k, &qr, 1, Vec::new(), 0, &params, &mut h)?;
            h.wait()?;
        } else {
            rt.sp_qrun(&k, &qr, 1, &mut [], 0, &params)?;
        }
        let state = rt.peek_state(&qr, 0)?;
        let p1 = state.prob_one(0);
        points.push((t, p1, (omega * t / 2.0).sin().powi(2)));
    }
    rt.finalise(cfg.verbosity)?;
    Ok(RabiReport { omega, points })
}

// ---- MAXCUT ----

/// Graph embedded as atom positions: edges are pairs within the blockade radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub name: &'static str,
    pub positions: Vec<Position>,
    pub edges: Vec<(usize, usize)>,
}

/// Nearest-neighbour distance of the built-in layouts, µm.
pub const GRAPH_SPACING_UM: f64 = 4.5;

impl Graph {
    pub fn builtin(name: &str) -> Option<Graph> {
        let a = GRAPH_SPACING_UM;
        let h = a * 3f64.sqrt() / 2.0;
        Some(match name {
            "edge" => Graph {
                name: "edge",
                positions: vec![[0.0, 0.0, 0.0], [a, 0.0, 0.0]],
                edges: vec![(0, 1)],
            },
            "triangle" => Graph {
                name: "triangle",
                positions: vec![[0.0, 0.0, 0.0], [a, 0.0, 0.0], [a / 2.0, h, 0.0]],
                edges: vec![(0, 1), (1, 2), (0, 2)],
            },
            "square" => Graph {
                name: "square",
                positions: vec![[0.0, 0.0, 0.0], [a, 0.0, 0.0], [a, a, 0.0], [0.0, a, 0.0]],
                edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            },
            "k4" => Graph {
                name: "k4",
                // regular tetrahedron
                positions: vec![
                    [0.0, 0.0, 0.0],
                    [a, 0.0, 0.0],
                    [a / 2.0, h, 0.0],
                    [a / 2.0, h / 3.0, a * (2.0f64 / 3.0).sqrt()],
                ],
                edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            },
            _ => return None,
        })
    }

    pub fn builtin_names() -> [&'static str; 4] {
        ["edge", "triangle", "square", "k4"]
    }

    pub fn nvertices(&self) -> usize {
        self.positions.len()
    }

    /// Edges crossing the partition given by bit `i` of `mask` for vertex `i`.
    pub fn cut_size(&self, mask: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| (mask >> a & 1) != (mask >> b & 1))
            .count()
    }

    /// Optimum by enumerating every partition.
    pub fn brute_force_max_cut(&self) -> usize {
        (0..1usize << self.nvertices())
            .map(|m| self.cut_size(m))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxcutReport {
    pub graph: Graph,
    pub schedule: AnnealSchedule,
    /// Captured bitstrings (bit `i` = vertex `i`) and their counts.
    pub histogram: BTreeMap<usize, usize>,
    pub best_partition: usize,
    pub best_cut: usize,
    pub optimum: usize,
}

impl fmt::Display for MaxcutReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.graph.nvertices();
        let bits = |m: usize| {
            (0..n).fold(String::new(), |mut s, i| {
                let _ = write!(s, "{}", m >> i & 1);
                s
            })
        };
        writeln!(
            f,
            "MAXCUT on '{}' ({n} vertices, {} edges), {} shots",
            self.graph.name,
            self.graph.edges.len(),
            self.schedule.shots
        )?;
        let mut top: Vec<_> = self.histogram.iter().collect();
        top.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        for (mask, count) in top.iter().take(8) {
            writeln!(
                f,
                "  {} x{count:<5} cut {}",
                bits(**mask),
                self.graph.cut_size(**mask)
            )?;
        }
        writeln!(f, "Best partition: {}", bits(self.best_partition))?;
        writeln!(
            f,
            "Best cut size: {} (optimum {})",
            self.best_cut, self.optimum
        )
    }
}

/// Anneals the graph's atom layout towards its maximum independent set and
/// reads cuts off the captured samples.
pub fn demo_maxcut(cfg: &DemoConfig, graph: &Graph) -> Result<MaxcutReport> {
    let schedule = AnnealSchedule {
        shots: cfg.shots,
        ..AnnealSchedule::default()
    };
    let mut rt = cfg.start()?;
    rt.enable_analog_mode(AnalogMode::Ising)?;
    let n = graph.nvertices();
    let qr = rt.alloc_qureg(n)?;
    let k = PqKern::new(anneal);
    rt.register_pqkern(&k)?;
    let params = schedule.pack(&graph.positions);
    let nmeasure = n * schedule.shots;
    let flat = if cfg.asynchronous {
        let mut h = ExecHandle::new();
        rt.ap_qrun(
            &k,
            &qr,
            n,
            vec![CState::UNSET; nmeasure],
            nmeasure,
            &params,
            &mut h,
        )?;
        h.wait()?;
        h.take_results()
    } else {
        let mut out = vec![CState::UNSET; nmeasure];
        rt.sp_qrun(&k, &qr, n, &mut out, nmeasure, &params)?;
        out
    };
    rt.finalise(cfg.verbosity)?;

    let mut histogram = BTreeMap::new();
    for row in flat.chunks(n) {
        let mut mask = 0;
        for (i, c) in row.iter().enumerate() {
            mask |= (c.bit()? as usize) << i;
        }
        *histogram.entry(mask).or_insert(0) += 1;
    }
    let (best_partition, best_cut) = histogram
        .keys()
        .map(|&m| (m, graph.cut_size(m)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap_or((0, 0));
    Ok(MaxcutReport {
        graph: graph.clone(),
        schedule,
        histogram,
        best_partition,
        best_cut,
        optimum: graph.brute_force_max_cut(),
    })
}

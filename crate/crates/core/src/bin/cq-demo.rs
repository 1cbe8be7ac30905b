// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cq::demos::{demo_bell, demo_maxcut, demo_qft, demo_rabi, DemoConfig, Graph};
use cq::{AnalogConfig, CqError, RuntimeConfig};

#[derive(Parser, Debug)]
#[command(
    name = "cq-demo",
    about = "CQ demonstration programs on the simulated device"
)]
struct Cli {
    #[command(subcommand)]
    demo: Demo,

    #[arg(long, global = true)]
    qubits: Option<usize>,
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// Device RNG seed (overrides CQ_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Diagnostic level, 0 = silent (CQ_VERBOSITY wins when set).
    #[arg(long, global = true, default_value_t = 0)]
    verbosity: u32,
    /// Analogue device configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run through the asynchronous executors.
    #[arg(long = "async", global = true)]
    asynchronous: bool,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Zero-initialised QFT, one line per shot.
    Qft,
    /// Bell pair statistics and an early-stopped run.
    Bell,
    /// Single-qubit Rabi sweep in analogue mode.
    Rabi,
    /// MAXCUT by annealing an atom layout (edge, triangle, square, k4).
    Maxcut {
        #[arg(long, default_value = "square")]
        graph: String,
    },
}

fn run(cli: Cli) -> Result<String, CqError> {
    let mut runtime = RuntimeConfig::default().with_env()?;
    if let Some(seed) = cli.seed {
        runtime.seed = Some(seed);
    }
    if let Some(path) = &cli.config {
        runtime.analog = AnalogConfig::load(path)?;
    }
    let (qubits, shots) = match cli.demo {
        Demo::Qft => (10, 10),
        Demo::Bell => (2, 10_000),
        Demo::Rabi => (1, 1),
        Demo::Maxcut { .. } => (0, 200),
    };
    let cfg = DemoConfig {
        qubits: cli.qubits.unwrap_or(qubits),
        shots: cli.shots.unwrap_or(shots),
        asynchronous: cli.asynchronous,
        verbosity: cli.verbosity,
        runtime,
    };
    Ok(match cli.demo {
        Demo::Qft => demo_qft(&cfg)?.to_string(),
        Demo::Bell => demo_bell(&cfg)?.to_string(),
        Demo::Rabi => demo_rabi(&cfg)?.to_string(),
        Demo::Maxcut { graph } => {
            let g = Graph::builtin(&graph)
                .ok_or_else(|| CqError::Config(format!("unknown graph '{graph}'")))?;
            let cfg = DemoConfig {
                qubits: g.nvertices(),
                ..cfg
            };
            demo_maxcut(&cfg, &g)?.to_string()
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cq-demo: error: {e}");
            ExitCode::FAILURE
        }
    }
}

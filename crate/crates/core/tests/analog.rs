// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use cq::{
    Addressing, AnalogConfig, AnalogMode, CState, CqError, KernelCtx, KernelResult, PulseField,
    QKern, QuantumKernel, QubitHandle, Runtime, RuntimeConfig, Waveform, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::programs::{run_state, Program};
use common::{c, max_diff};

fn runtime() -> Runtime {
    let mut rt = Runtime::new(RuntimeConfig::default().with_seed(31));
    rt.init(0).unwrap();
    rt
}

#[test]
fn random_programs_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11a);
    let mut rt = runtime();
    let cfg = rt.config().analog.clone();
    let mut worst = 0.0f64;
    for _ in 0..60 {
        let p = Program::random(&mut rng);
        let got = run_state(&mut rt, p.mode, p.n, Arc::new(p.clone())).unwrap();
        let want = p.oracle(&cfg);
        worst = worst.max(max_diff(&got, want.as_slice()));
    }
    assert!(worst < 1e-6, "worst amplitude error {worst}");
}

#[test]
fn trotterised_evolution_tracks_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cfg = RuntimeConfig {
        analog: AnalogConfig {
            exact_max_qubits: 1,
            ..AnalogConfig::default()
        },
        ..RuntimeConfig::default().with_seed(3)
    };
    let mut rt = Runtime::new(cfg);
    rt.init(0).unwrap();
    let acfg = rt.config().analog.clone();
    for _ in 0..10 {
        let mut p = Program::random(&mut rng);
        if p.n == 1 {
            continue;
        }
        p.ops.iter_mut().for_each(|o| o.target = None);
        let got = run_state(&mut rt, p.mode, p.n, Arc::new(p.clone())).unwrap();
        let want = p.oracle(&acfg);
        let err = max_diff(&got, want.as_slice());
        assert!(err < 1e-3, "trotter error {err}");
    }
}

struct Drive {
    omega: f64,
    delta: f64,
    duration: f64,
    coords: Vec<f64>,
}

impl QuantumKernel for Drive {
    fn run(&self, ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
        ctx.set_qureg(qr, 0, n)?;
        ctx.enable_analog_qreg(qr)?;
        if !self.coords.is_empty() {
            ctx.set_qubit_pos(qr, &self.coords)?;
        }
        let mut ch = ctx.get_channel(qr, Addressing::Global, None)?;
        let mut p = ctx.init_pulse(self.duration)?;
        p.fill(
            PulseField::Amplitude,
            &Waveform::Constant { value: self.omega },
        )?;
        p.fill(
            PulseField::Detuning,
            &Waveform::Constant { value: self.delta },
        )?;
        ctx.play(&mut ch, &p)
    }
}

#[test]
fn detuned_rabi_matches_closed_form() {
    let mut rt = runtime();
    let (omega, delta): (f64, f64) = (0.7, 0.4);
    let w = (omega * omega + delta * delta).sqrt();
    for k in 1..20 {
        let t = k as f64 * 0.9;
        let amps = run_state(
            &mut rt,
            AnalogMode::Ising,
            1,
            Arc::new(Drive {
                omega,
                delta,
                duration: t,
                coords: vec![],
            }),
        )
        .unwrap();
        let p1 = amps[1].norm_sqr();
        let want = omega * omega / (w * w) * (w * t / 2.0).sin().powi(2);
        assert!((p1 - want).abs() < 1e-9, "t={t}: {p1} vs {want}");
    }
}

#[test]
fn blockade_suppresses_double_excitation() {
    let mut rt = runtime();
    let omega = 0.2;
    // collective π pulse at √2 Ω
    let t = PI / (2f64.sqrt() * omega);
    let amps = run_state(
        &mut rt,
        AnalogMode::Ising,
        2,
        Arc::new(Drive {
            omega,
            delta: 0.0,
            duration: t,
            coords: vec![0.0, 0.0, 0.0, 4.0, 0.0, 0.0],
        }),
    )
    .unwrap();
    let p11 = amps[3].norm_sqr();
    assert!(p11 < 0.05, "P(11) = {p11}");
    let single = amps[1].norm_sqr() + amps[2].norm_sqr();
    assert!(single > 0.9, "P(single) = {single}");

    // far apart the atoms flip independently
    let far = run_state(
        &mut rt,
        AnalogMode::Ising,
        2,
        Arc::new(Drive {
            omega,
            delta: 0.0,
            duration: PI / omega,
            coords: vec![0.0, 0.0, 0.0, 40.0, 0.0, 0.0],
        }),
    )
    .unwrap();
    assert!(far[3].norm_sqr() > 0.99);
}

struct Idle {
    init: u64,
    duration: f64,
    coords: Vec<f64>,
}

impl QuantumKernel for Idle {
    fn run(&self, ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
        ctx.set_qureg(qr, self.init, n)?;
        ctx.enable_analog_qreg(qr)?;
        ctx.set_qubit_pos(qr, &self.coords)?;
        let mut ch = ctx.get_channel(qr, Addressing::Global, None)?;
        ctx.delay(&mut ch, self.duration)?;
        assert_eq!(ch.clock(), self.duration);
        Ok(())
    }
}

#[test]
fn xy_exchange_conserves_excitations() {
    let mut rt = runtime();
    let r: f64 = 5.0;
    let coupling = 3.7 / r.powi(3);
    for k in 0..10 {
        let t = 2.0 + 7.5 * k as f64;
        // |01> with qubit 0 excited
        let amps = run_state(
            &mut rt,
            AnalogMode::Xy,
            2,
            Arc::new(Idle {
                init: 1,
                duration: t,
                coords: vec![0.0, 0.0, 0.0, r, 0.0, 0.0],
            }),
        )
        .unwrap();
        let p: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
        assert!((p[1] + p[2] - 1.0).abs() < 1e-12);
        assert!((p[2] - (coupling * t).sin().powi(2)).abs() < 1e-9);
    }
}

#[test]
fn ising_delay_is_a_pair_phase() {
    let mut rt = runtime();
    let r: f64 = 6.0;
    let v = 5420.158_53 / r.powi(6);
    let t = 3.3;
    let amps = run_state(
        &mut rt,
        AnalogMode::Ising,
        2,
        Arc::new(Idle {
            init: 3,
            duration: t,
            coords: vec![0.0, 0.0, 0.0, 0.0, r, 0.0],
        }),
    )
    .unwrap();
    assert!((amps[3] - C64::from_polar(1.0, -v * t)).norm() < 1e-12);
}

struct BarrierProbe;

impl QuantumKernel for BarrierProbe {
    fn run(&self, ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
        ctx.set_qureg(qr, 0, n)?;
        ctx.h(qr.at(0)?)?;
        ctx.h(qr.at(1)?)?;
        ctx.enable_analog_qreg(qr)?;
        ctx.set_qubit_pos(qr, &[0.0, 0.0, 0.0, 5.0, 0.0, 0.0])?;
        let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
        let mut l = ctx.get_channel(qr, Addressing::Local, Some(qr.at(1)?))?;
        // zero-amplitude local pulse: advances the clock only
        let p = ctx.init_pulse(4.0)?;
        ctx.play(&mut l, &p)?;
        assert_eq!((g.clock(), l.clock()), (0.0, 4.0));
        ctx.barrier(&mut [&mut g, &mut l])?;
        assert_eq!((g.clock(), l.clock()), (4.0, 4.0));
        Ok(())
    }
}

#[test]
fn barrier_idles_the_lagging_channel() {
    let mut rt = runtime();
    let amps = run_state(&mut rt, AnalogMode::Ising, 2, Arc::new(BarrierProbe)).unwrap();
    let v = 5420.158_53 / 5f64.powi(6);
    // the GLOBAL channel idled 4 ns under the pair interaction
    let want = [
        c(0.5, 0.0),
        c(0.5, 0.0),
        c(0.5, 0.0),
        C64::from_polar(0.5, -v * 4.0),
    ];
    assert!(max_diff(&amps, &want) < 1e-12);
}

struct Capture {
    shots: usize,
    out: Mutex<Vec<i32>>,
}

impl QuantumKernel for Capture {
    fn run(&self, ctx: &mut KernelCtx<'_>, n: usize, qr: QubitHandle) -> KernelResult {
        ctx.set_qureg(qr, 0, n)?;
        ctx.enable_analog_qreg(qr)?;
        let mut ch = ctx.get_channel(qr, Addressing::Global, None)?;
        let omega = 0.5;
        // π/2 pulse
        let mut p = ctx.init_pulse(PI / (2.0 * omega))?;
        p.fill(PulseField::Amplitude, &Waveform::Constant { value: omega })?;
        let before = ctx.state(qr)?.clone();
        let samples = ctx.capture(&mut ch, &p, self.shots)?;
        let after = ctx.state(qr)?;
        // capture leaves the evolved state intact
        assert!((after.prob_one(0) - 0.5).abs() < 1e-12);
        assert!(before.prob_one(0) < 1e-12);
        *self.out.lock().unwrap() = samples;
        Ok(())
    }
}

#[test]
fn capture_samples_the_evolved_distribution() {
    let mut rt = runtime();
    let cap = Arc::new(Capture {
        shots: 10_000,
        out: Mutex::new(Vec::new()),
    });
    run_state(&mut rt, AnalogMode::Ising, 1, cap.clone()).unwrap();
    let out = cap.out.lock().unwrap();
    assert_eq!(out.len(), 10_000);
    let frac = out.iter().filter(|&&b| b == 1).count() as f64 / out.len() as f64;
    assert!((0.48..=0.52).contains(&frac), "fraction {frac}");
}

type Check = fn(&mut KernelCtx<'_>, QubitHandle) -> KernelResult;

struct Expect {
    check: Check,
}

impl QuantumKernel for Expect {
    fn run(&self, ctx: &mut KernelCtx<'_>, _: usize, qr: QubitHandle) -> KernelResult {
        (self.check)(ctx, qr)
    }
}

fn expect_err(rt: &mut Runtime, n: usize, check: Check, want: CqError) {
    let err = run_state(rt, AnalogMode::Ising, n, Arc::new(Expect { check })).unwrap_err();
    assert_eq!(err.root_cause(), &want);
}

#[test]
fn channel_and_pulse_errors() {
    let mut rt = runtime();
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            ctx.get_channel(qr, Addressing::Local, None).map(drop)
        },
        CqError::MissingTarget,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let sub = qr.slice(0, 1)?;
            ctx.get_channel(sub, Addressing::Local, Some(qr.at(1)?))
                .map(drop)
        },
        CqError::TargetOutOfRegister,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            for _ in 0..9 {
                ctx.get_channel(qr, Addressing::Global, None)?;
            }
            Ok(())
        },
        CqError::ChannelLimit(8),
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
            ctx.retarget_channel(&mut g, qr.at(1)?)
        },
        CqError::GlobalChannel,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
            ctx.disable_analog_qreg(qr)?;
            ctx.enable_analog_qreg(qr)?;
            ctx.delay(&mut g, 1.0)
        },
        CqError::InvalidChannel,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
            ctx.delay(&mut g, -1.0)
        },
        CqError::NegativeDelay(-1.0),
    );
    expect_err(
        &mut rt,
        2,
        |ctx, _| ctx.barrier(&mut []),
        CqError::EmptyChannelList,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
            let p = ctx.init_pulse(1.0)?;
            ctx.capture(&mut g, &p, 0).map(drop)
        },
        CqError::ShotsZero,
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            ctx.set_qubit_pos(qr, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0])
        },
        CqError::CoincidentQubits(0, 1),
    );
    expect_err(
        &mut rt,
        2,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            ctx.set_qubit_pos(qr, &[1.0, 1.0, 0.0])
        },
        CqError::SizeMismatch {
            expected: 6,
            actual: 3,
        },
    );
    expect_err(
        &mut rt,
        1,
        |ctx, _| ctx.init_pulse(0.0).map(drop),
        CqError::NonPositiveDuration(0.0),
    );
    expect_err(
        &mut rt,
        1,
        |ctx, qr| {
            ctx.enable_analog_qreg(qr)?;
            let mut g = ctx.get_channel(qr, Addressing::Global, None)?;
            let mut p = ctx.init_pulse(1.0)?;
            p.free()?;
            ctx.play(&mut g, &p)
        },
        CqError::InvalidPulse,
    );
}

#[test]
fn barrier_rejects_mixed_registers() {
    let mut rt = runtime();
    rt.enable_analog_mode(AnalogMode::Ising).unwrap();
    let other = rt.alloc_qureg(1).unwrap();
    struct Mixed(QubitHandle);
    impl QuantumKernel for Mixed {
        fn run(&self, ctx: &mut KernelCtx<'_>, _: usize, qr: QubitHandle) -> KernelResult {
            ctx.enable_analog_qreg(qr)?;
            ctx.enable_analog_qreg(self.0)?;
            let mut a = ctx.get_channel(qr, Addressing::Global, None)?;
            let mut b = ctx.get_channel(self.0, Addressing::Global, None)?;
            ctx.barrier(&mut [&mut a, &mut b])
        }
    }
    let err = run_state(&mut rt, AnalogMode::Ising, 1, Arc::new(Mixed(other))).unwrap_err();
    assert_eq!(err.root_cause(), &CqError::MixedRegisters);
}

#[test]
fn analogue_needs_a_mode() {
    let mut rt = runtime();
    let qr = rt.alloc_qureg(1).unwrap();
    let k = QKern::shared(Arc::new(Expect {
        check: |ctx, qr| ctx.enable_analog_qreg(qr),
    }));
    rt.register_qkern(&k).unwrap();
    let mut none: [CState; 0] = [];
    let err = rt.s_qrun(&k, &qr, 1, &mut none, 0).unwrap_err();
    assert_eq!(err.root_cause(), &CqError::ModeNotEnabled);
    assert_eq!(rt.enable_analog_mode_id(7), Err(CqError::UnknownMode(7)));
    rt.enable_analog_mode_id(1).unwrap();
    assert_eq!(rt.inspect(0).unwrap().analog_mode, Some(AnalogMode::Xy));
}

#[test]
fn analogue_evolution_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut rt = runtime();
    for _ in 0..30 {
        let p = Program::random(&mut rng);
        let amps = run_state(&mut rt, p.mode, p.n, Arc::new(p)).unwrap();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

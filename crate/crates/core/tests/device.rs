// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use cq::config::DeviceMode;
use cq::demos::{coin, ghz};
use cq::{
    CState, CqError, ExecHandle, ExecStatus, KernelCtx, KernelResult, QKern, QubitHandle, Runtime,
    RuntimeConfig,
};

fn runtime(cfg: RuntimeConfig) -> Runtime {
    let mut rt = Runtime::new(cfg);
    rt.init(0).unwrap();
    rt
}

#[test]
fn probes_arrive_in_enqueue_order() {
    for mode in [DeviceMode::Threaded, DeviceMode::Inline] {
        let rt = runtime(RuntimeConfig::default().with_seed(1).with_mode(mode));
        for tag in 0..500 {
            rt.probe(0, tag).unwrap();
        }
        let log = rt.inspect(0).unwrap().probe_log;
        assert_eq!(log, (0..500).collect::<Vec<u64>>(), "{mode:?}");
    }
}

#[test]
fn queued_executions_never_interleave() {
    let cfg = RuntimeConfig {
        trace_gates: true,
        ..RuntimeConfig::default().with_seed(4)
    };
    let mut rt = runtime(cfg);
    let a = rt.alloc_qureg(3).unwrap();
    let b = rt.alloc_qureg(3).unwrap();
    let k = QKern::new(ghz);
    rt.register_qkern(&k).unwrap();
    let mut ea = ExecHandle::new();
    let mut eb = ExecHandle::new();
    rt.am_qrun(&k, &a, 3, vec![CState::UNSET; 3 * 50], 3, 50, &mut ea)
        .unwrap();
    rt.am_qrun(&k, &b, 3, vec![CState::UNSET; 3 * 50], 3, 50, &mut eb)
        .unwrap();
    ea.wait().unwrap();
    eb.wait().unwrap();
    let trace = rt.inspect(0).unwrap().gate_trace;
    assert!(!trace.is_empty());
    // one contiguous block per execution
    let mut ids: Vec<u64> = trace.iter().map(|e| e.exec_id).collect();
    ids.dedup();
    assert_eq!(ids.len(), 2, "executions interleaved");
    let first = trace[0].registry_index;
    assert!(trace
        .iter()
        .take_while(|e| e.exec_id == trace[0].exec_id)
        .all(|e| e.registry_index == first));
}

fn panics(_: &mut KernelCtx<'_>, _: usize, _: QubitHandle) -> KernelResult {
    panic!("kernel bug")
}

#[test]
fn kernel_panic_is_contained() {
    let mut rt = runtime(RuntimeConfig::default().with_seed(5));
    let qr = rt.alloc_qureg(1).unwrap();
    let bad = QKern::new(panics);
    let good = QKern::new(coin);
    rt.register_qkern(&bad).unwrap();
    rt.register_qkern(&good).unwrap();
    let mut exec = ExecHandle::new();
    rt.am_qrun(&bad, &qr, 1, vec![CState::UNSET; 4], 1, 4, &mut exec)
        .unwrap();
    let err = exec.wait().unwrap_err();
    assert!(matches!(err, CqError::KernelError { shot: 0, .. }));
    assert!(matches!(err.root_cause(), CqError::KernelFailure(_)));
    assert_eq!(exec.status().unwrap(), ExecStatus::Failed);
    let mut buf = [CState::UNSET; 1];
    rt.s_qrun(&good, &qr, 1, &mut buf, 1).unwrap();
    assert!(buf[0].is_valid());
}

#[test]
fn lifecycle_errors() {
    let mut rt = Runtime::new(RuntimeConfig::default().with_seed(6));
    assert_eq!(rt.alloc_qureg(1), Err(CqError::NotInitialised));
    assert_eq!(rt.finalise(0), Err(CqError::NotInitialised));
    rt.init(0).unwrap();
    assert_eq!(rt.init(0), Err(CqError::AlreadyInitialised));
    assert_eq!(
        rt.alloc_qureg(0),
        Err(CqError::TooManyQubits {
            requested: 0,
            max: 24
        })
    );
    assert_eq!(
        rt.alloc_qureg(25),
        Err(CqError::TooManyQubits {
            requested: 25,
            max: 24
        })
    );
    let qr = rt.alloc_qureg(4).unwrap();
    assert_eq!(
        rt.free_qureg(&qr.at(1).unwrap()),
        Err(CqError::InvalidHandle)
    );
    rt.free_qureg(&qr).unwrap();
    assert_eq!(rt.free_qureg(&qr), Err(CqError::InvalidHandle));
    rt.finalise(0).unwrap();
    // a finalised environment can start again
    rt.init(0).unwrap();
    rt.alloc_qubit().unwrap();
    rt.finalise(0).unwrap();
}

#[test]
fn finalise_halts_in_flight_work() {
    let mut rt = runtime(RuntimeConfig::default().with_seed(7));
    let qr = rt.alloc_qureg(1).unwrap();
    let k = QKern::new(cq::demos::slow_coin);
    rt.register_qkern(&k).unwrap();
    let mut exec = ExecHandle::new();
    rt.am_qrun(
        &k,
        &qr,
        1,
        vec![CState::UNSET; 100_000],
        1,
        100_000,
        &mut exec,
    )
    .unwrap();
    rt.finalise(1).unwrap();
    assert_eq!(exec.status().unwrap(), ExecStatus::Halted);
    assert!(rt
        .diagnostics()
        .lines()
        .iter()
        .any(|l| l.contains("halting in-flight")));
}

#[test]
fn inline_and_threaded_agree() {
    let run = |mode| {
        let mut rt = runtime(RuntimeConfig::default().with_seed(8).with_mode(mode));
        let qr = rt.alloc_qureg(3).unwrap();
        let k = QKern::new(coin);
        rt.register_qkern(&k).unwrap();
        let mut buf = vec![CState::UNSET; 3 * 64];
        rt.sm_qrun(&k, &qr, 3, &mut buf, 3, 64).unwrap();
        buf
    };
    assert_eq!(run(DeviceMode::Threaded), run(DeviceMode::Inline));
}

#[test]
fn scrambled_registers_are_reset_by_kernels() {
    let cfg = RuntimeConfig {
        scramble_new_registers: true,
        ..RuntimeConfig::default().with_seed(9)
    };
    let mut rt = runtime(cfg);
    let qr = rt.alloc_qureg(3).unwrap();
    let fresh = rt.peek_state(&qr, 0).unwrap();
    assert!(fresh.probabilities()[0] < 1.0 - 1e-9);
    let k = QKern::new(ghz);
    rt.register_qkern(&k).unwrap();
    let mut buf = vec![CState::UNSET; 3 * 20];
    rt.sm_qrun(&k, &qr, 3, &mut buf, 3, 20).unwrap();
    for row in buf.chunks(3) {
        assert!(row.iter().all(|c| *c == row[0]));
    }
}

// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use cq::{
    wait_qrun, CState, ExecHandle, ExecStatus, ParamPack, PqKern, QKern, QubitHandle, Runtime,
};

pub const VARIANTS: [&str; 16] = [
    "s", "a", "sm", "am", "sb", "ab", "smb", "amb", "sp", "ap", "smp", "amp", "spb", "apb", "smpb",
    "ampb",
];

/// Runs one executor variant from a freshly reseeded device and returns its
/// buffer. Plain variants run `plain`, parameterised ones `param` with `[1.1]`.
/// Backend variants target backend 1.
pub fn run_variant(
    rt: &mut Runtime,
    plain: &QKern,
    param: &PqKern,
    name: &str,
    qr: &QubitHandle,
    n: usize,
    shots: usize,
) -> Vec<CState> {
    rt.register_qkern(plain).unwrap();
    rt.register_pqkern(param).unwrap();
    rt.reseed(99).unwrap();
    let params = ParamPack::from_f64s(&[1.1]);
    let multi = name.contains('m');
    let nshots = if multi { shots } else { 1 };
    let mut buf = vec![CState::UNSET; n * nshots];
    let mut exec = ExecHandle::new();
    let b = 1;
    match name {
        "s" => rt.s_qrun(plain, qr, n, &mut buf, n),
        "a" => rt.a_qrun(plain, qr, n, buf.clone(), n, &mut exec),
        "sm" => rt.sm_qrun(plain, qr, n, &mut buf, n, nshots),
        "am" => rt.am_qrun(plain, qr, n, buf.clone(), n, nshots, &mut exec),
        "sb" => rt.sb_qrun(plain, qr, n, &mut buf, n, b),
        "ab" => rt.ab_qrun(plain, qr, n, buf.clone(), n, b, &mut exec),
        "smb" => rt.smb_qrun(plain, qr, n, &mut buf, n, nshots, b),
        "amb" => rt.amb_qrun(plain, qr, n, buf.clone(), n, nshots, b, &mut exec),
        "sp" => rt.sp_qrun(param, qr, n, &mut buf, n, &params),
        "ap" => rt.ap_qrun(param, qr, n, buf.clone(), n, &params, &mut exec),
        "smp" => rt.smp_qrun(param, qr, n, &mut buf, n, nshots, &params),
        "amp" => rt.amp_qrun(param, qr, n, buf.clone(), n, nshots, &params, &mut exec),
        "spb" => rt.spb_qrun(param, qr, n, &mut buf, n, &params, b),
        "apb" => rt.apb_qrun(param, qr, n, buf.clone(), n, &params, b, &mut exec),
        "smpb" => rt.smpb_qrun(param, qr, n, &mut buf, n, nshots, &params, b),
        "ampb" => rt.ampb_qrun(param, qr, n, buf.clone(), n, nshots, &params, b, &mut exec),
        other => panic!("unknown variant {other}"),
    }
    .unwrap();
    if name.starts_with('a') {
        wait_qrun(&mut exec).unwrap();
        assert_eq!(exec.status().unwrap(), ExecStatus::Done);
        buf = exec.take_results();
    }
    buf
}

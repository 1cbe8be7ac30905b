// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings for the CQ runtime.
//!
//! Kernels are chosen by catalogue name or built as [`Circuit`]s; Python
//! callables never run on the device.
//!
//! ```python
//! import cq_python as cq
//! rt = cq.Runtime(seed=7)
//! rt.init()
//! qr = rt.alloc_qureg(2)
//! print(rt.run("bell", qr, nmeasure=2, shots=4))
//! ```

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cq::config::DeviceMode;
use cq::demos::{self, DemoConfig, Graph};
use cq::{
    AnalogMode, CState, CqError as CoreError, ExecRequest, ExecStatus, Gate, Instruction,
    KernelSel, ParamPack, PulseField, QubitHandle as CoreHandle, RuntimeConfig, StateVector as Sv,
    Waveform as CoreWaveform,
};

create_exception!(
    cq_python,
    CqError,
    PyRuntimeError,
    "Error raised by the CQ runtime."
);

fn err(e: CoreError) -> PyErr {
    CqError::new_err(e.to_string())
}

fn cstates(v: &[CState]) -> Vec<i16> {
    v.iter().map(|c| c.0).collect()
}

fn status_name(s: ExecStatus) -> &'static str {
    match s {
        ExecStatus::Pending => "pending",
        ExecStatus::Running => "running",
        ExecStatus::Done => "done",
        ExecStatus::Halted => "halted",
        ExecStatus::Failed => "failed",
    }
}

fn analog_mode(name: &str) -> PyResult<AnalogMode> {
    match name.to_ascii_lowercase().as_str() {
        "ising" => Ok(AnalogMode::Ising),
        "xy" => Ok(AnalogMode::Xy),
        other => Err(PyValueError::new_err(format!(
            "unknown analogue mode '{other}'"
        ))),
    }
}

/// A register, or a slice of one.
#[pyclass(frozen, eq, from_py_object, name = "QubitHandle")]
#[derive(Clone, Copy, PartialEq)]
struct QubitHandle(CoreHandle);

#[pymethods]
impl QubitHandle {
    #[getter]
    fn registry_index(&self) -> usize {
        self.0.registry_index
    }

    #[getter]
    fn offset(&self) -> usize {
        self.0.offset
    }

    fn __len__(&self) -> usize {
        self.0.n
    }

    fn at(&self, i: usize) -> PyResult<QubitHandle> {
        self.0.at(i).map(QubitHandle).map_err(err)
    }

    fn slice(&self, start: usize, len: usize) -> PyResult<QubitHandle> {
        self.0.slice(start, len).map(QubitHandle).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "QubitHandle(registry_index={}, offset={}, n={})",
            self.0.registry_index, self.0.offset, self.0.n
        )
    }
}

/// Host record of an asynchronous execution.
#[pyclass(name = "Exec")]
struct Exec(cq::ExecHandle);

#[pymethods]
impl Exec {
    #[new]
    fn new() -> Self {
        Exec(cq::ExecHandle::new())
    }

    #[getter]
    fn status(&self) -> PyResult<&'static str> {
        self.0.status().map(status_name).map_err(err)
    }

    #[getter]
    fn shots_completed(&self) -> PyResult<usize> {
        self.0.shots_completed().map_err(err)
    }

    /// Host buffer as of the last sync; unset slots hold -1.
    #[getter]
    fn results(&self) -> Vec<i16> {
        cstates(self.0.results())
    }

    fn sync(&mut self) -> PyResult<()> {
        self.0.sync().map_err(err)
    }

    fn wait(&mut self, py: Python<'_>) -> PyResult<()> {
        let h = &mut self.0;
        py.detach(|| h.wait()).map_err(err)
    }

    fn halt(&mut self, py: Python<'_>) -> PyResult<()> {
        let h = &mut self.0;
        py.detach(|| h.halt()).map_err(err)
    }
}

/// Instruction list run against whatever register it is dispatched on.
#[pyclass(skip_from_py_object, name = "Circuit")]
#[derive(Clone)]
struct Circuit(cq::Circuit);

#[pymethods]
impl Circuit {
    #[new]
    fn new(nqubits: usize) -> Self {
        Circuit(cq::Circuit::new(nqubits))
    }

    #[getter]
    fn nqubits(&self) -> usize {
        self.0.nqubits()
    }

    #[getter]
    fn nmeasure(&self) -> usize {
        self.0.nmeasure()
    }

    fn __len__(&self) -> usize {
        self.0.instructions().len()
    }

    /// Appends a gate by OpenQASM name; qubits are `[controls..., targets...]`.
    #[pyo3(signature = (name, qubits, params=Vec::new()))]
    fn gate(&mut self, name: &str, qubits: Vec<usize>, params: Vec<f64>) -> PyResult<()> {
        let g = Gate::from_name(name, &params).map_err(err)?;
        self.0.gate(g, &qubits).map_err(err)?;
        Ok(())
    }

    fn set_qureg(&mut self, state: u64) -> PyResult<()> {
        self.push(Instruction::SetQureg(state))
    }

    fn set_qubit(&mut self, qubit: usize, value: i16) -> PyResult<()> {
        self.push(Instruction::SetQubit(qubit, CState(value)))
    }

    fn measure(&mut self, qubits: Vec<usize>) -> PyResult<()> {
        self.push(Instruction::Measure(qubits))
    }

    fn measure_all(&mut self) -> PyResult<()> {
        self.push(Instruction::MeasureAll)
    }

    fn dmeasure(&mut self, qubits: Vec<usize>) -> PyResult<()> {
        self.push(Instruction::DMeasure(qubits))
    }

    /// Dense unitary of the gate instructions, as rows of complex numbers.
    fn unitary(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let u = cq::build_unitary_oracle(&self.0.gates(), self.0.nqubits()).map_err(err)?;
        Ok(u.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

impl Circuit {
    fn push(&mut self, inst: Instruction) -> PyResult<()> {
        self.0.push(inst).map_err(err)?;
        Ok(())
    }
}

/// Dense statevector, qubit `i` = bit `i` of the basis index.
#[pyclass(skip_from_py_object, name = "StateVector")]
#[derive(Clone)]
struct StateVector(Sv);

#[pymethods]
impl StateVector {
    #[new]
    #[pyo3(signature = (nqubits, basis=0))]
    fn new(nqubits: usize, basis: usize) -> PyResult<Self> {
        if basis >= 1usize << nqubits {
            return Err(PyValueError::new_err("basis index out of range"));
        }
        Ok(StateVector(Sv::basis(nqubits, basis)))
    }

    #[staticmethod]
    fn from_amplitudes(amps: Vec<Complex64>) -> PyResult<Self> {
        Sv::from_amplitudes(amps).map(StateVector).map_err(err)
    }

    #[getter]
    fn nqubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.0.probabilities()
    }

    fn marginal(&self, qubits: Vec<usize>) -> Vec<f64> {
        self.0.marginal(&qubits)
    }

    fn prob_one(&self, qubit: usize) -> f64 {
        self.0.prob_one(qubit)
    }

    #[pyo3(signature = (name, qubits, params=Vec::new()))]
    fn apply(&mut self, name: &str, qubits: Vec<usize>, params: Vec<f64>) -> PyResult<()> {
        let g = Gate::from_name(name, &params).map_err(err)?;
        self.0.apply_gate(&g, &qubits).map_err(err)
    }

    /// Measures `qubit` with the uniform sample `u` in [0, 1); collapses the state.
    fn measure(&mut self, qubit: usize, u: f64) -> bool {
        self.0.measure_with(qubit, u)
    }
}

/// Local matrix of a named gate, as rows.
#[pyfunction]
#[pyo3(signature = (name, params=Vec::new()))]
fn gate_matrix(name: &str, params: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    let m = Gate::from_name(name, &params).map_err(err)?.matrix();
    Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
}

#[pyfunction]
fn gate_names() -> Vec<&'static str> {
    Gate::NAMES.to_vec()
}

#[pyclass(frozen, skip_from_py_object, name = "Waveform")]
#[derive(Clone)]
struct Waveform(CoreWaveform);

#[pymethods]
impl Waveform {
    #[staticmethod]
    fn constant(value: f64) -> Self {
        Waveform(CoreWaveform::Constant { value })
    }

    #[staticmethod]
    fn gaussian(amplitude: f64, sigma: f64) -> Self {
        Waveform(CoreWaveform::Gaussian { amplitude, sigma })
    }

    #[staticmethod]
    #[pyo3(signature = (amplitude, frequency, phase=0.0))]
    fn sine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Waveform(CoreWaveform::Sine {
            amplitude,
            frequency,
            phase,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (amplitude, frequency, phase=0.0))]
    fn cosine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Waveform(CoreWaveform::Cosine {
            amplitude,
            frequency,
            phase,
        })
    }

    #[staticmethod]
    fn saw(amplitude: f64, period: f64) -> Self {
        Waveform(CoreWaveform::Saw { amplitude, period })
    }

    #[staticmethod]
    fn blackman(amplitude: f64) -> Self {
        Waveform(CoreWaveform::Blackman { amplitude })
    }

    #[staticmethod]
    fn interpolated(times: Vec<f64>, values: Vec<f64>) -> Self {
        Waveform(CoreWaveform::Interpolated { times, values })
    }

    #[staticmethod]
    fn custom(samples: Vec<f64>) -> Self {
        Waveform(CoreWaveform::Custom { samples })
    }

    /// Value at `t` within a waveform lasting `duration` ns.
    fn eval(&self, t: f64, duration: f64) -> f64 {
        self.0.eval(t, duration)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Sampled drive of fixed duration (ns).
#[pyclass(skip_from_py_object, name = "Pulse")]
#[derive(Clone)]
struct Pulse(cq::Pulse);

#[pymethods]
impl Pulse {
    #[new]
    #[pyo3(signature = (duration, nsamples=cq::analog::DEFAULT_NSAMPLES))]
    fn new(duration: f64, nsamples: usize) -> PyResult<Self> {
        cq::Pulse::with_samples(duration, nsamples)
            .map(Pulse)
            .map_err(err)
    }

    /// `field` is "amplitude", "phase" or "detuning".
    fn fill(&mut self, field: &str, waveform: &Waveform) -> PyResult<()> {
        let field = match field {
            "amplitude" => PulseField::Amplitude,
            "phase" => PulseField::Phase,
            "detuning" => PulseField::Detuning,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown pulse field '{other}'"
                )))
            }
        };
        self.0.fill(field, &waveform.0).map_err(err)
    }

    fn resample(&mut self, nsamples: usize) -> PyResult<()> {
        self.0.resample(nsamples).map_err(err)
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.0.duration()
    }

    #[getter]
    fn amplitude(&self) -> Vec<f64> {
        self.0.amplitude().to_vec()
    }

    #[getter]
    fn phase(&self) -> Vec<f64> {
        self.0.phase().to_vec()
    }

    #[getter]
    fn detuning(&self) -> Option<Vec<f64>> {
        self.0.detuning().map(<[f64]>::to_vec)
    }

    fn area(&self) -> PyResult<f64> {
        self.0.area().map_err(err)
    }
}

enum Target {
    Plain(cq::QKern),
    Param(cq::PqKern),
}

/// The CQ environment: device contexts, registers and kernels.
#[pyclass(name = "Runtime")]
struct Runtime(cq::Runtime);

impl Runtime {
    fn resolve(&self, kernel: &Bound<'_, PyAny>) -> PyResult<Target> {
        if let Ok(c) = kernel.cast::<Circuit>() {
            return Ok(Target::Plain(c.borrow().0.clone().into_kernel()));
        }
        let name: String = kernel.extract()?;
        if let Some(k) = demos::kernel_by_name(&name) {
            return Ok(Target::Plain(k));
        }
        demos::param_kernel_by_name(&name)
            .map(Target::Param)
            .ok_or_else(|| PyValueError::new_err(format!("no kernel named '{name}'")))
    }

    #[allow(clippy::too_many_arguments)]
    fn request(
        &mut self,
        kernel: &Bound<'_, PyAny>,
        qr: &QubitHandle,
        nqubits: Option<usize>,
        nmeasure: usize,
        shots: usize,
        params: Option<Vec<f64>>,
        backend: usize,
        asynchronous: bool,
    ) -> PyResult<ExecRequest> {
        let nqubits = nqubits.unwrap_or(qr.0.n);
        let sel = match self.resolve(kernel)? {
            Target::Plain(k) => {
                if params.is_some() {
                    return Err(PyValueError::new_err("plain kernels take no parameters"));
                }
                KernelSel::Plain(self.0.register_qkern(&k).map_err(err)?)
            }
            Target::Param(k) => {
                let key = self.0.register_pqkern(&k).map_err(err)?;
                KernelSel::Param(key, params.map(|p| ParamPack::from_f64s(&p)))
            }
        };
        Ok(ExecRequest {
            kernel: sel,
            qr: qr.0,
            nqubits,
            nmeasure,
            nshots: shots,
            backend,
            asynchronous,
        })
    }
}

#[pymethods]
impl Runtime {
    #[new]
    #[pyo3(signature = (seed=None, backends=1, max_qubits=24, inline=false, trace_gates=false))]
    fn new(
        seed: Option<u64>,
        backends: usize,
        max_qubits: usize,
        inline: bool,
        trace_gates: bool,
    ) -> Self {
        let cfg = RuntimeConfig {
            seed,
            backends,
            max_qubits,
            trace_gates,
            device_mode: if inline {
                DeviceMode::Inline
            } else {
                DeviceMode::Threaded
            },
            ..RuntimeConfig::default()
        };
        Runtime(cq::Runtime::new(cfg))
    }

    #[pyo3(signature = (verbosity=0))]
    fn init(&mut self, verbosity: u32) -> PyResult<()> {
        self.0.init(verbosity).map_err(err)
    }

    #[pyo3(signature = (verbosity=0))]
    fn finalise(&mut self, verbosity: u32) -> PyResult<()> {
        self.0.finalise(verbosity).map_err(err)
    }

    #[getter]
    fn initialised(&self) -> bool {
        self.0.is_initialised()
    }

    #[getter]
    fn seed(&self) -> PyResult<u64> {
        self.0.seed().map_err(err)
    }

    fn reseed(&mut self, seed: u64) -> PyResult<()> {
        self.0.reseed(seed).map_err(err)
    }

    fn alloc_qureg(&mut self, n: usize) -> PyResult<QubitHandle> {
        self.0.alloc_qureg(n).map(QubitHandle).map_err(err)
    }

    fn alloc_qubit(&mut self) -> PyResult<QubitHandle> {
        self.0.alloc_qubit().map(QubitHandle).map_err(err)
    }

    fn free_qureg(&mut self, qr: &QubitHandle) -> PyResult<()> {
        self.0.free_qureg(&qr.0).map_err(err)
    }

    /// "ising" or "xy".
    fn enable_analog_mode(&mut self, mode: &str) -> PyResult<()> {
        self.0.enable_analog_mode(analog_mode(mode)?).map_err(err)
    }

    /// Runs a catalogue kernel (by name) or a `Circuit` and blocks for the results.
    #[pyo3(signature = (kernel, qr, nmeasure, shots=1, params=None, backend=0, nqubits=None))]
    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        py: Python<'_>,
        kernel: &Bound<'_, PyAny>,
        qr: &QubitHandle,
        nmeasure: usize,
        shots: usize,
        params: Option<Vec<f64>>,
        backend: usize,
        nqubits: Option<usize>,
    ) -> PyResult<Vec<i16>> {
        let req = self.request(kernel, qr, nqubits, nmeasure, shots, params, backend, false)?;
        let mut out = vec![CState::UNSET; req.required_capacity()];
        let rt = &mut self.0;
        py.detach(|| rt.run_blocking(req, &mut out)).map_err(err)?;
        Ok(cstates(&out))
    }

    /// Queues a run and returns at once; use the returned `Exec` to sync, wait or halt.
    #[pyo3(signature = (kernel, qr, nmeasure, shots=1, params=None, backend=0, nqubits=None))]
    #[allow(clippy::too_many_arguments)]
    fn submit(
        &mut self,
        kernel: &Bound<'_, PyAny>,
        qr: &QubitHandle,
        nmeasure: usize,
        shots: usize,
        params: Option<Vec<f64>>,
        backend: usize,
        nqubits: Option<usize>,
    ) -> PyResult<Exec> {
        let req = self.request(kernel, qr, nqubits, nmeasure, shots, params, backend, true)?;
        let mut exec = cq::ExecHandle::new();
        let buf = vec![CState::UNSET; req.required_capacity()];
        self.0.execute(req, buf, &mut exec).map_err(err)?;
        Ok(Exec(exec))
    }

    #[pyo3(signature = (qr, backend=0))]
    fn peek_state(&self, qr: &QubitHandle, backend: usize) -> PyResult<StateVector> {
        self.0
            .peek_state(&qr.0, backend)
            .map(StateVector)
            .map_err(err)
    }

    #[pyo3(signature = (backend=0))]
    fn inspect<'py>(&self, py: Python<'py>, backend: usize) -> PyResult<Bound<'py, PyDict>> {
        let s = self.0.inspect(backend).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("backend", s.backend)?;
        d.set_item("live_registers", s.live_registers)?;
        d.set_item("kernels", s.kernels)?;
        d.set_item("param_kernels", s.param_kernels)?;
        d.set_item("kernels_run", s.kernels_run)?;
        d.set_item("sync_measurements", s.sync_measurements)?;
        d.set_item("device_measurements", s.device_measurements)?;
        d.set_item("probe_log", s.probe_log)?;
        d.set_item("gate_trace_len", s.gate_trace.len())?;
        d.set_item(
            "analog_mode",
            s.analog_mode.map(|m| match m {
                AnalogMode::Ising => "ising",
                AnalogMode::Xy => "xy",
            }),
        )?;
        d.set_item(
            "protocol_errors",
            s.protocol_errors
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    #[pyo3(signature = (tag, backend=0))]
    fn probe(&self, tag: u64, backend: usize) -> PyResult<()> {
        self.0.probe(backend, tag).map_err(err)
    }
}

#[pyfunction]
fn kernel_names() -> Vec<&'static str> {
    demos::kernel_names()
}

#[pyfunction]
fn param_kernel_names() -> Vec<&'static str> {
    demos::param_kernel_names()
}

fn demo_cfg(qubits: usize, shots: usize, seed: Option<u64>, asynchronous: bool) -> DemoConfig {
    let mut cfg = DemoConfig {
        qubits,
        shots,
        asynchronous,
        ..DemoConfig::default()
    };
    cfg.runtime.seed = seed;
    cfg
}

/// Zero-initialised QFT; returns one list of bits per shot.
#[pyfunction]
#[pyo3(signature = (qubits=10, shots=10, seed=None, asynchronous=false))]
fn demo_qft(
    py: Python<'_>,
    qubits: usize,
    shots: usize,
    seed: Option<u64>,
    asynchronous: bool,
) -> PyResult<Vec<Vec<i16>>> {
    let cfg = demo_cfg(qubits, shots, seed, asynchronous);
    let r = py.detach(|| demos::demo_qft(&cfg)).map_err(err)?;
    Ok(r.shots.iter().map(|row| cstates(row)).collect())
}

/// Rabi sweep as `(t, P(1), sin²(Ωt/2))` triples.
#[pyfunction]
#[pyo3(signature = (seed=None))]
fn demo_rabi(py: Python<'_>, seed: Option<u64>) -> PyResult<Vec<(f64, f64, f64)>> {
    let cfg = demo_cfg(1, 1, seed, false);
    py.detach(|| demos::demo_rabi(&cfg))
        .map(|r| r.points)
        .map_err(err)
}

/// Bell statistics: `{"counts": {..}, "correlated": k, "shots": n}`.
#[pyfunction]
#[pyo3(signature = (shots=10_000, seed=None))]
fn demo_bell<'py>(
    py: Python<'py>,
    shots: usize,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = demo_cfg(2, shots, seed, false);
    let r = py.detach(|| demos::demo_bell(&cfg)).map_err(err)?;
    let d = PyDict::new(py);
    let counts = PyDict::new(py);
    for (label, c) in ["00", "01", "10", "11"].iter().zip(r.counts) {
        counts.set_item(label, c)?;
    }
    d.set_item("counts", counts)?;
    d.set_item("correlated", r.correlated())?;
    d.set_item("shots", r.shots)?;
    Ok(d)
}

/// MAXCUT on a built-in graph: `{"histogram", "best_partition", "best_cut", "optimum"}`.
#[pyfunction]
#[pyo3(signature = (graph="square", shots=200, seed=None))]
fn demo_maxcut<'py>(
    py: Python<'py>,
    graph: &str,
    shots: usize,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let g = Graph::builtin(graph)
        .ok_or_else(|| PyValueError::new_err(format!("unknown graph '{graph}'")))?;
    let cfg = demo_cfg(g.nvertices(), shots, seed, false);
    let r = py.detach(|| demos::demo_maxcut(&cfg, &g)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("histogram", r.histogram)?;
    d.set_item("best_partition", r.best_partition)?;
    d.set_item("best_cut", r.best_cut)?;
    d.set_item("optimum", r.optimum)?;
    Ok(d)
}

#[pymodule]
fn cq_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CqError", m.py().get_type::<CqError>())?;
    m.add_class::<Runtime>()?;
    m.add_class::<Exec>()?;
    m.add_class::<QubitHandle>()?;
    m.add_class::<Circuit>()?;
    m.add_class::<StateVector>()?;
    m.add_class::<Pulse>()?;
    m.add_class::<Waveform>()?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(gate_names, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_names, m)?)?;
    m.add_function(wrap_pyfunction!(param_kernel_names, m)?)?;
    m.add_function(wrap_pyfunction!(demo_qft, m)?)?;
    m.add_function(wrap_pyfunction!(demo_rabi, m)?)?;
    m.add_function(wrap_pyfunction!(demo_bell, m)?)?;
    m.add_function(wrap_pyfunction!(demo_maxcut, m)?)?;
    Ok(())
}

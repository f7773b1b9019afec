//! Python bindings: configuration, error laws, the deconvolution estimate,
//! the closed-form model quantities and full simulation runs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rv2x::absorption::{self, DeconvEstimate};
use rv2x::adaptation;
use rv2x::channel::ErrorDistribution;
use rv2x::config::{ErrorLawPreset, PowerBox, SimConfig};
use rv2x::harness::{self, AllocatorKind, RunReport};
use rv2x::hungarian;
use rv2x::qos::{self, Phase};
use rv2x::rng::{stream, Purpose};
use rv2x::scenario::qos_constants_for;
use std::path::PathBuf;

fn py_err(e: rv2x::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn phase(name: &str) -> PyResult<Phase> {
    match name {
        "absorption" => Ok(Phase::Absorption),
        "adaptation" => Ok(Phase::Adaptation),
        other => Err(PyValueError::new_err(format!("unknown phase {other:?}"))),
    }
}

/// Simulation parameters. Unlisted fields keep their defaults.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: SimConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    fn new() -> Self {
        Self {
            inner: SimConfig::default(),
        }
    }

    /// Parse a TOML document; missing keys take their defaults.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: SimConfig::from_toml_str(text).map_err(py_err)?,
        })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(py_err)
    }

    #[getter]
    fn num_pairs(&self) -> usize {
        self.inner.num_pairs
    }
    #[setter]
    fn set_num_pairs(&mut self, v: usize) {
        self.inner.num_pairs = v;
    }
    #[getter]
    fn absorption_len(&self) -> usize {
        self.inner.absorption_len
    }
    #[setter]
    fn set_absorption_len(&mut self, v: usize) {
        self.inner.absorption_len = v;
    }
    #[getter]
    fn adaptation_len(&self) -> usize {
        self.inner.adaptation_len
    }
    #[setter]
    fn set_adaptation_len(&mut self, v: usize) {
        self.inner.adaptation_len = v;
    }
    #[getter]
    fn rng_seed(&self) -> u64 {
        self.inner.rng_seed
    }
    #[setter]
    fn set_rng_seed(&mut self, v: u64) {
        self.inner.rng_seed = v;
    }
    #[getter]
    fn prob_req(&self) -> f64 {
        self.inner.prob_req
    }
    #[setter]
    fn set_prob_req(&mut self, v: f64) {
        self.inner.prob_req = v;
    }
    #[getter]
    fn delay_req_s(&self) -> f64 {
        self.inner.delay_req_s
    }
    #[setter]
    fn set_delay_req_s(&mut self, v: f64) {
        self.inner.delay_req_s = v;
    }
    /// Hazard-rate weights; a single value applies to every link.
    #[getter]
    fn hr_weights(&self) -> Vec<f64> {
        self.inner.hr_weights.clone()
    }
    #[setter]
    fn set_hr_weights(&mut self, v: Vec<f64>) {
        self.inner.hr_weights = v;
    }
    /// Interference-error mixture as `(mean, variance, weight)` triples.
    #[getter]
    fn error_law(&self) -> Vec<[f64; 3]> {
        self.inner.error_law.clone()
    }
    #[setter]
    fn set_error_law(&mut self, v: Vec<[f64; 3]>) {
        self.inner.error_law = v;
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(num_pairs={}, absorption_len={}, adaptation_len={}, rng_seed={})",
            self.inner.num_pairs,
            self.inner.absorption_len,
            self.inner.adaptation_len,
            self.inner.rng_seed
        )
    }
}

/// Gaussian mixture law of the interference error.
#[pyclass(name = "ErrorLaw", from_py_object)]
#[derive(Clone)]
struct PyErrorLaw {
    inner: ErrorDistribution,
}

#[pymethods]
impl PyErrorLaw {
    #[new]
    fn new(triples: Vec<[f64; 3]>) -> PyResult<Self> {
        Ok(Self {
            inner: ErrorDistribution::from_triples(&triples).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn type_one() -> Self {
        Self {
            inner: ErrorDistribution::from_triples(&ErrorLawPreset::TypeOne.components())
                .expect("preset is valid"),
        }
    }

    #[staticmethod]
    fn type_two() -> Self {
        Self {
            inner: ErrorDistribution::from_triples(&ErrorLawPreset::TypeTwo.components())
                .expect("preset is valid"),
        }
    }

    fn pdf(&self, e: f64) -> f64 {
        self.inner.pdf(e)
    }

    fn cdf(&self, e: f64) -> f64 {
        self.inner.cdf(e)
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn variance(&self) -> f64 {
        self.inner.variance()
    }

    /// `P{|e_m|² ≥ c (e + offset)}` with `|e_m|² ~ Exp(1)`.
    fn satisfaction(&self, c: f64, offset: f64) -> f64 {
        qos::SatisfactionModel::satisfaction(&self.inner, c, offset)
    }

    /// `n` reproducible draws from the law.
    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0, 0, Purpose::Oracle);
        (0..n).map(|_| self.inner.sample(&mut rng)).collect()
    }
}

/// Deconvolution density estimate built from absorption samples.
#[pyclass(name = "DeconvEstimate", from_py_object)]
#[derive(Clone)]
struct PyDeconvEstimate {
    inner: DeconvEstimate,
}

#[pymethods]
impl PyDeconvEstimate {
    #[new]
    #[pyo3(signature = (samples, rate, k = 10.0))]
    fn new(samples: Vec<f64>, rate: f64, k: f64) -> PyResult<Self> {
        Ok(Self {
            inner: DeconvEstimate::new(samples, rate, k, f64::NAN, f64::NAN).map_err(py_err)?,
        })
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Raw estimate at `e`; may be negative.
    fn pdf(&self, e: f64) -> f64 {
        self.inner.pdf(e)
    }

    fn pdf_many(&self, points: Vec<f64>) -> Vec<f64> {
        points.iter().map(|&e| self.inner.pdf(e)).collect()
    }

    /// Nonnegative renormalized estimate as `(grid, density)`.
    #[pyo3(signature = (points = 801))]
    fn clipped(&self, points: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        if points < 2 {
            return Err(PyValueError::new_err("need at least two grid points"));
        }
        let c = self.inner.clipped(points);
        Ok((c.grid, c.density))
    }

    /// Estimated `P{|e_m|² ≥ c (e + offset)}` through the truncated inversion.
    #[pyo3(signature = (c, offset, k1 = 10.0, k2 = 10.0))]
    fn satisfaction(&self, c: f64, offset: f64, k1: f64, k2: f64) -> f64 {
        let law =
            adaptation::EstimatedLaw::new(self.inner.clone(), k1, k2, adaptation::BetaMethod::Auto);
        law.satisfaction_raw(c, offset).clamp(0.0, 1.0)
    }
}

/// Per-slot records and aggregates of a simulation run.
#[pyclass(name = "Report")]
struct PyReport {
    inner: RunReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn trials_completed(&self) -> usize {
        self.inner.results.len()
    }

    /// Failed trials as `(trial, cause)` pairs.
    #[getter]
    fn failures(&self) -> Vec<(u32, String)> {
        self.inner
            .failures
            .iter()
            .map(|f| (f.trial, f.cause.clone()))
            .collect()
    }

    /// Summary metrics as a dict, converted through JSON.
    fn summary(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let text = serde_json::to_string(&self.inner.summary())
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
    }

    #[pyo3(signature = (phase = "adaptation"))]
    fn satisfaction(&self, phase: &str) -> PyResult<Option<f64>> {
        Ok(self.inner.satisfaction(self::phase(phase)?))
    }

    #[pyo3(signature = (phase = "adaptation"))]
    fn mean_throughput_mbps(&self, phase: &str) -> PyResult<Option<f64>> {
        Ok(self.inner.mean_throughput_mbps(self::phase(phase)?))
    }

    #[pyo3(signature = (phase = "adaptation"))]
    fn delays_ms(&self, phase: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.delays_ms(self::phase(phase)?))
    }

    /// Per-slot records in the CSV schema.
    fn csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(py_err)?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Write the records, summary, configuration and plot tables into `dir`.
    fn emit(&self, dir: PathBuf) -> PyResult<()> {
        self.inner.emit(&dir).map_err(py_err)
    }
}

/// Run `trials` Monte Carlo trials with the named allocator.
#[pyfunction]
#[pyo3(signature = (config, allocator = "proposed", trials = 1, threads = None))]
fn run(
    py: Python<'_>,
    config: PyConfig,
    allocator: &str,
    trials: usize,
    threads: Option<usize>,
) -> PyResult<PyReport> {
    let kind: AllocatorKind = allocator.parse().map_err(py_err)?;
    config.inner.validate().map_err(py_err)?;
    let report = py
        .detach(|| harness::run(&config.inner, kind, trials, threads))
        .map_err(py_err)?;
    Ok(PyReport { inner: report })
}

/// Probability that the V2V SINR stays below `gamma` under Rayleigh fading.
#[pyfunction]
fn delay_outage(p_v: f64, l_v: f64, p_i: f64, l_i: f64, noise: f64, gamma: f64) -> f64 {
    qos::delay_outage_closed_form(p_v, l_v, p_i, l_i, noise, gamma)
}

/// Hazard rate of the delay at the delay requirement.
#[pyfunction]
#[pyo3(signature = (p_v, l_v, p_i, l_i, noise, packet_bits = 3200.0, bandwidth_hz = 2e6, delay_req_s = 0.015))]
#[allow(clippy::too_many_arguments)]
fn hazard_rate(
    p_v: f64,
    l_v: f64,
    p_i: f64,
    l_i: f64,
    noise: f64,
    packet_bits: f64,
    bandwidth_hz: f64,
    delay_req_s: f64,
) -> f64 {
    qos::hazard_rate(
        p_v,
        l_v,
        p_i,
        l_i,
        noise,
        qos_constants_for(packet_bits, bandwidth_hz, delay_req_s),
    )
}

/// Absorption powers `(p_I, p_V)` for hazard-rate weight `lam`, or `None`.
#[pyfunction]
#[pyo3(signature = (lam, pv_min = 10.0, pv_max = 200.0, pi_min = 10.0, pi_max = 200.0))]
fn absorption_power(
    lam: f64,
    pv_min: f64,
    pv_max: f64,
    pi_min: f64,
    pi_max: f64,
) -> Option<(f64, f64)> {
    absorption::absorption_power(
        lam,
        &PowerBox {
            pv_min,
            pv_max,
            pi_min,
            pi_max,
        },
    )
}

/// Variance term of the density-estimate error bound.
#[pyfunction]
fn capability_bound(delta: f64, o: f64, k: f64, t: usize) -> f64 {
    absorption::adaptation_capability_bound(delta, o, k, t)
}

/// The objective `u(c)` of the estimated-probability error bound.
#[pyfunction]
fn u_value(c: f64, rate: f64, k2: f64) -> f64 {
    adaptation::u_value(c, rate, k2)
}

/// Minimum-weight permutation; `result[row] = column`. `inf` marks forbidden pairs.
#[pyfunction]
fn match_min_weight(weights: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
    hungarian::hungarian_match(&weights).map_err(py_err)
}

#[pymodule]
fn rv2x_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyErrorLaw>()?;
    m.add_class::<PyDeconvEstimate>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(delay_outage, m)?)?;
    m.add_function(wrap_pyfunction!(hazard_rate, m)?)?;
    m.add_function(wrap_pyfunction!(absorption_power, m)?)?;
    m.add_function(wrap_pyfunction!(capability_bound, m)?)?;
    m.add_function(wrap_pyfunction!(u_value, m)?)?;
    m.add_function(wrap_pyfunction!(match_min_weight, m)?)?;
    Ok(())
}

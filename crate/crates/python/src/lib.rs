//! Python bindings. Points are sequences of complex numbers `[z_1, ..., z_n]`;
//! measures, regions and reports travel as JSON strings.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use siegel_bergman::carleson::{diagnose as run_diagnose, DiagnoseConfig};
use siegel_bergman::geometry::{self, BallPoint, CPoint};
use siegel_bergman::verify::{verify as run_verify, VerifyConfig};
use siegel_bergman::{kernel, measures, metric, MeasureSpec, RegionSpec};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(coords: Vec<Complex64>) -> PyResult<CPoint> {
    let (zn, zprime) = coords
        .split_last()
        .ok_or_else(|| PyValueError::new_err("a point needs at least one coordinate"))?;
    CPoint::new(zprime.iter().copied(), *zn).map_err(err)
}

fn measure(json: &str) -> PyResult<MeasureSpec> {
    serde_json::from_str(json).map_err(err)
}

/// `rho(z) = Im z_n - |z'|^2`.
#[pyfunction]
fn rho(z: Vec<Complex64>) -> PyResult<f64> {
    Ok(point(z)?.rho())
}

/// The sesquilinear form `rho(z, w)`.
#[pyfunction]
fn rho2(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Complex64> {
    geometry::rho2(&point(z)?, &point(w)?).map_err(err)
}

#[pyfunction]
fn cayley(xi: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let xi = BallPoint::new(xi).map_err(err)?;
    Ok(geometry::cayley(&xi).map_err(err)?.coords().to_vec())
}

#[pyfunction]
fn cayley_inv(z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(geometry::cayley_inv(&point(z)?).map_err(err)?.coords().to_vec())
}

#[pyfunction]
fn bergman_kernel(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Complex64> {
    kernel::bergman_kernel(&point(z)?, &point(w)?).map_err(err)
}

#[pyfunction]
fn normalized_kernel(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Complex64> {
    kernel::normalized_kernel(&point(z)?, &point(w)?).map_err(err)
}

/// `||K_z||_p` in closed form.
#[pyfunction]
fn kernel_norm(z: Vec<Complex64>, p: f64) -> PyResult<f64> {
    kernel::kernel_norm(&point(z)?, p).map_err(err)
}

#[pyfunction]
fn bergman_distance(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<f64> {
    metric::bergman_distance(&point(z)?, &point(w)?).map_err(err)
}

#[pyfunction]
fn ball_volume(z: Vec<Complex64>, r: f64) -> PyResult<f64> {
    metric::ball_volume(&point(z)?, r).map_err(err)
}

/// Lattice of a region given as JSON; returns the lattice as JSON.
#[pyfunction]
#[pyo3(signature = (region, dim, r, seed = 0))]
fn build_lattice(region: &str, dim: usize, r: f64, seed: u64) -> PyResult<String> {
    let region: RegionSpec = serde_json::from_str(region).map_err(err)?;
    let lattice = metric::build_lattice(dim, &region, r, seed).map_err(err)?;
    serde_json::to_string(&lattice).map_err(err)
}

/// Berezin transform as `(value, std_error)`.
#[pyfunction]
#[pyo3(signature = (mu, z, samples = 200_000, seed = 0))]
fn berezin(py: Python<'_>, mu: &str, z: Vec<Complex64>, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let mu = measure(mu)?;
    let z = point(z)?;
    let r = py.detach(|| measures::berezin(&mu, &z, samples, seed)).map_err(err)?;
    Ok((r.value, r.std_error))
}

/// Averaging function as `(value, std_error)`.
#[pyfunction]
#[pyo3(signature = (mu, z, r, samples = 200_000, seed = 0))]
fn averaging(
    py: Python<'_>,
    mu: &str,
    z: Vec<Complex64>,
    r: f64,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let mu = measure(mu)?;
    let z = point(z)?;
    let a = py.detach(|| measures::averaging(&mu, &z, r, samples, seed)).map_err(err)?;
    Ok((a.value, a.std_error))
}

/// Carleson diagnostics; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (mu, r = 1.0, seed = 0, samples = 200_000))]
fn diagnose(py: Python<'_>, mu: &str, r: f64, seed: u64, samples: usize) -> PyResult<String> {
    let mu = measure(mu)?;
    let cfg = DiagnoseConfig::new(r, seed, samples);
    let report = py.detach(|| run_diagnose(&mu, &cfg)).map_err(err)?;
    Ok(report.to_json())
}

/// Identity suite; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (samples = 1_000_000, seed = 1, checks = 10_000, trials = 100_000, duality_samples = 200_000))]
fn verify(
    py: Python<'_>,
    samples: usize,
    seed: u64,
    checks: usize,
    trials: usize,
    duality_samples: usize,
) -> PyResult<String> {
    let cfg = VerifyConfig {
        samples,
        seed,
        checks,
        trials,
        duality_samples,
        ..VerifyConfig::default()
    };
    let report = py.detach(|| run_verify(&cfg)).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[pymodule]
fn siegel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(rho2, m)?)?;
    m.add_function(wrap_pyfunction!(cayley, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_inv, m)?)?;
    m.add_function(wrap_pyfunction!(bergman_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(bergman_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(build_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(berezin, m)?)?;
    m.add_function(wrap_pyfunction!(averaging, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

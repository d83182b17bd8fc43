//! Python bindings: the walk, its spectrum, and the claim audit, driven
//! in-process from Python.
//!
//! ```python
//! import qwalk
//! coin = qwalk.Coin.grover()
//! state = qwalk.WalkState((1, 0, 0, 0))
//! print(state.evolve(coin, 4).distribution())   # {0: 1.0}
//! ```

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qwalk_core::claims::{audit_claims, AuditConfig};
use qwalk_core::coin::{CoinMatrix, CoinSpec};
use qwalk_core::limits;
use qwalk_core::spectral;
use qwalk_core::walk;
use std::collections::BTreeMap;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn initial_from_py(amps: Vec<Complex64>) -> PyResult<walk::InitialState> {
    let arr: [Complex64; 4] = amps
        .try_into()
        .map_err(|v: Vec<Complex64>| value_err(format!("need 4 amplitudes, got {}", v.len())))?;
    walk::InitialState::new(arr).map_err(value_err)
}

/// A 4×4 coin built from an embedded 2×2 unitary.
#[pyclass(frozen, module = "qwalk")]
struct Coin {
    inner: CoinMatrix,
}

#[pymethods]
impl Coin {
    /// The Grover coin, (a, b, c, d) = (0, 1, 1, 0).
    #[staticmethod]
    fn grover() -> Coin {
        Coin {
            inner: CoinMatrix::grover(),
        }
    }

    /// The Hadamard comparison coin, (1, 1, 1, −1)/√2.
    #[staticmethod]
    fn hadamard() -> Coin {
        Coin {
            inner: CoinMatrix::hadamard(),
        }
    }

    /// Any embedded 2×2 unitary [[a, c], [b, d]].
    #[staticmethod]
    fn custom(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> PyResult<Coin> {
        let spec = CoinSpec::new(a, b, c, d).map_err(value_err)?;
        CoinMatrix::new(spec)
            .map_err(value_err)
            .map(|inner| Coin { inner })
    }

    /// The full 4×4 coin as nested lists.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        (0..4)
            .map(|i| (0..4).map(|j| self.inner.u().get(i, j)).collect())
            .collect()
    }

    fn unitarity_defect(&self) -> f64 {
        self.inner.u().unitarity_defect()
    }

    fn __repr__(&self) -> String {
        let s = self.inner.spec();
        format!("Coin(a={}, b={}, c={}, d={})", s.a, s.b, s.c, s.d)
    }
}

/// Sparse walker state: position → 4 chirality amplitudes.
#[pyclass(frozen, module = "qwalk")]
struct WalkState {
    inner: walk::WalkState,
}

#[pymethods]
impl WalkState {
    /// Origin-localized state from (α, β, γ, μ); must be normalized.
    #[new]
    fn new(initial: Vec<Complex64>) -> PyResult<Self> {
        Ok(WalkState {
            inner: walk::WalkState::from_initial(&initial_from_py(initial)?),
        })
    }

    #[getter]
    fn time(&self) -> u64 {
        self.inner.time()
    }

    fn step(&self, coin: &Coin) -> WalkState {
        WalkState {
            inner: self.inner.step(&coin.inner),
        }
    }

    fn evolve(&self, coin: &Coin, steps: u64) -> WalkState {
        WalkState {
            inner: self.inner.evolve(&coin.inner, steps),
        }
    }

    /// {position: probability} at the current time.
    fn distribution(&self) -> BTreeMap<i64, f64> {
        self.inner.distribution().iter().collect()
    }

    /// {position: [4 amplitudes]} over the support.
    fn amplitudes(&self) -> BTreeMap<i64, Vec<Complex64>> {
        self.inner.support().map(|(x, v)| (x, v.to_vec())).collect()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    /// Raw moment E[X^r] of the current distribution.
    fn moment(&self, r: u32) -> f64 {
        self.inner.distribution().moment(r)
    }

    /// Largest componentwise difference against another state.
    fn max_component_diff(&self, other: &WalkState) -> f64 {
        self.inner.max_component_diff(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "WalkState(t={}, support={})",
            self.inner.time(),
            self.inner.support().count()
        )
    }
}

/// P(X_t = x) for t = 0..=max_t plus the detected eventual period.
#[pyfunction]
fn origin_sequence(
    coin: &Coin,
    initial: Vec<Complex64>,
    x: i64,
    max_t: u64,
) -> PyResult<(Vec<f64>, Option<usize>)> {
    let init = initial_from_py(initial)?;
    let seq = walk::origin_probability_sequence(&coin.inner, &init, x, max_t);
    Ok((seq.values, seq.period))
}

/// Eigenvalues and unit-norm eigenvectors of Û(k), sorted by principal
/// argument.
#[pyfunction]
fn eigensystem(coin: &Coin, k: f64) -> PyResult<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
    let eig = spectral::eigensystem(&spectral::build_momentum_operator(&coin.inner, k))
        .map_err(value_err)?;
    Ok((
        eig.values.to_vec(),
        eig.vectors.iter().map(|v| v.to_vec()).collect(),
    ))
}

/// Branch group velocities h_j(k) by central differences.
#[pyfunction]
#[pyo3(signature = (coin, k, dk = 1e-4))]
fn group_velocities(coin: &Coin, k: f64, dk: f64) -> PyResult<Vec<f64>> {
    spectral::group_velocities(&coin.inner, k, dk)
        .map(|h| h.to_vec())
        .map_err(value_err)
}

/// Fourier-ring propagation to time t on a ring of the given size.
#[pyfunction]
fn fourier_propagate(
    coin: &Coin,
    initial: Vec<Complex64>,
    t: u64,
    ring_size: usize,
) -> PyResult<WalkState> {
    let init = initial_from_py(initial)?;
    spectral::fourier_propagate(&coin.inner, &init, t, ring_size)
        .map(|inner| WalkState { inner })
        .map_err(value_err)
}

/// Closed-form stationary limits (even, odd, offsite) for an initial state.
#[pyfunction]
fn theorem1_predict(initial: Vec<Complex64>) -> PyResult<(f64, f64, f64)> {
    let p = limits::theorem1_predict(&initial_from_py(initial)?);
    Ok((p.even_limit, p.odd_limit, p.offsite_limit))
}

/// λ = ±1 branch-mass quadrature (the δ-mass reference value).
#[pyfunction]
#[pyo3(signature = (coin, initial, grid_size = 256))]
fn delta_mass_quadrature(coin: &Coin, initial: Vec<Complex64>, grid_size: usize) -> PyResult<f64> {
    limits::delta_mass_quadrature(&coin.inner, &initial_from_py(initial)?, grid_size)
        .map_err(value_err)
}

/// All-branch mass quadrature (equals 1 for unit states).
#[pyfunction]
#[pyo3(signature = (coin, initial, grid_size = 256))]
fn total_mass_quadrature(coin: &Coin, initial: Vec<Complex64>, grid_size: usize) -> PyResult<f64> {
    limits::total_mass_quadrature(&coin.inner, &initial_from_py(initial)?, grid_size)
        .map_err(value_err)
}

/// The two closed forms offered for the δ-mass: (½αμi, ½μi).
#[pyfunction]
fn delta_closed_forms(initial: Vec<Complex64>) -> PyResult<(Complex64, Complex64)> {
    let v = limits::delta_closed_forms(&initial_from_py(initial)?);
    Ok((v.derivation, v.theorem))
}

/// The Konno density; raises ValueError on [1/√2, 1) where the formula is
/// non-real.
#[pyfunction]
fn konno_density(x: f64) -> PyResult<f64> {
    limits::konno_density(x).map_err(value_err)
}

/// Spectral limit moments of X_t/t for r = 1..=r_max.
#[pyfunction]
#[pyo3(signature = (coin, initial, r_max = 4, grid_size = 256))]
fn limit_moments(
    coin: &Coin,
    initial: Vec<Complex64>,
    r_max: u32,
    grid_size: usize,
) -> PyResult<Vec<f64>> {
    limits::limit_moments_spectral(&coin.inner, &initial_from_py(initial)?, r_max, grid_size)
        .map_err(value_err)
}

/// Empirical E[(X_t/t)^r] for r = 1..=r_max at time t.
#[pyfunction]
#[pyo3(signature = (coin, initial, t, r_max = 4))]
fn empirical_moments(
    coin: &Coin,
    initial: Vec<Complex64>,
    t: u64,
    r_max: u32,
) -> PyResult<Vec<f64>> {
    Ok(limits::empirical_rescaled_moments(
        &coin.inner,
        &initial_from_py(initial)?,
        t,
        r_max,
    ))
}

/// Full claim audit as a JSON string (same payload the CLI writes).
#[pyfunction]
#[pyo3(signature = (coin, initial, max_t = 100, k_grid = 256))]
fn audit_claims_json(
    coin: &Coin,
    initial: Vec<Complex64>,
    max_t: u64,
    k_grid: usize,
) -> PyResult<String> {
    let init = initial_from_py(initial)?;
    let cfg = AuditConfig {
        max_t,
        k_grid,
        moment_horizon: max_t,
        ..AuditConfig::default()
    };
    let reports = audit_claims(&coin.inner, &init, &cfg);
    serde_json::to_string_pretty(&reports).map_err(value_err)
}

/// The d×d Grover diffusion matrix, entries 2/d − δ_ij.
#[pyfunction]
fn grover_diffusion(dim: usize) -> PyResult<Vec<Vec<f64>>> {
    qwalk_core::coin::grover_diffusion(dim).map_err(value_err)
}

#[pymodule]
fn qwalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Coin>()?;
    m.add_class::<WalkState>()?;
    m.add_function(wrap_pyfunction!(origin_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(eigensystem, m)?)?;
    m.add_function(wrap_pyfunction!(group_velocities, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_propagate, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_predict, m)?)?;
    m.add_function(wrap_pyfunction!(delta_mass_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(total_mass_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(delta_closed_forms, m)?)?;
    m.add_function(wrap_pyfunction!(konno_density, m)?)?;
    m.add_function(wrap_pyfunction!(limit_moments, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_moments, m)?)?;
    m.add_function(wrap_pyfunction!(audit_claims_json, m)?)?;
    m.add_function(wrap_pyfunction!(grover_diffusion, m)?)?;
    Ok(())
}

//! Python bindings: root construction, Mellin transforms and convolutions.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use toeplitz_roots::convolve::{convolve_all, BetaTermFunction, LogitGrid, DEFAULT_DELTA};
use toeplitz_roots::roots::{
    construct_root as build_root, psi_mellin, MellinMode, Pairing, RootOptions, RootProblem,
    RootResult,
};
use toeplitz_roots::specialfun::QuadratureSpec;
use toeplitz_roots::symbols::{
    mellin_eval, mellin_of_terms, QuasihomogeneousSymbol, RadialTerm, RadialTermSum,
    RationalMellin,
};
use toeplitz_roots::Error;

create_exception!(toeplitz_roots_py, RootError, PyException);

fn to_py(e: Error) -> PyErr {
    RootError::new_err((e.category(), e.to_string()))
}

pub fn parse_pairing(s: &str) -> Result<Pairing, Error> {
    match s {
        "optimized" => Ok(Pairing::Optimized),
        "canonical" => Ok(Pairing::Canonical),
        _ => Err(Error::Input(format!("pairing must be optimized or canonical, got {s}"))),
    }
}

pub fn parse_mode(s: &str) -> Result<MellinMode, Error> {
    match s {
        "closed" => Ok(MellinMode::Closed),
        "numeric" => Ok(MellinMode::Numeric),
        _ => Err(Error::Input(format!("mode must be closed or numeric, got {s}"))),
    }
}

/// Rational transform and term form from `(c, a, b)` tuples or
/// `(constant, num_roots, den_roots)`.
pub fn symbol_parts(
    terms: Option<Vec<(f64, f64, u32)>>,
    rational: Option<(f64, Vec<f64>, Vec<f64>)>,
) -> Result<(RationalMellin, Option<RadialTermSum>), Error> {
    match (terms, rational) {
        (Some(t), None) => {
            let sum = RadialTermSum::new(t.into_iter().map(|(c, a, b)| RadialTerm { c, a, b }).collect())?;
            Ok((mellin_of_terms(&sum)?, Some(sum)))
        }
        (None, Some((c, num, den))) => Ok((RationalMellin::new(c, num, den)?, None)),
        _ => Err(Error::Input("pass exactly one of terms and rational".into())),
    }
}

#[pyclass(name = "Root", frozen)]
pub struct PyRoot {
    inner: RootResult,
}

#[pymethods]
impl PyRoot {
    #[getter]
    fn p(&self) -> u32 {
        self.inner.p
    }

    #[getter]
    fn constant(&self) -> Complex64 {
        self.inner.constant
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.profile.nodes()
    }

    #[getter]
    fn psi(&self) -> Vec<Complex64> {
        self.inner.psi_values()
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.inner.diagnostics.report.residuals.clone()
    }

    #[getter]
    fn max_residual(&self) -> f64 {
        self.inner.diagnostics.report.max_residual
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    fn psi_at(&self, r: f64) -> PyResult<Complex64> {
        self.inner.psi_at(r).map_err(to_py)
    }

    #[pyo3(signature = (z, mode = "closed"))]
    fn mellin(&self, z: f64, mode: &str) -> PyResult<Complex64> {
        psi_mellin(&self.inner, z, parse_mode(mode).map_err(to_py)?).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Root(p={}, constant={}, max_residual={:.3e})",
            self.inner.p, self.inner.constant, self.inner.diagnostics.report.max_residual
        )
    }
}

#[pyfunction]
#[pyo3(signature = (p, terms=None, rational=None, grid=256, pairing="optimized", branch=0, k_max=50, mode="closed", tol=None))]
#[allow(clippy::too_many_arguments)]
fn construct_root(
    py: Python<'_>,
    p: u32,
    terms: Option<Vec<(f64, f64, u32)>>,
    rational: Option<(f64, Vec<f64>, Vec<f64>)>,
    grid: usize,
    pairing: &str,
    branch: u32,
    k_max: usize,
    mode: &str,
    tol: Option<f64>,
) -> PyResult<PyRoot> {
    let (rm, sum) = symbol_parts(terms, rational).map_err(to_py)?;
    let opts = RootOptions {
        grid_nodes: grid,
        pairing: parse_pairing(pairing).map_err(to_py)?,
        branch,
        k_max,
        mode: parse_mode(mode).map_err(to_py)?,
        tolerance: tol,
        ..RootOptions::default()
    };
    let prob = match sum {
        Some(s) => {
            let sym = QuasihomogeneousSymbol::new(p, s).map_err(to_py)?;
            RootProblem::from_symbol(&sym, opts)
        }
        None => RootProblem::from_rational(p, rm, opts),
    }
    .map_err(to_py)?;
    let inner = py.detach(|| build_root(&prob)).map_err(to_py)?;
    Ok(PyRoot { inner })
}

/// Closed-form Mellin transform of `Σ c r^a (ln r)^b` at `z`.
#[pyfunction]
fn mellin(terms: Vec<(f64, f64, u32)>, z: f64) -> PyResult<f64> {
    let (rm, _) = symbol_parts(Some(terms), None).map_err(to_py)?;
    mellin_eval(&rm, Complex64::new(z, 0.0)).map(|v| v.re).map_err(to_py)
}

/// Convolution product of `r^a (1−r)^{b−1}` factors: `(nodes, values)`.
#[pyfunction]
#[pyo3(signature = (factors, grid=256))]
fn convolve(py: Python<'_>, factors: Vec<(f64, f64)>, grid: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let fs: Vec<_> = factors.iter().map(|&(a, b)| BetaTermFunction::single(a, b)).collect();
    let g = LogitGrid::new(grid, DEFAULT_DELTA).map_err(to_py)?;
    let h = py
        .detach(|| convolve_all(&fs, g, &QuadratureSpec::default()))
        .map_err(to_py)?;
    Ok((h.nodes(), h.values().to_vec()))
}

#[pymodule]
fn toeplitz_roots_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RootError", m.py().get_type::<RootError>())?;
    m.add_class::<PyRoot>()?;
    m.add_function(wrap_pyfunction!(construct_root, m)?)?;
    m.add_function(wrap_pyfunction!(mellin, m)?)?;
    m.add_function(wrap_pyfunction!(convolve, m)?)?;
    Ok(())
}

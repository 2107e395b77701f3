//! Python bindings: braid words, the construction pipeline, verification and
//! projection, mirroring the Rust API with plain Python data types.

use braidfield::{braid, project, semiholo, verify, Config};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn err(e: braidfield::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config_from(
    tol: f64,
    grid: usize,
    samples: usize,
    lambda: Option<f64>,
    repeat: u32,
) -> Config {
    Config {
        tol,
        grid,
        samples,
        lambda,
        seed: 0,
        repeat,
    }
}

/// A braid word on s strands.
#[pyclass(name = "Braid")]
#[derive(Clone)]
struct PyBraid {
    inner: braid::BraidWord,
}

#[pymethods]
impl PyBraid {
    /// Parse from a token string like "2 -1 2 1 1 1" or a list of signed
    /// generator indices.
    #[new]
    #[pyo3(signature = (word, strands=None))]
    fn new(word: Bound<'_, PyAny>, strands: Option<usize>) -> PyResult<Self> {
        let inner = if let Ok(text) = word.extract::<String>() {
            braid::BraidWord::parse(&text, strands).map_err(err)?
        } else {
            let values: Vec<i64> = word.extract()?;
            let text = values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            braid::BraidWord::parse(&text, strands).map_err(err)?
        };
        Ok(PyBraid { inner })
    }

    #[getter]
    fn strands(&self) -> usize {
        self.inner.strands()
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn word(&self) -> Vec<i64> {
        self.inner
            .letters()
            .iter()
            .map(|l| l.index as i64 * l.sign as i64)
            .collect()
    }

    fn beta(&self) -> usize {
        self.inner.beta()
    }

    fn is_strictly_homogeneous(&self) -> bool {
        self.inner.is_strictly_homogeneous()
    }

    fn exponent_sum(&self) -> i64 {
        self.inner.exponent_sum()
    }

    /// Permutation as a list: entry p is the strand ending in position p.
    fn permutation(&self) -> Vec<usize> {
        self.inner.components().permutation
    }

    /// Link components as lists of strand indices in walk order.
    fn components(&self) -> Vec<Vec<usize>> {
        self.inner
            .components()
            .cycles
            .into_iter()
            .map(|c| c.strands)
            .collect()
    }

    /// Lower and upper degree bounds (c1, c2) for the constructed polynomial.
    fn degree_bounds(&self) -> (f64, i64) {
        semiholo::degree_bounds(&self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Braid(\"{}\", strands={})",
            self.inner,
            self.inner.strands()
        )
    }
}

/// A polynomial in u, v and conj(v).
#[pyclass(name = "Polynomial")]
#[derive(Clone)]
struct PyPolynomial {
    inner: semiholo::SemiholoPoly,
}

#[pymethods]
impl PyPolynomial {
    #[getter]
    fn strands(&self) -> usize {
        self.inner.strands
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn degree_u(&self) -> usize {
        self.inner.degree_u()
    }

    fn is_harmonic(&self) -> bool {
        self.inner.is_harmonic()
    }

    /// Monomials as ((u, v, vbar), complex) pairs in serialization order.
    fn monomials(&self) -> Vec<((u32, u32, u32), Complex64)> {
        self.inner.ordered_monomials()
    }

    fn eval(&self, u: Complex64, v: Complex64) -> Complex64 {
        self.inner.eval(u, v)
    }

    fn rescale(&self, lam: f64) -> PyResult<PyPolynomial> {
        Ok(PyPolynomial {
            inner: self.inner.rescale(lam).map_err(err)?,
        })
    }

    fn repeat(&self, r: u32) -> PyPolynomial {
        PyPolynomial {
            inner: self.inner.repeated(r),
        }
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyPolynomial> {
        Ok(PyPolynomial {
            inner: semiholo::SemiholoPoly::from_json(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Polynomial(strands={}, degree={}, lambda={})",
            self.inner.strands,
            self.inner.degree(),
            self.inner.lambda
        )
    }
}

/// The projected polynomial on R^3.
#[pyclass(name = "RealPolynomial")]
#[derive(Clone)]
struct PyRealPolynomial {
    inner: project::RealPoly3,
}

#[pymethods]
impl PyRealPolynomial {
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn monomials(&self) -> Vec<((u16, u16, u16), Complex64)> {
        self.inner.ordered_monomials()
    }

    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        self.inner.eval(x, y, z)
    }

    /// The real pair (F1, F2) with p = F1 + i F2.
    fn split(&self) -> (PyRealPolynomial, PyRealPolynomial) {
        let (re, im) = project::split_real_imag(&self.inner);
        (
            PyRealPolynomial { inner: re },
            PyRealPolynomial { inner: im },
        )
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("RealPolynomial(degree={})", self.inner.degree())
    }
}

/// Build the semiholomorphic polynomial for a braid.
#[pyfunction]
#[pyo3(signature = (braid, tol=1e-9, grid=4096, lam=1.0, repeat=1))]
fn build(braid: &PyBraid, tol: f64, grid: usize, lam: f64, repeat: u32) -> PyResult<PyPolynomial> {
    let cfg = config_from(tol, grid, 512, Some(lam), repeat);
    Ok(PyPolynomial {
        inner: braidfield::build_polynomial(&braid.inner, &cfg).map_err(err)?,
    })
}

fn report_to_dict<'py>(
    py: Python<'py>,
    report: &verify::VerificationReport,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lambda", report.lambda)?;
    d.set_item("passed", report.passed)?;
    d.set_item("first_failing_stage", report.first_failing_stage.clone())?;
    d.set_item("roots_in_disk", report.roots_in_disk)?;
    d.set_item("unique_intersection", report.unique_intersection)?;
    match &report.reconstructed {
        Some(data) => {
            d.set_item("permutation", data.permutation.clone())?;
            d.set_item("exponent_sum", data.exponent_sum)?;
            let pairs = PyDict::new(py);
            for ((a, b), c) in &data.pair_counts {
                pairs.set_item(format!("{a}-{b}"), *c)?;
            }
            d.set_item("pair_counts", pairs)?;
        }
        None => {
            d.set_item("permutation", py.None())?;
            d.set_item("exponent_sum", py.None())?;
            d.set_item("pair_counts", py.None())?;
        }
    }
    d.set_item("permutation_match", report.permutation_match)?;
    d.set_item("exponent_sum_match", report.exponent_sum_match)?;
    d.set_item("pair_counts_match", report.pair_counts_match)?;
    d.set_item("transversality_margin", report.transversality_margin)?;
    d.set_item("max_f_on_nodal", report.max_f_on_nodal)?;
    d.set_item("phase_critical", report.phase_critical)?;
    d.set_item("conservative_lambda", report.conservative_lambda)?;
    Ok(d)
}

/// Search an amplitude and certify the zero set; returns the report dict.
/// With a braid supplied the reconstruction is compared against it.
#[pyfunction]
#[pyo3(signature = (poly, braid=None, samples=512, lam=None))]
fn verify<'py>(
    py: Python<'py>,
    poly: &PyPolynomial,
    braid: Option<&PyBraid>,
    samples: usize,
    lam: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_from(1e-9, 4096, samples, lam, 1);
    let fb = match braid {
        Some(b) => Some(braidfield::fourier_parametrisation(&b.inner, &cfg).map_err(err)?),
        None => None,
    };
    let report = verify::find_lambda(
        &poly.inner,
        &cfg,
        braid.map(|b| &b.inner),
        fb.as_ref(),
    )
    .map_err(err)?;
    report_to_dict(py, &report)
}

/// Verify, then project stereographically at the accepted amplitude.
#[pyfunction]
#[pyo3(signature = (poly, samples=512, lam=None, integerize=false))]
fn project_polynomial(
    poly: &PyPolynomial,
    samples: usize,
    lam: Option<f64>,
    integerize: bool,
) -> PyResult<PyRealPolynomial> {
    let cfg = config_from(1e-9, 4096, samples, lam, 1);
    let (f, report) =
        verify::verified_polynomial(&poly.inner, &cfg, None, None).map_err(err)?;
    let projected = project::stereographic_project(&f);
    if !integerize {
        return Ok(PyRealPolynomial { inner: projected });
    }
    let nodal = verify::sample_nodal_set(&f, samples.min(128)).map_err(err)?;
    let samples3: Vec<[f64; 3]> = nodal
        .iter()
        .filter_map(|&p| project::inverse_stereographic(p))
        .collect();
    let (rounded, _scale) = project::integerize(
        &projected,
        report.transversality_margin,
        &samples3,
        1_000_000_000,
    )
    .map_err(err)?;
    Ok(PyRealPolynomial { inner: rounded })
}

/// Sample the nodal set on the three-sphere (or projected to R^3).
#[pyfunction]
#[pyo3(signature = (poly, samples=64, lam=None, projected=false))]
fn trace<'py>(
    py: Python<'py>,
    poly: &PyPolynomial,
    samples: usize,
    lam: Option<f64>,
    projected: bool,
) -> PyResult<Bound<'py, PyList>> {
    let cfg = config_from(1e-9, 4096, samples.max(64), lam, 1);
    let (f, _) = verify::verified_polynomial(&poly.inner, &cfg, None, None).map_err(err)?;
    let points = verify::sample_nodal_set(&f, samples).map_err(err)?;
    let list = PyList::empty(py);
    for p in points {
        if projected {
            if let Some([x, y, z]) = project::inverse_stereographic(p) {
                list.append((x, y, z))?;
            }
        } else {
            list.append((p[0], p[1], p[2], p[3]))?;
        }
    }
    Ok(list)
}

#[pymodule]
fn braidfield_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBraid>()?;
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyRealPolynomial>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(project_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    Ok(())
}

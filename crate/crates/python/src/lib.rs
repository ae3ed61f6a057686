//! Python bindings for `bandsel`.
//!
//! Band ids crossing the boundary are 1-based, like the CLI's.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use bandsel::data::{self, CubeLayout, DataType, Interleave, SyntheticSpec};
use bandsel::eval::{self, ClassifierConfig, SplitSpec};
use bandsel::info::{self, BinStrategy, CodedVariable, DiscretizationConfig};
use bandsel::selection::{self, Algorithm, SelectionConfig};

fn py_err(e: bandsel::Error) -> PyErr {
    match e {
        bandsel::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "HyperCube", module = "pybandsel", frozen)]
pub struct PyHyperCube {
    inner: data::HyperCube,
}

#[pymethods]
impl PyHyperCube {
    /// `values` is band-major: all of band 1 row by row, then band 2, ...
    #[new]
    fn new(width: usize, height: usize, n_bands: usize, values: Vec<f64>) -> PyResult<Self> {
        let inner = data::HyperCube::new(width, height, n_bands, values).map_err(py_err)?;
        Ok(PyHyperCube { inner })
    }

    /// Loads an ENVI header and its binary payload.
    #[staticmethod]
    fn load(header: PathBuf) -> PyResult<Self> {
        Ok(PyHyperCube {
            inner: data::load_cube(&header).map_err(py_err)?,
        })
    }

    /// Writes an ENVI header and payload; returns the payload path.
    #[pyo3(signature = (header, interleave = "bsq", data_type = "f32"))]
    fn write(&self, header: PathBuf, interleave: &str, data_type: &str) -> PyResult<PathBuf> {
        let interleave: Interleave = interleave.parse().map_err(py_err)?;
        let data_type = match data_type {
            "u8" => DataType::U8,
            "i16" => DataType::I16,
            "u16" => DataType::U16,
            "f32" => DataType::F32,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown data type `{other}`"
                )))
            }
        };
        let layout = CubeLayout {
            interleave,
            data_type,
            ..CubeLayout::default()
        };
        data::write_cube(&self.inner, &header, layout).map_err(py_err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn n_bands(&self) -> usize {
        self.inner.n_bands()
    }

    /// Row-major values of band `band_id` (1-based).
    fn band(&self, band_id: usize) -> PyResult<Vec<f64>> {
        let b = band_index(band_id, self.inner.n_bands())?;
        Ok(self.inner.band(b).to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "HyperCube(width={}, height={}, n_bands={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.n_bands()
        )
    }
}

fn band_index(band_id: usize, n_bands: usize) -> PyResult<usize> {
    if band_id == 0 || band_id > n_bands {
        return Err(PyValueError::new_err(format!(
            "band id {band_id} outside 1..={n_bands}"
        )));
    }
    Ok(band_id - 1)
}

#[pyclass(name = "GroundTruth", module = "pybandsel", frozen)]
pub struct PyGroundTruth {
    inner: data::GroundTruth,
}

#[pymethods]
impl PyGroundTruth {
    /// Row-major labels; 0 marks unlabeled pixels.
    #[new]
    fn new(width: usize, height: usize, labels: Vec<u32>) -> PyResult<Self> {
        Ok(PyGroundTruth {
            inner: data::GroundTruth::new(width, height, labels).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf, width: usize, height: usize) -> PyResult<Self> {
        Ok(PyGroundTruth {
            inner: data::load_ground_truth(&path, (width, height)).map_err(py_err)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn n_classes(&self) -> u32 {
        self.inner.n_classes()
    }

    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.inner.labels().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "GroundTruth(width={}, height={}, n_classes={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.n_classes()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (
    width = 32, height = 32, n_classes = 4, n_informative = 2, n_redundant = 2,
    n_noise = 4, noise_sigma = 0.5, synergy_pairs = 0, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn generate_synthetic(
    width: usize,
    height: usize,
    n_classes: u32,
    n_informative: usize,
    n_redundant: usize,
    n_noise: usize,
    noise_sigma: f64,
    synergy_pairs: usize,
    seed: u64,
) -> PyResult<(PyHyperCube, PyGroundTruth)> {
    let spec = SyntheticSpec {
        width,
        height,
        n_classes,
        n_informative,
        n_redundant,
        n_noise,
        noise_sigma,
        synergy_pairs,
        seed,
    };
    let (cube, gt) = data::generate_synthetic(&spec).map_err(py_err)?;
    Ok((PyHyperCube { inner: cube }, PyGroundTruth { inner: gt }))
}

/// Codes become a variable over the alphabet `0..=max(codes)`.
fn coded(codes: Vec<u32>) -> PyResult<CodedVariable> {
    CodedVariable::from_codes(codes).map_err(py_err)
}

/// Entropy in bits of a sequence of non-negative integer codes.
#[pyfunction]
fn entropy(codes: Vec<u32>) -> PyResult<f64> {
    Ok(info::entropy(&coded(codes)?))
}

#[pyfunction]
fn mutual_info(a: Vec<u32>, b: Vec<u32>) -> PyResult<f64> {
    info::mutual_info(&coded(a)?, &coded(b)?).map_err(py_err)
}

/// `I(a; (b, c))` in bits.
#[pyfunction]
fn mi_joined(a: Vec<u32>, b: Vec<u32>, c: Vec<u32>) -> PyResult<f64> {
    info::mi_joined(&coded(a)?, &coded(b)?, &coded(c)?).map_err(py_err)
}

/// Interaction information of three code sequences, in bits.
#[pyfunction]
fn interaction_info(a: Vec<u32>, b: Vec<u32>, c: Vec<u32>) -> PyResult<f64> {
    info::interaction_info(&coded(a)?, &coded(b)?, &coded(c)?).map_err(py_err)
}

#[pyclass(name = "SelectionResult", module = "pybandsel", frozen)]
pub struct PySelectionResult {
    inner: selection::SelectionResult,
}

#[pymethods]
impl PySelectionResult {
    /// Selected band ids (1-based) in selection order.
    #[getter]
    fn selected(&self) -> Vec<usize> {
        self.inner.selected_ids()
    }

    /// `(step, band_id, score_bits, score_kind, accepted)` per trace row.
    #[getter]
    fn trace(&self) -> Vec<(usize, usize, f64, &'static str, bool)> {
        let off = self.inner.band_id_offset;
        self.inner
            .trace
            .iter()
            .map(|t| {
                (
                    t.step,
                    t.band + off,
                    t.score_bits,
                    t.kind.as_str(),
                    t.accepted,
                )
            })
            .collect()
    }

    /// `(band_id, mi_bits)` in ranking order.
    #[getter]
    fn ranking(&self) -> Vec<(usize, f64)> {
        let off = self.inner.band_id_offset;
        self.inner
            .ranking
            .iter()
            .map(|r| (r.band + off, r.mi_bits))
            .collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "SelectionResult({}, selected={:?})",
            self.inner.config.algorithm,
            self.inner.selected_ids()
        )
    }
}

fn selection_config(
    algorithm: &str,
    k_max: usize,
    threshold: f64,
    n_bins: usize,
) -> PyResult<SelectionConfig> {
    let algorithm: Algorithm = algorithm.parse().map_err(py_err)?;
    Ok(SelectionConfig {
        k_max,
        threshold_th: threshold,
        discretization: DiscretizationConfig {
            n_bins,
            strategy: BinStrategy::MinMaxUniform,
        },
        algorithm,
        ..SelectionConfig::default()
    })
}

/// Runs the `mi` (threshold) or `tmi` (interaction) filter.
#[pyfunction]
#[pyo3(signature = (cube, gt, algorithm = "tmi", k_max = 20, threshold = 0.0, n_bins = 256))]
fn select(
    py: Python<'_>,
    cube: &PyHyperCube,
    gt: &PyGroundTruth,
    algorithm: &str,
    k_max: usize,
    threshold: f64,
    n_bins: usize,
) -> PyResult<PySelectionResult> {
    let cfg = selection_config(algorithm, k_max, threshold, n_bins)?;
    let inner = py
        .detach(|| selection::select(&cube.inner, &gt.inner, &cfg))
        .map_err(py_err)?;
    Ok(PySelectionResult { inner })
}

#[pyclass(name = "EvalReport", module = "pybandsel", frozen)]
pub struct PyEvalReport {
    inner: eval::EvalReport,
}

#[pymethods]
impl PyEvalReport {
    /// `(n_bands, accuracy_percent, band_ids)` per evaluated size.
    #[getter]
    fn rows(&self) -> Vec<(usize, f64, Vec<usize>)> {
        let off = self.inner.band_id_offset;
        self.inner
            .rows
            .iter()
            .map(|r| {
                (
                    r.n_bands,
                    r.accuracy_percent,
                    r.selected_bands.iter().map(|b| b + off).collect(),
                )
            })
            .collect()
    }

    /// `(requested, evaluated)` for sizes the selector could not fill.
    #[getter]
    fn shortfalls(&self) -> Vec<(usize, usize)> {
        self.inner.shortfalls.clone()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

/// Selects once at `max(sizes)` and scores each prefix with k-NN.
#[pyfunction]
#[pyo3(signature = (
    cube, gt, sizes, algorithm = "tmi", threshold = 0.0, n_bins = 256,
    split_seed = 0, train_fraction = 0.5, knn_k = 3
))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    cube: &PyHyperCube,
    gt: &PyGroundTruth,
    sizes: Vec<usize>,
    algorithm: &str,
    threshold: f64,
    n_bins: usize,
    split_seed: u64,
    train_fraction: f64,
    knn_k: usize,
) -> PyResult<PyEvalReport> {
    let cfg = selection_config(algorithm, 1, threshold, n_bins)?;
    let split = SplitSpec {
        train_fraction,
        seed: split_seed,
        stratified: true,
    };
    let classifier = ClassifierConfig {
        knn_k,
        ..ClassifierConfig::default()
    };
    let (inner, _) = py
        .detach(|| eval::sweep(&cube.inner, &gt.inner, &cfg, &sizes, &split, &classifier))
        .map_err(py_err)?;
    Ok(PyEvalReport { inner })
}

#[pymodule]
fn pybandsel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHyperCube>()?;
    m.add_class::<PyGroundTruth>()?;
    m.add_class::<PySelectionResult>()?;
    m.add_class::<PyEvalReport>()?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_info, m)?)?;
    m.add_function(wrap_pyfunction!(mi_joined, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_info, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}

//! Python bindings: maps, the involution lemmas, embeddings and their
//! verification. Structured results come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use pbij::cli::select_word;
use pbij::document::DerivationDocument;
use pbij::lemmas::{self, DEFAULT_BUDGET};
use pbij::pbij as core;
use pbij::verify::{self, VerifyOptions};
use pbij::{EmbeddingResult, Eval, Point, TargetSpec};

create_exception!(pbij_py, UnresolvedError, PyException, "An orbit search or evaluation gave up.");

fn err(e: pbij::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Defined → int, Undefined → None, Unresolved → UnresolvedError.
fn to_py(v: Eval) -> PyResult<Option<Point>> {
    match v {
        Eval::Defined(y) => Ok(Some(y)),
        Eval::Undefined => Ok(None),
        Eval::Unresolved(u) => Err(UnresolvedError::new_err(u.to_string())),
    }
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn dumps(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

/// A partial bijection of the naturals, composed left to right.
#[pyclass(name = "Map", frozen)]
#[derive(Clone)]
struct Map(core::PartialBijection);

#[pymethods]
impl Map {
    fn apply(&self, x: Point) -> PyResult<Option<Point>> {
        to_py(self.0.apply(x))
    }

    fn unapply(&self, y: Point) -> PyResult<Option<Point>> {
        to_py(self.0.unapply(y))
    }

    /// "defined", "undefined" or "unresolved", with the value or reason.
    fn evaluate(&self, x: Point) -> (String, String) {
        match self.0.apply(x) {
            Eval::Defined(y) => ("defined".into(), y.to_string()),
            Eval::Undefined => ("undefined".into(), String::new()),
            Eval::Unresolved(u) => ("unresolved".into(), u.to_string()),
        }
    }

    /// `self` first, then `other`.
    fn then(&self, other: &Map) -> Map {
        Map(self.0.then(&other.0))
    }

    fn invert(&self) -> Map {
        Map(self.0.invert())
    }

    fn power(&self, n: u32) -> Map {
        Map(core::power(&self.0, n))
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    fn __call__(&self, x: Point) -> PyResult<Option<Point>> {
        self.apply(x)
    }

    fn __repr__(&self) -> String {
        format!("Map({})", self.0.label())
    }
}

#[pyfunction]
fn finite_map(pairs: Vec<(Point, Point)>) -> PyResult<Map> {
    core::finite_map(pairs).map(Map).map_err(err)
}

#[pyfunction]
fn cofinite_identity(exceptions: Vec<(Point, Point)>) -> PyResult<Map> {
    core::cofinite_identity(exceptions).map(Map).map_err(err)
}

#[pyfunction]
fn builtin(name: &str) -> PyResult<Map> {
    core::builtin(name).map(Map).map_err(err)
}

#[pyfunction]
fn identity() -> Map {
    Map(core::identity())
}

#[pyfunction]
#[pyo3(signature = (a, budget = DEFAULT_BUDGET))]
fn two_involutions(a: &Map, budget: u64) -> (Map, Map) {
    let (r, s) = lemmas::two_involutions(&a.0, budget);
    (Map(r), Map(s))
}

#[pyfunction]
#[pyo3(signature = (a, budget = DEFAULT_BUDGET))]
fn cancel_involution(a: &Map, budget: u64) -> Map {
    Map(lemmas::cancel_involution(&a.0, budget))
}

/// A permutation `a` with f·a·g = h.
#[pyfunction]
fn relative_extend(f: &Map, g: &Map, h: &Map) -> PyResult<Map> {
    lemmas::relative_extend(&f.0, &g.0, &h.0).map(Map).map_err(err)
}

#[pyfunction]
fn pair_encode(i: u64, k: u64) -> Option<Point> {
    pbij::blocks::pair_encode(i, k)
}

#[pyfunction]
fn pair_decode(x: Point) -> (u64, u64) {
    pbij::blocks::pair_decode(x)
}

#[pyfunction]
fn layout_for(py: Python<'_>, m: u64) -> PyResult<Bound<'_, PyAny>> {
    let layout = pbij::layout_for(m).map_err(err)?;
    loads(py, &serde_json::to_string(&layout).map_err(json_err)?)
}

/// Exhaustive involution-lemma checks on S_1 … S_max_n.
#[pyfunction]
#[pyo3(signature = (max_n = 6))]
fn oracle(py: Python<'_>, max_n: usize) -> PyResult<Bound<'_, PyAny>> {
    let checks = verify::finite_oracle_suite(max_n).map_err(err)?;
    loads(py, &serde_json::to_string(&checks).map_err(json_err)?)
}

/// Generators and witness words for a list of targets.
#[pyclass(name = "Embedding", frozen)]
struct Embedding(EmbeddingResult);

#[pymethods]
impl Embedding {
    #[getter]
    fn m(&self) -> u64 {
        self.0.derivation.layout.m
    }

    #[getter]
    fn f(&self) -> Map {
        Map(self.0.generator_f.clone())
    }

    #[getter]
    fn g(&self) -> Map {
        Map(self.0.generator_g.clone())
    }

    #[getter]
    fn target_words(&self) -> Vec<String> {
        self.0.target_words.iter().map(|w| w.to_string()).collect()
    }

    /// Word by selector: "W:k", "J:k", "Pinv" or "target:i".
    fn word(&self, selector: &str) -> PyResult<String> {
        select_word(&self.0, selector).map(|w| w.to_string()).map_err(err)
    }

    fn eval(&self, selector: &str, x: Point) -> PyResult<Option<Point>> {
        let w = select_word(&self.0, selector).map_err(err)?;
        to_py(pbij::eval_word(&w, &self.0.generator_f, &self.0.generator_g, x))
    }

    #[pyo3(signature = (window = verify::DEFAULT_WINDOW, budget = DEFAULT_BUDGET))]
    fn verify<'py>(&self, py: Python<'py>, window: u64, budget: u64) -> PyResult<Bound<'py, PyAny>> {
        let rep = py
            .detach(|| verify::verify_with(&self.0, &VerifyOptions::new(window, budget)))
            .map_err(err)?;
        loads(py, &serde_json::to_string(&rep).map_err(json_err)?)
    }

    /// The derivation document as JSON text.
    fn to_json(&self) -> PyResult<String> {
        DerivationDocument::from_result(&self.0).to_json().map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Embedding> {
        let (result, checks) = DerivationDocument::parse(text)
            .and_then(|d| d.rebuild(None))
            .map_err(err)?;
        if let Some(bad) = checks.iter().find(|c| !c.passed) {
            return Err(PyValueError::new_err(format!("{}: {}", bad.name, bad.detail)));
        }
        Ok(Embedding(result))
    }
}

/// Targets are dicts such as {"kind": "finite", "pairs": [[5, 7]]}.
#[pyfunction]
#[pyo3(signature = (targets, budget = DEFAULT_BUDGET))]
fn embed(py: Python<'_>, targets: &Bound<'_, PyAny>, budget: u64) -> PyResult<Embedding> {
    let specs: Vec<TargetSpec> = serde_json::from_str(&dumps(targets)?).map_err(json_err)?;
    py.detach(|| pbij::embed(&specs, budget)).map(Embedding).map_err(err)
}

#[pymodule]
fn pbij_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UnresolvedError", m.py().get_type::<UnresolvedError>())?;
    m.add_class::<Map>()?;
    m.add_class::<Embedding>()?;
    m.add_function(wrap_pyfunction!(finite_map, m)?)?;
    m.add_function(wrap_pyfunction!(cofinite_identity, m)?)?;
    m.add_function(wrap_pyfunction!(builtin, m)?)?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(two_involutions, m)?)?;
    m.add_function(wrap_pyfunction!(cancel_involution, m)?)?;
    m.add_function(wrap_pyfunction!(relative_extend, m)?)?;
    m.add_function(wrap_pyfunction!(pair_encode, m)?)?;
    m.add_function(wrap_pyfunction!(pair_decode, m)?)?;
    m.add_function(wrap_pyfunction!(layout_for, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    Ok(())
}

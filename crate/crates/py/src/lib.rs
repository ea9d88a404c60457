//! Python bindings. Rationals come back as `fractions.Fraction`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use wallcross_core::config::{Problem as CoreProblem, ProblemConfig};
use wallcross_core::delta::{delta_exact_small_d, total_change};
use wallcross_core::verify::{run, VerifyOptions};
use wallcross_core::walls::{enumerate_miniwalls, enumerate_separating_classes, WallClass};
use wallcross_core::{Error, H2Class, SurfaceData, SurfaceFlags, Q};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, x: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((x.to_string(),))
}

fn wall_dict<'py>(py: Python<'py>, w: &WallClass) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("xi", w.xi.0.clone())?;
    d.set_item("xi_sq", w.xi_sq)?;
    d.set_item("d", w.d)?;
    d.set_item("e", w.e)?;
    d.set_item("rk_minus", w.rk_minus)?;
    d.set_item("rk_plus", w.rk_plus)?;
    d.set_item("t0", fraction(py, &w.t0)?)?;
    d.set_item("goodness", w.goodness.label())?;
    d.set_item("component_case", w.component_case)?;
    Ok(d)
}

/// A surface lattice: Gram matrix of `H^2(S, Z)` and the canonical class.
#[pyclass(name = "Surface", frozen)]
struct Surface {
    inner: SurfaceData,
}

#[pymethods]
impl Surface {
    #[new]
    #[pyo3(signature = (gram, canonical, n2 = 1))]
    fn new(gram: Vec<Vec<i64>>, canonical: Vec<i64>, n2: u64) -> PyResult<Self> {
        let inner =
            SurfaceData::new(gram, H2Class(canonical), n2, SurfaceFlags::default()).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn p1xp1() -> Self {
        Self {
            inner: SurfaceData::p1xp1(),
        }
    }

    #[getter]
    fn b2(&self) -> usize {
        self.inner.b2()
    }

    #[getter]
    fn k_squared(&self) -> i64 {
        self.inner.k_squared()
    }

    fn pair(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<i64> {
        self.inner.pair(&H2Class(x), &H2Class(y)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface(gram={:?}, canonical={})",
            self.inner.gram(),
            self.inner.canonical()
        )
    }
}

/// A full problem: surface, Chern classes and two polarizations.
#[pyclass(name = "Problem", frozen)]
struct Problem {
    inner: CoreProblem,
}

#[pymethods]
impl Problem {
    /// Parse a JSON problem description.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ProblemConfig::from_json(text)
            .and_then(|c| c.validate())
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn surface(&self) -> Surface {
        Surface {
            inner: self.inner.surface.clone(),
        }
    }

    #[getter]
    fn expected_dim(&self) -> i64 {
        self.inner.chern.expected_dim(&self.inner.surface)
    }

    fn walls<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let p = &self.inner;
        let walls = enumerate_separating_classes(&p.surface, &p.chern, &p.h_minus, &p.h_plus)
            .map_err(err)?;
        let rows = walls
            .iter()
            .map(|w| wall_dict(py, w))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, rows)
    }

    /// Miniwalls `(a, n, m)` of the wall defined by `xi`, using the problem's `C`.
    fn miniwalls<'py>(&self, py: Python<'py>, xi: Vec<i64>) -> PyResult<Bound<'py, PyList>> {
        let p = &self.inner;
        let c =
            p.c.as_ref()
                .ok_or_else(|| PyValueError::new_err("problem has no C"))?;
        let wall = WallClass::from_class(&p.surface, &p.chern, H2Class(xi), &p.h_minus, &p.h_plus)
            .map_err(err)?;
        let rows = enumerate_miniwalls(&p.surface, &p.chern, &wall, c)
            .map_err(err)?
            .iter()
            .map(|m| Ok((fraction(py, &m.a)?, m.n, m.m)))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, rows)
    }

    /// Per-wall polynomials `{(powL, powQ): coef}` and, with `alpha`, the total
    /// change evaluated there.
    #[pyo3(signature = (l, r, alpha = None))]
    fn delta<'py>(
        &self,
        py: Python<'py>,
        l: i64,
        r: i64,
        alpha: Option<Vec<i64>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = &self.inner;
        let total = py
            .detach(|| total_change(&p.surface, &p.chern, &p.h_minus, &p.h_plus, l, r))
            .map_err(err)?;
        let walls = PyList::empty(py);
        for c in &total.contributions {
            let w = wall_dict(py, &c.wall)?;
            let terms = PyDict::new(py);
            for t in &c.delta.terms {
                terms.set_item((t.pow_l, t.pow_q), fraction(py, &t.coef)?)?;
            }
            w.set_item("exact", c.delta.exact)?;
            w.set_item("terms", terms)?;
            walls.append(w)?;
        }
        let out = PyDict::new(py);
        out.set_item("walls", walls)?;
        out.set_item("n2", total.n2)?;
        out.set_item("sign", total.sign)?;
        if let Some(a) = alpha {
            let ev = total.evaluate(&p.surface, &H2Class(a)).map_err(err)?;
            out.set_item("alpha_eval", fraction(py, &ev.value)?)?;
            out.set_item("alpha_eval_kind", ev.label())?;
        }
        Ok(out)
    }

    /// The defining sum for a wall with `d <= 2`, evaluated by the tensor oracle.
    fn delta_exact<'py>(
        &self,
        py: Python<'py>,
        xi: Vec<i64>,
        l: i64,
        r: i64,
        alpha: Vec<i64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = &self.inner;
        let wall = WallClass::from_class(&p.surface, &p.chern, H2Class(xi), &p.h_minus, &p.h_plus)
            .map_err(err)?;
        let v =
            delta_exact_small_d(&p.surface, &p.chern, &wall, l, r, &H2Class(alpha)).map_err(err)?;
        fraction(py, &v)
    }
}

/// Run the self-check suites; returns `{name: (passed, detail)}`.
#[pyfunction]
#[pyo3(signature = (level = 2, seed = 0))]
fn verify<'py>(py: Python<'py>, level: u32, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let rep = py.detach(|| {
        run(
            VerifyOptions {
                level,
                seed,
                mutation: false,
            },
            None,
        )
    });
    let out = PyDict::new(py);
    for s in &rep.suites {
        out.set_item(&s.name, (s.passed, &s.detail))?;
    }
    Ok(out)
}

#[pymodule]
fn wallcross(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

//! Python bindings. Reports come back as plain dicts with the same shape
//! as the CLI's JSON output.

use gtcheck_core::complement::{
    complement_auto, complement_cartesian, complement_dual, renunciation_with_stats, verify_complement, Complement,
    Method, DEFAULT_VERIFY_BOUND,
};
use gtcheck_core::formats::{json, parse_gt, render_dot, render_gt};
use gtcheck_core::gtype::GlobalType as Core;
use gtcheck_core::realisability::{check_p2p_realisable, check_sync_realisable, DEFAULT_BOUND, DEFAULT_MAX_EVENTS};
use gtcheck_core::trace::Msc;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A global type: a finite automaton over communication arrows.
#[pyclass(name = "GlobalType", module = "gtcheck", frozen)]
struct GlobalType {
    inner: Core,
}

#[pymethods]
impl GlobalType {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_gt(text).map(|inner| GlobalType { inner }).map_err(value_error)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    fn render(&self) -> String {
        render_gt(&self.inner)
    }

    fn dot(&self) -> String {
        render_dot(&self.inner)
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &json::classify(&self.inner))
    }

    /// `method` is one of auto, dual, cartesian, renunciation.
    #[pyo3(signature = (method = "auto", check_bound = DEFAULT_VERIFY_BOUND))]
    fn complement(&self, method: &str, check_bound: usize) -> PyResult<GlobalType> {
        let g = &self.inner;
        let c = match method {
            "auto" => complement_auto(g, check_bound).map_err(value_error)?,
            "cartesian" => complement_cartesian(g),
            "dual" => Complement {
                gtype: complement_dual(g).map_err(value_error)?,
                method: Method::Dual,
                determinised: false,
                note: None,
            },
            "renunciation" => Complement {
                gtype: renunciation_with_stats(g).map_err(value_error)?.0,
                method: Method::Renunciation,
                determinised: false,
                note: None,
            },
            other => return Err(value_error(format!("unknown complementation method `{other}`"))),
        };
        Ok(GlobalType { inner: c.gtype })
    }

    /// `msc` is a `;`-separated list of arrows such as `p->q:m1;r->s:m3`.
    #[pyo3(signature = (msc, universal = false))]
    fn member(&self, msc: &str, universal: bool) -> PyResult<bool> {
        let word = self.inner.decl().parse_word(msc).map_err(value_error)?;
        let m = Msc::of(&word);
        Ok(if universal {
            self.inner.member_universal(&m)
        } else {
            self.inner.member_existential(&m)
        })
    }

    #[pyo3(signature = (gbar, max_events = DEFAULT_VERIFY_BOUND))]
    fn verify_complement<'py>(&self, py: Python<'py>, gbar: &GlobalType, max_events: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = verify_complement(&self.inner, &gbar.inner, max_events).map_err(value_error)?;
        to_py(py, &json::verify(self.inner.decl(), &r))
    }

    /// `model` is synch or p2p; the bound and event limit only matter for p2p.
    #[pyo3(signature = (gbar, model = "synch", bound = DEFAULT_BOUND, max_events = DEFAULT_MAX_EVENTS))]
    fn realisable<'py>(
        &self,
        py: Python<'py>,
        gbar: &GlobalType,
        model: &str,
        bound: usize,
        max_events: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let decl = self.inner.decl();
        match model {
            "synch" => {
                let v = check_sync_realisable(&self.inner, &gbar.inner).map_err(value_error)?;
                to_py(py, &json::synch(decl, &v))
            }
            "p2p" => {
                let v = check_p2p_realisable(&self.inner, &gbar.inner, bound, max_events).map_err(value_error)?;
                to_py(py, &json::p2p(decl, &v))
            }
            other => Err(value_error(format!("unknown model `{other}`"))),
        }
    }

    fn __repr__(&self) -> String {
        format!("GlobalType({:?}, states={})", self.inner.name(), self.inner.num_states())
    }
}

#[pymodule]
fn gtcheck(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GlobalType>()?;
    Ok(())
}

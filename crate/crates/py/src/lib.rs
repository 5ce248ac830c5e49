//! Python bindings: presentations, verdicts, normal forms, classification,
//! and the closed-form coefficient conditions, with all results delivered as
//! plain strings, dicts, and lists.
//!
//! Scalars cross the boundary as exact decimal/rational strings (`"-5/16"`,
//! `"alpha^-1*beta"`), never floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use skewpbw::freealg::default_names;
use skewpbw::{
    check_conditions, check_pbw, classify, derive_conditions, extract_coefficients,
    parse_rational, NCPoly, Presentation, SkewError, SkewSystem,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An algebra given by generators and one relation per descending generator
/// pair, with exact rational or symbolic coefficients.
#[pyclass(frozen)]
struct Algebra {
    pres: Presentation,
    system: SkewSystem,
}

impl Algebra {
    fn names(&self) -> Vec<String> {
        self.system.names().to_vec()
    }
}

#[pymethods]
impl Algebra {
    /// Parse a presentation from source text. `assignments` optionally maps
    /// declared parameter names to exact rational strings such as `"1/2"`.
    #[new]
    #[pyo3(signature = (text, assignments=None))]
    fn new(text: &str, assignments: Option<Vec<(String, String)>>) -> PyResult<Self> {
        let mut pres = Presentation::parse(text).map_err(value_error)?;
        if let Some(pairs) = assignments {
            let values = pairs
                .into_iter()
                .map(|(name, value)| {
                    let v = parse_rational(&value)
                        .map_err(|e| value_error(format!("{name}: {e}")))?;
                    Ok((name, v))
                })
                .collect::<PyResult<Vec<_>>>()?;
            pres = pres.substitute(&values).map_err(value_error)?;
        }
        let system = pres.to_system().map_err(value_error)?;
        Ok(Algebra { pres, system })
    }

    /// Generator names, in index order.
    fn generators(&self) -> Vec<String> {
        self.pres.generators().to_vec()
    }

    /// Declared parameters as `(name, invertible)` pairs.
    fn parameters(&self) -> Vec<(String, bool)> {
        self.pres
            .parameters()
            .iter()
            .map(|d| (d.name.clone(), d.unit))
            .collect()
    }

    /// Whether the standard monomials form a basis of the quotient.
    fn is_pbw(&self) -> PyResult<bool> {
        Ok(check_pbw(&self.system).map_err(value_error)?.is_pbw)
    }

    /// Full confluence report: verdict plus one witness per overlap word.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let names = self.names();
        let verdict = check_pbw(&self.system).map_err(value_error)?;
        let overlaps = PyList::empty(py);
        for w in &verdict.witnesses {
            let row = PyDict::new(py);
            row.set_item("word", w.overlap.word().render(&names))?;
            row.set_item("left", w.left.render(&names))?;
            row.set_item("right", w.right.render(&names))?;
            row.set_item("difference", w.difference.render(&names))?;
            row.set_item("resolves", w.resolves())?;
            overlaps.append(row)?;
        }
        let out = PyDict::new(py);
        out.set_item("pbw", verdict.is_pbw)?;
        out.set_item("overlaps", overlaps)?;
        Ok(out)
    }

    /// Reduce an expression over the algebra's symbols to standard form.
    fn normal_form(&self, expr: &str) -> PyResult<String> {
        let poly = self.pres.parse_expr(expr).map_err(value_error)?;
        let (nf, _) = self.system.stred(&poly).map_err(value_error)?;
        Ok(nf.render(&self.names()))
    }

    /// Case classification. The returned dict always carries a `status` key:
    /// `"ok"`, `"refused"` (not confluent), `"indeterminate"` (symbolic
    /// branch undecided), or `"no_case_matched"`.
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        let coeffs = extract_coefficients(&self.system).map_err(value_error)?;
        match classify(&coeffs, &self.system) {
            Ok(c) => {
                out.set_item("status", "ok")?;
                out.set_item("case", c.case.letter().to_string())?;
                out.set_item("subcase", c.subcase)?;
                out.set_item("alpha", c.alpha.to_string())?;
                out.set_item("beta", c.beta.to_string())?;
                out.set_item("gamma", c.gamma.to_string())?;
                out.set_item("notes", c.notes)?;
            }
            Err(SkewError::NotPbw { k, j, i }) => {
                out.set_item("status", "refused")?;
                out.set_item("failing_overlap", (k, j, i))?;
            }
            Err(SkewError::IndeterminateClassification { predicates }) => {
                out.set_item("status", "indeterminate")?;
                out.set_item("undecided_predicates", predicates)?;
            }
            Err(SkewError::NoCaseMatched { alpha, beta, gamma }) => {
                out.set_item("status", "no_case_matched")?;
                out.set_item("alpha", alpha)?;
                out.set_item("beta", beta)?;
                out.set_item("gamma", gamma)?;
            }
            Err(e) => return Err(value_error(e)),
        }
        Ok(out)
    }

    /// Evaluate the ten coefficient conditions at this algebra's
    /// coefficients.
    fn conditions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let coeffs = extract_coefficients(&self.system).map_err(value_error)?;
        let report = check_conditions(&coeffs).map_err(value_error)?;
        let rows = PyList::empty(py);
        for o in &report.outcomes {
            let row = PyDict::new(py);
            row.set_item("label", o.label)?;
            row.set_item("lhs", o.lhs.to_string())?;
            row.set_item("rhs", o.rhs.to_string())?;
            row.set_item("satisfied", o.satisfied)?;
            rows.append(row)?;
        }
        let out = PyDict::new(py);
        out.set_item("outcomes", rows)?;
        out.set_item("all_satisfied", report.all_satisfied)?;
        Ok(out)
    }

    /// Canonical source form of the presentation.
    fn render(&self) -> String {
        self.pres.render()
    }

    fn __repr__(&self) -> String {
        format!(
            "Algebra(generators=[{}], relations={})",
            self.generators().join(", "),
            self.system.rules().count()
        )
    }
}

/// The ten closed-form coefficient identities recovered symbolically from
/// overlap resolution, plus the common cube coefficient.
#[pyfunction]
#[pyo3(name = "derive_conditions")]
fn derive_conditions_py(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let derived = derive_conditions().map_err(value_error)?;
    let names = default_names(3);
    let rows = PyList::empty(py);
    for c in &derived.identities {
        let row = PyDict::new(py);
        row.set_item("label", c.label)?;
        row.set_item("monomial", c.monomial.render(&names))?;
        row.set_item("lhs", c.lhs.to_string())?;
        row.set_item("rhs", c.rhs.to_string())?;
        rows.append(row)?;
    }
    let out = PyDict::new(py);
    out.set_item("identities", rows)?;
    out.set_item("cube_coefficient", derived.cube_coefficient.to_string())?;
    out.set_item(
        "matches_transcription",
        derived.matches_transcription().map_err(value_error)?,
    )?;
    Ok(out)
}

/// Number of standard monomials of total degree `d` over `n` generators.
#[pyfunction]
#[pyo3(name = "count_standard_words")]
fn count_standard_words_py(py: Python<'_>, n: u8, d: u32) -> PyResult<Py<PyAny>> {
    let count = skewpbw::count_standard_words(n, d).to_string();
    // arbitrary precision: hand the decimal string to int()
    let int_type = py.get_type::<pyo3::types::PyInt>();
    Ok(int_type.call1((count,))?.unbind())
}

/// Render an expression's standard form under no relations at all (free
/// algebra identity); useful for checking expression syntax.
#[pyfunction]
fn parse_expression(text: &str, generators: Vec<String>) -> PyResult<String> {
    let header = format!("generators: {}\n", generators.join(", "));
    let n = generators.len();
    let mut body = String::new();
    for i in 0..n {
        for j in (i + 1)..n {
            body.push_str(&format!(
                "{}*{} = {}*{}\n",
                generators[j], generators[i], generators[i], generators[j]
            ));
        }
    }
    let pres = Presentation::parse(&format!("{header}{body}")).map_err(value_error)?;
    let poly: NCPoly = pres.parse_expr(text).map_err(value_error)?;
    Ok(poly.render(&generators))
}

#[pymodule]
fn skewpbw_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_function(wrap_pyfunction!(derive_conditions_py, m)?)?;
    m.add_function(wrap_pyfunction!(count_standard_words_py, m)?)?;
    m.add_function(wrap_pyfunction!(parse_expression, m)?)?;
    Ok(())
}

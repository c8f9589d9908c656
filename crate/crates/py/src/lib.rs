//! Python bindings. Exact values cross the boundary as strings or
//! `fractions.Fraction`-compatible `(numerator, denominator)` string pairs.

// pyo3 0.22 macro expansion trips this on every PyResult signature
#![allow(clippy::useless_conversion)]

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use ptvertex_core::boxconfig::{self, BoxConfig};
use ptvertex_core::cancellation;
use ptvertex_core::exactalg::parse::parse_rational_function;
use ptvertex_core::exactalg::{self, Scalar};
use ptvertex_core::hilbert;
use ptvertex_core::tqft;
use ptvertex_core::vertexcore::{self, Insertions};

create_exception!(ptvertex, Falsified, PyException, "A checked invariant failed.");
create_exception!(ptvertex, NoFit, PyException, "No rational function in the ansatz fits the series.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vertex_err(e: vertexcore::VertexError) -> PyErr {
    match e {
        vertexcore::VertexError::PoleSurvived { .. } => Falsified::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn tqft_err(e: tqft::TqftError) -> PyErr {
    match e {
        tqft::TqftError::NoFit | tqft::TqftError::Underdetermined { .. } => NoFit::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn scalar_pair(x: &Scalar) -> (String, String) {
    (x.numer().to_string(), x.denom().to_string())
}

#[pyclass(module = "ptvertex", frozen, eq, ord, hash)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(boxconfig::Partition);

#[pymethods]
impl Partition {
    #[new]
    fn new(parts: Vec<u32>) -> PyResult<Self> {
        boxconfig::Partition::new(parts).map(Partition).map_err(value_err)
    }

    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        s.parse().map(Partition).map_err(value_err)
    }

    #[staticmethod]
    fn all_of_size(d: u32) -> Vec<Partition> {
        boxconfig::enumerate_partitions(d).into_iter().map(Partition).collect()
    }

    #[getter]
    fn parts(&self) -> Vec<u32> {
        self.0.parts().to_vec()
    }

    fn size(&self) -> u32 {
        self.0.size()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn conjugate(&self) -> Partition {
        Partition(self.0.conjugate())
    }

    fn z(&self) -> String {
        self.0.z().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Partition({:?})", self.0.parts())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Exact rational function of `s1, s2, s3`.
#[pyclass(module = "ptvertex", frozen, eq)]
#[derive(Clone, PartialEq)]
pub struct RationalFunction(exactalg::RationalFunction);

#[pymethods]
impl RationalFunction {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_rational_function(src).map(RationalFunction).map_err(value_err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Value at integer or rational point given as `(num, den)` pairs or ints.
    fn eval(&self, point: [(i64, i64); 3]) -> PyResult<Option<(String, String)>> {
        let pt = point
            .iter()
            .map(|&(n, d)| if d == 0 { Err(value_err("zero denominator")) } else { Ok(exactalg::scalar::frac(n, d)) })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(self.0.eval(&pt).map(|x| scalar_pair(&x)))
    }

    fn specialize_s3(&self, a: i64) -> PyResult<RationalFunction> {
        self.0.specialize_s3(a).map(RationalFunction).map_err(|e| Falsified::new_err(e.to_string()))
    }

    fn at_s3_zero(&self) -> PyResult<RationalFunction> {
        self.0.at_s3_zero().map(RationalFunction).map_err(|e| Falsified::new_err(e.to_string()))
    }

    fn __add__(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &RationalFunction) -> PyResult<RationalFunction> {
        self.0.checked_div(&o.0).map(RationalFunction).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("RationalFunction('{}')", self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Laurent series in `q` with rational-function coefficients.
#[pyclass(module = "ptvertex", frozen)]
#[derive(Clone)]
pub struct QSeries(vertexcore::QSeries);

#[pymethods]
impl QSeries {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(src).map_err(value_err)?;
        vertexcore::QSeries::from_json(&v).map(QSeries).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    /// `None` for an exact (finite) series.
    #[getter]
    fn max_order(&self) -> Option<i64> {
        self.0.max_order()
    }

    fn coeff(&self, n: i64) -> Option<RationalFunction> {
        self.0.coeff(n).map(RationalFunction)
    }

    fn terms(&self) -> Vec<(i64, RationalFunction)> {
        self.0.terms().map(|(n, c)| (n, RationalFunction(c.clone()))).collect()
    }

    fn __str__(&self) -> String {
        self.0.render()
    }

    fn __repr__(&self) -> String {
        format!("QSeries('{}')", self.0.render())
    }
}

/// `num(q) / (q^q_pow prod_r (1 - (-q)^r)^m_r)`.
#[pyclass(module = "ptvertex", frozen)]
#[derive(Clone)]
pub struct RationalQ(tqft::RationalQ);

#[pymethods]
impl RationalQ {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(src).map_err(value_err)?;
        tqft::RationalQ::from_json(&v).map(RationalQ).map_err(tqft_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    #[getter]
    fn cyclo(&self) -> Vec<(u32, u32)> {
        self.0.cyclo.iter().map(|(&r, &m)| (r, m)).collect()
    }

    fn expand(&self, qmax: i64) -> QSeries {
        QSeries(self.0.expand(qmax))
    }

    fn same_function(&self, other: &RationalQ) -> bool {
        self.0.same_function(&other.0)
    }

    fn functional_equation_check(&self, delta: i64, eta_size: i64, eta_len: i64, ins_sum: i64) -> bool {
        tqft::functional_equation_check(&self.0, delta, eta_size, eta_len, ins_sum)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn box_configs(mu: &Partition, length: u32) -> Vec<Vec<u32>> {
    boxconfig::enumerate_box_configs(&mu.0, length).iter().map(|c| c.depths().to_vec()).collect()
}

#[pyfunction]
fn validate_config(mu: &Partition, depths: Vec<u32>) -> PyResult<bool> {
    if depths.len() != mu.0.size() as usize {
        return Err(value_err("one depth per cell"));
    }
    Ok(boxconfig::validate_config_oracle(&BoxConfig::new(mu.0.clone(), depths)))
}

#[pyfunction]
#[pyo3(signature = (mu, qmax, ins = vec![]))]
fn vertex_series(mu: &Partition, qmax: i64, ins: Vec<u32>) -> PyResult<QSeries> {
    vertexcore::vertex_series(&mu.0, &Insertions(ins), qmax).map(QSeries).map_err(vertex_err)
}

/// Specialized series and the largest nonzero order.
#[pyfunction]
#[pyo3(signature = (mu, a, qmax, ins = vec![]))]
fn specialize(mu: &Partition, a: i64, qmax: i64, ins: Vec<u32>) -> PyResult<(QSeries, Option<i64>)> {
    if a < 1 {
        return Err(value_err("a must be at least 1"));
    }
    let (s, rep) = vertexcore::specialize_and_check(&mu.0, &Insertions(ins), a, qmax).map_err(vertex_err)?;
    Ok((QSeries(s), rep.top_nonzero))
}

#[pyfunction]
fn edge_weight(mu: &Partition) -> PyResult<RationalFunction> {
    vertexcore::edge_weight(&mu.0).map(RationalFunction).map_err(value_err)
}

#[pyfunction]
fn contributing_length_bound(mu: &Partition, a: i64) -> u32 {
    cancellation::contributing_length_bound(&mu.0, a)
}

/// Profile label of every configuration of the given length.
#[pyfunction]
fn classify_configs(mu: &Partition, a: i64, length: u32) -> Vec<(Vec<u32>, String, String)> {
    boxconfig::enumerate_box_configs(&mu.0, length)
        .iter()
        .map(|c| {
            let f = boxconfig::f_profile(c, a);
            (c.depths().to_vec(), f.to_string(), cancellation::classify_f(&f).label().to_string())
        })
        .collect()
}

/// `(formula, brute force)` counts of permutations where `F` is nonzero.
#[pyfunction]
fn count_nonvanishing_permutations(a: Vec<usize>) -> PyResult<(u64, Option<u64>)> {
    let c = cancellation::count_nonvanishing_permutations(&a).map_err(value_err)?;
    Ok((c.formula, c.brute))
}

#[pyfunction]
fn hilb_descendent_pairing(ins: Vec<u32>, eta: &Partition) -> PyResult<RationalFunction> {
    hilbert::hilb_descendent_pairing(&Insertions(ins), &eta.0).map(RationalFunction).map_err(value_err)
}

#[pyfunction]
fn nakajima_pairing(eta: &Partition, nu: &Partition) -> PyResult<RationalFunction> {
    if eta.0.size() != nu.0.size() {
        return Ok(RationalFunction(exactalg::RationalFunction::zero()));
    }
    let t = hilbert::nakajima_transition(eta.0.size()).map_err(value_err)?;
    Ok(RationalFunction(t.pairing(&eta.0, &nu.0)))
}

#[pyfunction]
fn nakajima_pairing_closed_form(eta: &Partition, nu: &Partition) -> RationalFunction {
    RationalFunction(hilbert::nakajima_pairing_closed_form(&eta.0, &nu.0))
}

#[pyfunction]
#[pyo3(signature = (series, d, num_degree = None))]
fn fit_rational(series: &QSeries, d: u32, num_degree: Option<i64>) -> PyResult<RationalQ> {
    tqft::fit_rational(&series.0, d, num_degree).map(RationalQ).map_err(tqft_err)
}

#[pyfunction]
fn stationary_reference_series(d: u32) -> PyResult<RationalQ> {
    if d == 0 {
        return Err(value_err("d must be at least 1"));
    }
    Ok(RationalQ(tqft::stationary_reference_series(d)))
}

/// Runs the command-line front-end in process: `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    ptvertex_core::cli::run_from_args(std::iter::once("ptvertex".to_string()).chain(args))
}

#[pymodule]
fn ptvertex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Partition>()?;
    m.add_class::<RationalFunction>()?;
    m.add_class::<QSeries>()?;
    m.add_class::<RationalQ>()?;
    m.add("Falsified", m.py().get_type_bound::<Falsified>())?;
    m.add("NoFit", m.py().get_type_bound::<NoFit>())?;
    m.add_function(wrap_pyfunction!(box_configs, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_series, m)?)?;
    m.add_function(wrap_pyfunction!(specialize, m)?)?;
    m.add_function(wrap_pyfunction!(edge_weight, m)?)?;
    m.add_function(wrap_pyfunction!(contributing_length_bound, m)?)?;
    m.add_function(wrap_pyfunction!(classify_configs, m)?)?;
    m.add_function(wrap_pyfunction!(count_nonvanishing_permutations, m)?)?;
    m.add_function(wrap_pyfunction!(hilb_descendent_pairing, m)?)?;
    m.add_function(wrap_pyfunction!(nakajima_pairing, m)?)?;
    m.add_function(wrap_pyfunction!(nakajima_pairing_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rational, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_reference_series, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}

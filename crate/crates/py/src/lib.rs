//! Python module `mtsc`: probability tables, rate-region bounds and the
//! erasure and Gaussian CEO closed forms.

use mtsc_core::ceo;
use mtsc_core::model::{self, AuxSystem, Casebook, GammaClass, SourceModel, XChannel};
use mtsc_core::regions::{self, EncoderSet, OptimizerConfig, RegionConstraints};
use mtsc_core::{JointPmf, Variable};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: mtsc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[pyclass(name = "JointPmf", frozen)]
struct PyJointPmf(JointPmf);

#[pymethods]
impl PyJointPmf {
    /// `variables` is a list of `(name, size)`; `probs` is row-major with the last variable fastest.
    #[new]
    fn new(variables: Vec<(String, usize)>, probs: Vec<f64>) -> PyResult<Self> {
        let vars = variables.into_iter().map(|(n, s)| Variable::new(n, s)).collect();
        JointPmf::new(vars, probs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn names(&self) -> Vec<String> {
        self.0.names().map(String::from).collect()
    }

    fn probs(&self) -> Vec<f64> {
        self.0.probs().to_vec()
    }

    fn marginalize(&self, keep: Vec<String>) -> PyResult<Self> {
        self.0.marginalize(&refs(&keep)).map(Self).map_err(err)
    }

    fn entropy(&self, vars: Vec<String>) -> PyResult<f64> {
        self.0.entropy(&refs(&vars)).map(|n| n.0).map_err(err)
    }

    fn conditional_entropy(&self, a: Vec<String>, given: Vec<String>) -> PyResult<f64> {
        self.0.conditional_entropy(&refs(&a), &refs(&given)).map(|n| n.0).map_err(err)
    }

    fn mutual_information(&self, a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
        self.0.mutual_information(&refs(&a), &refs(&b)).map(|n| n.0).map_err(err)
    }

    #[pyo3(signature = (a, b, given=Vec::new()))]
    fn conditional_mutual_information(&self, a: Vec<String>, b: Vec<String>, given: Vec<String>) -> PyResult<f64> {
        self.0
            .conditional_mutual_information(&refs(&a), &refs(&b), &refs(&given))
            .map(|n| n.0)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        let vars: Vec<String> = self.0.variables().iter().map(|v| format!("{}[{}]", v.name, v.size)).collect();
        format!("JointPmf({})", vars.join(", "))
    }
}

#[pyclass(name = "SourceModel", frozen)]
struct PySourceModel(SourceModel);

#[pymethods]
impl PySourceModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    /// Binary erasure CEO source with penalty `lam` for wrong guesses.
    #[staticmethod]
    #[pyo3(signature = (p, encoders, lam=model::DEFAULT_LAMBDA))]
    fn erasure(p: f64, encoders: usize, lam: f64) -> PyResult<Self> {
        model::erasure_source(p, encoders, lam).map(Self).map_err(err)
    }

    #[getter]
    fn encoders(&self) -> usize {
        self.0.encoders()
    }

    fn joint(&self) -> PyJointPmf {
        PyJointPmf(self.0.joint().clone())
    }

    fn __repr__(&self) -> String {
        format!("SourceModel(encoders={}, distortions={})", self.0.encoders(), self.0.distortion_count())
    }
}

#[pyclass(name = "AuxSystem", frozen)]
struct PyAuxSystem(AuxSystem);

#[pymethods]
impl PyAuxSystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    /// `E[d_k]` for the 1-based distortion index `k`.
    fn expected_distortion(&self, model: &PySourceModel, k: usize) -> PyResult<f64> {
        model::expected_distortion(&model.0, &self.0, k).map_err(err)
    }

    /// Markov residuals for class `outer`, `bt-inner` or `bt-outer`.
    fn check_class<'py>(&self, py: Python<'py>, model: &PySourceModel, class: &str) -> PyResult<Bound<'py, PyDict>> {
        let class = match class {
            "outer" => GammaClass::Outer,
            "bt-inner" => GammaClass::BtInner,
            "bt-outer" => GammaClass::BtOuter,
            other => return Err(PyValueError::new_err(format!("unknown class `{other}`"))),
        };
        let report = model::check_gamma_class(&model.0, None, &self.0, class).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("pass", report.pass)?;
        let residuals: Vec<(String, f64)> = report.conditions.iter().map(|c| (c.label.clone(), c.residual)).collect();
        d.set_item("residuals", residuals)?;
        Ok(d)
    }
}

#[pyclass(name = "XChannel", frozen)]
struct PyXChannel(XChannel);

#[pymethods]
impl PyXChannel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    /// `X = Y0`.
    #[staticmethod]
    fn hidden(model: &PySourceModel) -> PyResult<Self> {
        XChannel::hidden(&model.0).map(Self).map_err(err)
    }

    /// `X = (Y1..YL)`.
    #[staticmethod]
    fn observations(model: &PySourceModel) -> PyResult<Self> {
        XChannel::observations(&model.0).map(Self).map_err(err)
    }
}

#[pyclass(name = "RegionConstraints", frozen)]
struct PyRegionConstraints(RegionConstraints);

#[pymethods]
impl PyRegionConstraints {
    #[getter]
    fn encoders(&self) -> usize {
        self.0.encoders()
    }

    /// Bound on `sum_{l in members} R_l`; members are 1-based.
    fn bound(&self, members: Vec<usize>) -> PyResult<f64> {
        let a = EncoderSet::from_members(&members).map_err(err)?;
        if !a.is_subset_of(EncoderSet::full(self.0.encoders())) {
            return Err(PyValueError::new_err(format!("{members:?} names an encoder beyond {}", self.0.encoders())));
        }
        Ok(self.0.bound(a))
    }

    /// `[("0b01", bound), ...]` over nonempty subsets.
    fn bounds(&self) -> Vec<(String, f64)> {
        let l = self.0.encoders();
        EncoderSet::nonempty(l).map(|a| (a.to_literal(l), self.0.bound(a))).collect()
    }

    #[getter]
    fn sum_rate(&self) -> f64 {
        self.0.sum_rate()
    }

    #[getter]
    fn distortions(&self) -> Vec<f64> {
        self.0.distortions().to_vec()
    }

    fn min_slack(&self, rates: Vec<f64>) -> PyResult<f64> {
        self.0.min_slack(&rates).map_err(err)
    }

    /// Greedy vertex for a 1-based encoder order.
    fn vertex(&self, order: Vec<usize>) -> PyResult<Vec<f64>> {
        regions::contrapolymatroid_vertex(&self.0, &order).map(|p| p.rates).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("RegionConstraints(encoders={}, sum_rate={})", self.0.encoders(), self.0.sum_rate())
    }
}

/// `(model, gamma, x)` for `toy`, `toy-bt-gamma`, `appendix-c` or `erasure` (needs `p`, `encoders`, `distortion`).
#[pyfunction]
#[pyo3(signature = (name, p=None, encoders=None, distortion=None))]
fn casebook(
    name: &str,
    p: Option<f64>,
    encoders: Option<usize>,
    distortion: Option<f64>,
) -> PyResult<(PySourceModel, PyAuxSystem, Option<PyXChannel>)> {
    let which = match name {
        "toy" => Casebook::Toy,
        "toy-bt-gamma" => Casebook::ToyBtGamma,
        "appendix-c" => Casebook::AppendixC,
        "erasure" => match (p, encoders, distortion) {
            (Some(p), Some(encoders), Some(distortion)) => Casebook::Erasure { p, encoders, distortion },
            _ => return Err(PyValueError::new_err("erasure needs p, encoders and distortion")),
        },
        other => return Err(PyValueError::new_err(format!("unknown casebook entry `{other}`"))),
    };
    let c = model::casebook(which).map_err(err)?;
    Ok((PySourceModel(c.model), PyAuxSystem(c.gamma), c.x.map(PyXChannel)))
}

#[pyfunction]
fn bt_inner_constraints(model: &PySourceModel, gamma: &PyAuxSystem) -> PyResult<PyRegionConstraints> {
    regions::bt_inner_constraints(&model.0, &gamma.0).map(PyRegionConstraints).map_err(err)
}

#[pyfunction]
fn bt_outer_constraints(model: &PySourceModel, gamma: &PyAuxSystem) -> PyResult<PyRegionConstraints> {
    regions::bt_outer_constraints(&model.0, &gamma.0).map(PyRegionConstraints).map_err(err)
}

#[pyfunction]
fn new_outer_constraints(model: &PySourceModel, x: &PyXChannel, gamma: &PyAuxSystem) -> PyResult<PyRegionConstraints> {
    regions::new_outer_constraints(&model.0, &x.0, &gamma.0).map(PyRegionConstraints).map_err(err)
}

#[pyfunction]
fn slepian_wolf_bounds(model: &PySourceModel) -> PyResult<PyRegionConstraints> {
    regions::slepian_wolf_bounds(&model.0).map(PyRegionConstraints).map_err(err)
}

/// Returns `None` when no system meets the caps, else a dict with
/// `sum_rate`, `restart`, `evaluations`, `constraints` and `gamma`.
#[pyfunction]
#[pyo3(signature = (model, caps, budget=10_000, seed=0, restarts=8, cardinalities=None))]
fn optimize_bt_inner_sum_rate<'py>(
    py: Python<'py>,
    model: &PySourceModel,
    caps: Vec<f64>,
    budget: usize,
    seed: u64,
    restarts: usize,
    cardinalities: Option<Vec<usize>>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let mut config = OptimizerConfig::for_model(&model.0);
    config.budget = budget;
    config.seed = seed;
    config.restarts = restarts;
    if let Some(c) = cardinalities {
        config.cardinalities = c;
    }
    let m = &model.0;
    let out = py
        .detach(|| regions::optimize_bt_inner_sum_rate(m, &caps, &config))
        .map_err(err)?;
    let Some(best) = out.best else {
        return Ok(None);
    };
    let d = PyDict::new(py);
    d.set_item("sum_rate", best.sum_rate)?;
    d.set_item("restart", best.restart)?;
    d.set_item("evaluations", out.evaluations)?;
    d.set_item("constraints", PyRegionConstraints(best.constraints))?;
    d.set_item("gamma", PyAuxSystem(best.gamma))?;
    Ok(Some(d))
}

#[pyfunction]
fn g_function(x: f64, p: f64) -> PyResult<f64> {
    ceo::g_function(x, p).map(|n| n.0).map_err(err)
}

#[pyfunction]
fn erasure_sum_rate(p: f64, encoders: usize, distortion: f64) -> PyResult<f64> {
    let params = ceo::ErasureParams::new(p, encoders, distortion).map_err(err)?;
    Ok(ceo::erasure_sum_rate(&params).0)
}

#[pyfunction]
fn noise_info_minimum(p: f64, encoders: usize, distortion: f64) -> PyResult<f64> {
    let params = ceo::ErasureParams::new(p, encoders, distortion).map_err(err)?;
    Ok(ceo::noise_info_minimum(&params).0)
}

/// List of `(D, L, sum_rate_nats)`.
#[pyfunction]
fn erasure_curve(p: f64, encoders: Vec<usize>, points: usize) -> PyResult<Vec<(f64, usize, f64)>> {
    let pts = ceo::erasure_curve(p, &encoders, points).map_err(err)?;
    Ok(pts.iter().map(|c| (c.distortion, c.encoders, c.sum_rate_nats)).collect())
}

/// `(I_joint, I_cond, Pr(Z1 = 0))` of the correlated-flag erasure system.
#[pyfunction]
fn erasure_bt_counterexample() -> PyResult<(f64, f64, f64)> {
    let c = ceo::erasure_bt_counterexample().map_err(err)?;
    Ok((c.i_joint, c.i_cond, c.distortion))
}

fn gaussian_params(sigma2: f64, noise: Vec<f64>) -> PyResult<ceo::GaussianParams> {
    ceo::GaussianParams::new(sigma2, noise).map_err(err)
}

/// `(sum_rate, r)`.
#[pyfunction]
fn gaussian_min_sum_rate(sigma2: f64, noise: Vec<f64>, distortion: f64) -> PyResult<(f64, Vec<f64>)> {
    let s = ceo::gaussian_min_sum_rate(&gaussian_params(sigma2, noise)?, distortion).map_err(err)?;
    Ok((s.sum_rate.0, s.r))
}

#[pyfunction]
fn gaussian_region_contains(sigma2: f64, noise: Vec<f64>, distortion: f64, rates: Vec<f64>, r: Vec<f64>) -> PyResult<bool> {
    let point = regions::RatePoint {
        rates,
        distortions: vec![distortion],
    };
    ceo::gaussian_region_contains(&gaussian_params(sigma2, noise)?, &point, &r).map_err(err)
}

#[pyfunction]
fn oohama_gap(sigma2: f64, noise: Vec<f64>, q: Vec<f64>, members: Vec<usize>) -> PyResult<f64> {
    let a = EncoderSet::from_members(&members).map_err(err)?;
    ceo::oohama_gap(&gaussian_params(sigma2, noise)?, &q, a).map_err(err)
}

/// `(I_joint, I_cond, distortion)` for perturbation variance `sigma_w2`.
#[pyfunction]
fn gaussian_bt_counterexample(sigma_w2: f64) -> PyResult<(f64, f64, f64)> {
    let c = ceo::gaussian_bt_counterexample(sigma_w2).map_err(err)?;
    Ok((c.i_joint, c.i_cond, c.distortion))
}

/// `sigma_w2` whose worst Berger-Tung outer bound sits `margin` below the optimal sum rate.
#[pyfunction]
fn gaussian_counterexample_search(margin: f64) -> PyResult<f64> {
    ceo::gaussian_counterexample_search(margin).map(|c| c.sigma_w2).map_err(err)
}

#[pymodule]
fn mtsc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyJointPmf>()?;
    m.add_class::<PySourceModel>()?;
    m.add_class::<PyAuxSystem>()?;
    m.add_class::<PyXChannel>()?;
    m.add_class::<PyRegionConstraints>()?;
    m.add_function(wrap_pyfunction!(casebook, m)?)?;
    m.add_function(wrap_pyfunction!(bt_inner_constraints, m)?)?;
    m.add_function(wrap_pyfunction!(bt_outer_constraints, m)?)?;
    m.add_function(wrap_pyfunction!(new_outer_constraints, m)?)?;
    m.add_function(wrap_pyfunction!(slepian_wolf_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_bt_inner_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(g_function, m)?)?;
    m.add_function(wrap_pyfunction!(erasure_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(noise_info_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(erasure_curve, m)?)?;
    m.add_function(wrap_pyfunction!(erasure_bt_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_min_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_region_contains, m)?)?;
    m.add_function(wrap_pyfunction!(oohama_gap, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_bt_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_counterexample_search, m)?)?;
    Ok(())
}

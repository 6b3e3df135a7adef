//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers, state vectors as lists of complex numbers, and structured
//! results as dicts shaped like the CLI's JSON output.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qsl_core::bounds::{self, BoundKind, EnergyMode, OptimalKind, Tightness};
use qsl_core::linalg::{self, C64, ComplexMatrix, HermitianOperator};
use qsl_core::montecarlo;
use qsl_core::oracle::{self, RegionSpec};
use qsl_core::states::{self, BasisKind, BlochVector, OrderedBasis, QutritTag};

type PyMat = Vec<Vec<C64>>;

fn to_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &[Vec<C64>]) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(to_err)
}

fn from_matrix(m: &ComplexMatrix) -> PyMat {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn to_hermitian(rows: &[Vec<C64>]) -> PyResult<HermitianOperator> {
    linalg::hermitian_eig(&to_matrix(rows)?).map_err(to_err)
}

fn to_basis(rows: &[Vec<C64>]) -> PyResult<OrderedBasis> {
    OrderedBasis::new(to_matrix(rows)?).map_err(to_err)
}

fn report_dict<'py>(py: Python<'py>, r: &bounds::BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.bound_value)?;
    d.set_item(
        "kind",
        match r.kind {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        },
    )?;
    d.set_item(
        "tight",
        match r.tight {
            Tightness::Tight => "tight",
            Tightness::NotTight => "not_tight",
            Tightness::Unknown => "unknown",
        },
    )?;
    d.set_item("g", r.g_constant)?;
    d.set_item("source", &r.source)?;
    Ok(d)
}

fn parse_basis_kind(kind: &str) -> PyResult<BasisKind> {
    Ok(match kind {
        "computational" => BasisKind::Computational,
        "qutrit_plus" => BasisKind::QutritPlus,
        "qutrit_tilde" => BasisKind::QutritTilde,
        "fourier" => BasisKind::Fourier,
        "hadamard_n" => BasisKind::HadamardN,
        "max_coherent_flat" => BasisKind::MaxCoherentFlat,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown basis kind {other:?}; expected computational, qutrit_plus, \
                 qutrit_tilde, fourier, hadamard_n, or max_coherent_flat"
            )))
        }
    })
}

#[pyfunction]
#[pyo3(signature = (d, energy=1.0))]
fn unbiased_bound<'py>(py: Python<'py>, d: usize, energy: f64) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &bounds::unbiased_bound(d, energy).map_err(to_err)?)
}

#[pyfunction]
#[pyo3(signature = (energy=1.0))]
fn qutrit_tilde_bound<'py>(py: Python<'py>, energy: f64) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &bounds::qutrit_tilde_bound(energy).map_err(to_err)?)
}

#[pyfunction]
#[pyo3(signature = (d, energy=1.0))]
fn perm_bound<'py>(py: Python<'py>, d: usize, energy: f64) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &bounds::perm_bound(d, energy).map_err(to_err)?)
}

#[pyfunction]
#[pyo3(signature = (n, energy=1.0))]
fn nqubit_upper_bound<'py>(
    py: Python<'py>,
    n: usize,
    energy: f64,
) -> PyResult<(Bound<'py, PyDict>, f64)> {
    let (report, non_interacting) = bounds::nqubit_upper_bound(n, energy).map_err(to_err)?;
    Ok((report_dict(py, &report)?, non_interacting))
}

#[pyfunction]
#[pyo3(signature = (psi0, psi1, energy=1.0, mode="mean"))]
fn pure_state_bound<'py>(
    py: Python<'py>,
    psi0: Vec<C64>,
    psi1: Vec<C64>,
    energy: f64,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = match mode {
        "mean" => EnergyMode::MeanEnergy,
        "gap" => EnergyMode::Gap,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown energy mode {other:?}; expected mean or gap"
            )))
        }
    };
    report_dict(
        py,
        &bounds::pure_state_bound(&psi0, &psi1, energy, mode).map_err(to_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (psi, energy=1.0))]
fn mc_speed_limit<'py>(py: Python<'py>, psi: Vec<C64>, energy: f64) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &bounds::mc_speed_limit(&psi, energy).map_err(to_err)?)
}

#[pyfunction]
#[pyo3(signature = (r0, r1, energy=1.0))]
fn qubit_transition_bound<'py>(
    py: Python<'py>,
    r0: [f64; 3],
    r1: [f64; 3],
    energy: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r0 = BlochVector::new(r0).map_err(to_err)?;
    let r1 = BlochVector::new(r1).map_err(to_err)?;
    report_dict(
        py,
        &bounds::qubit_transition_bound(&r0, &r1, energy).map_err(to_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (r0, r1, energy=1.0))]
fn optimal_qubit_hamiltonian(r0: [f64; 3], r1: [f64; 3], energy: f64) -> PyResult<PyMat> {
    let r0 = BlochVector::new(r0).map_err(to_err)?;
    let r1 = BlochVector::new(r1).map_err(to_err)?;
    let h = bounds::optimal_qubit_hamiltonian(&r0, &r1, energy).map_err(to_err)?;
    Ok(from_matrix(h.matrix()))
}

#[pyfunction]
fn mean_energy(h: PyMat) -> PyResult<f64> {
    Ok(bounds::mean_energy(&to_hermitian(&h)?))
}

#[pyfunction]
#[pyo3(signature = (kind, n=None))]
fn construct_optimal(kind: &str, n: Option<usize>) -> PyResult<PyMat> {
    let kind = match (kind, n) {
        ("qutrit_plus", _) => OptimalKind::QutritPlus,
        ("qutrit_tilde", _) => OptimalKind::QutritTilde,
        ("two_qubit", _) => OptimalKind::TwoQubit,
        ("hadamard", Some(n)) => OptimalKind::NQubitHadamard(n),
        ("hadamard", None) => {
            return Err(PyValueError::new_err("hadamard needs the qubit count n"))
        }
        (other, _) => {
            return Err(PyValueError::new_err(format!(
                "unknown construction {other:?}; expected qutrit_plus, qutrit_tilde, \
                 two_qubit, or hadamard"
            )))
        }
    };
    let h = bounds::construct_optimal(&kind).map_err(to_err)?;
    Ok(from_matrix(h.matrix()))
}

#[pyfunction]
fn pure_state_hamiltonian(psi0: Vec<C64>, psi1: Vec<C64>) -> PyResult<PyMat> {
    let h = bounds::construct_optimal(&OptimalKind::PureState(psi0, psi1)).map_err(to_err)?;
    Ok(from_matrix(h.matrix()))
}

#[pyfunction]
#[pyo3(signature = (h, t, src, dst, tolerance=1e-9))]
fn achieves_transform<'py>(
    py: Python<'py>,
    h: PyMat,
    t: f64,
    src: PyMat,
    dst: PyMat,
    tolerance: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let chk = bounds::achieves_transform(
        &to_hermitian(&h)?,
        t,
        &to_basis(&src)?,
        &to_basis(&dst)?,
        tolerance,
    )
    .map_err(to_err)?;
    let d = PyDict::new(py);
    d.set_item("achieved", chk.achieved)?;
    d.set_item("max_column_error", chk.max_column_error)?;
    d.set_item("recovered_phases", chk.recovered_phases)?;
    Ok(d)
}

#[pyfunction]
fn saturation_suite<'py>(py: Python<'py>, hadamard_max_n: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    bounds::saturation_suite(hadamard_max_n)
        .map_err(to_err)?
        .iter()
        .map(|case| {
            let d = PyDict::new(py);
            d.set_item("name", &case.name)?;
            d.set_item("hamiltonian", from_matrix(case.hamiltonian.matrix()))?;
            d.set_item("target", from_matrix(case.target.matrix()))?;
            d.set_item("time", case.time)?;
            d.set_item("expected_et", case.expected_et)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn constraint_check(h: PyMat, t: f64) -> PyResult<(f64, bool)> {
    Ok(bounds::constraint_check(&to_hermitian(&h)?, t))
}

#[pyfunction]
fn fmin(h: PyMat, t: f64) -> PyResult<(f64, Vec<C64>)> {
    bounds::fmin(&to_hermitian(&h)?, t).map_err(to_err)
}

#[pyfunction]
#[pyo3(signature = (rho, energy=1.0, t=0.0))]
fn coherence_max_qubit(rho: PyMat, energy: f64, t: f64) -> PyResult<f64> {
    bounds::coherence_max_qubit(&to_matrix(&rho)?, energy, t).map_err(to_err)
}

#[pyfunction]
#[pyo3(signature = (rho, energy=1.0))]
fn t_mc(rho: PyMat, energy: f64) -> PyResult<f64> {
    bounds::t_mc(&to_matrix(&rho)?, energy).map_err(to_err)
}

#[pyfunction]
fn d6_refined_g() -> f64 {
    bounds::d6_refined_g()
}

#[pyfunction]
fn l1_coherence(rho: PyMat) -> PyResult<f64> {
    states::l1_coherence(&to_matrix(&rho)?).map_err(to_err)
}

#[pyfunction]
fn max_mc_overlap(psi: Vec<C64>) -> PyResult<f64> {
    states::max_mc_overlap(&psi).map_err(to_err)
}

#[pyfunction]
fn standard_basis(kind: &str, size: usize) -> PyResult<PyMat> {
    let basis = states::standard_basis(parse_basis_kind(kind)?, size).map_err(to_err)?;
    Ok(from_matrix(basis.matrix()))
}

#[pyfunction]
#[pyo3(signature = (a, b, tolerance=1e-9))]
fn is_unbiased(a: PyMat, b: PyMat, tolerance: f64) -> PyResult<bool> {
    states::is_unbiased(&to_basis(&a)?, &to_basis(&b)?, tolerance).map_err(to_err)
}

#[pyfunction]
fn classify_qutrit<'py>(py: Python<'py>, basis: PyMat) -> PyResult<Bound<'py, PyDict>> {
    let class = states::classify_qutrit_unbiased(&to_basis(&basis)?).map_err(to_err)?;
    let d = PyDict::new(py);
    d.set_item(
        "class",
        match class.class_tag {
            QutritTag::Plus => "plus",
            QutritTag::Tilde => "tilde",
        },
    )?;
    d.set_item("diagonal_phases", class.diagonal_phases)?;
    d.set_item("element_phases", class.element_phases)?;
    Ok(d)
}

#[pyfunction]
fn mat_exp(h: PyMat, t: f64) -> PyResult<PyMat> {
    Ok(from_matrix(linalg::mat_exp(&to_hermitian(&h)?, t).matrix()))
}

#[pyfunction]
fn eigenphases(u: PyMat) -> PyResult<Vec<f64>> {
    Ok(linalg::unitary_eigphases(&to_matrix(&u)?)
        .map_err(to_err)?
        .eigenphases()
        .to_vec())
}

#[pyfunction]
fn cyclic_shift(d: usize) -> PyMat {
    from_matrix(&linalg::cyclic_shift(d))
}

#[pyfunction]
fn unitary_root(u: PyMat, k: u32) -> PyResult<PyMat> {
    let u = linalg::unitary_eigphases(&to_matrix(&u)?).map_err(to_err)?;
    Ok(from_matrix(&linalg::unitary_root(&u, k)))
}

#[pyfunction]
fn et_from_unitary(u: PyMat) -> PyResult<(f64, Vec<bool>)> {
    let u = linalg::unitary_eigphases(&to_matrix(&u)?).map_err(to_err)?;
    montecarlo::et_from_unitary(&u).map_err(to_err)
}

fn parse_target(target: &str) -> PyResult<BasisKind> {
    match target {
        "plus" => Ok(BasisKind::QutritPlus),
        "tilde" => Ok(BasisKind::QutritTilde),
        other => Err(PyValueError::new_err(format!(
            "unknown target {other:?}; expected plus or tilde"
        ))),
    }
}

#[pyfunction]
#[pyo3(signature = (target, samples=100_000, seed=42, bins=200))]
fn sample_basis<'py>(
    py: Python<'py>,
    target: &str,
    samples: u64,
    seed: u64,
    bins: usize,
) -> PyResult<Bound<'py, PyDict>> {
    parse_target(target)?;
    let hist = match target {
        "plus" => montecarlo::sample_plus(samples, seed, bins),
        _ => montecarlo::sample_tilde(samples, seed, bins),
    }
    .map_err(to_err)?;
    let d = PyDict::new(py);
    d.set_item("bin_edges", hist.bin_edges)?;
    d.set_item("counts", hist.counts)?;
    d.set_item("n_samples", hist.n_samples)?;
    d.set_item("min_et", hist.min_et)?;
    d.set_item("seed", hist.seed)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (target, seed=42, index=0))]
fn sample_record<'py>(
    py: Python<'py>,
    target: &str,
    seed: u64,
    index: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let basis = states::standard_basis(parse_target(target)?, 3).map_err(to_err)?;
    let rec = montecarlo::sample_record(&basis, seed, index).map_err(to_err)?;
    let d = PyDict::new(py);
    d.set_item("phases", rec.phases)?;
    d.set_item("eigenphases", rec.eigenphases)?;
    d.set_item("branch_bits", rec.branch_bits)?;
    d.set_item("et", rec.et)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (d, sum_cap, grid=64))]
fn minimize_cos_sum<'py>(
    py: Python<'py>,
    d: usize,
    sum_cap: f64,
    grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let region = RegionSpec::new(d, sum_cap).map_err(to_err)?;
    let result = oracle::minimize_cos_sum(&region, grid).map_err(to_err)?;
    let out = PyDict::new(py);
    out.set_item("min_value", result.min_value)?;
    out.set_item("argmin", result.argmin)?;
    out.set_item("grid", result.grid_resolution)?;
    out.set_item("refined", result.refined)?;
    Ok(out)
}

#[pyfunction]
fn verify_theorem4(d: usize) -> PyResult<bool> {
    oracle::verify_theorem4(d).map_err(to_err)
}

#[pyfunction]
fn verify_d6_refinement() -> PyResult<bool> {
    oracle::verify_d6_refinement().map_err(to_err)
}

#[pyfunction]
fn min_et_for_transform(dst: PyMat, phase_grid: usize) -> PyResult<f64> {
    oracle::min_et_for_transform(&to_basis(&dst)?, phase_grid).map_err(to_err)
}

#[pymodule]
fn pyqsl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(unbiased_bound, m)?)?;
    m.add_function(wrap_pyfunction!(qutrit_tilde_bound, m)?)?;
    m.add_function(wrap_pyfunction!(perm_bound, m)?)?;
    m.add_function(wrap_pyfunction!(nqubit_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pure_state_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mc_speed_limit, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_transition_bound, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_qubit_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(mean_energy, m)?)?;
    m.add_function(wrap_pyfunction!(construct_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(pure_state_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(achieves_transform, m)?)?;
    m.add_function(wrap_pyfunction!(saturation_suite, m)?)?;
    m.add_function(wrap_pyfunction!(constraint_check, m)?)?;
    m.add_function(wrap_pyfunction!(fmin, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_max_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(t_mc, m)?)?;
    m.add_function(wrap_pyfunction!(d6_refined_g, m)?)?;
    m.add_function(wrap_pyfunction!(l1_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(max_mc_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(standard_basis, m)?)?;
    m.add_function(wrap_pyfunction!(is_unbiased, m)?)?;
    m.add_function(wrap_pyfunction!(classify_qutrit, m)?)?;
    m.add_function(wrap_pyfunction!(mat_exp, m)?)?;
    m.add_function(wrap_pyfunction!(eigenphases, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_shift, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_root, m)?)?;
    m.add_function(wrap_pyfunction!(et_from_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(sample_basis, m)?)?;
    m.add_function(wrap_pyfunction!(sample_record, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_cos_sum, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem4, m)?)?;
    m.add_function(wrap_pyfunction!(verify_d6_refinement, m)?)?;
    m.add_function(wrap_pyfunction!(min_et_for_transform, m)?)?;
    Ok(())
}

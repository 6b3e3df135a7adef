//! Closed-form speed-limit bounds, the explicit optimal Hamiltonians that
//! saturate them, and saturation/constraint checkers.
//!
//! Every bound is normalized as T >= g / E (or T <= g / E for upper bounds),
//! where E = Tr[H]/d - E_0 is the mean energy above the ground state. The
//! dimensionless numerator g is reported alongside the value so energy
//! rescaling is exact.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, kron, mat_exp, pauli_x, pauli_y, pauli_z, ComplexMatrix, HermitianOperator,
    LinalgError, C64,
};
use crate::states::{
    bloch_from_state, density_from_vector, standard_basis, BasisKind, BlochVector, OrderedBasis,
    StatesError,
};
use crate::tol;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("Bloch vector has zero length")]
    ZeroBlochVector,
    #[error("maximally mixed input has no transition direction")]
    MaximallyMixedInput,
    #[error("energy scale must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("dimension {0} is not supported here")]
    BadDimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("time {t} outside the admissible range [0, {max}]")]
    TimeOutOfRange { t: f64, max: f64 },
    #[error("conjugating matrix is not a diagonal unitary (defect {0:.3e})")]
    NotDiagonalUnitary(f64),
    #[error("bound denominator vanishes")]
    ZeroDenominator,
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tightness {
    Tight,
    NotTight,
    Unknown,
}

/// A computed bound T >= g/E (lower) or T <= g/E (upper).
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    #[serde(rename = "value")]
    pub bound_value: f64,
    pub kind: BoundKind,
    pub tight: Tightness,
    #[serde(rename = "g")]
    pub g_constant: f64,
    pub source: String,
}

impl BoundReport {
    fn new(g: f64, energy: f64, kind: BoundKind, tight: Tightness, source: &str) -> Self {
        Self {
            bound_value: g / energy,
            kind,
            tight,
            g_constant: g,
            source: source.to_string(),
        }
    }
}

/// Result of testing whether exp(-iHt) maps one ordered basis onto another
/// up to per-column phases.
#[derive(Clone, Debug)]
pub struct TransformCheck {
    pub achieved: bool,
    pub max_column_error: f64,
    pub recovered_phases: Vec<f64>,
}

fn check_energy(energy: f64) -> Result<(), BoundsError> {
    if energy > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::NonPositiveEnergy(energy))
    }
}

fn check_state(psi: &[C64]) -> Result<(), BoundsError> {
    let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > tol::EQUALITY {
        return Err(StatesError::NotNormalized(n2).into());
    }
    Ok(())
}

/// Mean energy above the ground state, E = Tr[H]/d - E_0.
pub fn mean_energy(h: &HermitianOperator) -> f64 {
    h.matrix().trace().re / h.dim() as f64 - h.e0()
}

fn unit(r: &BlochVector) -> Result<[f64; 3], BoundsError> {
    let n = r.norm();
    if n <= 1e-14 {
        return Err(BoundsError::ZeroBlochVector);
    }
    let [x, y, z] = r.components();
    Ok([x / n, y / n, z / n])
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Minimal time for rotating Bloch vector r0 onto the ray of r1:
/// T >= arccos(r0.r1 / |r0||r1|) / (2E). Tight for qubits.
pub fn qubit_transition_bound(
    r0: &BlochVector,
    r1: &BlochVector,
    energy: f64,
) -> Result<BoundReport, BoundsError> {
    check_energy(energy)?;
    let u0 = unit(r0)?;
    let u1 = unit(r1)?;
    let g = dot3(u0, u1).clamp(-1.0, 1.0).acos() / 2.0;
    Ok(BoundReport::new(
        g,
        energy,
        BoundKind::Lower,
        Tightness::Tight,
        "qubit Bloch-rotation bound (tight)",
    ))
}

/// Hamiltonian E n.sigma + E that rotates r0 onto r1 in exactly the
/// qubit_transition_bound time; its ground energy is 0 and mean energy E.
///
/// When r0 and r1 are (anti)parallel the rotation axis is ambiguous; the
/// lowest-index coordinate axis not parallel to r0 is then orthogonalized
/// against r0 and used, deterministically.
pub fn optimal_qubit_hamiltonian(
    r0: &BlochVector,
    r1: &BlochVector,
    energy: f64,
) -> Result<HermitianOperator, BoundsError> {
    check_energy(energy)?;
    let u0 = unit(r0)?;
    let u1 = unit(r1)?;
    let c = cross3(u0, u1);
    let c_norm = dot3(c, c).sqrt();
    let axis = if c_norm > 1e-12 {
        [c[0] / c_norm, c[1] / c_norm, c[2] / c_norm]
    } else {
        let mut fallback = [0.0; 3];
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            if dot3(e, u0).abs() < 1.0 - 1e-12 {
                let proj = dot3(e, u0);
                let mut w = [e[0] - proj * u0[0], e[1] - proj * u0[1], e[2] - proj * u0[2]];
                let wn = dot3(w, w).sqrt();
                w = [w[0] / wn, w[1] / wn, w[2] / wn];
                fallback = w;
                break;
            }
        }
        fallback
    };
    let n_sigma = pauli_x()
        .scale(C64::new(axis[0], 0.0))
        .add(&pauli_y().scale(C64::new(axis[1], 0.0)))
        .add(&pauli_z().scale(C64::new(axis[2], 0.0)));
    let h = n_sigma
        .scale(C64::new(energy, 0.0))
        .add(&ComplexMatrix::identity(2).scale(C64::new(energy, 0.0)));
    Ok(hermitian_eig(&h)?)
}

/// Mixed-qubit bound arccos[(2Tr[rho0 rho1]-1)/sqrt((2Tr[rho0^2]-1)(2Tr[rho1^2]-1))] / 2E.
/// Coincides with `qubit_transition_bound` on the same states.
pub fn mixed_qubit_bound(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    energy: f64,
) -> Result<BoundReport, BoundsError> {
    check_energy(energy)?;
    crate::states::is_density_matrix(rho0)?;
    crate::states::is_density_matrix(rho1)?;
    if rho0.dim() != 2 || rho1.dim() != 2 {
        return Err(BoundsError::BadDimension(rho0.dim().max(rho1.dim())));
    }
    let p0 = 2.0 * rho0.mul(rho0).trace().re - 1.0;
    let p1 = 2.0 * rho1.mul(rho1).trace().re - 1.0;
    if p0 <= 1e-12 || p1 <= 1e-12 {
        return Err(BoundsError::MaximallyMixedInput);
    }
    let overlap = 2.0 * rho0.mul(rho1).trace().re - 1.0;
    let g = (overlap / (p0 * p1).sqrt()).clamp(-1.0, 1.0).acos() / 2.0;
    Ok(BoundReport::new(
        g,
        energy,
        BoundKind::Lower,
        Tightness::Tight,
        "mixed-qubit purity-normalized bound (tight)",
    ))
}

/// Energy normalization mode for `pure_state_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyMode {
    /// Divide by d * E with E the mean energy; tight.
    MeanEnergy,
    /// Divide by the spectral width E_gap; tightness unknown.
    Gap,
}

/// Pure-state conversion bound T >= arccos(2|<psi0|psi1>|^2 - 1) / (dE)
/// (mean-energy mode) or the same numerator over E_gap (gap mode).
pub fn pure_state_bound(
    psi0: &[C64],
    psi1: &[C64],
    energy: f64,
    mode: EnergyMode,
) -> Result<BoundReport, BoundsError> {
    if psi0.len() != psi1.len() {
        return Err(BoundsError::DimMismatch(psi0.len(), psi1.len()));
    }
    check_state(psi0)?;
    check_state(psi1)?;
    check_energy(energy)?;
    let overlap: C64 = psi0.iter().zip(psi1).map(|(a, b)| a.conj() * b).sum();
    let theta = (2.0 * overlap.norm_sqr() - 1.0).clamp(-1.0, 1.0).acos();
    let d = psi0.len() as f64;
    Ok(match mode {
        EnergyMode::MeanEnergy => BoundReport::new(
            theta / d,
            energy,
            BoundKind::Lower,
            Tightness::Tight,
            "pure-state mean-energy bound (tight)",
        ),
        EnergyMode::Gap => BoundReport::new(
            theta,
            energy,
            BoundKind::Lower,
            Tightness::Unknown,
            "pure-state spectral-width bound",
        ),
    })
}

/// Minimal survival amplitude over initial states, F_min = |e^{-i E_gap t} + 1| / 2,
/// attained by (|E_0> + |E_{d-1}>)/sqrt(2). Valid for 0 <= t <= pi / E_gap.
pub fn fmin(h: &HermitianOperator, t: f64) -> Result<(f64, Vec<C64>), BoundsError> {
    let gap = h.e_gap();
    let max_t = if gap > 0.0 { PI / gap } else { f64::INFINITY };
    if !(0.0..=max_t).contains(&t) {
        return Err(BoundsError::TimeOutOfRange { t, max: max_t });
    }
    let value = 0.5 * (C64::cis(-gap * t) + C64::ONE).norm();
    let d = h.dim();
    let psi_min = if d == 1 {
        h.eigenvectors().column(0)
    } else {
        let lo = h.eigenvectors().column(0);
        let hi = h.eigenvectors().column(d - 1);
        let s = 1.0 / 2f64.sqrt();
        lo.iter().zip(&hi).map(|(a, b)| (a + b) * s).collect()
    };
    Ok((value, psi_min))
}

/// The g constant of the d=6 refined lower bound, arccos((4 - sqrt 6)/2) / 3.
pub fn d6_refined_g() -> f64 {
    ((4.0 - 6f64.sqrt()) / 2.0).acos() / 3.0
}

/// Lower bound on the time to reach any basis unbiased to the computational
/// one, by dimension: tight values for d in {2, 3, 4}, the refined constant
/// for d = 6, and the strict general bound pi(d-1)/(4d) otherwise.
pub fn unbiased_bound(d: usize, energy: f64) -> Result<BoundReport, BoundsError> {
    if d < 2 {
        return Err(BoundsError::BadDimension(d));
    }
    check_energy(energy)?;
    let (g, tight, source) = match d {
        2 => (PI / 4.0, Tightness::Tight, "single-qubit unbiased-basis bound (tight)"),
        3 => (
            2.0 * PI / 9.0,
            Tightness::Tight,
            "qutrit unbiased-basis bound (tight for the plus class)",
        ),
        4 => (PI / 4.0, Tightness::Tight, "two-qubit unbiased-basis bound (tight)"),
        6 => (
            d6_refined_g(),
            Tightness::Unknown,
            "refined d=6 lower bound arccos((4-sqrt6)/2)/3",
        ),
        _ => (
            PI * (d as f64 - 1.0) / (4.0 * d as f64),
            Tightness::Unknown,
            "general-dimension strict lower bound pi(d-1)/(4d)",
        ),
    };
    Ok(BoundReport::new(g, energy, BoundKind::Lower, tight, source))
}

/// Conjectured tight bound 4pi/9E for the tilde-class qutrit basis
/// (numerical evidence; sampled excess below 1e-5).
pub fn qutrit_tilde_bound(energy: f64) -> Result<BoundReport, BoundsError> {
    check_energy(energy)?;
    Ok(BoundReport::new(
        4.0 * PI / 9.0,
        energy,
        BoundKind::Lower,
        Tightness::Unknown,
        "tilde-class qutrit bound (numerical evidence only)",
    ))
}

/// Upper bound pi/(2E) on reaching the n-qubit Hadamard basis, via the
/// tensor-power Hadamard Hamiltonian; also returns the non-interacting
/// comparison time n pi/(4E).
pub fn nqubit_upper_bound(n: usize, energy: f64) -> Result<(BoundReport, f64), BoundsError> {
    if n < 1 {
        return Err(BoundsError::BadDimension(n));
    }
    check_energy(energy)?;
    let report = BoundReport::new(
        PI / 2.0,
        energy,
        BoundKind::Upper,
        Tightness::Unknown,
        "n-qubit Hadamard construction (transform achieved at exactly pi/(2E))",
    );
    let non_interacting = n as f64 * PI / (4.0 * energy);
    Ok((report, non_interacting))
}

/// Lower bound pi(d-1)/(dE) on any nontrivial basis permutation;
/// saturated by the cyclic shift.
pub fn perm_bound(d: usize, energy: f64) -> Result<BoundReport, BoundsError> {
    if d < 2 {
        return Err(BoundsError::BadDimension(d));
    }
    check_energy(energy)?;
    Ok(BoundReport::new(
        PI * (d as f64 - 1.0) / d as f64,
        energy,
        BoundKind::Lower,
        Tightness::Tight,
        "basis permutation bound (saturated at pi(d-1)/(dE) or never)",
    ))
}

/// Necessary condition for H to generate an unbiased-basis transform at
/// time t: |sum_i cos(E_i t)| <= sqrt(d). Returns (value, satisfied).
pub fn constraint_check(h: &HermitianOperator, t: f64) -> (f64, bool) {
    let value: f64 = h.eigenvalues().iter().map(|&e| (e * t).cos()).sum();
    let satisfied = value.abs() <= (h.dim() as f64).sqrt() + tol::INEQ_SLACK;
    (value, satisfied)
}

/// The explicit optimal Hamiltonians.
#[derive(Clone, Debug)]
pub enum OptimalKind {
    /// Rank-1 projector saturating the plus-class qutrit bound at Et = 2pi/9.
    QutritPlus,
    /// Negative rank-1 projector saturating the tilde-class value Et = 4pi/9.
    QutritTilde,
    /// Two-qubit Hamiltonian -x(x)z + y(x)y - z(x)x, tight at Et = pi/4.
    TwoQubit,
    /// Tensor power of the Hadamard gate on n qubits, Et = pi/2.
    NQubitHadamard(usize),
    /// Rank-1 projector achieving psi0 -> psi1 at the pure-state bound.
    PureState(Vec<C64>, Vec<C64>),
}

fn qutrit_alpha(sign: f64) -> Vec<C64> {
    let s = 1.0 / 3f64.sqrt();
    vec![
        C64::new(s, 0.0),
        C64::cis(sign * 2.0 * PI / 3.0) * s,
        C64::new(s, 0.0),
    ]
}

/// Builds the requested optimal Hamiltonian with its eigensystem.
pub fn construct_optimal(kind: &OptimalKind) -> Result<HermitianOperator, BoundsError> {
    let m = match kind {
        OptimalKind::QutritPlus => density_from_vector(&qutrit_alpha(-1.0)),
        OptimalKind::QutritTilde => {
            density_from_vector(&qutrit_alpha(1.0)).scale(C64::new(-1.0, 0.0))
        }
        OptimalKind::TwoQubit => {
            let xz = kron(&pauli_x(), &pauli_z())?;
            let yy = kron(&pauli_y(), &pauli_y())?;
            let zx = kron(&pauli_z(), &pauli_x())?;
            yy.sub(&xz).sub(&zx)
        }
        OptimalKind::NQubitHadamard(n) => {
            if *n < 1 {
                return Err(BoundsError::BadDimension(*n));
            }
            let mut m = ComplexMatrix::identity(1);
            for _ in 0..*n {
                m = kron(&m, &crate::linalg::hadamard())?;
            }
            m
        }
        OptimalKind::PureState(psi0, psi1) => {
            if psi0.len() != psi1.len() {
                return Err(BoundsError::DimMismatch(psi0.len(), psi1.len()));
            }
            check_state(psi0)?;
            check_state(psi1)?;
            let overlap: C64 = psi0.iter().zip(psi1).map(|(a, b)| a.conj() * b).sum();
            let o = overlap.norm();
            if o >= 1.0 - 1e-12 {
                density_from_vector(psi0)
            } else {
                // Work in the plane spanned by psi0 and the rephased psi1:
                // the generator is the in-plane state whose Bloch axis
                // rotates one onto the other.
                let phase = if o > 0.0 { overlap / o } else { C64::ONE };
                let u = psi0.clone();
                let norm_v = (1.0 - o * o).sqrt();
                let v: Vec<C64> = psi1
                    .iter()
                    .zip(&u)
                    .map(|(b, a)| (b * phase.conj() - o * a) / norm_v)
                    .collect();
                let s = 1.0 / 2f64.sqrt();
                let phi: Vec<C64> = u
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a + C64::new(0.0, 1.0) * b) * s)
                    .collect();
                density_from_vector(&phi)
            }
        }
    };
    Ok(hermitian_eig(&m)?)
}

/// Tests whether exp(-iHt) maps src column-wise onto dst up to phases:
/// achieved iff every |<dst_j| e^{-iHt} |src_j>| = 1 within the tolerance.
pub fn achieves_transform(
    h: &HermitianOperator,
    t: f64,
    src: &OrderedBasis,
    dst: &OrderedBasis,
    tolerance: f64,
) -> Result<TransformCheck, BoundsError> {
    if h.dim() != src.dim() {
        return Err(BoundsError::DimMismatch(h.dim(), src.dim()));
    }
    if src.dim() != dst.dim() {
        return Err(BoundsError::DimMismatch(src.dim(), dst.dim()));
    }
    let u = mat_exp(h, t);
    let overlaps = dst.matrix().dagger().mul(u.matrix()).mul(src.matrix());
    let d = src.dim();
    let mut max_err: f64 = 0.0;
    let mut phases = Vec::with_capacity(d);
    for j in 0..d {
        let o = overlaps.get(j, j);
        max_err = max_err.max((1.0 - o.norm()).abs());
        phases.push(o.arg());
    }
    Ok(TransformCheck {
        achieved: max_err <= tolerance,
        max_column_error: max_err,
        recovered_phases: phases,
    })
}

/// Conjugates H by a diagonal unitary V, returning V H V^dag. The mean
/// energy and spectrum are unchanged; targets rotate with V.
pub fn conjugate_hamiltonian(
    h: &HermitianOperator,
    v: &ComplexMatrix,
) -> Result<HermitianOperator, BoundsError> {
    if v.dim() != h.dim() {
        return Err(BoundsError::DimMismatch(v.dim(), h.dim()));
    }
    let mut defect: f64 = 0.0;
    for i in 0..v.dim() {
        for j in 0..v.dim() {
            if i == j {
                defect = defect.max((v.get(i, i).norm() - 1.0).abs());
            } else {
                defect = defect.max(v.get(i, j).norm());
            }
        }
    }
    if defect > 1e-12 {
        return Err(BoundsError::NotDiagonalUnitary(defect));
    }
    Ok(hermitian_eig(&v.mul(h.matrix()).mul(&v.dagger()))?)
}

/// Largest l1 coherence reachable from rho within time t under any
/// Hamiltonian of mean energy E: |r| cos(arcsin(|r_z|/|r|) - 2Et), saturating
/// at |r| once the Bloch vector reaches the maximally coherent plane.
pub fn coherence_max_qubit(rho: &ComplexMatrix, energy: f64, t: f64) -> Result<f64, BoundsError> {
    check_energy(energy)?;
    if t < 0.0 {
        return Err(BoundsError::TimeOutOfRange {
            t,
            max: f64::INFINITY,
        });
    }
    let r = bloch_from_state(rho)?;
    let norm = r.norm();
    if norm <= 1e-14 {
        return Err(BoundsError::ZeroBlochVector);
    }
    let theta0 = (r.components()[2].abs() / norm).clamp(0.0, 1.0).asin();
    let angle = 2.0 * energy * t;
    Ok(if angle >= theta0 {
        norm
    } else {
        norm * (theta0 - angle).cos()
    })
}

/// Time at which `coherence_max_qubit` saturates: arcsin(|r_z|/|r|) / (2E).
pub fn t_mc(rho: &ComplexMatrix, energy: f64) -> Result<f64, BoundsError> {
    check_energy(energy)?;
    let r = bloch_from_state(rho)?;
    let norm = r.norm();
    if norm <= 1e-14 {
        return Err(BoundsError::ZeroBlochVector);
    }
    Ok((r.components()[2].abs() / norm).clamp(0.0, 1.0).asin() / (2.0 * energy))
}

/// Lower bound on the time to convert psi into any maximally coherent state:
/// arccos[(2/d)(sum_j |psi_j|)^2 - 1] / (dE).
pub fn mc_speed_limit(psi: &[C64], energy: f64) -> Result<BoundReport, BoundsError> {
    check_state(psi)?;
    check_energy(energy)?;
    let d = psi.len() as f64;
    let overlap = crate::states::max_mc_overlap(psi)?;
    let g = (2.0 * overlap - 1.0).clamp(-1.0, 1.0).acos() / d;
    Ok(BoundReport::new(
        g,
        energy,
        BoundKind::Lower,
        Tightness::Unknown,
        "maximally-coherent-state bound (phase-optimized target)",
    ))
}

fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix, BoundsError> {
    let h = hermitian_eig(m)?;
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d);
    for k in 0..d {
        let lam = h.eigenvalues()[k].max(0.0).sqrt();
        for i in 0..d {
            let vik = h.eigenvectors().get(i, k) * lam;
            for j in 0..d {
                let v = out.get(i, j) + vik * h.eigenvectors().get(j, k).conj();
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

/// Reference bound arccos F(rho, sigma) / min(DeltaE_rho, E_rho) with the
/// Uhlmann fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)).
pub fn reference_mixed_bound(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    h: &HermitianOperator,
) -> Result<f64, BoundsError> {
    crate::states::is_density_matrix(rho)?;
    crate::states::is_density_matrix(sigma)?;
    if rho.dim() != sigma.dim() || rho.dim() != h.dim() {
        return Err(BoundsError::DimMismatch(rho.dim(), h.dim()));
    }
    let sq = matrix_sqrt_psd(rho)?;
    let inner = sq.mul(sigma).mul(&sq);
    let inner = ComplexMatrix::from_fn(inner.dim(), |i, j| {
        0.5 * (inner.get(i, j) + inner.get(j, i).conj())
    });
    let eig = hermitian_eig(&inner)?;
    let fidelity: f64 = eig.eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).sum();

    let h_mean = rho.mul(h.matrix()).trace().re;
    let h2_mean = rho.mul(h.matrix()).mul(h.matrix()).trace().re;
    let var = (h2_mean - h_mean * h_mean).max(0.0);
    let delta_e = var.sqrt();
    let e_rho = h_mean - h.e0();
    let denom = delta_e.min(e_rho);
    if denom <= 1e-14 {
        return Err(BoundsError::ZeroDenominator);
    }
    Ok(fidelity.clamp(-1.0, 1.0).acos() / denom)
}

/// One saturating Hamiltonian with its target basis, evolution time and
/// dimensionless effort E*t.
pub struct SaturationCase {
    pub name: String,
    pub hamiltonian: HermitianOperator,
    pub target: OrderedBasis,
    pub time: f64,
    pub expected_et: f64,
}

/// The two-qubit unbiased target ordering matching the tight Hamiltonian:
/// |++>, |-+>, |+->, |--> as columns.
pub fn two_qubit_target() -> Result<OrderedBasis, BoundsError> {
    let hh = standard_basis(BasisKind::HadamardN, 2)?;
    Ok(hh.permuted(&[0, 2, 1, 3])?)
}

/// Every explicit saturating Hamiltonian paired with its target and time;
/// Hadamard cases for n = 1..=hadamard_max_n.
pub fn saturation_suite(hadamard_max_n: usize) -> Result<Vec<SaturationCase>, BoundsError> {
    let mut cases = Vec::new();

    let h = construct_optimal(&OptimalKind::QutritPlus)?;
    cases.push(SaturationCase {
        name: "qutrit_plus".into(),
        target: standard_basis(BasisKind::QutritPlus, 3)?,
        time: (2.0 * PI / 9.0) / mean_energy(&h),
        expected_et: 2.0 * PI / 9.0,
        hamiltonian: h,
    });

    let h = construct_optimal(&OptimalKind::QutritTilde)?;
    cases.push(SaturationCase {
        name: "qutrit_tilde".into(),
        target: standard_basis(BasisKind::QutritTilde, 3)?,
        time: (4.0 * PI / 9.0) / mean_energy(&h),
        expected_et: 4.0 * PI / 9.0,
        hamiltonian: h,
    });

    let h = construct_optimal(&OptimalKind::TwoQubit)?;
    cases.push(SaturationCase {
        name: "two_qubit".into(),
        target: two_qubit_target()?,
        time: (PI / 4.0) / mean_energy(&h),
        expected_et: PI / 4.0,
        hamiltonian: h,
    });

    for n in 1..=hadamard_max_n {
        let h = construct_optimal(&OptimalKind::NQubitHadamard(n))?;
        cases.push(SaturationCase {
            name: format!("hadamard_{n}"),
            target: standard_basis(BasisKind::HadamardN, n)?,
            time: (PI / 2.0) / mean_energy(&h),
            expected_et: PI / 2.0,
            hamiltonian: h,
        });
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{state_from_bloch, state_vector_from_angles};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bloch(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new([x, y, z]).unwrap()
    }

    #[test]
    fn mean_energy_frozen_values() {
        let h = construct_optimal(&OptimalKind::TwoQubit).unwrap();
        assert!((mean_energy(&h) - 1.0).abs() < 1e-12);

        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        assert!((mean_energy(&h) - 1.0 / 3.0).abs() < 1e-12);

        let h = construct_optimal(&OptimalKind::QutritTilde).unwrap();
        assert!((mean_energy(&h) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_spectrum() {
        let h = construct_optimal(&OptimalKind::TwoQubit).unwrap();
        let expected = [-1.0, -1.0, -1.0, 3.0];
        for (a, e) in h.eigenvalues().iter().zip(expected) {
            assert!((a - e).abs() < 1e-10, "{a} vs {e}");
        }
    }

    #[test]
    fn qubit_bounds() {
        let b = qubit_transition_bound(&bloch(0.0, 0.0, 1.0), &bloch(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!((b.bound_value - PI / 4.0).abs() < 1e-15);

        let b = qubit_transition_bound(&bloch(0.0, 0.0, 1.0), &bloch(0.0, 0.0, 1.0), 1.0).unwrap();
        assert_eq!(b.bound_value, 0.0);

        let b = qubit_transition_bound(&bloch(0.0, 0.0, 1.0), &bloch(0.0, 0.0, -1.0), 1.0).unwrap();
        assert!((b.bound_value - PI / 2.0).abs() < 1e-15);

        assert!(matches!(
            qubit_transition_bound(&bloch(0.0, 0.0, 0.0), &bloch(1.0, 0.0, 0.0), 1.0),
            Err(BoundsError::ZeroBlochVector)
        ));
    }

    #[test]
    fn optimal_qubit_hamiltonian_achieves_transition() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let rand_dir = |rng: &mut ChaCha8Rng| loop {
                let v = [
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                ];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 1e-3 && n <= 1.0 {
                    break [v[0] / n, v[1] / n, v[2] / n];
                }
            };
            let a = rand_dir(&mut rng);
            let b = rand_dir(&mut rng);
            let r0 = bloch(a[0], a[1], a[2]);
            let r1 = bloch(b[0], b[1], b[2]);
            let energy = 0.5 + rng.random::<f64>();
            let bound = qubit_transition_bound(&r0, &r1, energy).unwrap();
            let h = optimal_qubit_hamiltonian(&r0, &r1, energy).unwrap();
            assert!(h.e0().abs() < 1e-12, "ground energy {}", h.e0());
            assert!((mean_energy(&h) - energy).abs() < 1e-12);
            let u = mat_exp(&h, bound.bound_value);
            let rho1 = u
                .matrix()
                .mul(&state_from_bloch(&r0))
                .mul(&u.matrix().dagger());
            let reached = bloch_from_state(&rho1).unwrap();
            let want = r1.components();
            for (x, w) in reached.components().iter().zip(want) {
                assert!((x - w).abs() < 1e-9, "{x} vs {w}");
            }
        }
    }

    #[test]
    fn optimal_qubit_hamiltonian_antiparallel_fallback() {
        let r0 = bloch(0.0, 0.0, 1.0);
        let r1 = bloch(0.0, 0.0, -1.0);
        let bound = qubit_transition_bound(&r0, &r1, 1.0).unwrap();
        let h = optimal_qubit_hamiltonian(&r0, &r1, 1.0).unwrap();
        let u = mat_exp(&h, bound.bound_value);
        let rho1 = u
            .matrix()
            .mul(&state_from_bloch(&r0))
            .mul(&u.matrix().dagger());
        let reached = bloch_from_state(&rho1).unwrap();
        assert!((reached.components()[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_qubit_matches_pure_form() {
        let rho0 = density_from_vector(&[C64::ONE, C64::ZERO]);
        let s = 1.0 / 2f64.sqrt();
        let rho1 = density_from_vector(&[C64::new(s, 0.0), C64::new(s, 0.0)]);
        let b = mixed_qubit_bound(&rho0, &rho1, 1.0).unwrap();
        assert!((b.bound_value - PI / 4.0).abs() < 1e-12);

        let b = mixed_qubit_bound(&rho0, &rho0, 1.0).unwrap();
        assert!(b.bound_value.abs() < 1e-7);

        // Radii cancel: scaled-down Bloch vectors give the same angle.
        let r0 = state_from_bloch(&bloch(0.0, 0.0, 0.5));
        let r1 = state_from_bloch(&bloch(0.5, 0.0, 0.0));
        let b = mixed_qubit_bound(&r0, &r1, 1.0).unwrap();
        assert!((b.bound_value - PI / 4.0).abs() < 1e-12);

        let mm = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            mixed_qubit_bound(&mm, &rho0, 1.0),
            Err(BoundsError::MaximallyMixedInput)
        ));
    }

    #[test]
    fn mixed_equals_bloch_form_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let mut dir = |scale: f64| {
                bloch(
                    scale * (rng.random::<f64>() - 0.5),
                    scale * (rng.random::<f64>() - 0.5),
                    scale * (rng.random::<f64>() - 0.5),
                )
            };
            let r0 = dir(1.0);
            let r1 = dir(1.0);
            if r0.norm() < 0.05 || r1.norm() < 0.05 {
                continue;
            }
            let via_mixed =
                mixed_qubit_bound(&state_from_bloch(&r0), &state_from_bloch(&r1), 1.0).unwrap();
            let via_bloch = qubit_transition_bound(&r0, &r1, 1.0).unwrap();
            assert!(
                (via_mixed.bound_value - via_bloch.bound_value).abs() < 1e-12,
                "{} vs {}",
                via_mixed.bound_value,
                via_bloch.bound_value
            );
        }
    }

    #[test]
    fn pure_state_bound_examples() {
        let psi0 = vec![C64::ONE, C64::ZERO];
        let s = 1.0 / 2f64.sqrt();
        let plus = vec![C64::new(s, 0.0), C64::new(s, 0.0)];
        let b = pure_state_bound(&psi0, &psi0, 1.0, EnergyMode::MeanEnergy).unwrap();
        assert_eq!(b.bound_value, 0.0);

        let b = pure_state_bound(&psi0, &plus, 0.5, EnergyMode::MeanEnergy).unwrap();
        assert!((b.bound_value - PI / 2.0).abs() < 1e-12);

        let orth = vec![C64::ZERO, C64::ONE];
        let b = pure_state_bound(&psi0, &orth, 1.0, EnergyMode::Gap).unwrap();
        assert!((b.bound_value - PI).abs() < 1e-12);
    }

    #[test]
    fn fmin_closed_form() {
        let h = hermitian_eig(&pauli_z()).unwrap(); // gap 2
        let (v, _) = fmin(&h, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let (v, _) = fmin(&h, PI / 2.0).unwrap();
        assert!(v.abs() < 1e-12);
        let (v, psi) = fmin(&h, PI / 4.0).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        // Cross-check against random states: none goes below the minimum.
        let u = mat_exp(&h, PI / 4.0);
        let survival = |state: &[C64]| {
            let evolved = u.matrix().apply(state);
            state
                .iter()
                .zip(&evolved)
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                .norm()
        };
        assert!((survival(&psi) - v).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let raw: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let state: Vec<C64> = raw.iter().map(|z| z / n).collect();
            assert!(survival(&state) >= v - 1e-9);
        }
        assert!(matches!(
            fmin(&h, 10.0),
            Err(BoundsError::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn unbiased_bound_table() {
        assert!((unbiased_bound(2, 1.0).unwrap().bound_value - PI / 4.0).abs() < 1e-15);
        assert!((unbiased_bound(3, 1.0).unwrap().bound_value - 2.0 * PI / 9.0).abs() < 1e-15);
        assert!((unbiased_bound(4, 1.0).unwrap().bound_value - PI / 4.0).abs() < 1e-15);
        let d6 = unbiased_bound(6, 1.0).unwrap();
        assert!((d6.bound_value - 0.227).abs() < 2e-3);
        assert_eq!(d6.tight, Tightness::Unknown);
        let d5 = unbiased_bound(5, 1.0).unwrap();
        assert!((d5.bound_value - PI / 5.0).abs() < 1e-15);
        // Scaling is exact in 1/E.
        let b = unbiased_bound(2, 2.0).unwrap();
        assert!((b.bound_value - PI / 8.0).abs() < 1e-15);
        assert!(unbiased_bound(1, 1.0).is_err());
        assert!(unbiased_bound(3, 0.0).is_err());
    }

    #[test]
    fn tilde_and_perm_bounds() {
        assert!((qutrit_tilde_bound(1.0).unwrap().bound_value - 4.0 * PI / 9.0).abs() < 1e-15);
        assert!((qutrit_tilde_bound(2.0 / 3.0).unwrap().bound_value - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((perm_bound(2, 1.0).unwrap().bound_value - PI / 2.0).abs() < 1e-15);
        assert!((perm_bound(3, 1.0).unwrap().bound_value - 2.0 * PI / 3.0).abs() < 1e-15);
        let (upper, free) = nqubit_upper_bound(4, 1.0).unwrap();
        assert!((upper.bound_value - PI / 2.0).abs() < 1e-15);
        assert!((free - PI).abs() < 1e-15);
    }

    #[test]
    fn constraint_check_values() {
        let h = construct_optimal(&OptimalKind::TwoQubit).unwrap();
        let (v, ok) = constraint_check(&h, PI / 4.0);
        assert!((v - 2f64.sqrt()).abs() < 1e-10);
        assert!(ok);

        let (v, ok) = constraint_check(&h, 0.0);
        assert_eq!(v, 4.0);
        assert!(!ok);

        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        let (v, ok) = constraint_check(&h, 2.0 * PI / 3.0);
        assert!((v - 1.5).abs() < 1e-12);
        assert!(ok);
    }

    #[test]
    fn saturation_suite_passes() {
        for case in saturation_suite(3).unwrap() {
            let comp = standard_basis(BasisKind::Computational, case.hamiltonian.dim()).unwrap();
            let check =
                achieves_transform(&case.hamiltonian, case.time, &comp, &case.target, 1e-9)
                    .unwrap();
            assert!(
                check.achieved,
                "{} misses by {}",
                case.name, check.max_column_error
            );
            let et = mean_energy(&case.hamiltonian) * case.time;
            assert!((et - case.expected_et).abs() < 1e-12, "{}", case.name);
        }
    }

    #[test]
    fn two_qubit_phases_are_quarter_pi() {
        let h = construct_optimal(&OptimalKind::TwoQubit).unwrap();
        let comp = standard_basis(BasisKind::Computational, 4).unwrap();
        let check =
            achieves_transform(&h, PI / 4.0, &comp, &two_qubit_target().unwrap(), 1e-9).unwrap();
        assert!(check.achieved);
        for p in check.recovered_phases {
            assert!((p - PI / 4.0).abs() < 1e-9, "phase {p}");
        }
    }

    #[test]
    fn transform_not_achieved_at_zero_time() {
        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        let comp = standard_basis(BasisKind::Computational, 3).unwrap();
        let plus = standard_basis(BasisKind::QutritPlus, 3).unwrap();
        let check = achieves_transform(&h, 0.0, &comp, &plus, 1e-9).unwrap();
        assert!(!check.achieved);
    }

    #[test]
    fn conjugation_moves_the_target() {
        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        let v = ComplexMatrix::diagonal_unitary(&[0.0, 0.7, 1.3]);
        let hv = conjugate_hamiltonian(&h, &v).unwrap();
        assert!((mean_energy(&hv) - mean_energy(&h)).abs() < 1e-12);
        let comp = standard_basis(BasisKind::Computational, 3).unwrap();
        let plus = standard_basis(BasisKind::QutritPlus, 3).unwrap();
        let rotated = OrderedBasis::new(v.mul(plus.matrix())).unwrap();
        let t = 2.0 * PI / 3.0;
        let check = achieves_transform(&hv, t, &comp, &rotated, 1e-9).unwrap();
        assert!(check.achieved, "error {}", check.max_column_error);

        assert!(matches!(
            conjugate_hamiltonian(&h, &crate::linalg::cyclic_shift(3)),
            Err(BoundsError::NotDiagonalUnitary(_))
        ));
    }

    #[test]
    fn coherence_closed_forms() {
        let ket0 = density_from_vector(&[C64::ONE, C64::ZERO]);
        assert!((coherence_max_qubit(&ket0, 1.0, PI / 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((t_mc(&ket0, 1.0).unwrap() - PI / 4.0).abs() < 1e-15);

        let plus = state_from_bloch(&bloch(1.0, 0.0, 0.0));
        assert!((coherence_max_qubit(&plus, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(t_mc(&plus, 1.0).unwrap(), 0.0);

        let half = state_from_bloch(&bloch(0.0, 0.0, 0.5));
        assert!((t_mc(&half, 1.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((coherence_max_qubit(&half, 1.0, 10.0).unwrap() - 0.5).abs() < 1e-15);

        let mm = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            coherence_max_qubit(&mm, 1.0, 0.1),
            Err(BoundsError::ZeroBlochVector)
        ));
    }

    #[test]
    fn pure_state_coherence_parametrization() {
        // For pure qubit states, the closed form reduces to
        // cos(arcsin|cos theta| - 2Et) below saturation.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let theta = rng.random::<f64>() * PI;
            let phi = rng.random::<f64>() * 2.0 * PI;
            let t = rng.random::<f64>() * 0.3;
            let psi = state_vector_from_angles(theta, phi);
            let rho = density_from_vector(&psi);
            let got = coherence_max_qubit(&rho, 1.0, t).unwrap();
            let theta0 = theta.cos().abs().asin();
            let expected = if 2.0 * t >= theta0 {
                1.0
            } else {
                (theta0 - 2.0 * t).cos()
            };
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_speed_limit_values() {
        let e0_d2 = vec![C64::ONE, C64::ZERO];
        let b = mc_speed_limit(&e0_d2, 1.0).unwrap();
        assert!((b.bound_value - PI / 4.0).abs() < 1e-12);

        let e0_d3 = vec![C64::ONE, C64::ZERO, C64::ZERO];
        let b = mc_speed_limit(&e0_d3, 1.0).unwrap();
        // Frozen from the oracle: arccos(-1/3)/3.
        assert!((b.bound_value - 0.636_877_745_416_339_6).abs() < 1e-12);

        let s = 1.0 / 3f64.sqrt();
        let flat = vec![C64::new(s, 0.0); 3];
        let b = mc_speed_limit(&flat, 1.0).unwrap();
        assert!(b.bound_value.abs() < 1e-7);
    }

    #[test]
    fn reference_bound_examples() {
        let rho = density_from_vector(&[C64::ONE, C64::ZERO]);
        let s = 1.0 / 2f64.sqrt();
        let sigma = density_from_vector(&[C64::new(s, 0.0), C64::new(s, 0.0)]);
        let h = hermitian_eig(&pauli_x()).unwrap();
        let v = reference_mixed_bound(&rho, &sigma, &h).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-9, "{v}");

        let v = reference_mixed_bound(&rho, &rho, &h).unwrap();
        assert!(v.abs() < 1e-6);

        let orth = density_from_vector(&[C64::ZERO, C64::ONE]);
        let hx = hermitian_eig(&pauli_x().scale(C64::new(0.5, 0.0))).unwrap();
        // Delta E = 0.5 = E for |0> under x/2; arccos(0)/0.5 = pi.
        let v = reference_mixed_bound(&rho, &orth, &hx).unwrap();
        assert!((v - PI).abs() < 1e-9);
    }

    #[test]
    fn pure_state_hamiltonian_saturates() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let d = 2 + (rng.random::<u32>() % 3) as usize;
            let sample = |rng: &mut ChaCha8Rng| {
                let raw: Vec<C64> = (0..d)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                raw.iter().map(|z| z / n).collect::<Vec<_>>()
            };
            let psi0 = sample(&mut rng);
            let psi1 = sample(&mut rng);
            let h = construct_optimal(&OptimalKind::PureState(psi0.clone(), psi1.clone())).unwrap();
            let energy = mean_energy(&h);
            let bound = pure_state_bound(&psi0, &psi1, energy, EnergyMode::MeanEnergy).unwrap();
            let u = mat_exp(&h, bound.bound_value);
            let evolved = u.matrix().apply(&psi0);
            let overlap: C64 = psi1.iter().zip(&evolved).map(|(a, b)| a.conj() * b).sum();
            assert!(
                (overlap.norm() - 1.0).abs() < 1e-9,
                "overlap {}",
                overlap.norm()
            );
        }
    }

    #[test]
    fn mean_energy_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..1000 {
            let rand_h = |rng: &mut ChaCha8Rng| {
                let g = ComplexMatrix::from_fn(2, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let gd = g.dagger();
                ComplexMatrix::from_fn(2, |i, j| 0.5 * (g.get(i, j) + gd.get(i, j)))
            };
            let ha = rand_h(&mut rng);
            let hb = rand_h(&mut rng);
            let id = ComplexMatrix::identity(2);
            let total = kron(&ha, &id).unwrap().add(&kron(&id, &hb).unwrap());
            let ea = mean_energy(&hermitian_eig(&ha).unwrap());
            let eb = mean_energy(&hermitian_eig(&hb).unwrap());
            let eab = mean_energy(&hermitian_eig(&total).unwrap());
            assert!((eab - (ea + eb)).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_curve_from_plus_hamiltonian() {
        // |<0| e^{-iHt} |0>|^2 = (5 + 4 cos t)/9 for the plus projector.
        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        let mut min_val = f64::INFINITY;
        for k in 0..100 {
            let t = 2.0 * PI * k as f64 / 99.0;
            let u = mat_exp(&h, t);
            let amp = u.matrix().get(0, 0);
            let expected = (5.0 + 4.0 * t.cos()) / 9.0;
            assert!((amp.norm_sqr() - expected).abs() < 1e-10);
            min_val = min_val.min(amp.norm_sqr());
        }
        assert!(min_val >= 1.0 / 9.0 - 1e-10);
    }
}

//! Basis objects, unbiasedness tests, the two-class classification of
//! unbiased qutrit bases, Bloch-vector conversions, and coherence
//! quantifiers.

use std::f64::consts::PI;
use thiserror::Error;

use crate::linalg::{hermitian_eig, kron, principal_phase, ComplexMatrix, LinalgError, C64};
use crate::tol;

#[derive(Debug, Error)]
pub enum StatesError {
    #[error("columns are not orthonormal: defect {defect:.3e}")]
    NotOrthonormal { defect: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("basis is not unbiased against the computational basis")]
    NotUnbiased,
    #[error("operation requires a qutrit (d = 3), got d = {0}")]
    NotQutrit(usize),
    #[error("operation requires a qubit (d = 2), got d = {0}")]
    NotQubit(usize),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("state vector is not normalized: norm^2 = {0}")]
    NotNormalized(f64),
    #[error("Bloch vector length {0} exceeds 1")]
    BadBlochVector(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Ordered orthonormal set of d column vectors.
#[derive(Clone, Debug)]
pub struct OrderedBasis {
    columns: ComplexMatrix,
}

impl OrderedBasis {
    /// Wraps a matrix whose columns form the basis; fails unless the matrix
    /// is unitary (orthonormality plus completeness).
    pub fn new(columns: ComplexMatrix) -> Result<Self, StatesError> {
        let defect = columns.unitarity_defect();
        if defect > tol::EQUALITY {
            return Err(StatesError::NotOrthonormal { defect });
        }
        Ok(Self { columns })
    }

    pub fn dim(&self) -> usize {
        self.columns.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.columns.column(j)
    }

    /// New basis with columns reordered as columns[perm[j]].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, StatesError> {
        if perm.len() != self.dim() {
            return Err(StatesError::DimMismatch(perm.len(), self.dim()));
        }
        let m = ComplexMatrix::from_fn(self.dim(), |i, j| self.columns.get(i, perm[j]));
        Self::new(m)
    }
}

/// Qubit state as a Bloch vector; |r| <= 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self, StatesError> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(StatesError::BadBlochVector(norm));
        }
        Ok(Self { r })
    }

    pub fn components(&self) -> [f64; 3] {
        self.r
    }

    pub fn norm(&self) -> f64 {
        (self.r[0] * self.r[0] + self.r[1] * self.r[1] + self.r[2] * self.r[2]).sqrt()
    }
}

/// The two inequivalent classes of unbiased qutrit bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QutritTag {
    Plus,
    Tilde,
}

/// Decomposition of an unbiased qutrit basis as V * (class template) * (per-column phases),
/// with V = diag(1, e^{i a1}, e^{i a2}).
#[derive(Clone, Debug)]
pub struct QutritClass {
    pub class_tag: QutritTag,
    /// Phases of V's diagonal; the first entry is fixed to 0.
    pub diagonal_phases: [f64; 3],
    /// Per-column global phases, in (-pi, pi].
    pub element_phases: [f64; 3],
}

/// The standard bases the theory singles out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Identity columns.
    Computational,
    /// The plus-class unbiased qutrit basis (saturates the qutrit bound).
    QutritPlus,
    /// The tilde-class unbiased qutrit basis (conjectured slower class).
    QutritTilde,
    /// Discrete Fourier transform columns.
    Fourier,
    /// Hadamard transform on n qubits (size parameter is n, dim 2^n).
    HadamardN,
    /// Basis containing the flat maximally coherent state as column 0
    /// (coincides with the Fourier basis).
    MaxCoherentFlat,
}

fn qutrit_plus_matrix() -> ComplexMatrix {
    let s = 1.0 / 3f64.sqrt();
    let w = C64::cis(2.0 * PI / 3.0);
    // Columns: (1, w, w^2), (1, 1, 1), (1, w^-1, w^-2), all over sqrt(3).
    ComplexMatrix::from_fn(3, |i, j| {
        let k: i32 = match j {
            0 => 1,
            1 => 0,
            _ => -1,
        };
        w.powi(k * i as i32) * s
    })
}

/// Builds one of the standard bases. `size` is the dimension d, except for
/// `HadamardN` where it is the qubit count n.
pub fn standard_basis(kind: BasisKind, size: usize) -> Result<OrderedBasis, StatesError> {
    let m = match kind {
        BasisKind::Computational => ComplexMatrix::identity(size),
        BasisKind::QutritPlus => qutrit_plus_matrix(),
        BasisKind::QutritTilde => {
            let plus = qutrit_plus_matrix();
            // Odd permutation of the plus basis: columns 0 and 2 swapped.
            ComplexMatrix::from_fn(3, |i, j| plus.get(i, [2, 1, 0][j]))
        }
        BasisKind::Fourier | BasisKind::MaxCoherentFlat => {
            let s = 1.0 / (size as f64).sqrt();
            ComplexMatrix::from_fn(size, |i, j| {
                C64::cis(2.0 * PI * (i * j) as f64 / size as f64) * s
            })
        }
        BasisKind::HadamardN => {
            let mut m = ComplexMatrix::identity(1);
            for _ in 0..size {
                m = kron(&m, &crate::linalg::hadamard())?;
            }
            m
        }
    };
    OrderedBasis::new(m)
}

/// True iff every cross overlap satisfies ||<b1_i|b2_j>|^2 - 1/d| <= tolerance.
pub fn is_unbiased(b1: &OrderedBasis, b2: &OrderedBasis, tolerance: f64) -> Result<bool, StatesError> {
    let d = b1.dim();
    if d != b2.dim() {
        return Err(StatesError::DimMismatch(d, b2.dim()));
    }
    let overlaps = b1.matrix().dagger().mul(b2.matrix());
    let target = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            if (overlaps.get(i, j).norm_sqr() - target).abs() > tolerance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classifies an unbiased qutrit basis as plus- or tilde-class and extracts
/// the diagonal phases of V and the per-column phases.
///
/// Every basis unbiased against the computational basis factors as
/// V * template * diag(e^{i theta_k}); the classifier divides each column by
/// its first entry to cancel theta, then matches the relative row phases
/// against both templates.
pub fn classify_qutrit_unbiased(b: &OrderedBasis) -> Result<QutritClass, StatesError> {
    if b.dim() != 3 {
        return Err(StatesError::NotQutrit(b.dim()));
    }
    let comp = standard_basis(BasisKind::Computational, 3)?;
    if !is_unbiased(&comp, b, tol::UNBIASED)? {
        return Err(StatesError::NotUnbiased);
    }
    for (tag, kind) in [
        (QutritTag::Plus, BasisKind::QutritPlus),
        (QutritTag::Tilde, BasisKind::QutritTilde),
    ] {
        let template = standard_basis(kind, 3)?;
        let t = template.matrix();
        let m = b.matrix();
        // Candidate V row phases from column 0; rows normalized by row 0.
        let rel = |mat: &ComplexMatrix, i: usize, j: usize| mat.get(i, j) / mat.get(0, j);
        let v1 = rel(m, 1, 0) / rel(t, 1, 0);
        let v2 = rel(m, 2, 0) / rel(t, 2, 0);
        let vs = [C64::ONE, v1, v2];
        let mut ok = true;
        'cols: for j in 0..3 {
            for i in 0..3 {
                if (rel(m, i, j) - vs[i] * rel(t, i, j)).norm() > tol::UNBIASED {
                    ok = false;
                    break 'cols;
                }
            }
        }
        if !ok {
            continue;
        }
        let diagonal_phases = [0.0, v1.arg(), v2.arg()];
        let mut element_phases = [0.0; 3];
        for (j, ph) in element_phases.iter_mut().enumerate() {
            *ph = principal_phase((m.get(0, j) / t.get(0, j)).arg());
        }
        return Ok(QutritClass {
            class_tag: tag,
            diagonal_phases,
            element_phases,
        });
    }
    Err(StatesError::NotUnbiased)
}

impl QutritClass {
    /// Rebuilds the basis this classification describes.
    pub fn reconstruct(&self) -> Result<OrderedBasis, StatesError> {
        let kind = match self.class_tag {
            QutritTag::Plus => BasisKind::QutritPlus,
            QutritTag::Tilde => BasisKind::QutritTilde,
        };
        let template = standard_basis(kind, 3)?;
        let v = ComplexMatrix::diagonal_unitary(&self.diagonal_phases);
        let m = v
            .mul(template.matrix())
            .scale_columns_by_phases(&self.element_phases);
        OrderedBasis::new(m)
    }
}

/// True iff rho is Hermitian, unit-trace, and PSD within tolerance.
pub fn is_density_matrix(rho: &ComplexMatrix) -> Result<(), StatesError> {
    let scale = rho.max_abs().max(1.0);
    if rho.hermiticity_defect() > tol::HERMITICITY_REL * scale {
        return Err(StatesError::NotDensityMatrix("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol::EQUALITY || tr.im.abs() > tol::EQUALITY {
        return Err(StatesError::NotDensityMatrix(format!(
            "trace {} instead of 1",
            tr.re
        )));
    }
    let h = hermitian_eig(rho)?;
    if h.e0() < -tol::PSD {
        return Err(StatesError::NotDensityMatrix(format!(
            "negative eigenvalue {:.3e}",
            h.e0()
        )));
    }
    Ok(())
}

/// l1 coherence: sum of moduli of the off-diagonal entries.
pub fn l1_coherence(rho: &ComplexMatrix) -> Result<f64, StatesError> {
    is_density_matrix(rho)?;
    let d = rho.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += rho.get(i, j).norm();
            }
        }
    }
    Ok(sum)
}

/// Bloch vector r_k = Tr[rho sigma_k] of a qubit density matrix.
pub fn bloch_from_state(rho: &ComplexMatrix) -> Result<BlochVector, StatesError> {
    if rho.dim() != 2 {
        return Err(StatesError::NotQubit(rho.dim()));
    }
    is_density_matrix(rho)?;
    let rx = 2.0 * rho.get(0, 1).re;
    let ry = -2.0 * rho.get(0, 1).im;
    let rz = rho.get(0, 0).re - rho.get(1, 1).re;
    BlochVector::new([rx, ry, rz])
}

/// Density matrix (1 + r . sigma) / 2 of a Bloch vector.
pub fn state_from_bloch(r: &BlochVector) -> ComplexMatrix {
    let [x, y, z] = r.components();
    ComplexMatrix::from_rows(&[
        vec![C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
        vec![C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    ])
    .unwrap()
}

/// Pure qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
pub fn state_vector_from_angles(theta: f64, phi: f64) -> Vec<C64> {
    vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::cis(phi) * (theta / 2.0).sin(),
    ]
}

/// Projector |psi><psi| of a state vector.
pub fn density_from_vector(psi: &[C64]) -> ComplexMatrix {
    let d = psi.len();
    ComplexMatrix::from_fn(d, |i, j| psi[i] * psi[j].conj())
}

fn check_normalized(psi: &[C64]) -> Result<(), StatesError> {
    let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > tol::EQUALITY {
        return Err(StatesError::NotNormalized(n2));
    }
    Ok(())
}

/// Largest squared overlap of psi with any maximally coherent state:
/// (1/d) (sum_j |psi_j|)^2, optimizing the target phases away.
pub fn max_mc_overlap(psi: &[C64]) -> Result<f64, StatesError> {
    check_normalized(psi)?;
    let d = psi.len() as f64;
    let s: f64 = psi.iter().map(|z| z.norm()).sum();
    Ok(s * s / d)
}

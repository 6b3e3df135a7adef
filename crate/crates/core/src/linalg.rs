//! Dense complex linear algebra for small dimensions (d <= 1024).
//!
//! Everything is deterministic: the eigensolver is a cyclic Jacobi iteration
//! with a fixed pivot order, so identical inputs give bit-identical outputs
//! regardless of thread count.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::tol;

pub type C64 = Complex64;

/// Maximum supported dimension (guards Kronecker products).
pub const MAX_DIM: usize = 1024;

/// Sweeps before the Jacobi iteration gives up.
const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: symmetry defect {defect:.3e} exceeds tolerance")]
    NotHermitian { defect: f64 },
    #[error("matrix is not unitary: defect {defect:.3e} exceeds tolerance")]
    NotUnitary { defect: f64 },
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dimension {0} exceeds the supported maximum {MAX_DIM}")]
    DimensionOverflow(usize),
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Wraps a phase into the principal branch (-pi, pi].
pub fn principal_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            entries: vec![C64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::ONE);
        }
        m
    }

    /// Builds a matrix entry by entry from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::BadInput("empty matrix".into()));
        }
        for r in rows {
            if r.len() != dim {
                return Err(LinalgError::DimMismatch(r.len(), dim));
            }
        }
        Ok(Self {
            dim,
            entries: rows.concat(),
        })
    }

    /// Diagonal unitary diag(e^{i phases_0}, ..., e^{i phases_{d-1}}).
    pub fn diagonal_unitary(phases: &[f64]) -> Self {
        let mut m = Self::zeros(phases.len());
        for (j, &p) in phases.iter().enumerate() {
            m.set(j, j, C64::cis(p));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        Self::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(self.dim, |i, j| s * self.get(i, j))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch in apply");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Scales column j by e^{i phases_j}; the cheap form of `self * diag`.
    pub fn scale_columns_by_phases(&self, phases: &[f64]) -> Self {
        assert_eq!(phases.len(), self.dim, "dimension mismatch in column scaling");
        let factors: Vec<C64> = phases.iter().map(|&p| C64::cis(p)).collect();
        Self::from_fn(self.dim, |i, j| self.get(i, j) * factors[j])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in comparison");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tolerance: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tolerance
    }

    /// Hermiticity defect max |M_ij - conj(M_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    /// Unitarity defect max |M M^dag - I|.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.dagger())
            .max_abs_diff(&Self::identity(self.dim))
    }
}

/// Hermitian matrix with its cached ascending eigensystem.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HermitianOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, ordered like the eigenvalues.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Ground-state energy E_0.
    pub fn e0(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Spectral width E_{d-1} - E_0.
    pub fn e_gap(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1] - self.eigenvalues[0]
    }
}

/// Unitary matrix with principal eigenphases in (-pi, pi], ascending.
///
/// The eigenvalue convention is lambda_j = e^{-i alpha_j}, so a positive
/// eigenphase corresponds to forward evolution e^{-iHt} with positive energy.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
    eigenphases: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenphases alpha_j in (-pi, pi], ascending; eigenvalues are e^{-i alpha_j}.
    pub fn eigenphases(&self) -> &[f64] {
        &self.eigenphases
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }
}

/// Internal cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Returns (eigenvalues, eigenvectors) unsorted, i.e. in the order the
/// rotations leave them. The input is assumed Hermitized already.
fn jacobi(mut a: ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    let d = a.dim();
    let mut v = ComplexMatrix::identity(d);
    if d == 1 {
        return Ok((vec![a.get(0, 0).re], v));
    }
    let frob: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = (frob * 1e-14).max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a.get(p, q).norm_sqr();
            }
        }
        let off = off.sqrt();
        if off <= target {
            let eigenvalues = (0..d).map(|i| a.get(i, i).re).collect();
            return Ok((eigenvalues, v));
        }

        for p in 0..d {
            for q in (p + 1)..d {
                let g = a.get(p, q);
                let abs_g = g.norm();
                if abs_g <= f64::MIN_POSITIVE {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let phase = g / abs_g;
                let tau = (beta - alpha) / (2.0 * abs_g);
                // Smaller-magnitude root of t^2 + 2 tau t - 1 = 0.
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = s * phase;
                let s_phase_conj = s * phase.conj();

                a.set(p, p, C64::new(alpha - t * abs_g, 0.0));
                a.set(q, q, C64::new(beta + t * abs_g, 0.0));
                a.set(p, q, C64::ZERO);
                a.set(q, p, C64::ZERO);
                for j in 0..d {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a.get(j, p);
                    let ajq = a.get(j, q);
                    let njp = c * ajp - s_phase_conj * ajq;
                    let njq = s_phase * ajp + c * ajq;
                    a.set(j, p, njp);
                    a.set(j, q, njq);
                    a.set(p, j, njp.conj());
                    a.set(q, j, njq.conj());
                }
                for i in 0..d {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s_phase_conj * viq);
                    v.set(i, q, s_phase * vip + c * viq);
                }
            }
        }
    }
    Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS))
}

/// Sorts an eigensystem ascending by value, stable in the original order.
fn sort_eigensystem(values: Vec<f64>, vectors: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = values.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap().then(i.cmp(&j)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(d, |i, j| vectors.get(i, order[j]));
    (sorted_values, sorted_vectors)
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
///
/// Deterministic: cyclic Jacobi with a fixed pivot order.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianOperator, LinalgError> {
    let defect = m.hermiticity_defect();
    let scale = m.max_abs().max(1.0);
    if defect > tol::HERMITICITY_REL * scale {
        return Err(LinalgError::NotHermitian { defect });
    }
    // Work on the Hermitized copy so the <= tol asymmetry cannot leak into
    // the eigensystem.
    let sym = ComplexMatrix::from_fn(m.dim(), |i, j| {
        0.5 * (m.get(i, j) + m.get(j, i).conj())
    });
    let (values, vectors) = jacobi(sym)?;
    let (eigenvalues, eigenvectors) = sort_eigensystem(values, vectors);
    Ok(HermitianOperator {
        matrix: m.clone(),
        eigenvalues,
        eigenvectors,
    })
}

/// Assembles sum_j f(j) |v_j><v_j| from an eigenbasis.
fn assemble_from_eigensystem(
    vectors: &ComplexMatrix,
    factors: &[C64],
) -> ComplexMatrix {
    let d = vectors.dim();
    let mut out = ComplexMatrix::zeros(d);
    for k in 0..d {
        let f = factors[k];
        for i in 0..d {
            let vik = vectors.get(i, k) * f;
            for j in 0..d {
                let v = out.get(i, j) + vik * vectors.get(j, k).conj();
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Unitary evolution U = exp(-iHt) through the cached eigensystem of H.
///
/// The returned operator carries the principal eigenphases of E_j t, sorted
/// ascending with their eigenvectors.
pub fn mat_exp(h: &HermitianOperator, t: f64) -> UnitaryOperator {
    assert!(t.is_finite(), "evolution time must be finite");
    let factors: Vec<C64> = h
        .eigenvalues()
        .iter()
        .map(|&e| C64::cis(-e * t))
        .collect();
    let matrix = assemble_from_eigensystem(h.eigenvectors(), &factors);
    let phases: Vec<f64> = h.eigenvalues().iter().map(|&e| principal_phase(e * t)).collect();
    let (eigenphases, eigenvectors) = sort_eigensystem(phases, h.eigenvectors().clone());
    UnitaryOperator {
        matrix,
        eigenphases,
        eigenvectors,
    }
}

/// Eigendecomposition of a unitary matrix into principal eigenphases.
///
/// U is split into commuting Hermitian parts A = (U+U^dag)/2 and
/// B = (U-U^dag)/(2i); A is diagonalized first, then B is diagonalized inside
/// each (near-)degenerate eigenspace of A. That resolves the cos-degeneracy
/// of conjugate phase pairs deterministically and handles exactly degenerate
/// eigenphases by Gram-Schmidt-free subspace rotations in input order.
pub fn unitary_eigphases(u: &ComplexMatrix) -> Result<UnitaryOperator, LinalgError> {
    let defect = u.unitarity_defect();
    if defect > tol::EQUALITY {
        return Err(LinalgError::NotUnitary { defect });
    }
    let d = u.dim();
    let udag = u.dagger();
    let a = ComplexMatrix::from_fn(d, |i, j| 0.5 * (u.get(i, j) + udag.get(i, j)));
    let b = ComplexMatrix::from_fn(d, |i, j| {
        C64::new(0.0, -0.5) * (u.get(i, j) - udag.get(i, j))
    });
    let (a_values, a_vectors) = jacobi(a)?;
    let (a_values, a_vectors) = sort_eigensystem(a_values, a_vectors);

    // Group nearly equal A-eigenvalues. Grouping too eagerly is harmless:
    // diagonalizing B inside the group splits whatever A could not.
    let group_tol = (tol::PHASE_GROUPING * 10.0).max(1e-8);
    let mut eigenvectors = ComplexMatrix::zeros(d);
    let mut eigenphases = vec![0.0; d];
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (a_values[end] - a_values[end - 1]).abs() < group_tol {
            end += 1;
        }
        let width = end - start;
        // B restricted to the group: W^dag B W, size width x width.
        let w_col = |i: usize, k: usize| a_vectors.get(i, start + k);
        let mut b_sub = ComplexMatrix::zeros(width);
        for r in 0..width {
            for c in 0..width {
                let mut acc = C64::ZERO;
                for i in 0..d {
                    for j in 0..d {
                        acc += w_col(i, r).conj() * b.get(i, j) * w_col(j, c);
                    }
                }
                b_sub.set(r, c, acc);
            }
        }
        let b_sub = ComplexMatrix::from_fn(width, |i, j| {
            0.5 * (b_sub.get(i, j) + b_sub.get(j, i).conj())
        });
        let (b_values, b_rot) = jacobi(b_sub)?;
        let (_, b_rot) = sort_eigensystem(b_values, b_rot);
        for k in 0..width {
            let vec: Vec<C64> = (0..d)
                .map(|i| {
                    (0..width)
                        .map(|r| w_col(i, r) * b_rot.get(r, k))
                        .sum()
                })
                .collect();
            // Eigenvalue from the Rayleigh quotient of the joint eigenvector;
            // lambda = e^{-i alpha} so alpha = -arg(lambda), branch (-pi, pi].
            let uv = u.apply(&vec);
            let lam: C64 = vec.iter().zip(&uv).map(|(v, w)| v.conj() * w).sum();
            let mut alpha = -lam.arg();
            if alpha <= -PI {
                alpha += 2.0 * PI;
            }
            eigenphases[start + k] = alpha;
            for (i, v) in vec.into_iter().enumerate() {
                eigenvectors.set(i, start + k, v);
            }
        }
        start = end;
    }

    let (eigenphases, eigenvectors) = sort_eigensystem(eigenphases, eigenvectors);
    Ok(UnitaryOperator {
        matrix: u.clone(),
        eigenphases,
        eigenvectors,
    })
}

/// Principal k-th root: every eigenvalue e^{-i alpha_j} becomes e^{-i alpha_j / k}.
pub fn unitary_root(u: &UnitaryOperator, k: u32) -> ComplexMatrix {
    assert!(k >= 1, "root order must be positive");
    let factors: Vec<C64> = u
        .eigenphases()
        .iter()
        .map(|&a| C64::cis(-a / k as f64))
        .collect();
    assemble_from_eigensystem(u.eigenvectors(), &factors)
}

/// Kronecker product; the result dimension must stay within `MAX_DIM`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (da, db) = (a.dim(), b.dim());
    let d = da.checked_mul(db).ok_or(LinalgError::DimensionOverflow(usize::MAX))?;
    if d > MAX_DIM {
        return Err(LinalgError::DimensionOverflow(d));
    }
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        a.get(i / db, j / db) * b.get(i % db, j % db)
    }))
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![C64::ZERO, C64::ONE],
        vec![C64::ONE, C64::ZERO],
    ])
    .unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![C64::ZERO, C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 1.0), C64::ZERO],
    ])
    .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![C64::ONE, C64::ZERO],
        vec![C64::ZERO, -C64::ONE],
    ])
    .unwrap()
}

/// The 2x2 Hadamard gate (also used as a single-qubit Hamiltonian).
pub fn hadamard() -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    ComplexMatrix::from_rows(&[
        vec![C64::new(h, 0.0), C64::new(h, 0.0)],
        vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
    ])
    .unwrap()
}

/// Cyclic shift |j> -> |j+1 mod d>, the d-cycle permutation matrix.
pub fn cyclic_shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |i, j| {
        if i == (j + 1) % d {
            C64::ONE
        } else {
            C64::ZERO
        }
    })
}

//! Random-phase sampling over transform unitaries U = B diag(e^{i phi}):
//! eigenphase extraction, exhaustive branch minimization of the dimensionless
//! effort Et, and deterministic parallel histogram assembly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

use crate::linalg::{unitary_eigphases, LinalgError, UnitaryOperator};
use crate::states::{standard_basis, BasisKind, OrderedBasis, StatesError};

/// Branch enumeration visits 2^d assignments; refuse past this dimension.
pub const MAX_BRANCH_DIM: usize = 20;

/// Two branch assignments within this of each other count as a tie and are
/// split by the deterministic preference order.
const BRANCH_TIE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("branch enumeration handles at most {MAX_BRANCH_DIM} dimensions, got {0}")]
    DimTooLarge(usize),
    #[error("need at least one sample")]
    NoSamples,
    #[error("need at least one histogram bin")]
    NoBins,
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One sampled unitary: its column phases, the eigenphases of the resulting
/// unitary, the minimizing energy-branch choice (false: alpha_j, true:
/// alpha_j + 2pi), and the resulting Et = mean - min of the branch energies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub phases: Vec<f64>,
    pub eigenphases: Vec<f64>,
    pub branch_bits: Vec<bool>,
    pub et: f64,
}

/// Binned distribution of Et over a sampling run.
#[derive(Clone, Debug, Serialize)]
pub struct EtHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub min_et: f64,
    pub seed: u64,
}

impl EtHistogram {
    /// CSV rows `bin_left,bin_right,count` followed by comment trailers
    /// carrying the run metadata; floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (i, count) in self.counts.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{count}",
                self.bin_edges[i],
                self.bin_edges[i + 1]
            );
        }
        let _ = writeln!(out, "# n_samples={}", self.n_samples);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# min_et={:.16e}", self.min_et);
        out
    }
}

fn branch_et(alphas: &[f64], mask: u32) -> f64 {
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    for (j, &a) in alphas.iter().enumerate() {
        let e = if (mask >> j) & 1 == 1 { a + 2.0 * PI } else { a };
        sum += e;
        if e < min {
            min = e;
        }
    }
    sum / alphas.len() as f64 - min
}

/// True iff mask `a` reads lexicographically before `b` as a bit vector
/// indexed from eigenphase 0.
fn lex_before(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    (a >> diff.trailing_zeros()) & 1 == 0
}

/// Minimal Et over all 2^d energy-branch assignments for the eigenphases of
/// U, with the minimizing assignment. Ties go to the assignment with the
/// fewest raised branches, then the lexicographically first one.
pub fn et_from_unitary(u: &UnitaryOperator) -> Result<(f64, Vec<bool>), MonteCarloError> {
    let d = u.dim();
    if d > MAX_BRANCH_DIM {
        return Err(MonteCarloError::DimTooLarge(d));
    }
    let alphas = u.eigenphases();
    let mut min_et = f64::INFINITY;
    for mask in 0..(1u32 << d) {
        min_et = min_et.min(branch_et(alphas, mask));
    }
    let mut best_mask = None;
    for mask in 0..(1u32 << d) {
        if branch_et(alphas, mask) > min_et + BRANCH_TIE {
            continue;
        }
        best_mask = Some(match best_mask {
            None => mask,
            Some(prev) => {
                let (c, p) = (mask.count_ones(), u32::count_ones(prev));
                if c < p || (c == p && lex_before(mask, prev)) {
                    mask
                } else {
                    prev
                }
            }
        });
    }
    let mask = best_mask.expect("at least one branch assignment exists");
    let bits = (0..d).map(|j| (mask >> j) & 1 == 1).collect();
    Ok((branch_et(alphas, mask), bits))
}

/// Evaluates one member of the sampling family: U = basis * diag(e^{i phi}).
pub fn record_for_phases(
    basis: &OrderedBasis,
    phases: &[f64],
) -> Result<SampleRecord, MonteCarloError> {
    let u = unitary_eigphases(&basis.matrix().scale_columns_by_phases(phases))?;
    let (et, branch_bits) = et_from_unitary(&u)?;
    Ok(SampleRecord {
        phases: phases.to_vec(),
        eigenphases: u.eigenphases().to_vec(),
        branch_bits,
        et,
    })
}

/// The record for sample `index` of the run keyed by `seed`. Each index gets
/// its own generator stream, so any subset of indices can be evaluated in any
/// order with identical results.
pub fn sample_record(
    basis: &OrderedBasis,
    seed: u64,
    index: u64,
) -> Result<SampleRecord, MonteCarloError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let phases: Vec<f64> = (0..basis.dim())
        .map(|_| rng.random::<f64>() * 2.0 * PI)
        .collect();
    record_for_phases(basis, &phases)
}

struct RunAccumulator {
    counts: Vec<u64>,
    n: u64,
    min_et: f64,
    min_index: u64,
}

impl RunAccumulator {
    fn empty(bins: usize) -> Self {
        Self {
            counts: vec![0; bins],
            n: 0,
            min_et: f64::INFINITY,
            min_index: u64::MAX,
        }
    }

    fn push(mut self, index: u64, et: f64, bins: usize, width: f64) -> Self {
        let bin = ((et / width) as usize).min(bins - 1);
        self.counts[bin] += 1;
        self.n += 1;
        if et < self.min_et || (et == self.min_et && index < self.min_index) {
            self.min_et = et;
            self.min_index = index;
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n += other.n;
        if other.min_et < self.min_et
            || (other.min_et == self.min_et && other.min_index < self.min_index)
        {
            self.min_et = other.min_et;
            self.min_index = other.min_index;
        }
        self
    }
}

/// Samples `n_samples` random-phase unitaries over `basis` and bins their Et
/// into `bins` uniform bins over [0, 2pi). Deterministic for a fixed
/// (seed, n_samples) regardless of how many workers run the loop.
pub fn sample_basis(
    basis: &OrderedBasis,
    n_samples: u64,
    seed: u64,
    bins: usize,
) -> Result<EtHistogram, MonteCarloError> {
    if n_samples == 0 {
        return Err(MonteCarloError::NoSamples);
    }
    if bins == 0 {
        return Err(MonteCarloError::NoBins);
    }
    // Surface eigensolver or dimension problems once, up front, instead of
    // inside the parallel loop.
    sample_record(basis, seed, 0)?;

    let width = 2.0 * PI / bins as f64;
    let acc = (0..n_samples)
        .into_par_iter()
        .fold(
            || RunAccumulator::empty(bins),
            |acc, index| {
                let record = sample_record(basis, seed, index)
                    .expect("sampling cannot fail after the probe sample");
                acc.push(index, record.et, bins, width)
            },
        )
        .reduce(|| RunAccumulator::empty(bins), RunAccumulator::merge);

    let bin_edges = (0..=bins).map(|i| i as f64 * width).collect();
    Ok(EtHistogram {
        bin_edges,
        counts: acc.counts,
        n_samples: acc.n,
        min_et: acc.min_et,
        seed,
    })
}

/// Fig.-2-style run against the tilde-class qutrit basis.
pub fn sample_tilde(n_samples: u64, seed: u64, bins: usize) -> Result<EtHistogram, MonteCarloError> {
    sample_basis(&standard_basis(BasisKind::QutritTilde, 3)?, n_samples, seed, bins)
}

/// The same run against the plus-class qutrit basis.
pub fn sample_plus(n_samples: u64, seed: u64, bins: usize) -> Result<EtHistogram, MonteCarloError> {
    sample_basis(&standard_basis(BasisKind::QutritPlus, 3)?, n_samples, seed, bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{construct_optimal, OptimalKind};
    use crate::linalg::{mat_exp, ComplexMatrix};

    #[test]
    fn identity_has_zero_et() {
        for d in [1, 2, 3, 5] {
            let u = unitary_eigphases(&ComplexMatrix::identity(d)).unwrap();
            let (et, bits) = et_from_unitary(&u).unwrap();
            assert_eq!(et, 0.0);
            assert!(bits.iter().all(|&b| !b));
        }
    }

    #[test]
    fn saturating_plus_evolution_et() {
        let h = construct_optimal(&OptimalKind::QutritPlus).unwrap();
        let u = mat_exp(&h, 2.0 * PI / 3.0);
        let (et, _) = et_from_unitary(&u).unwrap();
        assert!((et - 2.0 * PI / 9.0).abs() < 1e-9, "et {et}");
    }

    #[test]
    fn tilde_optimal_phases() {
        let tilde = standard_basis(BasisKind::QutritTilde, 3).unwrap();
        let record = record_for_phases(&tilde, &[0.0, 0.0, 2.0 * PI / 3.0]).unwrap();
        let expected = [-PI / 2.0, PI / 6.0, PI / 6.0];
        for (a, e) in record.eigenphases.iter().zip(expected) {
            assert!((a - e).abs() < 1e-9, "{a} vs {e}");
        }
        assert!((record.et - 4.0 * PI / 9.0).abs() < 1e-9, "et {}", record.et);
        assert!(record.branch_bits.iter().all(|&b| !b));
    }

    #[test]
    fn et_is_global_phase_invariant() {
        let tilde = standard_basis(BasisKind::QutritTilde, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let phases: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
            let gamma = rng.random::<f64>() * 2.0 * PI;
            let shifted: Vec<f64> = phases.iter().map(|p| p + gamma).collect();
            let a = record_for_phases(&tilde, &phases).unwrap();
            let b = record_for_phases(&tilde, &shifted).unwrap();
            assert!((a.et - b.et).abs() < 1e-9, "{} vs {}", a.et, b.et);
        }
    }

    #[test]
    fn branch_enumeration_guard() {
        let u = unitary_eigphases(&ComplexMatrix::identity(21)).unwrap();
        assert!(matches!(
            et_from_unitary(&u),
            Err(MonteCarloError::DimTooLarge(21))
        ));
    }

    #[test]
    fn tie_break_prefers_fewest_raised_branches() {
        // Eigenphases {-pi/2, pi/6, pi/6} admit two assignments at 4pi/9;
        // the all-false one must win.
        let u = unitary_eigphases(&ComplexMatrix::diagonal_unitary(&[
            PI / 2.0,
            -PI / 6.0,
            -PI / 6.0,
        ]))
        .unwrap();
        let (et, bits) = et_from_unitary(&u).unwrap();
        assert!((et - 4.0 * PI / 9.0).abs() < 1e-12);
        assert_eq!(bits, vec![false, false, false]);
    }

    #[test]
    fn sample_record_is_reproducible() {
        let tilde = standard_basis(BasisKind::QutritTilde, 3).unwrap();
        let a = sample_record(&tilde, 42, 7).unwrap();
        let b = sample_record(&tilde, 42, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_record(&tilde, 42, 8).unwrap();
        assert_ne!(a.phases, c.phases);
        for p in &a.phases {
            assert!((0.0..2.0 * PI).contains(p));
        }
        assert!(a.et >= 0.0);
    }

    #[test]
    fn histogram_mass_and_determinism() {
        let h1 = sample_tilde(500, 42, 50).unwrap();
        let h2 = sample_tilde(500, 42, 50).unwrap();
        assert_eq!(h1.counts, h2.counts);
        assert_eq!(h1.min_et, h2.min_et);
        assert_eq!(h1.counts.iter().sum::<u64>(), 500);
        assert_eq!(h1.n_samples, 500);
        assert_eq!(h1.bin_edges.len(), 51);
        assert!(h1.min_et >= 4.0 * PI / 9.0 - 1e-9);

        let h3 = sample_tilde(500, 43, 50).unwrap();
        assert_ne!(h1.counts, h3.counts);
    }

    #[test]
    fn min_et_shrinks_with_more_samples() {
        let small = sample_plus(200, 11, 40).unwrap();
        let large = sample_plus(600, 11, 40).unwrap();
        assert!(large.min_et <= small.min_et);
        assert!(small.min_et >= 2.0 * PI / 9.0 - 1e-9);
    }

    #[test]
    fn plus_identity_phases_record() {
        let plus = standard_basis(BasisKind::QutritPlus, 3).unwrap();
        let a = record_for_phases(&plus, &[0.0; 3]).unwrap();
        let b = record_for_phases(&plus, &[0.0; 3]).unwrap();
        assert_eq!(a, b);
        assert!(a.et >= 2.0 * PI / 9.0 - 1e-9);
    }

    #[test]
    fn csv_layout() {
        let h = sample_tilde(100, 5, 8).unwrap();
        let csv = h.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bin_left,bin_right,count");
        assert_eq!(lines.len(), 1 + 8 + 3);
        let total: u64 = lines[1..9]
            .iter()
            .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 100);
        assert!(lines[9].starts_with("# n_samples=100"));
        assert!(lines[10].starts_with("# seed=5"));
        assert!(lines[11].starts_with("# min_et="));
        let parsed: f64 = lines[11].trim_start_matches("# min_et=").parse().unwrap();
        assert_eq!(parsed, h.min_et);
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(matches!(sample_tilde(0, 1, 8), Err(MonteCarloError::NoSamples)));
        assert!(matches!(sample_tilde(5, 1, 0), Err(MonteCarloError::NoBins)));
    }

    #[test]
    fn sampled_et_obeys_branch_constraint() {
        // Sum of cos over the branch energies stays within [-sqrt(d), sqrt(d)]
        // for unitaries that implement an unbiased-basis transform.
        let tilde = standard_basis(BasisKind::QutritTilde, 3).unwrap();
        for index in 0..200 {
            let r = sample_record(&tilde, 99, index).unwrap();
            let s: f64 = r
                .eigenphases
                .iter()
                .zip(&r.branch_bits)
                .map(|(&a, &b)| if b { a + 2.0 * PI } else { a }.cos())
                .sum();
            assert!(s.abs() <= 3f64.sqrt() + 1e-9, "constraint value {s}");
        }
    }
}

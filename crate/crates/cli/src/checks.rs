//! Named self-checks behind `qsl verify`. Each check returns pass/fail plus
//! a measured-error detail string; errors from bad internal state surface as
//! failures, never as panics.

use std::f64::consts::PI;

use qsl_core::bounds::{
    achieves_transform, coherence_max_qubit, constraint_check, construct_optimal, d6_refined_g,
    mc_speed_limit, mean_energy, saturation_suite, t_mc, OptimalKind, SaturationCase,
};
use qsl_core::linalg::{
    cyclic_shift, mat_exp, principal_phase, unitary_eigphases, unitary_root, ComplexMatrix, C64,
};
use qsl_core::montecarlo::{et_from_unitary, sample_plus, sample_tilde};
use qsl_core::oracle::{
    coherence_along_axis, d6_refinement_cap, max_coherence_random_axes, minimize_cos_sum,
    RegionSpec,
};
use qsl_core::states::{
    classify_qutrit_unbiased, standard_basis, state_from_bloch, BasisKind, BlochVector,
    OrderedBasis, QutritTag,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Options shared by all checks.
pub struct VerifyOpts {
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
}

/// One check outcome with a human-readable measurement.
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = Result<(bool, String), String>;
type CheckFn = Box<dyn Fn(&VerifyOpts) -> CheckResult>;

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn all_checks() -> Vec<(String, CheckFn)> {
    let mut v: Vec<(String, CheckFn)> = Vec::new();
    v.push(("two_qubit_spectrum".into(), Box::new(check_two_qubit_spectrum)));
    for case in ["qutrit_plus", "qutrit_tilde", "two_qubit"] {
        v.push((
            format!("saturation_{case}"),
            Box::new(move |o: &VerifyOpts| check_saturation(o, case)),
        ));
    }
    for n in 1..=8usize {
        v.push((
            format!("saturation_hadamard_{n}"),
            Box::new(move |o: &VerifyOpts| check_saturation(o, &format!("hadamard_{n}"))),
        ));
    }
    for d in 2..=8usize {
        v.push((
            format!("permutation_d{d}"),
            Box::new(move |o: &VerifyOpts| check_permutation(o, d)),
        ));
    }
    v.push(("permutation_sqrt_d3".into(), Box::new(check_permutation_sqrt)));
    v.push(("fidelity_curve".into(), Box::new(check_fidelity_curve)));
    v.push(("necessity_constraints".into(), Box::new(check_necessity)));
    for d in 2..=7usize {
        v.push((
            format!("theorem4_d{d}"),
            Box::new(move |o: &VerifyOpts| check_cos_sum_region(o, d, (d as f64 - 1.0) * PI / 4.0)),
        ));
    }
    v.push((
        "d6_refinement".into(),
        Box::new(|o: &VerifyOpts| check_cos_sum_region(o, 6, d6_refinement_cap())),
    ));
    v.push(("d6_bound_value".into(), Box::new(check_d6_bound_value)));
    v.push(("classifier_roundtrip".into(), Box::new(check_classifier)));
    v.push(("coherence_brute_force".into(), Box::new(check_coherence)));
    v.push(("mc_speed_limit_qubit".into(), Box::new(check_mc_limit)));
    for target in [QutritTag::Plus, QutritTag::Tilde] {
        let name = match target {
            QutritTag::Plus => "sample_plus_min",
            QutritTag::Tilde => "sample_tilde_min",
        };
        v.push((
            name.into(),
            Box::new(move |o: &VerifyOpts| check_sample(o, target)),
        ));
    }
    v
}

/// True iff the name survives a `--d` filter: checks carry their dimension
/// as a `_d<k>` suffix; unsuffixed checks always run.
fn dim_filter(name: &str, dim: Option<usize>) -> bool {
    let Some(d) = dim else { return true };
    match name.rfind("_d") {
        Some(i) => name[i + 2..].parse::<usize>().map_or(true, |k| k == d),
        None => true,
    }
}

pub fn run_checks(
    opts: &VerifyOpts,
    only: Option<&str>,
    dim: Option<usize>,
) -> Result<Vec<CheckOutcome>, String> {
    let selected: Vec<_> = all_checks()
        .into_iter()
        .filter(|(name, _)| only.map_or(true, |s| name.contains(s)))
        .filter(|(name, _)| dim_filter(name, dim))
        .collect();
    if selected.is_empty() {
        return Err("no checks match the given filters".into());
    }
    Ok(selected
        .into_iter()
        .map(|(name, f)| match f(opts) {
            Ok((passed, detail)) => CheckOutcome { name, passed, detail },
            Err(msg) => CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {msg}"),
            },
        })
        .collect())
}

fn check_two_qubit_spectrum(_: &VerifyOpts) -> CheckResult {
    let h = e(construct_optimal(&OptimalKind::TwoQubit))?;
    let expected = [-1.0, -1.0, -1.0, 3.0];
    let spectrum_err = h
        .eigenvalues()
        .iter()
        .zip(expected)
        .map(|(&got, want)| (got - want).abs())
        .fold(0.0f64, f64::max);
    let energy_err = (mean_energy(&h) - 1.0).abs();
    Ok((
        spectrum_err <= 1e-10 && energy_err <= 1e-12,
        format!("spectrum_error={spectrum_err:.3e} energy_error={energy_err:.3e}"),
    ))
}

fn saturation_case(name: &str) -> Result<SaturationCase, String> {
    let max_n = name
        .strip_prefix("hadamard_")
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0);
    let suite = e(saturation_suite(max_n))?;
    suite
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| format!("no saturation case named {name}"))
}

fn check_saturation(opts: &VerifyOpts, name: &str) -> CheckResult {
    let case = saturation_case(name)?;
    let src = e(standard_basis(BasisKind::Computational, case.hamiltonian.dim()))?;
    let chk = e(achieves_transform(
        &case.hamiltonian,
        case.time,
        &src,
        &case.target,
        opts.tol,
    ))?;
    let et_err = (mean_energy(&case.hamiltonian) * case.time - case.expected_et).abs();
    let mut passed = chk.achieved && et_err <= 1e-9;
    let mut detail = format!(
        "max_column_error={:.3e} et_error={et_err:.3e}",
        chk.max_column_error
    );
    if name == "two_qubit" {
        // This construction reaches its target with every column phase at pi/4.
        let phase_err = chk
            .recovered_phases
            .iter()
            .map(|p| (p - PI / 4.0).abs())
            .fold(0.0f64, f64::max);
        passed &= phase_err <= opts.tol;
        detail += &format!(" phase_error={phase_err:.3e}");
    }
    Ok((passed, detail))
}

fn check_permutation(_: &VerifyOpts, d: usize) -> CheckResult {
    let u = e(unitary_eigphases(&cyclic_shift(d)))?;
    let mut expected: Vec<f64> = (0..d)
        .map(|k| principal_phase(2.0 * PI * k as f64 / d as f64))
        .collect();
    expected.sort_by(f64::total_cmp);
    let mut got = u.eigenphases().to_vec();
    got.sort_by(f64::total_cmp);
    let phase_err = got
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    // Lifting the negative phases by 2pi gives the roots-of-unity sum pi(d-1).
    let lifted: f64 = got
        .iter()
        .map(|&a| if a < -1e-9 { a + 2.0 * PI } else { a })
        .sum();
    let sum_err = (lifted - PI * (d as f64 - 1.0)).abs();
    let (et, _) = e(et_from_unitary(&u))?;
    let et_err = (et - PI * (d as f64 - 1.0) / d as f64).abs();
    Ok((
        phase_err <= 1e-9 && sum_err <= 1e-8 && et_err <= 1e-9,
        format!("phase_error={phase_err:.3e} sum_error={sum_err:.3e} et_error={et_err:.3e}"),
    ))
}

fn check_permutation_sqrt(_: &VerifyOpts) -> CheckResult {
    let shift = cyclic_shift(3);
    let u = e(unitary_eigphases(&shift))?;
    let root = unitary_root(&u, 2);
    let third = 1.0 / 3.0;
    let rows = [
        [2.0 * third, -third, 2.0 * third],
        [2.0 * third, 2.0 * third, -third],
        [-third, 2.0 * third, 2.0 * third],
    ];
    let expected = ComplexMatrix::from_fn(3, |i, j| C64::new(rows[i][j], 0.0));
    let entry_err = root.max_abs_diff(&expected);
    let square_err = root.mul(&root).max_abs_diff(&shift);
    Ok((
        entry_err <= 1e-12 && square_err <= 1e-12,
        format!("entry_error={entry_err:.3e} square_error={square_err:.3e}"),
    ))
}

fn check_fidelity_curve(_: &VerifyOpts) -> CheckResult {
    // |<0|e^{-iHt}|0>|^2 = (5 + 4 cos t)/9 for the fast-qutrit projector,
    // never dipping below 1/9.
    let h = e(construct_optimal(&OptimalKind::QutritPlus))?;
    let mut curve_err = 0.0f64;
    let mut min_val = f64::INFINITY;
    for k in 0..100 {
        let t = 2.0 * PI * k as f64 / 99.0;
        let got = mat_exp(&h, t).matrix().get(0, 0).norm_sqr();
        curve_err = curve_err.max((got - (5.0 + 4.0 * t.cos()) / 9.0).abs());
        min_val = min_val.min(got);
    }
    let floor_margin = min_val - 1.0 / 9.0;
    Ok((
        curve_err <= 1e-10 && floor_margin >= -1e-10,
        format!("curve_error={curve_err:.3e} floor_margin={floor_margin:.3e}"),
    ))
}

fn check_necessity(_: &VerifyOpts) -> CheckResult {
    // |sum_i cos(E_i t)| <= sqrt(d) must hold at every achieved transform
    // time, and must fail at t = 0 where the sum is d.
    let suite = e(saturation_suite(4))?;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut all_ok = true;
    for case in &suite {
        let (value, ok) = constraint_check(&case.hamiltonian, case.time);
        all_ok &= ok;
        let d = case.hamiltonian.dim() as f64;
        worst_margin = worst_margin.max(value.abs() - d.sqrt());
    }
    let h = e(construct_optimal(&OptimalKind::TwoQubit))?;
    let (_, ok_at_zero) = constraint_check(&h, 0.0);
    Ok((
        all_ok && !ok_at_zero,
        format!("worst_margin={worst_margin:.3e} rejects_t0={}", !ok_at_zero),
    ))
}

fn check_cos_sum_region(_: &VerifyOpts, d: usize, sum_cap: f64) -> CheckResult {
    // Grid-plus-refinement minimum of sum_j cos(alpha_j) over the simplex
    // alpha_1 >= ... >= 0, sum alpha_j <= cap must stay above sqrt(d).
    let region = e(RegionSpec::new(d, sum_cap))?;
    let result = e(minimize_cos_sum(&region, 64))?;
    let margin = result.min_value - (d as f64).sqrt();
    Ok((
        margin > -1e-6,
        format!("min={:.10e} margin={margin:.3e}", result.min_value),
    ))
}

fn check_d6_bound_value(_: &VerifyOpts) -> CheckResult {
    let g = d6_refined_g();
    let dev = (g - 0.227).abs();
    Ok((dev < 2e-3, format!("g={g:.10e} deviation={dev:.3e}")))
}

fn check_classifier(opts: &VerifyOpts) -> CheckResult {
    // Random members of both unbiased-qutrit classes must classify back to
    // their class with both phase layers recovered mod 2pi.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7e57);
    let angle = |rng: &mut ChaCha8Rng| rng.random::<f64>() * 2.0 * PI - PI;
    let mut misses = 0usize;
    let mut max_err = 0.0f64;
    for _ in 0..1000 {
        let tag = if rng.random::<bool>() {
            QutritTag::Plus
        } else {
            QutritTag::Tilde
        };
        let kind = match tag {
            QutritTag::Plus => BasisKind::QutritPlus,
            QutritTag::Tilde => BasisKind::QutritTilde,
        };
        let diag = [0.0, angle(&mut rng), angle(&mut rng)];
        let elem = [angle(&mut rng), angle(&mut rng), angle(&mut rng)];
        let m = ComplexMatrix::diagonal_unitary(&diag)
            .mul(e(standard_basis(kind, 3))?.matrix())
            .scale_columns_by_phases(&elem);
        let class = e(classify_qutrit_unbiased(&e(OrderedBasis::new(m))?))?;
        if class.class_tag != tag {
            misses += 1;
            continue;
        }
        for i in 0..3 {
            max_err = max_err
                .max(principal_phase(class.diagonal_phases[i] - diag[i]).abs())
                .max(principal_phase(class.element_phases[i] - elem[i]).abs());
        }
    }
    Ok((
        misses == 0 && max_err <= 1e-8,
        format!("misclassified={misses}/1000 max_phase_error={max_err:.3e}"),
    ))
}

fn check_coherence(opts: &VerifyOpts) -> CheckResult {
    // Random rotation axes never beat the closed-form coherence maximum, and
    // the in-plane axis perpendicular to the Bloch vector attains it before
    // the coherence-saturation time.
    let states = [[0.3, -0.4, 0.6], [0.0, 0.0, 0.8], [0.55, 0.2, -0.5]];
    let times = [0.2, 0.7, 1.2];
    let energy = 1.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_attain = 0.0f64;
    for (i, r) in states.iter().enumerate() {
        let rho = state_from_bloch(&e(BlochVector::new(*r))?);
        let saturation_time = e(t_mc(&rho, energy))?;
        for &t in &times {
            let cmax = e(coherence_max_qubit(&rho, energy, t))?;
            let brute = e(max_coherence_random_axes(
                &rho,
                energy,
                t,
                2000,
                opts.seed.wrapping_add(i as u64),
            ))?;
            worst_excess = worst_excess.max(brute - cmax);
            if t <= saturation_time {
                let planar = r[0].abs() + r[1].abs() > 1e-12;
                let candidates: [[f64; 3]; 2] = if planar {
                    [[r[1], -r[0], 0.0], [-r[1], r[0], 0.0]]
                } else {
                    [[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]
                };
                let attained = candidates
                    .iter()
                    .map(|&axis| coherence_along_axis(&rho, energy, t, axis))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|x| x.to_string())?
                    .into_iter()
                    .fold(0.0f64, f64::max);
                worst_attain = worst_attain.max(cmax - attained);
            }
        }
    }
    Ok((
        worst_excess <= 1e-9 && worst_attain <= 1e-9,
        format!("worst_excess={worst_excess:.3e} worst_attainment_gap={worst_attain:.3e}"),
    ))
}

fn check_mc_limit(_: &VerifyOpts) -> CheckResult {
    // Reaching maximal coherence from |0> takes at least pi/(4E) for a
    // qubit; the d=3 value is frozen from an independent evaluation.
    let zero2 = [C64::ONE, C64::ZERO];
    let b2 = e(mc_speed_limit(&zero2, 1.0))?;
    let err2 = (b2.bound_value - PI / 4.0).abs();
    let zero3 = [C64::ONE, C64::ZERO, C64::ZERO];
    let b3 = e(mc_speed_limit(&zero3, 1.0))?;
    let err3 = (b3.bound_value - 0.636_877_745_416_339_6).abs();
    Ok((
        err2 <= 1e-12 && err3 <= 1e-12,
        format!("qubit_error={err2:.3e} qutrit_error={err3:.3e}"),
    ))
}

fn check_sample(opts: &VerifyOpts, target: QutritTag) -> CheckResult {
    let (hist, conjectured) = match target {
        QutritTag::Plus => (
            e(sample_plus(opts.samples, opts.seed, 200))?,
            2.0 * PI / 9.0,
        ),
        QutritTag::Tilde => (
            e(sample_tilde(opts.samples, opts.seed, 200))?,
            4.0 * PI / 9.0,
        ),
    };
    let excess = hist.min_et - conjectured;
    Ok((
        (-1e-9..=0.02).contains(&excess),
        format!(
            "min_et={:.10e} excess={excess:.3e} samples={}",
            hist.min_et, hist.n_samples
        ),
    ))
}

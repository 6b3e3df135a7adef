#!/usr/bin/env python3
"""Smoke test for the pyqsl extension module.

Build the cdylib with `cargo build -p qsl-py` (or --release), then run this
script; it loads the module straight from the target directory and exercises
the main entry points against known values.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load_pyqsl():
    root = pathlib.Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libpyqsl.so", "pyqsl.so", "libpyqsl.dylib", "pyqsl.dylib")
    ]
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("pyqsl", str(path))
            spec = importlib.util.spec_from_loader("pyqsl", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pyqsl cdylib not found; run `cargo build -p qsl-py` first")


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    q = load_pyqsl()

    # Closed-form bound table.
    b = q.unbiased_bound(3)
    approx(b["value"], 2 * math.pi / 9, 1e-12)
    assert b["kind"] == "lower" and b["tight"] == "tight"
    approx(q.qutrit_tilde_bound()["value"], 4 * math.pi / 9, 1e-12)
    approx(q.unbiased_bound(4)["value"], math.pi / 4, 1e-12)
    approx(q.unbiased_bound(2, energy=2.0)["value"], math.pi / 8, 1e-12)
    approx(q.perm_bound(3)["value"], 2 * math.pi / 3, 1e-12)
    upper, non_interacting = q.nqubit_upper_bound(2)
    assert upper["kind"] == "upper"
    approx(upper["value"], math.pi / 2, 1e-12)
    approx(non_interacting, math.pi / 2, 1e-12)
    approx(q.d6_refined_g(), 0.227, 2e-3)

    # Explicit Hamiltonians reach their targets at the stated times.
    h2q = q.construct_optimal("two_qubit")
    approx(q.mean_energy(h2q), 1.0, 1e-12)
    suite = q.saturation_suite(2)
    names = [case["name"] for case in suite]
    assert names == ["qutrit_plus", "qutrit_tilde", "two_qubit", "hadamard_1", "hadamard_2"]
    for case in suite:
        dim = len(case["hamiltonian"])
        chk = q.achieves_transform(
            case["hamiltonian"],
            case["time"],
            q.standard_basis("computational", dim),
            case["target"],
        )
        assert chk["achieved"], case["name"]
        value, satisfied = q.constraint_check(case["hamiltonian"], case["time"])
        assert satisfied and abs(value) <= math.sqrt(dim) + 1e-9, case["name"]

    # Pure-state bound saturation through the rank-1 construction.
    psi0 = [complex(1, 0), complex(0, 0), complex(0, 0)]
    psi1 = [complex(x, 0) for x in (1 / math.sqrt(3),) * 3]
    hp = q.pure_state_hamiltonian(psi0, psi1)
    t = q.pure_state_bound(psi0, psi1, energy=q.mean_energy(hp))["value"]
    u = q.mat_exp(hp, t)
    overlap = sum(a.conjugate() * b for a, b in zip(psi1, [row[0] for row in u]))
    approx(abs(overlap), 1.0)

    # Permutation effort and the exact square root of the qutrit shift.
    shift = q.cyclic_shift(3)
    et, bits = q.et_from_unitary(shift)
    approx(et, 2 * math.pi / 3)
    assert bits == [False, False, False]
    root = q.unitary_root(shift, 2)
    approx(root[0][0].real, 2 / 3, 1e-12)
    approx(root[0][1].real, -1 / 3, 1e-12)
    phases = sorted(q.eigenphases(shift))
    expected = sorted(
        math.remainder(2 * math.pi * k / 3, 2 * math.pi) for k in range(3)
    )
    for a, b in zip(phases, expected):
        approx(a, b)

    # Unbiasedness and the two-class decomposition.
    tilde = q.standard_basis("qutrit_tilde", 3)
    assert q.is_unbiased(q.standard_basis("computational", 3), tilde)
    cls = q.classify_qutrit(tilde)
    assert cls["class"] == "tilde"
    assert max(abs(p) for p in cls["diagonal_phases"]) <= 1e-9

    # Sampling runs are deterministic and respect the conjectured floor.
    hist = q.sample_basis("tilde", samples=2000, seed=7, bins=50)
    assert sum(hist["counts"]) == 2000
    assert len(hist["bin_edges"]) == 51
    assert hist["min_et"] >= 4 * math.pi / 9 - 1e-9
    again = q.sample_basis("tilde", samples=2000, seed=7, bins=50)
    assert hist["counts"] == again["counts"] and hist["min_et"] == again["min_et"]
    rec = q.sample_record("plus", seed=7, index=3)
    assert len(rec["phases"]) == 3 and len(rec["branch_bits"]) == 3
    assert rec["et"] >= 2 * math.pi / 9 - 1e-9

    # Coherence generation closed forms.
    rho = [[complex(0.75, 0), complex(0, 0)], [complex(0, 0), complex(0.25, 0)]]
    approx(q.t_mc(rho), math.pi / 4, 1e-12)
    approx(q.coherence_max_qubit(rho, 1.0, math.pi / 2), 0.5, 1e-12)
    approx(q.l1_coherence(rho), 0.0, 1e-15)
    zero = [complex(1, 0), complex(0, 0)]
    approx(q.mc_speed_limit(zero)["value"], math.pi / 4, 1e-12)
    approx(q.max_mc_overlap(zero), 0.5, 1e-12)
    hq = q.optimal_qubit_hamiltonian([0, 0, 1], [1, 0, 0])
    tq = q.qubit_transition_bound([0, 0, 1], [1, 0, 0])["value"]
    approx(tq, math.pi / 4, 1e-12)
    uq = q.mat_exp(hq, tq)
    approx(abs(uq[0][0]) ** 2, 0.5, 1e-9)

    # Brute-force oracles.
    res = q.minimize_cos_sum(2, math.pi / 4)
    approx(res["min_value"], 1 + math.cos(math.pi / 4), 1e-8)
    assert res["refined"] and len(res["argmin"]) == 2
    assert q.verify_theorem4(2)
    assert q.verify_d6_refinement()
    approx(
        q.min_et_for_transform(q.standard_basis("qutrit_plus", 3), 24),
        2 * math.pi / 9,
        5e-3,
    )

    # Errors surface as ValueError.
    for bad in (
        lambda: q.unbiased_bound(1),
        lambda: q.sample_basis("nope"),
        lambda: q.standard_basis("nope", 3),
        lambda: q.mc_speed_limit([complex(1, 0), complex(1, 0)]),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("pyqsl smoke test passed")


if __name__ == "__main__":
    main()

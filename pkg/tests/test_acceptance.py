"""End-to-end acceptance runs, one test per criterion, at the stated tolerances.

A summary line per criterion is printed at the end of the pytest run.
"""
import json
import math
import time

import numpy as np
import pytest

import oracles
from conftest import record
from lens_ehg.errors import ConfigurationError
from lens_ehg.identities import (
    DEFAULT_SIGMA as SIGMA, DEFAULT_TAU as TAU, residue_constant, verify_an_evaluation, verify_an_involution,
    verify_an_limit, verify_an_transform, verify_bc1_as_a1, verify_bcn_evaluation, verify_bcn_limit,
    verify_bcn_transform, verify_cauchy_det, verify_elliptic_beta, verify_frobenius_det, verify_kernel_suite,
)
from lens_ehg.kernel import ModularParams, lens_gamma
from lens_ehg.lattice import verify_star_star
from lens_ehg.susy_index import check_seiberg_duality, map_su_magnetic, random_spec


def _worst(reports):
    return max((r.rel_err for r in reports), default=0.0)


def _fails(reports):
    return [f"{r.identity_name} seed={r.seed}: {r.failure_reason}" for r in reports if not r.passed]


def test_criterion_01_kernel_suite():
    start = time.perf_counter()
    reps = [verify_kernel_suite(r, samples=200, seed=0, tol=1e-10) for r in (1, 2, 3)]
    elapsed = time.perf_counter() - start
    worst = max(max(rep.details["errors"].values()) for rep in reps)
    ok = all(rep.passed for rep in reps) and worst <= 1e-10 and elapsed < 60
    record(1, "kernel identity suite, 200 points, r=1..3", ok, f"worst {worst:.2e}, {elapsed:.1f}s")
    assert ok, _fails(reps)


def test_criterion_02_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        r = int(rng.integers(1, 4))
        m = int(rng.integers(0, r))
        z = complex(rng.uniform(-1, 1), rng.uniform(0.02, 0.65))
        ours = lens_gamma(z, m, ModularParams(SIGMA, TAU, r))
        ref = oracles.lens_gamma(z, m, SIGMA, TAU, r)
        worst = max(worst, abs(ours - ref) / abs(ref))
    record(2, "lens_gamma against the mpmath double product, 20 points", worst <= 1e-12, f"worst {worst:.2e}")
    assert worst <= 1e-12


def test_criterion_03_residue_constant():
    errs = []
    for r in (1, 2, 3):
        p = ModularParams(SIGMA, TAU, r)
        target = 1j / (2 * math.pi * oracles.lambda_const(SIGMA, TAU, r))
        errs.append(abs(residue_constant(p) / target - 1))
    worst = max(errs)
    record(3, "residue constant i/(2 pi lambda), r=1..3", worst <= 1e-6, f"worst {worst:.2e}")
    assert worst <= 1e-6


def test_criterion_04_determinants():
    reps = []
    for fn in (verify_frobenius_det, verify_cauchy_det):
        for n in (2, 3):
            for k in (1, 2):
                for r in (1, 2):
                    reps += [fn(n, r, k, seed=seed, tol=1e-10) for seed in range(50)]
    ok = all(rep.passed for rep in reps)
    record(4, "determinant lemmas, 50 samples per (n, k, r)", ok, f"{len(reps)} runs, worst {_worst(reps):.2e}")
    assert ok, _fails(reps)


def test_criterion_05_elliptic_beta():
    reps, slowest = [], 0.0
    for r in (1, 2, 3):
        for seed in range(10):
            rep = verify_elliptic_beta(r, seed=seed, tol=1e-8, sym_tol=1e-12)
            slowest = max(slowest, rep.runtime_ms / 1000)
            reps.append(rep)
    sym = max(max(rep.details["symmetry_err"], rep.details["truncation_err"]) for rep in reps)
    ok = all(rep.passed for rep in reps) and slowest < 10 and sym <= 1e-12
    record(5, "elliptic beta sum/integral, r=1..3 x 10 seeds", ok,
           f"worst {_worst(reps):.2e}, symmetry {sym:.2e}, slowest {slowest:.2f}s")
    assert ok, _fails(reps)


def test_criterion_06_an_evaluation():
    reps = [verify_an_evaluation(1, r, seed=0, tol=1e-8) for r in (1, 2, 3)]
    start = time.perf_counter()
    reps.append(verify_an_evaluation(2, 1, seed=0, tol=1e-6))
    elapsed = time.perf_counter() - start
    ok = all(rep.passed for rep in reps) and elapsed < 300
    record(6, "A_n evaluation, n=1 r=1..3 and n=2 r=1", ok, f"worst {_worst(reps):.2e}, n=2 took {elapsed:.1f}s")
    assert ok, _fails(reps)


def test_criterion_07_an_transformation():
    reps = []
    for m, n in ((0, 0), (0, 1), (1, 0), (1, 1)):
        for r in (1, 2):
            reps += [verify_an_transform(m, n, r, seed=seed, tol=1e-6) for seed in range(5)]
    inv = [verify_an_involution(m, n, r, seed=0, tol=1e-8)
           for m, n in ((0, 0), (0, 1), (1, 0), (1, 1)) for r in (1, 2)]
    ok = all(rep.passed for rep in reps + inv)
    record(7, "A_n transformation and involution", ok,
           f"transform worst {_worst(reps):.2e}, involution worst {_worst(inv):.2e}")
    assert ok, _fails(reps + inv)


def test_criterion_08_bcn_evaluation():
    reps = [verify_bcn_evaluation(1, r, seed=0, tol=1e-8) for r in (1, 2, 3)]
    reps.append(verify_bcn_evaluation(2, 1, seed=0, tol=1e-5))
    ok = all(rep.passed for rep in reps)
    record(8, "BC_n evaluation, n=1 r=1..3 and n=2 r=1", ok, f"worst {_worst(reps):.2e}")
    assert ok, _fails(reps)


def test_criterion_09_bcn_transformation():
    reps = []
    for m, n in ((0, 0), (0, 1), (1, 1)):
        for r in (1, 2):
            reps += [verify_bcn_transform(m, n, r, seed=seed, tol=1e-6) for seed in range(5)]
    bc1 = [verify_bc1_as_a1(m, r, seed=0, tol=1e-10) for m in (0, 1) for r in (1, 2)]
    ok = all(rep.passed for rep in reps + bc1)
    record(9, "BC_n transformation and BC_1 = A_1", ok,
           f"transform worst {_worst(reps):.2e}, BC_1/A_1 worst {_worst(bc1):.2e}")
    assert ok, _fails(reps + bc1)


def test_criterion_10_limit_lemmas():
    reps = [fn(r, seed=0, deltas=(1e-2, 1e-3), tol=5e-3) for fn in (verify_an_limit, verify_bcn_limit)
            for r in (1, 2)]
    ok = all(rep.passed for rep in reps)
    trend = "; ".join(f"{rep.identity_name} r={rep.params['r']}: "
                      + " -> ".join(f"{e:.1e}" for e in rep.details["rel_errs"]) for rep in reps)
    record(10, "residue limit lemmas, delta 1e-2 -> 1e-3", ok, trend)
    assert ok, _fails(reps)


def test_criterion_11_seiberg_duality():
    reps = []
    for group, Nc, Nf in (("SU", 2, 3), ("SU", 2, 4), ("Sp", 1, 3)):
        for r in (1, 2):
            reps.append(check_seiberg_duality(random_spec(group, Nc, Nf, r, seed=0), tol=1e-6))
    with pytest.raises(ConfigurationError, match="quantization") as exc:
        map_su_magnetic(random_spec("SU", 2, 4, 2, seed=0, n_B=1))
    ok = all(rep.passed for rep in reps)
    record(11, "Seiberg duality SU(2) N_f=3,4, Sp(2) N_f=3, r=1,2; quantization guard", ok,
           f"worst {_worst(reps):.2e}; rejected with: {str(exc.value)[:60]}...")
    assert ok, _fails(reps)


def test_criterion_12_star_star():
    reps = [verify_star_star(n, r, seed=seed, tol=1e-5, route_tol=1e-8)
            for n in (1, 2) for r in (1, 2) for seed in range(3)]
    route = max(max(rep.details["route_errors"].values()) for rep in reps)
    ok = all(rep.passed for rep in reps) and route <= 1e-8
    record(12, "star-star relation, n=1,2, r=1,2, with the A_{n-1} route", ok,
           f"direct worst {_worst(reps):.2e}, route worst {route:.2e}")
    assert ok, _fails(reps)


def test_criterion_13_reproducibility():
    runs = [
        lambda: verify_elliptic_beta(2, seed=3),
        lambda: verify_an_transform(1, 1, 2, seed=4),
        lambda: verify_bcn_transform(0, 1, 2, seed=1),
        lambda: verify_star_star(2, 2, seed=5),
        lambda: check_seiberg_duality(random_spec("SU", 2, 3, 2, seed=6)),
        lambda: verify_cauchy_det(3, 2, 2, seed=7),
    ]

    def payload(rep):
        d = rep.to_dict()
        d.pop("runtime_ms")
        return json.dumps(d, sort_keys=True)

    same = [payload(run()) == payload(run()) for run in runs]
    record(13, "bit-identical reports for repeated seeded runs", all(same), f"{sum(same)}/{len(same)} identical")
    assert all(same)

import json

import pytest

from lens_ehg.errors import SamplerError
from lens_ehg.identities import (
    VerificationReport, compare, jsonable, sample_an, sample_bcn, verify_an_evaluation, verify_an_involution,
    verify_an_transform, verify_bc1_as_a1, verify_bcn_transform, verify_cauchy_det, verify_elliptic_beta,
    verify_frobenius_det, verify_kernel_suite,
)
from lens_ehg.kernel import ModularParams, NumericsConfig
from lens_ehg.sumint import an_dual, check_an_contour

REPORT_KEYS = {"identity_name", "params", "lhs", "rhs", "abs_err", "rel_err", "quad_err", "tol", "pass",
               "runtime_ms", "artifact_version", "seed", "failure_reason"}


def test_compare_and_jsonable():
    assert compare(1.0, 1.0, 1e-12) == (0.0, 0.0, True)
    _, rel, ok = compare(1.1, 1.0, 1e-3)
    assert not ok and rel == pytest.approx(0.1)
    assert jsonable({"z": 1 + 2j, "t": (1, 2)}) == {"z": {"re": 1.0, "im": 2.0}, "t": [1, 2]}


def test_report_schema():
    rep = verify_frobenius_det(2, 1, 1, seed=0)
    d = rep.to_dict()
    assert REPORT_KEYS <= set(d)
    assert set(d["lhs"]) == {"re", "im"}
    assert d["params"]["seed"] == 0 and "numerics" in d["params"]
    json.dumps(d)


def test_sampler_band_and_balancing():
    for r in (1, 2):
        p = ModularParams(0.07 + 0.34j, -0.04 + 0.37j, r)
        fv = sample_an(1, 1, r, seed=5)
        fv.check_balancing(p)
        check_an_contour(fv, p)
        check_an_contour(an_dual(fv, p), p)
        assert len(fv.t) == 4
    assert sample_an(0, 1, 2, seed=3) == sample_an(0, 1, 2, seed=3)


def test_sampler_refuses_without_room():
    with pytest.raises(SamplerError):
        sample_bcn(0, 1, 1, cfg=NumericsConfig(pole_guard=0.5))


@pytest.mark.parametrize("r", [1, 2])
def test_kernel_suite_small(r):
    rep = verify_kernel_suite(r, samples=20)
    assert rep.passed, rep.failure_reason
    assert rep.details["errors"]["reflection"] < 1e-10


def test_elliptic_beta_r2():
    rep = verify_elliptic_beta(2, seed=1)
    assert rep.passed, rep.failure_reason


def test_an_transform_and_involution():
    rep = verify_an_transform(1, 0, 2, seed=0)
    assert rep.passed and rep.rel_err < 1e-6
    rep = verify_an_involution(0, 1, 1, seed=0)
    assert rep.passed


def test_an_transform_with_nonzero_hyperplane():
    rep = verify_an_transform(0, 1, 2, seed=1, Z=0.3 + 0.04j, Y=1)
    assert rep.passed, rep.failure_reason


def test_an_evaluation_n1():
    assert verify_an_evaluation(1, 3, seed=0).passed


def test_bcn_transform_and_bc1():
    assert verify_bcn_transform(0, 1, 2, seed=0).passed
    assert verify_bc1_as_a1(0, 2, seed=0).passed


def test_determinants():
    for k in (1, 2):
        assert verify_frobenius_det(3, 2, k, seed=1).passed
        assert verify_cauchy_det(3, 2, k, seed=1).passed


def test_failure_is_reported_not_raised():
    # an impossible tolerance gives a failing report with a reason
    rep = verify_frobenius_det(2, 1, 1, seed=0, tol=1e-30)
    assert isinstance(rep, VerificationReport)
    assert rep.rel_err > 0 or rep.passed
    if not rep.passed:
        assert "exceeds" in rep.failure_reason


def test_infeasible_report():
    rep = verify_bcn_transform(0, 1, 1, seed=0, cfg=NumericsConfig(pole_guard=0.5))
    assert not rep.passed and rep.infeasible
    assert rep.to_dict()["pass"] is False

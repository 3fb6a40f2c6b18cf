from fractions import Fraction

import pytest

from lens_ehg.errors import ConfigurationError
from lens_ehg.susy_index import (
    GaugeTheorySpec, charge_bookkeeping, check_seiberg_duality, dual_rank, map_su_electric, map_su_magnetic,
    r_B, r_q, r_Q, random_spec, su_electric_index, su_electric_index_one_loop, su_tilde_map,
)


def test_charges():
    assert r_q(2, 3) == Fraction(1, 3)
    assert r_Q(2, 3) == Fraction(2, 3)
    assert r_B(2, 3) == Fraction(2, 1)
    assert dual_rank("SU", 2, 5) == 3
    assert dual_rank("Sp", 1, 4) == 1
    assert all(charge_bookkeeping(2, 4).values())


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        GaugeTheorySpec("SO", 2, 3, 1, 0.1j, 0.1j, [0] * 3, [0] * 3)
    with pytest.raises(ConfigurationError):
        random_spec("SU", 3, 3, 1)
    spec = random_spec("SU", 2, 3, 2, seed=1)
    with pytest.raises(ConfigurationError):
        GaugeTheorySpec("SU", 2, 3, 2, spec.sigma, spec.tau, [0.1, 0, 0], spec.abar, spec.sbar, spec.bbar)


def test_quantization_rejected():
    spec = random_spec("SU", 2, 4, 2, seed=0, n_B=1)
    with pytest.raises(ConfigurationError, match="quantization"):
        map_su_magnetic(spec)


def test_electric_map_is_balanced():
    spec = random_spec("SU", 2, 4, 2, seed=3)
    fv = map_su_electric(spec)
    fv.check_balancing(spec.params)
    assert (fv.m, fv.n) == (4 - 2 - 1, 2 - 1)


def test_tilde_map_is_involutive():
    spec = random_spec("SU", 2, 4, 2, seed=3, n_B=2)
    fv = map_su_electric(spec)
    back = su_tilde_map(su_tilde_map(fv, 2, 4, 2, 2), 2, 4, 2, 2)
    assert all(abs(x - y) < 1e-12 for x, y in zip(back.t, fv.t))


def test_one_loop_assembly_matches_mapped_integral():
    spec = random_spec("SU", 2, 3, 1, seed=0)
    a = su_electric_index(spec).value
    b = su_electric_index_one_loop(spec).value
    assert abs(a / b - 1) < 1e-12


@pytest.mark.parametrize("group, Nc, Nf, r", [("SU", 2, 3, 2), ("Sp", 1, 3, 1)])
def test_duality_quick(group, Nc, Nf, r):
    rep = check_seiberg_duality(random_spec(group, Nc, Nf, r, seed=0))
    assert rep.passed, rep.failure_reason
    assert rep.details["theorem_instance_matches"]


def test_duality_with_baryonic_holonomy():
    rep = check_seiberg_duality(random_spec("SU", 2, 4, 2, seed=1, n_B=2, baryon_B=0.02j))
    assert rep.passed, rep.failure_reason

import numpy as np
import pytest

from lens_ehg.errors import ConfigurationError, ContourError
from lens_ehg.identities import DEFAULT_SIGMA as SIGMA, DEFAULT_TAU as TAU, an_evaluation_rhs, sample_an, sample_bcn
from lens_ehg.kernel import ModularParams, lens_gamma
from lens_ehg.sumint import (
    FlavorVectorAn, FlavorVectorBCn, an_cross_product, an_dual, an_integrand, an_sum_integral,
    bc1_as_a1, bcn_dual, bcn_integrand, bcn_sum_integral, check_an_contour, enumerate_tuples,
)


def test_enumerate_tuples():
    assert enumerate_tuples(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    full = enumerate_tuples(2, 3, total=1)
    assert len(full) == 9
    assert all(sum(y) % 3 == 1 for y in full)
    assert enumerate_tuples(0, 4, total=2) == [(2,)]


def test_flavor_vector_shapes():
    with pytest.raises(ConfigurationError):
        FlavorVectorAn(0, 0, [0.1j], [0.1j, 0.1j], [0, 0], [0, 0])
    with pytest.raises(ConfigurationError):
        FlavorVectorBCn(0, 0, [0.1j] * 3, [0] * 3)


def test_balancing_checks():
    p = ModularParams(SIGMA, TAU, 2)
    fv = sample_an(0, 1, 2, seed=1)
    fv.check_balancing(p)
    bad = FlavorVectorAn(fv.m, fv.n, fv.t, fv.s, fv.a, [fv.b[0] + 1] + list(fv.b[1:]), fv.Z, fv.Y)
    with pytest.raises(ConfigurationError):
        bad.check_balancing(p)
    shifted = FlavorVectorAn(fv.m, fv.n, [fv.t[0] + 0.1] + list(fv.t[1:]), fv.s, fv.a, fv.b)
    with pytest.raises(ConfigurationError):
        shifted.check_balancing(p)


def test_contour_violation_is_reported():
    p = ModularParams(SIGMA, TAU, 1)
    fv = sample_an(0, 1, 1, seed=0)
    t = list(fv.t)
    s = list(fv.s)
    t[0] -= 0.5j
    s[0] += 0.5j
    with pytest.raises(ContourError):
        check_an_contour(FlavorVectorAn(fv.m, fv.n, t, s, fv.a, fv.b), p)


def test_a0_closed_form():
    # with n = 0 the sum/integral is a single product of gammas at z = Z
    r = 2
    p = ModularParams(SIGMA, TAU, r)
    fv = sample_an(1, 0, r, seed=3)
    val = an_sum_integral(fv, p).value
    z, y = fv.Z, fv.Y
    direct = np.prod([lens_gamma(ti + z, ai + y, p) * lens_gamma(si - z, bi - y, p)
                      for ti, ai, si, bi in zip(fv.t, fv.a, fv.s, fv.b)])
    assert abs(val / direct - 1) < 1e-14


def test_an_integrand_is_one_period_periodic():
    r = 2
    p = ModularParams(SIGMA, TAU, r)
    fv = sample_an(0, 1, r, seed=0)
    c = fv.contour_offset
    z = np.array([0.23 + 1j * c, -0.23 + 1j * c])
    shift = np.array([1.0, -1.0])
    a = an_integrand(z, (1, 1), fv, p)
    b = an_integrand(z + shift, (1, 1), fv, p)
    assert abs(a / b - 1) < 1e-12


def test_bc_integrand_reflection_symmetry():
    p = ModularParams(SIGMA, TAU, 2)
    fv = sample_bcn(0, 1, 2, seed=0)
    a = bcn_integrand(np.array([0.31]), (1,), fv, p)
    b = bcn_integrand(np.array([-0.31]), (-1 % 2,), fv, p)
    assert abs(a / b - 1) < 1e-12


def test_dual_maps():
    p = ModularParams(SIGMA, TAU, 2)
    fv = sample_an(1, 0, 2, seed=0)
    d = an_dual(fv, p)
    assert (d.m, d.n) == (fv.n, fv.m)
    assert d.Z == fv.Z + fv.T
    twice = an_dual(d, p)
    assert np.allclose(twice.t, fv.t, atol=1e-15) and np.allclose(twice.s, fv.s, atol=1e-15)
    bfv = sample_bcn(0, 1, 2, seed=0)
    bd = bcn_dual(bfv, p)
    assert np.allclose(np.array(bd.t) + np.array(bfv.t), p.st / 2)


def test_bc1_as_a1_and_n0():
    p = ModularParams(SIGMA, TAU, 1)
    fv = sample_bcn(0, 1, 1, seed=2)
    a1 = bc1_as_a1(fv)
    assert (a1.m, a1.n) == (fv.m, 1)
    assert list(a1.t) + list(a1.s) == list(fv.t)
    with pytest.raises(ConfigurationError):
        bc1_as_a1(sample_bcn(0, 0, 1, seed=0))
    assert bcn_sum_integral(sample_bcn(1, 0, 1, seed=0), p).value == 1


def test_cross_product_matches_loop():
    p = ModularParams(SIGMA, TAU, 2)
    fv = sample_an(0, 0, 2, seed=4)
    loop = 1
    for ti, ai in zip(fv.t, fv.a):
        for si, bi in zip(fv.s, fv.b):
            loop *= lens_gamma(ti + si, ai + bi, p)
    assert abs(an_cross_product(fv, p) / loop - 1) < 1e-14


def test_m0_closed_form_r1():
    p = ModularParams(SIGMA, TAU, 1)
    fv = sample_an(0, 1, 1, seed=7, both_sides=False)
    assert abs(an_sum_integral(fv, p).value / an_evaluation_rhs(fv, p) - 1) < 1e-9

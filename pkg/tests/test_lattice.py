import cmath

import numpy as np
import pytest

from golden_values import GOLDEN, SIGMA, SPIN_A, SPIN_B, STAR_CORNERS, STAR_RAPIDITIES, TAU
from lens_ehg.errors import ConfigurationError
from lens_ehg.kernel import LensArg, ModularParams, lens_gamma
from lens_ehg.lattice import (
    LatticeParams, Spin, edge_factors, irf_weight, maps_agree, phi_fn, sample_star, self_weight,
    spin_integrate, star_to_an, star_to_an_dual, verify_star_star, w_weight, wbar_weight,
)
from lens_ehg.sumint import an_dual

P2 = ModularParams(SIGMA, TAU, 2)


def rel(a, b):
    return abs(complex(a) / complex(b) - 1)


def test_spin_constraints():
    s = Spin.from_free([0.3, 0.9], [1, 1], 3)
    assert s.x[-1] == pytest.approx(-1.2) and s.m == (1, 1, 1)
    s.check(3)
    with pytest.raises(ConfigurationError):
        Spin((0.3, 0.2), (0, 0))
    with pytest.raises(ConfigurationError):
        Spin((0.3, -0.3), (1, 0)).check(2)


def test_lattice_params_eta():
    lp = LatticeParams(P2, 2, 0.1, 0.2, 0.0, 0.0)
    assert lp.eta == -0.5j * (SIGMA + TAU)


def test_phi_golden_and_reflection():
    assert rel(phi_fn(LensArg(0.2, 1), P2), GOLDEN["phi_0.2_1_r2"]) < 1e-12
    z = 0.13 + 0.05j
    assert abs(phi_fn((z, 1), P2) * phi_fn((-z, -1), P2) - 1) < 1e-12
    w = 0.21 + 0.1j
    assert rel(phi_fn(((SIGMA + TAU) / 2 - w, -1), P2), lens_gamma(w, 1, P2)) < 1e-14


def test_weight_goldens():
    a, b = Spin(*SPIN_A), Spin(*SPIN_B)
    assert rel(w_weight(0.1j, a, b, P2), GOLDEN["w_n2_r2"]) < 1e-12
    assert rel(self_weight(a, P2), GOLDEN["self_n2_r2"]) < 1e-12
    assert rel(wbar_weight(0.1j, a, b, P2), GOLDEN["wbar_n2_r2"]) < 1e-12


def test_weight_ordering():
    # two-component spins are (x, -x): the pair differences are closed under
    # negation, so the order cannot matter there
    a, b = Spin(*SPIN_A), Spin(*SPIN_B)
    assert rel(w_weight(0.1j, a, b, P2), w_weight(0.1j, b, a, P2)) < 1e-13
    p3 = ModularParams(SIGMA, TAU, 3)
    c = Spin.from_free([0.1, 0.35], [1, 0], 3)
    d = Spin.from_free([0.6, 0.2], [2, 2], 3)
    assert rel(w_weight(0.1j, c, d, p3), w_weight(0.1j, d, c, p3)) > 1e-3


def test_single_component_spins():
    a = Spin((0.0,), (0,))
    assert self_weight(a, P2) == 1
    assert rel(w_weight(0.05, a, a, P2), phi_fn((0.05j, 0), P2)) < 1e-14


def test_wbar_definition():
    a, b = Spin(*SPIN_A), Spin(*SPIN_B)
    eta = -0.5j * P2.st
    alpha = 0.07 + 0.02j
    root = cmath.sqrt(self_weight(a, P2)) * cmath.sqrt(self_weight(b, P2))
    assert rel(wbar_weight(alpha, a, b, P2) / w_weight(eta - alpha, a, b, P2), root) < 1e-12
    half = eta / 2
    assert rel(wbar_weight(half, a, b, P2), root * w_weight(half, a, b, P2)) < 1e-12


def test_spin_integrate_measure():
    one = lambda x, m: np.ones(x.shape[1])
    assert spin_integrate(one, 1, 2) == 1
    assert spin_integrate(one, 2, 2) == pytest.approx(2)
    assert spin_integrate(one, 3, 2) == pytest.approx(4)
    f = lambda x, m: np.cos(2 * np.pi * x[0]) ** 2 + m[0]
    g = lambda x, m: np.exp(2j * np.pi * x[0])
    lin = spin_integrate(lambda x, m: 2 * f(x, m) + 3 * g(x, m), 2, 2)
    assert lin == pytest.approx(2 * spin_integrate(f, 2, 2) + 3 * spin_integrate(g, 2, 2))
    # m-tuples (0, 0) and (1, 1): 0.5 + 1.5
    assert spin_integrate(f, 2, 2) == pytest.approx(2.0)


def test_irf_goldens():
    corners = tuple(Spin(*c) for c in STAR_CORNERS)
    lp = LatticeParams(P2, 2, *STAR_RAPIDITIES)
    w1 = irf_weight(1, corners, lp)
    w2 = irf_weight(2, corners, lp)
    assert rel(w1, GOLDEN["irf1_n2_r2"]) < 1e-10
    assert rel(w2, GOLDEN["irf2_n2_r2"]) < 1e-10
    assert abs(w1 - w2) > 1e-4
    with pytest.raises(ConfigurationError):
        irf_weight(3, corners, lp)


def test_irf_n1_is_product_of_four_weights():
    corners, lp = sample_star(1, 2, seed=4)
    si, sj, sk, sl = corners
    eta = lp.eta
    direct = (w_weight(eta - (lp.u - lp.v), sk, si, P2) * w_weight(eta - (lp.u_prime - lp.v_prime), sj, si, P2)
              * w_weight(lp.u_prime - lp.v, si, si, P2) * w_weight(lp.u - lp.v_prime, si, sl, P2))
    assert rel(irf_weight(1, corners, lp), direct) < 1e-14


def test_map_consistency_is_algebraic():
    corners, lp = sample_star(2, 2, seed=1)
    fv = star_to_an(corners, lp)
    fv.check_balancing(P2)
    assert maps_agree(an_dual(fv, P2), star_to_an_dual(corners, lp), 2)


def test_sampled_rapidities_are_real_and_feasible():
    _, lp = sample_star(2, 1, seed=9)
    h = P2.st.imag
    assert all(complex(v).imag == 0 for v in (lp.u, lp.u_prime, lp.v, lp.v_prime))
    assert (lp.u - lp.v).real > 0 and (lp.u_prime - lp.v_prime).real > 0
    assert (lp.u_prime - lp.v).real < h / 2 and (lp.u - lp.v_prime).real < h / 2


@pytest.mark.parametrize("n, r", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_star_star(n, r):
    rep = verify_star_star(n, r, seed=2)
    assert rep.passed, rep.failure_reason
    assert rep.details["routes_ok"] and rep.details["maps_ok"]
    if n == 1:
        assert rep.rel_err <= 1e-12


def test_edge_factor_ratio_is_cross_product():
    from lens_ehg.sumint import an_cross_product
    corners, lp = sample_star(2, 2, seed=0)
    left, right = edge_factors(corners, lp)
    assert rel(right / left, an_cross_product(star_to_an(corners, lp), P2)) < 1e-12

"""Multi-spin lattice model built from the lens elliptic gamma function.

Spins carry n continuous components x and n discrete components m.  The
continuous parts are stored with sum exactly zero: the weights pick up
m-dependent phases under x -> x + 1, so "zero mod 1" is not good enough.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, InfeasibleError, SamplerError
from .identities import VerificationReport, _echo, compare, jsonable
from .kernel import DEFAULT_CONFIG, ModularParams, NumericsConfig, canonical_mod, lambda_const, lens_gamma
from .quadrature import ContourSpec, ValueWithError, refine_until
from .sumint import FlavorVectorAn, an_cross_product, an_dual, an_sum_integral, enumerate_tuples
from ._parallel import ordered_map

SUM_TOL = 1e-12


@dataclass(frozen=True)
class Spin:
    """n pairs (x_j, m_j) with sum(x) = 0 and sum(m) = 0 mod r."""

    x: tuple
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        if len(self.x) != len(self.m) or not self.x:
            raise ConfigurationError("a spin needs the same positive number of x and m components")
        if abs(sum(self.x)) > SUM_TOL:
            raise ConfigurationError(f"spin components must sum to zero, got {sum(self.x):.3g}")

    @property
    def n(self):
        return len(self.x)

    def check(self, r):
        if canonical_mod(sum(self.m), r) != 0:
            raise ConfigurationError(f"discrete spin components must sum to 0 mod {r}")
        return self

    @classmethod
    def from_free(cls, x_free, m_free, r):
        """Build a spin from its first n-1 components; the last one is fixed by the constraints."""
        x_free = [float(v) for v in x_free]
        m_free = [int(v) for v in m_free]
        return cls(x_free + [-sum(x_free)], m_free + [canonical_mod(-sum(m_free), r)])

    def to_dict(self):
        return {"x": list(self.x), "m": list(self.m)}


class LatticeParams(NamedTuple):
    modular: ModularParams
    n: int
    u: complex
    u_prime: complex
    v: complex
    v_prime: complex

    @property
    def eta(self):
        """Crossing parameter -i(sigma+tau)/2, always derived from sigma and tau."""
        return -0.5j * self.modular.st

    def to_dict(self):
        p = self.modular
        return jsonable({"sigma": p.sigma, "tau": p.tau, "r": p.r, "n": self.n, "u": complex(self.u),
                         "u_prime": complex(self.u_prime), "v": complex(self.v),
                         "v_prime": complex(self.v_prime)})


def _phi(z, m, params, cfg):
    return lens_gamma(params.st / 2 - np.asarray(z, dtype=complex), -np.asarray(m), params, cfg)


def phi_fn(arg, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Phi(z, m) = Gamma((sigma+tau)/2 - z, -m) for a LensArg or (z, m) pair."""
    z, m = arg
    return _scalar(_phi(z, m, params, cfg))


def _xm(spin):
    if isinstance(spin, Spin):
        return np.array(spin.x, dtype=complex), np.array(spin.m)
    x, m = spin
    return np.asarray(x, dtype=complex), np.asarray(m)


def _w(alpha, a, b, params, cfg):
    """prod_{i,j} Phi(x_{a,i} - x_{b,j} + i alpha, m_{a,i} - m_{b,j}).

    Either spin may be a (x, m) pair with x of shape (n, K) for a batch of
    quadrature nodes; the m parts are always plain vectors.
    """
    xa, ma = _xm(a)
    xb, mb = _xm(b)
    if xa.ndim == 1:
        xa = xa[:, None]
    if xb.ndim == 1:
        xb = xb[:, None]
    diff = xa[:, None, :] - xb[None, :, :] + 1j * alpha
    dm = (ma[:, None] - mb[None, :])[:, :, None]
    vals = _phi(diff, dm, params, cfg)
    return np.prod(vals.reshape(-1, vals.shape[-1]), axis=0)


def _scalar(v):
    v = np.asarray(v)
    return complex(v.ravel()[0]) if v.size == 1 else v


def w_weight(alpha, a: Spin, b: Spin, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Boltzmann weight W_alpha(a, b)."""
    return _scalar(_w(alpha, a, b, params, cfg))


def self_weight(a, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """S(a) = prod_{i<j} Phi(-i eta + x_i - x_j, m_i - m_j) Phi(-i eta + x_j - x_i, m_j - m_i)."""
    x, m = _xm(a)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    out = np.ones(x.shape[1], dtype=complex)
    shift = -1j * (-0.5j * params.st)  # -i eta
    for i in range(n):
        for j in range(i + 1, n):
            out = out * _phi(shift + x[i] - x[j], m[i] - m[j], params, cfg)
            out = out * _phi(shift + x[j] - x[i], m[j] - m[i], params, cfg)
    return _scalar(out)


def wbar_weight(alpha, a: Spin, b: Spin, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """W-bar_alpha(a, b) = sqrt(S(a)) sqrt(S(b)) W_{eta - alpha}(a, b), principal roots."""
    eta = -0.5j * params.st
    root = np.sqrt(complex(self_weight(a, params, cfg))) * np.sqrt(complex(self_weight(b, params, cfg)))
    return root * w_weight(eta - alpha, a, b, params, cfg)


def spin_integrate(f, n, r, params: ModularParams = None, cfg: NumericsConfig = DEFAULT_CONFIG, *, full=False):
    """Sum over constrained m-tuples and integrate over the constrained x-hyperplane.

    ``f(x, m)`` gets x of shape (n, K) (the last row is minus the sum of the
    others) and an m tuple, and returns K values.  No 1/r^(n-1) factor is
    applied, so f = 1 integrates to r^(n-1).  With ``full`` the quadrature
    record (ValueWithError) is returned instead of the bare value.
    """
    if n < 1:
        raise ConfigurationError("spins need at least one component")
    tuples = enumerate_tuples(n - 1, r, 0)
    if n == 1:
        val = complex(np.asarray(f(np.zeros((1, 1), dtype=complex), (0,))).ravel()[0])
        return ValueWithError(val, 0.0, 1, True) if full else val

    def integrand(free):
        x = np.vstack([free, -np.sum(free, axis=0, keepdims=True)])
        return np.sum(ordered_map(lambda ms: np.asarray(f(x, ms), dtype=complex), tuples), axis=0)

    res = refine_until(integrand, ContourSpec.uniform(n - 1, 0.0), cfg)
    return res if full else res.value


def irf_weight(kind, corners, lp: LatticeParams, cfg: NumericsConfig = DEFAULT_CONFIG, *, full=False):
    """Four-edge star weight W^(1) or W^(2) with corners (sigma_i, sigma_j, sigma_k, sigma_l).

    The two W-bar factors both contain the internal spin, so their square
    roots combine into S(sigma_h) and no branch choice enters for it.
    """
    si, sj, sk, sl = corners
    p = lp.modular
    eta = lp.eta
    a1, a2 = lp.u - lp.v, lp.u_prime - lp.v_prime
    b1, b2 = lp.u_prime - lp.v, lp.u - lp.v_prime
    # both kinds carry W-bar edges to sigma_j and sigma_k
    root = np.sqrt(complex(self_weight(sk, p, cfg))) * np.sqrt(complex(self_weight(sj, p, cfg)))
    if kind not in (1, 2):
        raise ConfigurationError("IRF weight kind must be 1 or 2")

    def f(x, ms):
        h = (x, np.asarray(ms))
        val = self_weight(h, p, cfg)
        if kind == 1:
            val = val * _w(eta - a1, sk, h, p, cfg) * _w(eta - a2, sj, h, p, cfg)
            val = val * _w(b1, h, si, p, cfg) * _w(b2, h, sl, p, cfg)
        else:
            val = val * _w(eta - a1, h, sj, p, cfg) * _w(eta - a2, h, sk, p, cfg)
            val = val * _w(b1, sl, h, p, cfg) * _w(b2, si, h, p, cfg)
        return val

    res = spin_integrate(f, lp.n, p.r, p, cfg, full=True)
    return (root * res.value, res) if full else root * res.value


# ---------------------------------------------------------------------------
# map onto the A_n sum/integral

def star_to_an(corners, lp: LatticeParams) -> FlavorVectorAn:
    """A_{n-1} data (m = n-1) equivalent to W^(1) with corners (a, b, c, d) = (i, j, k, l).

    t_j = i(u-v) - x_{c,j}, t_{n+j} = i(u'-v') - x_{b,j},
    s_j = -i(u'-v-eta) + x_{a,j}, s_{n+j} = -i(u-v'-eta) + x_{d,j},
    a = (-m_c, -m_b), b = (m_a, m_d).
    """
    sa, sb, sc, sd = corners
    eta = lp.eta
    xa, xb, xc, xd = (np.array(s.x) for s in (sa, sb, sc, sd))
    t = list(1j * (lp.u - lp.v) - xc) + list(1j * (lp.u_prime - lp.v_prime) - xb)
    s = list(-1j * (lp.u_prime - lp.v - eta) + xa) + list(-1j * (lp.u - lp.v_prime - eta) + xd)
    a = [-v for v in sc.m] + [-v for v in sb.m]
    b = list(sa.m) + list(sd.m)
    return FlavorVectorAn(lp.n - 1, lp.n - 1, t, s, a, b)


def star_to_an_dual(corners, lp: LatticeParams) -> FlavorVectorAn:
    """A_{n-1} data read off W^(2) after z -> T/n - z, y -> -y, written out from the spins.

    Should coincide with the transformed data of ``star_to_an``.
    """
    si, sj, sk, sl = corners
    half = lp.modular.st / 2
    xi, xj, xk, xl = (np.array(s.x) for s in corners)
    t = list(xk - 1j * (lp.u - lp.v)) + list(xj - 1j * (lp.u_prime - lp.v_prime))
    s = list(half + 1j * (lp.u_prime - lp.v) - xi) + list(half + 1j * (lp.u - lp.v_prime) - xl)
    a = list(sk.m) + list(sj.m)
    b = [-v for v in si.m] + [-v for v in sl.m]
    T = lp.n * 1j * (lp.u - lp.v + lp.u_prime - lp.v_prime)
    return FlavorVectorAn(lp.n - 1, lp.n - 1, t, s, a, b, T, sum(a))


def maps_agree(fv: FlavorVectorAn, other: FlavorVectorAn, r, tol=1e-12):
    """Same A_n data: complex entries to ``tol``, integers exactly (Y mod r)."""
    close = all(abs(complex(x) - complex(y)) <= tol for x, y in zip(fv.t + fv.s, other.t + other.s))
    return (close and (fv.m, fv.n) == (other.m, other.n) and abs(fv.Z - other.Z) <= tol
            and list(fv.a) == list(other.a) and list(fv.b) == list(other.b)
            and canonical_mod(fv.Y - other.Y, r) == 0)


def star_constant(corners, lp: LatticeParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """sqrt(S_k S_j) n! / lambda^(n-1), the factor between a star weight and its A_{n-1} form."""
    _, sj, sk, _ = corners
    p = lp.modular
    root = np.sqrt(complex(self_weight(sk, p, cfg))) * np.sqrt(complex(self_weight(sj, p, cfg)))
    return root * math.factorial(lp.n) / lambda_const(p, cfg) ** (lp.n - 1)


def edge_factors(corners, lp: LatticeParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """(W_{v'-v}(l,k) W_{u'-u}(l,j), W_{v'-v}(j,i) W_{u'-u}(k,i)): the outer edges of both sides."""
    si, sj, sk, sl = corners
    p = lp.modular
    dv, du = lp.v_prime - lp.v, lp.u_prime - lp.u
    left = w_weight(dv, sl, sk, p, cfg) * w_weight(du, sl, sj, p, cfg)
    right = w_weight(dv, sj, si, p, cfg) * w_weight(du, sk, si, p, cfg)
    return complex(left), complex(right)


# ---------------------------------------------------------------------------
# sampling and verification

def sample_star(n, r, sigma=0.07 + 0.34j, tau=-0.04 + 0.37j, seed=0):
    """Corner spins and real rapidities with every mapped contour condition strict.

    u - v and u' - v' are drawn from [0.15, 0.3] Im(sigma+tau) and
    |v - v'| <= 0.08 Im(sigma+tau), so both u - v' and u' - v stay below
    Im(sigma+tau)/2.
    """
    p = ModularParams(sigma, tau, r)
    h = p.st.imag
    rng = np.random.default_rng(seed)
    v = rng.uniform(-0.2, 0.2)
    v_prime = v + rng.uniform(-0.08, 0.08) * h
    u = v + rng.uniform(0.15, 0.3) * h
    u_prime = v_prime + rng.uniform(0.15, 0.3) * h
    lp = LatticeParams(p, n, complex(u), complex(u_prime), complex(v), complex(v_prime))
    corners = tuple(Spin.from_free(rng.uniform(0, 1, n - 1), rng.integers(0, r, n - 1), r)
                    for _ in range(4))
    for alpha in ((u - v), (u_prime - v_prime), h / 2 - (u_prime - v), h / 2 - (u - v_prime)):
        if not alpha > 0:
            raise SamplerError("rapidities violate the contour conditions")
    return corners, lp


def verify_star_star(n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                     sigma=0.07 + 0.34j, tau=-0.04 + 0.37j, tol=1e-5, route_tol=1e-8):
    """Direct star-star comparison plus the A_{n-1} transformation route."""
    name = "star_star"
    start = time.perf_counter()
    rep = VerificationReport(name, {}, tol=tol, seed=seed)
    state = {}
    try:
        corners, lp = sample_star(n, r, sigma, tau, seed)
        state["corners"] = [c.to_dict() for c in corners]
        state["lattice"] = lp.to_dict()
        p = lp.modular
        w1, q1 = irf_weight(1, corners, lp, cfg, full=True)
        w2, q2 = irf_weight(2, corners, lp, cfg, full=True)
        left, right = edge_factors(corners, lp, cfg)
        lhs, rhs = left * w1, right * w2

        fv = star_to_an(corners, lp)
        dual = an_dual(fv, p)
        const = star_constant(corners, lp, cfg)
        route1 = const * an_sum_integral(fv, p, cfg).value
        route2 = const * an_sum_integral(dual, p, cfg).value
        fac = an_cross_product(fv, p, cfg)
        errs = {
            "w1_route": compare(w1, route1, route_tol)[1],
            "w2_route": compare(w2, route2, route_tol)[1],
            "edge_ratio": compare(right / left, fac, route_tol)[1],
        }
        maps_ok = maps_agree(dual, star_to_an_dual(corners, lp), r)
    except InfeasibleError as exc:
        rep.failure_reason = f"{type(exc).__name__}: {exc}"
        rep.infeasible = True
    else:
        rep.lhs, rep.rhs = lhs, rhs
        rep.quad_err_lhs, rep.quad_err_rhs = q1.est_rel_error, q2.est_rel_error
        rep.abs_err, rep.rel_err, rep.passed = compare(lhs, rhs, tol)
        routes_ok = max(errs.values()) <= route_tol
        rep.details = {"route_errors": errs, "routes_ok": routes_ok, "maps_ok": maps_ok}
        if not rep.passed:
            rep.failure_reason = f"relative error {rep.rel_err:.3e} exceeds tolerance {tol:.1e}"
        elif not (routes_ok and maps_ok):
            rep.passed = False
            rep.failure_reason = f"A_{n - 1} route disagrees with the direct path ({max(errs.values()):.3e})"
    rep.params = _echo(name, sigma, tau, r, seed, cfg, n=n, **state)
    rep.runtime_ms = int(round(1000 * (time.perf_counter() - start)))
    return rep

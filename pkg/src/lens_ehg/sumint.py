"""The A_n and BC_n elliptic hypergeometric sum/integrals.

I^m_{A_n}(Z, Y | t, a; s, b) sums over tuples y with sum(y) = Y mod r and
integrates over the hyperplane sum(z) = Z; I^m_{BC_n}(t, a) sums over all of
{0..r-1}^n and integrates over [0, 1]^n.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .errors import ConfigurationError, ContourError
from .kernel import (DEFAULT_CONFIG, ModularParams, NumericsConfig, canonical_mod,
                     gamma_poles, lambda_const, lens_gamma)
from .quadrature import ContourSpec, ValueWithError, nearest_pole_distance, refine_until

BALANCE_TOL = 1e-12


def _ctuple(xs):
    return tuple(complex(x) for x in xs)


def _ituple(xs):
    return tuple(int(x) for x in xs)


def _check_mod_2r(residual, r, what):
    # residual must be an (integer) multiple of 2r
    k = residual.real / (2 * r)
    if abs(residual.imag) > BALANCE_TOL or abs(residual.real - 2 * r * round(k)) > BALANCE_TOL:
        raise ConfigurationError(f"{what} balancing violated: residual {residual:.3g}")


@dataclass(frozen=True)
class FlavorVectorAn:
    """Parameters (t, a; s, b) and the hyperplane data (Z, Y) of an A_n sum/integral."""

    m: int
    n: int
    t: tuple
    s: tuple
    a: tuple
    b: tuple
    Z: complex = 0j
    Y: int = 0

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ConfigurationError("m and n must be non-negative")
        size = self.m + self.n + 2
        for name in ("t", "s", "a", "b"):
            if len(getattr(self, name)) != size:
                raise ConfigurationError(f"{name} must have m+n+2 = {size} entries")
        object.__setattr__(self, "t", _ctuple(self.t))
        object.__setattr__(self, "s", _ctuple(self.s))
        object.__setattr__(self, "a", _ituple(self.a))
        object.__setattr__(self, "b", _ituple(self.b))
        object.__setattr__(self, "Z", complex(self.Z))
        object.__setattr__(self, "Y", int(self.Y))

    @property
    def T(self):
        return sum(self.t)

    @property
    def S(self):
        return sum(self.s)

    @property
    def A(self):
        return sum(self.a)

    @property
    def sum_b(self):
        return sum(self.b)

    @property
    def contour_offset(self):
        return self.Z.imag / (self.n + 1)

    def balancing_residual(self, params: ModularParams):
        cont = self.T + self.S - (self.m + 1) * params.st
        return cont, canonical_mod(self.A + self.sum_b, params.r)

    def check_balancing(self, params: ModularParams):
        cont, disc = self.balancing_residual(params)
        _check_mod_2r(cont, params.r, "A_n")
        if disc != 0:
            raise ConfigurationError(f"A_n integer balancing violated: sum(a+b) = {disc} mod {params.r}")

    def to_dict(self):
        return {"m": self.m, "n": self.n, "t": list(self.t), "s": list(self.s),
                "a": list(self.a), "b": list(self.b), "Z": self.Z, "Y": self.Y}


@dataclass(frozen=True)
class FlavorVectorBCn:
    """Parameters (t, a) of a BC_n sum/integral."""

    m: int
    n: int
    t: tuple
    a: tuple

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ConfigurationError("m and n must be non-negative")
        size = 2 * self.m + 2 * self.n + 4
        if len(self.t) != size or len(self.a) != size:
            raise ConfigurationError(f"t and a must have 2m+2n+4 = {size} entries")
        object.__setattr__(self, "t", _ctuple(self.t))
        object.__setattr__(self, "a", _ituple(self.a))

    @property
    def T(self):
        return sum(self.t)

    def balancing_residual(self, params: ModularParams):
        return self.T - (self.m + 1) * params.st, canonical_mod(sum(self.a), params.r)

    def check_balancing(self, params: ModularParams):
        cont, disc = self.balancing_residual(params)
        _check_mod_2r(cont, params.r, "BC_n")
        if disc != 0:
            raise ConfigurationError(f"BC_n integer balancing violated: sum(a) = {disc} mod {params.r}")

    def to_dict(self):
        return {"m": self.m, "n": self.n, "t": list(self.t), "a": list(self.a)}


def enumerate_tuples(n, r, total=None):
    """All y in {0..r-1}^n in ascending (lexicographic) order.

    With ``total`` given, each tuple gets a dependent last entry
    canonical_mod(total - sum(y), r), as needed for the A_n constraint.
    """
    out = []
    for ys in itertools.product(range(r), repeat=n):
        if total is not None:
            ys = ys + (canonical_mod(total - sum(ys), r),)
        out.append(ys)
    return out


# ---------------------------------------------------------------------------
# integrands

def _as_nodes(zs):
    z = np.asarray(zs, dtype=complex)
    scalar = z.ndim == 1
    return (z[:, None] if scalar else z), scalar


def _an_delta(z, ys, t, a, s, b, params, cfg):
    """Delta^m_{A_n} at nodes z of shape (n+1, K) and fixed tuple ys."""
    ys = np.asarray(ys, dtype=np.int64)
    args = np.concatenate([t[None, :, None] + z[:, None, :],
                           s[None, :, None] - z[:, None, :]], axis=1)
    idx = np.concatenate([a[None, :] + ys[:, None], b[None, :] - ys[:, None]], axis=1)
    vals = lens_gamma(args, idx[:, :, None], params, cfg)
    out = np.prod(vals.reshape(-1, z.shape[1]), axis=0)
    npts = z.shape[0]
    if npts > 1:
        ii, jj = np.triu_indices(npts, 1)
        diff = z[ii] - z[jj]
        dy = (ys[ii] - ys[jj])[:, None]
        inv = (lens_gamma(diff, dy, params, cfg, inverse=True)
               * lens_gamma(-diff, -dy, params, cfg, inverse=True))
        out = out * np.prod(inv, axis=0)
    return out


def an_integrand(zs, ys, fv: FlavorVectorAn, params: ModularParams,
                 cfg: NumericsConfig = DEFAULT_CONFIG):
    """Delta^m_{A_n}(z, y; t, s) for n+1 variables z (optionally a batch of nodes).

    ``zs`` has shape (n+1,) or (n+1, K).
    """
    z, scalar = _as_nodes(zs)
    if z.shape[0] != fv.n + 1 or len(ys) != fv.n + 1:
        raise ConfigurationError(f"A_{fv.n} integrand needs {fv.n + 1} variables")
    out = _an_delta(z, ys, np.array(fv.t), np.array(fv.a), np.array(fv.s), np.array(fv.b),
                    params, cfg)
    return complex(out[0]) if scalar else out


def _bc_delta(z, ys, t, a, params, cfg):
    """Delta^m_{BC_n} at nodes z of shape (n, K) and fixed tuple ys."""
    ys = np.asarray(ys, dtype=np.int64)
    args = np.concatenate([t[None, :, None] + z[:, None, :],
                           t[None, :, None] - z[:, None, :]], axis=1)
    idx = np.concatenate([a[None, :] + ys[:, None], a[None, :] - ys[:, None]], axis=1)
    vals = lens_gamma(args, idx[:, :, None], params, cfg)
    out = np.prod(vals.reshape(-1, z.shape[1]), axis=0)
    # 1 / Gamma(+-2z, +-2y)
    inv = (lens_gamma(2 * z, 2 * ys[:, None], params, cfg, inverse=True)
           * lens_gamma(-2 * z, -2 * ys[:, None], params, cfg, inverse=True))
    out = out * np.prod(inv, axis=0)
    npts = z.shape[0]
    if npts > 1:
        ii, jj = np.triu_indices(npts, 1)
        for e1, e2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            w = e1 * z[ii] + e2 * z[jj]
            dy = (e1 * ys[ii] + e2 * ys[jj])[:, None]
            out = out * np.prod(lens_gamma(w, dy, params, cfg, inverse=True), axis=0)
    return out


def bcn_integrand(zs, ys, fv: FlavorVectorBCn, params: ModularParams,
                  cfg: NumericsConfig = DEFAULT_CONFIG):
    """Delta^m_{BC_n}(z, y; t, a); ``zs`` has shape (n,) or (n, K)."""
    z, scalar = _as_nodes(zs)
    if z.shape[0] != fv.n or len(ys) != fv.n:
        raise ConfigurationError(f"BC_{fv.n} integrand needs {fv.n} variables")
    out = _bc_delta(z, ys, np.array(fv.t), np.array(fv.a), params, cfg)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# pole bookkeeping

def _poles_near(params, depth):
    """Union over m of the Gamma pole representatives down to Im = -depth."""
    return np.concatenate([gamma_poles(mu, params, depth) for mu in range(params.r)])


def an_pole_set(fv: FlavorVectorAn, params: ModularParams):
    """Poles in each integration variable coming from the numerator factors."""
    c = fv.contour_offset
    out = []
    for tj in fv.t:
        # Gamma(t + z) blows up at z = P - t
        out.append(_poles_near(params, abs(c + tj.imag) + 1.0) - tj)
    for sj in fv.s:
        # Gamma(s - z) blows up at z = s - P
        out.append(sj - _poles_near(params, abs(sj.imag - c) + 1.0))
    return np.concatenate(out) if out else np.zeros(0, complex)


def bcn_pole_set(fv: FlavorVectorBCn, params: ModularParams):
    out = []
    for tj in fv.t:
        poles = _poles_near(params, abs(tj.imag) + 1.0)
        out.append(poles - tj)
        out.append(tj - poles)
    return np.concatenate(out) if out else np.zeros(0, complex)


def check_an_contour(fv: FlavorVectorAn, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Raise ContourError unless Im(s_i) > Im(Z)/(n+1) > -Im(t_i) with room to spare.

    Nothing is integrated when n = 0, so there is nothing to check.
    """
    if fv.n == 0:
        return
    c = fv.contour_offset
    for i, tj in enumerate(fv.t):
        if not c > -tj.imag:
            raise ContourError(f"contour condition Im(Z)/(n+1) > -Im(t_{i}) fails: "
                               f"{c:.6g} <= {-tj.imag:.6g}")
    for i, sj in enumerate(fv.s):
        if not sj.imag > c:
            raise ContourError(f"contour condition Im(s_{i}) > Im(Z)/(n+1) fails: "
                               f"{sj.imag:.6g} <= {c:.6g}")
    dist = nearest_pole_distance(an_pole_set(fv, params), ContourSpec.uniform(fv.n, c))
    if dist < cfg.pole_guard:
        raise ContourError(f"a pole lies {dist:.3g} from the contour (pole_guard={cfg.pole_guard})")


def check_bcn_contour(fv: FlavorVectorBCn, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Raise ContourError unless Im(t_i) > 0 for all i, with room to spare."""
    if fv.n == 0:
        return
    for i, tj in enumerate(fv.t):
        if not tj.imag > 0:
            raise ContourError(f"contour condition Im(t_{i}) > 0 fails: {tj.imag:.6g}")
    dist = nearest_pole_distance(bcn_pole_set(fv, params), ContourSpec.uniform(fv.n, 0.0))
    if dist < cfg.pole_guard:
        raise ContourError(f"a pole lies {dist:.3g} from the contour (pole_guard={cfg.pole_guard})")


# ---------------------------------------------------------------------------
# sum/integrals

def an_sum_integral(fv: FlavorVectorAn, params: ModularParams,
                    cfg: NumericsConfig = DEFAULT_CONFIG, *, check=True):
    """I^m_{A_n}(Z, Y | t, a; s, b).

    Free variables z_0..z_{n-1} run over [0,1] + i Im(Z)/(n+1); the last one
    is z_n = Z - sum of the others.  Tuple terms are summed in ascending
    order.
    """
    if check:
        fv.check_balancing(params)
        check_an_contour(fv, params, cfg)
    n, r = fv.n, params.r
    t, a = np.array(fv.t), np.array(fv.a)
    s, b = np.array(fv.s), np.array(fv.b)
    if n == 0:
        val = _an_delta(np.array([[fv.Z]]), (canonical_mod(fv.Y, r),), t, a, s, b, params, cfg)[0]
        return ValueWithError(complex(val), 0.0, 0, True)
    tuples = enumerate_tuples(n, r, fv.Y)
    spec = ContourSpec.uniform(n, fv.contour_offset)

    def integrand(free):
        z = np.vstack([free, fv.Z - np.sum(free, axis=0, keepdims=True)])
        terms = ordered_map(lambda ys: _an_delta(z, ys, t, a, s, b, params, cfg), tuples)
        return np.sum(terms, axis=0)

    res = refine_until(integrand, spec, cfg)
    pref = lambda_const(params, cfg) ** n / math.factorial(n + 1)
    return ValueWithError(pref * res.value, res.est_rel_error, res.nodes_used, res.converged)


def bcn_sum_integral(fv: FlavorVectorBCn, params: ModularParams,
                     cfg: NumericsConfig = DEFAULT_CONFIG, *, check=True):
    """I^m_{BC_n}(t, a) with prefactor lambda^n / (2^n n!)."""
    if check:
        fv.check_balancing(params)
        check_bcn_contour(fv, params, cfg)
    n, r = fv.n, params.r
    if n == 0:
        return ValueWithError(1 + 0j, 0.0, 0, True)
    t, a = np.array(fv.t), np.array(fv.a)
    tuples = enumerate_tuples(n, r)
    spec = ContourSpec.uniform(n, 0.0)

    def integrand(z):
        terms = ordered_map(lambda ys: _bc_delta(z, ys, t, a, params, cfg), tuples)
        return np.sum(terms, axis=0)

    res = refine_until(integrand, spec, cfg)
    pref = lambda_const(params, cfg) ** n / (2 ** n * math.factorial(n))
    return ValueWithError(pref * res.value, res.est_rel_error, res.nodes_used, res.converged)


def bc1_as_a1(fv: FlavorVectorBCn) -> FlavorVectorAn:
    """The A_1 data equivalent to a BC_1 sum/integral: split t into halves."""
    if fv.n != 1:
        raise ConfigurationError("only BC_1 has an A_1 form")
    half = fv.m + 3
    return FlavorVectorAn(fv.m, 1, fv.t[:half], fv.t[half:], fv.a[:half], fv.a[half:])


# ---------------------------------------------------------------------------
# transformation data

def an_dual(fv: FlavorVectorAn, params: ModularParams) -> FlavorVectorAn:
    """Right-hand data of the A_n <-> A_m transformation: (m, n) swapped,
    t -> -t, s -> sigma+tau-s, a -> -a, b -> -b, Z -> Z+T, Y -> Y+A."""
    st = params.st
    return FlavorVectorAn(fv.n, fv.m, [-x for x in fv.t], [st - x for x in fv.s],
                          [-x for x in fv.a], [-x for x in fv.b], fv.Z + fv.T, fv.Y + fv.A)


def an_cross_product(fv: FlavorVectorAn, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """prod over all i, j of Gamma(t_i + s_j, a_i + b_j)."""
    t, s = np.array(fv.t), np.array(fv.s)
    a, b = np.array(fv.a), np.array(fv.b)
    vals = lens_gamma(t[:, None] + s[None, :], a[:, None] + b[None, :], params, cfg)
    return complex(np.prod(vals))


def bcn_dual(fv: FlavorVectorBCn, params: ModularParams) -> FlavorVectorBCn:
    """Right-hand data of the BC_n <-> BC_m transformation: t -> (sigma+tau)/2 - t, a -> -a."""
    half = params.st / 2
    return FlavorVectorBCn(fv.n, fv.m, [half - x for x in fv.t], [-x for x in fv.a])


def bcn_pair_product(fv: FlavorVectorBCn, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """prod over i < j of Gamma(t_i + t_j, a_i + a_j)."""
    t, a = np.array(fv.t), np.array(fv.a)
    ii, jj = np.triu_indices(len(t), 1)
    return complex(np.prod(lens_gamma(t[ii] + t[jj], a[ii] + a[jj], params, cfg)))

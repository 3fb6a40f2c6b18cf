"""Lens elliptic gamma function and its building blocks.

Everything here is vectorised over the complex argument: ``z`` may be a
scalar or a numpy array, and the discrete index ``m`` may be an integer or
an integer array broadcastable against ``z``.  Scalars in, scalars out.

Discrete indices are reduced to ``{0, ..., r-1}`` on entry, so callers can
pass ``-m`` or ``m + y`` without worrying about the range.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import AccuracyError, DomainError, PoleError, TruncationWarning

TWO_PI_I = 2j * math.pi

# keeps the (points x product terms) work arrays around a few MB
_CHUNK_ELEMS = 1 << 19


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class NumericsConfig:
    """Truncation, quadrature and pole-guard settings."""

    product_tol: float = 1e-14
    product_max_index: int = 400
    quad_tol: float = 1e-9
    quad_start_nodes: int = 32
    quad_max_nodes: int = 4096
    pole_guard: float = 1e-3

    def __post_init__(self):
        for name in ("product_tol", "quad_tol", "pole_guard"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        if self.product_max_index < 1:
            raise DomainError("product_max_index must be at least 1")
        if not (_is_pow2(self.quad_start_nodes) and _is_pow2(self.quad_max_nodes)):
            raise DomainError("quadrature node counts must be powers of two")
        if self.quad_start_nodes > self.quad_max_nodes:
            raise DomainError("quad_start_nodes exceeds quad_max_nodes")

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            "product_tol": self.product_tol,
            "product_max_index": self.product_max_index,
            "quad_tol": self.quad_tol,
            "quad_start_nodes": self.quad_start_nodes,
            "quad_max_nodes": self.quad_max_nodes,
            "pole_guard": self.pole_guard,
        }


DEFAULT_CONFIG = NumericsConfig()


@dataclass(frozen=True)
class ModularParams:
    """Modular parameters sigma, tau and the lens order r."""

    sigma: complex
    tau: complex
    r: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sigma", complex(self.sigma))
        object.__setattr__(self, "tau", complex(self.tau))
        if isinstance(self.r, bool) or int(self.r) != self.r:
            raise DomainError(f"lens order r must be an integer, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        if self.r < 1:
            raise DomainError(f"lens order r must be >= 1, got {self.r}")
        if not (self.sigma.imag > 0 and self.tau.imag > 0):
            raise DomainError("Im(sigma) and Im(tau) must be positive")

    @property
    def p(self) -> complex:
        return complex(np.exp(TWO_PI_I * self.sigma))

    @property
    def q(self) -> complex:
        return complex(np.exp(TWO_PI_I * self.tau))

    @property
    def st(self) -> complex:
        """sigma + tau, the combination that appears everywhere."""
        return self.sigma + self.tau

    def with_r(self, r):
        return ModularParams(self.sigma, self.tau, r)


class LensArg(NamedTuple):
    """Argument (z, m) of the lens gamma and theta functions."""

    z: complex
    m: int

    def canonical(self, r):
        return LensArg(complex(self.z), canonical_mod(self.m, r))


def canonical_mod(m, r):
    """Representative of ``m mod r`` in ``{0, ..., r-1}``; arrays allowed."""
    if r < 1:
        raise DomainError(f"modulus must be >= 1, got {r}")
    if isinstance(m, np.ndarray):
        return np.mod(m, r).astype(np.int64)
    return int(m) % int(r)


# ---------------------------------------------------------------------------
# Bernoulli polynomial and the normalisation exponents

def b33(z, w1, w2, w3):
    """Cubic multiple Bernoulli polynomial B_{3,3}(z; w1, w2, w3)."""
    if w1 == 0 or w2 == 0 or w3 == 0:
        raise DomainError("B_{3,3} needs non-zero periods")
    prod = w1 * w2 * w3
    s1 = w1 + w2 + w3
    s2 = w1 * w1 + w2 * w2 + w3 * w3
    e2 = w1 * w2 + w1 * w3 + w2 * w3
    return (z ** 3 / prod
            - 3 * s1 * z ** 2 / (2 * prod)
            + (s2 + 3 * e2) * z / (2 * prod)
            - s1 * e2 / (4 * prod))


def r_comb(z, sigma, tau):
    """R(z; sigma, tau) = [B33(z; sigma, tau, -1) + B33(z - 1; sigma, tau, -1)] / 12."""
    return (b33(z, sigma, tau, -1) + b33(z - 1, sigma, tau, -1)) / 12


def r2(z, m, sigma, tau, r):
    """Closed rational form of R_2(z, m; sigma, tau) for lens order r."""
    if r < 1:
        raise DomainError(f"lens order r must be >= 1, got {r}")
    if sigma == 0 or tau == 0:
        raise DomainError("R_2 needs non-zero sigma and tau")
    st = sigma + tau
    first = (st - 2 * z) * (2 * z * z - 2 * z * st + sigma * tau * (r * r + 6 * (m - r) * m) + 1)
    return first / (24 * r * sigma * tau) - (sigma - tau) * (2 * m - r) * (m - r) * m / (12 * r)


def r2_sum_form(z, m, sigma, tau, r):
    """R_2 as the sum R(z + m sigma; r sigma, sigma+tau) + R(z + (r-m) tau; r tau, sigma+tau)."""
    if r < 1:
        raise DomainError(f"lens order r must be >= 1, got {r}")
    st = sigma + tau
    return r_comb(z + m * sigma, r * sigma, st) + r_comb(z + (r - m) * tau, r * tau, st)


def phi_e(z, m, params: ModularParams, form="second"):
    """Exponent of the normalisation factor of the lens gamma function.

    ``form="second"`` uses 2 pi i (R2(z,0) + R2(0,m;1/2,-1/2) - R2(z,m));
    ``form="first"`` uses the shifted-period expression with sigma - 1/2 and
    tau + 1/2.  The two agree identically.
    """
    r = params.r
    m = canonical_mod(m, r)
    s, t = params.sigma, params.tau
    if form == "second":
        val = r2(z, 0, s, t, r) + r2(0, m, 0.5, -0.5, r) - r2(z, m, s, t, r)
    elif form == "first":
        val = r2(z, 0, s - 0.5, t + 0.5, r) - r2(z, m, s - 0.5, t + 0.5, r)
    else:
        raise ValueError(f"unknown form {form!r}")
    return TWO_PI_I * val


def phi_1(z, m, params: ModularParams):
    """Normalisation exponent of theta_1 (equals phi_e(z+sigma, m-1) - phi_e(z, m))."""
    r = params.r
    m = canonical_mod(m, r)
    s, t = params.sigma, params.tau
    poly = 3 * (r + 1 - 2 * m) * (2 * z + 1) - (r * r - 1) * (s - t - 1) - 6 * m * (r - m) * (t + 1)
    return 1j * math.pi / (6 * r) * poly


def phi_2(z, m, params: ModularParams):
    """Normalisation exponent of theta_2 (equals phi_e(z+tau, m+1) - phi_e(z, m))."""
    r = params.r
    m = canonical_mod(m, r)
    s, t = params.sigma, params.tau
    poly = 3 * (r - 1 - 2 * m) * (2 * z - 1) - (r * r - 1) * (s - t - 1) + 6 * m * (r - m) * (s - 1)
    return -1j * math.pi / (6 * r) * poly


# ---------------------------------------------------------------------------
# q-Pochhammer and theta

def qpoch_inf(a, q, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Infinite q-Pochhammer symbol (a; q)_inf, vectorised over ``a``."""
    q = complex(q)
    aq = abs(q)
    if aq >= 1:
        raise DomainError(f"|q| must be < 1, got {aq}")
    arr = np.asarray(a, dtype=complex)
    amax = float(np.max(np.abs(arr))) if arr.size else 0.0
    if amax == 0.0 or aq == 0.0:
        out = 1 - arr
        return complex(out) if out.ndim == 0 else out
    # smallest J with amax |q|^J < tol (1 - |q|)
    target = cfg.product_tol * (1 - aq)
    nterms = max(1, int(math.ceil(math.log(target / amax) / math.log(aq))) + 1) if amax > target else 1
    if nterms > cfg.product_max_index:
        warnings.warn(f"q-Pochhammer truncated at {cfg.product_max_index} terms "
                      f"(|a|={amax:.3g}, |q|={aq:.3g})", TruncationWarning, stacklevel=2)
        nterms = cfg.product_max_index
    powers = q ** np.arange(nterms)
    out = np.prod(1 - arr[..., None] * powers, axis=-1)
    return complex(out) if out.ndim == 0 else out


def theta_q(x, q, cfg: NumericsConfig = DEFAULT_CONFIG):
    """theta(x | q) = (x; q)_inf (q/x; q)_inf."""
    arr = np.asarray(x, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("theta(x|q) is undefined at x = 0")
    out = qpoch_inf(arr, q, cfg) * qpoch_inf(q / arr, q, cfg)
    return complex(out) if np.ndim(out) == 0 else out


def lens_theta1(z, m, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """theta_1(z, m) = e^{phi_1} theta(e^{-2 pi i z} q^m | q^r)."""
    r = params.r
    m = canonical_mod(m, r)
    z = np.asarray(z, dtype=complex)
    x = np.exp(-TWO_PI_I * z + TWO_PI_I * params.tau * m)
    out = np.exp(phi_1(z, m, params)) * theta_q(x, np.exp(TWO_PI_I * params.tau * r), cfg)
    return complex(out) if np.ndim(out) == 0 else out


def lens_theta2(z, m, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """theta_2(z, m) = e^{phi_2} theta(e^{2 pi i z} p^m | p^r)."""
    r = params.r
    m = canonical_mod(m, r)
    z = np.asarray(z, dtype=complex)
    x = np.exp(TWO_PI_I * z + TWO_PI_I * params.sigma * m)
    out = np.exp(phi_2(z, m, params)) * theta_q(x, np.exp(TWO_PI_I * params.sigma * r), cfg)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# elliptic gamma products

def _count_terms(a, thresh):
    """Number of j >= 0 with a**j >= thresh (0 < a < 1)."""
    if a == 0.0:
        return 1
    if thresh >= 1:
        return 1
    return int(math.floor(math.log(thresh) / math.log(a))) + 1


@lru_cache(maxsize=256)
def _term_grid(P, Q, amax_bucket, tol, cap):
    """Powers P^j Q^k that matter at relative accuracy ``tol``.

    Terms below a threshold t are dropped.  Summing the dropped magnitudes
    row by row gives the bound  t (J + 1/(1-|P|)) / (1-|Q|), J = #rows kept,
    which multiplied by the largest argument modulus bounds the relative
    change of the product.
    """
    aP, aQ = abs(P), abs(Q)
    if aP >= 1 or aQ >= 1:
        raise DomainError("elliptic nomes must lie inside the unit disc")
    thresh = tol / (2 * amax_bucket)
    for _ in range(3):
        rows = _count_terms(aP, thresh)
        bound = (rows + 1 / (1 - aP)) / (1 - aQ)
        thresh = tol / (2 * amax_bucket * bound)
    jmax = _count_terms(aP, thresh)
    kmax = _count_terms(aQ, thresh)
    if jmax + kmax > cap:
        raise AccuracyError(
            f"product truncation needs j+k up to {jmax + kmax} > cap {cap} "
            f"(|p|={aP:.3g}, |q|={aQ:.3g}); raise product_max_index")
    j = np.arange(jmax)
    k = np.arange(kmax)
    with np.errstate(under="ignore"):
        mag = (aP ** j)[:, None] * (aQ ** k)[None, :]
        keep = mag >= thresh
        terms = ((P ** j)[:, None] * (Q ** k)[None, :])[keep]
    terms.setflags(write=False)
    return terms


def _gamma1_product(u, P, Q, cfg, inverse=False):
    """Double product Gamma_1 evaluated at the complex array ``u``."""
    u = np.asarray(u, dtype=complex)
    flat = u.ravel()
    x = np.exp(TWO_PI_I * flat)
    PQ = P * Q
    xi = PQ / x
    amax = max(float(np.max(np.abs(x))), float(np.max(np.abs(xi))), 1.0)
    bucket = 2.0 ** math.ceil(math.log2(amax))
    terms = _term_grid(complex(P), complex(Q), bucket, cfg.product_tol, cfg.product_max_index)
    out = np.empty_like(flat)
    step = max(1, _CHUNK_ELEMS // max(1, terms.size))
    for lo in range(0, flat.size, step):
        hi = lo + step
        num = np.prod(1 - xi[lo:hi, None] * terms, axis=1)
        den = np.prod(1 - x[lo:hi, None] * terms, axis=1)
        out[lo:hi] = den / num if inverse else num / den
    return out.reshape(u.shape)


def gamma_poles(m, params: ModularParams, depth):
    """Poles of Gamma(z, m) with imaginary part >= -depth, modulo integers.

    Returns a complex array of representatives; add integers for the full
    lattice.
    """
    r = params.r
    m = canonical_mod(m, r)
    s, t = params.sigma, params.tau
    h = (s + t).imag
    jmax = int(depth / h) + 1
    out = []
    for j in range(jmax + 1):
        base = -(s + t) * j
        kk = 0
        while True:
            pole = base - s * (r * kk + m)
            if pole.imag < -depth:
                break
            out.append(pole)
            kk += 1
        kk = 0
        while True:
            pole = base - t * (r * (kk + 1) - m)
            if pole.imag < -depth:
                break
            out.append(pole)
            kk += 1
    return np.array(out, dtype=complex)


def gamma_zeros(m, params: ModularParams, height):
    """Zeros of Gamma(z, m) with imaginary part <= height, modulo integers."""
    # zeros of Gamma(z, m) are minus the poles of Gamma(sigma+tau-z, -m)
    poles = gamma_poles(-m, params, height - params.st.imag)
    return params.st - poles


def lattice_distance(z, points):
    """Distance from each z to the set ``points + Z`` (integer translates)."""
    z = np.asarray(z, dtype=complex)
    if points.size == 0:
        return np.full(z.shape, np.inf)
    w = z[..., None] - points
    re = w.real - np.round(w.real)
    return np.min(np.hypot(re, w.imag), axis=-1)


def _check_poles(z, m, params, guard, what="Gamma"):
    z = np.asarray(z, dtype=complex)
    m = np.broadcast_to(np.asarray(m), z.shape)
    if z.size == 0:
        return
    for mv in np.unique(m):
        sel = z[m == mv]
        depth = guard - float(np.min(sel.imag))
        if depth < 0:
            continue
        poles = gamma_poles(int(mv), params, depth)
        d = lattice_distance(sel, poles)
        bad = np.argmin(d)
        if d[bad] < guard:
            zb = complex(sel.ravel()[bad])
            w = zb - poles
            near = poles[np.argmin(np.hypot(w.real - np.round(w.real), w.imag))]
            raise PoleError(
                f"{what}(z={zb:.6g}, m={int(mv)}) is within {d[bad]:.3g} of the pole "
                f"{near:.6g} (pole_guard={guard})", location=complex(near))


def lens_gamma(z, m, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG,
               *, inverse=False, check_poles=True):
    """Lens elliptic gamma function Gamma(z, m; sigma, tau).

    Evaluated as e^{phi_e} Gamma_1(z + sigma m; r sigma, sigma+tau)
    Gamma_1(z + tau (r-m); r tau, sigma+tau), which is the double product
    over (j, k) regrouped by nome.  With ``inverse=True`` the reciprocal is
    returned; it is entire in z away from the zeros of Gamma, so no pole
    check is done there.
    """
    r = params.r
    zarr = np.asarray(z, dtype=complex)
    marr = canonical_mod(np.asarray(m, dtype=np.int64), r)
    if check_poles and not inverse:
        _check_poles(zarr, marr, params, cfg.pole_guard)
    s, t = params.sigma, params.tau
    P1 = np.exp(TWO_PI_I * r * s)
    P2 = np.exp(TWO_PI_I * r * t)
    Q = np.exp(TWO_PI_I * (s + t))
    g1 = _gamma1_product(zarr + s * marr, P1, Q, cfg, inverse)
    g2 = _gamma1_product(zarr + t * (r - marr), P2, Q, cfg, inverse)
    ph = phi_e(zarr, marr, params)
    out = np.exp(-ph if inverse else ph) * g1 * g2
    return complex(out) if out.ndim == 0 else out


def gamma1(z, sigma, tau, cfg: NumericsConfig = DEFAULT_CONFIG, *, check_poles=True):
    """Ordinary elliptic gamma function Gamma_1(z; sigma, tau)."""
    sigma, tau = complex(sigma), complex(tau)
    if not (sigma.imag > 0 and tau.imag > 0):
        raise DomainError("Im(sigma) and Im(tau) must be positive")
    zarr = np.asarray(z, dtype=complex)
    if check_poles:
        # Gamma_1 has the pole lattice of the r = 1 lens gamma
        _check_poles(zarr, np.zeros(zarr.shape, dtype=np.int64),
                     ModularParams(sigma, tau, 1), cfg.pole_guard, what="Gamma_1")
    out = _gamma1_product(zarr, np.exp(TWO_PI_I * sigma), np.exp(TWO_PI_I * tau), cfg)
    return complex(out) if out.ndim == 0 else out


def lambda_const(params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """lambda = (p^r; p^r)_inf (q^r; q^r)_inf."""
    pr = complex(np.exp(TWO_PI_I * params.r * params.sigma))
    qr = complex(np.exp(TWO_PI_I * params.r * params.tau))
    return qpoch_inf(pr, pr, cfg) * qpoch_inf(qr, qr, cfg)

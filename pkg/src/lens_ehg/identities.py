"""Samplers for balanced parameters and two-sided checks of every identity.

Each ``verify_*`` function evaluates both sides independently and returns a
:class:`VerificationReport`.  Numerical infeasibility (no admissible sample,
contour or pole trouble) does not raise; it comes back as a failed report
with ``failure_reason`` set and ``infeasible`` true.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import InfeasibleError, SamplerError
from .kernel import (DEFAULT_CONFIG, ModularParams, NumericsConfig, canonical_mod, gamma1,
                     lambda_const, lens_gamma, lens_theta1, lens_theta2, phi_e, r2, r2_sum_form)
from .quadrature import ContourSpec, integrate_periodic
from .sumint import (FlavorVectorAn, FlavorVectorBCn, an_cross_product, an_dual, an_sum_integral,
                     bc1_as_a1, bcn_dual, bcn_integrand, bcn_pair_product, bcn_sum_integral,
                     check_an_contour, check_bcn_contour)

DEFAULT_SIGMA = 0.07 + 0.34j
DEFAULT_TAU = -0.04 + 0.37j

MAX_TRIES = 16
# relative spread of sampled imaginary parts around their mean
SPREAD = 0.3
# samples whose contour margin falls below this fraction of the mean are redrawn
MARGIN = 0.25


def jsonable(obj):
    """Recursively turn complex numbers into {re, im} pairs and tuples into lists."""
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


@dataclass
class VerificationReport:
    identity_name: str
    params: dict
    lhs: complex = complex("nan")
    rhs: complex = complex("nan")
    abs_err: float = math.inf
    rel_err: float = math.inf
    quad_err_lhs: float = 0.0
    quad_err_rhs: float = 0.0
    tol: float = 0.0
    passed: bool = False
    seed: int | None = None
    runtime_ms: int = 0
    failure_reason: str | None = None
    infeasible: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "identity_name": self.identity_name,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "quad_err": {"lhs": self.quad_err_lhs, "rhs": self.quad_err_rhs},
            "tol": self.tol,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
            "artifact_version": __version__,
            "seed": self.seed,
            "failure_reason": self.failure_reason,
        }
        if self.details:
            out["details"] = self.details
        return jsonable(out)


def compare(lhs, rhs, tol):
    """(abs_err, rel_err, pass); falls back to the absolute error when |rhs| is tiny."""
    lhs, rhs = complex(lhs), complex(rhs)
    abs_err = abs(lhs - rhs)
    if abs(rhs) > 1e-30:
        rel = abs_err / abs(rhs)
        return abs_err, rel, bool(rel <= tol)
    return abs_err, abs_err, bool(abs_err <= tol)


def _echo(name, sigma, tau, r, seed, cfg, **extra):
    d = {"identity": name, "sigma": complex(sigma), "tau": complex(tau), "r": r,
         "seed": seed, "numerics": cfg.as_dict()}
    d.update(extra)
    return jsonable(d)


def _run(name, echo, seed, tol, body):
    """Call ``body()`` -> (lhs, rhs, qerr_lhs, qerr_rhs, details) and wrap the result."""
    start = time.perf_counter()
    rep = VerificationReport(name, echo, tol=tol, seed=seed)
    try:
        lhs, rhs, ql, qr, details = body()
    except InfeasibleError as exc:
        rep.failure_reason = f"{type(exc).__name__}: {exc}"
        rep.infeasible = True
    else:
        rep.lhs, rep.rhs = complex(lhs), complex(rhs)
        rep.quad_err_lhs, rep.quad_err_rhs = float(ql), float(qr)
        rep.abs_err, rep.rel_err, rep.passed = compare(lhs, rhs, tol)
        rep.details = details or {}
        if details and details.get("extra_ok") is False:
            rep.passed = False
            rep.failure_reason = details.get("extra_reason", "auxiliary check failed")
        elif not rep.passed:
            rep.failure_reason = f"relative error {rep.rel_err:.3e} exceeds tolerance {tol:.1e}"
    rep.runtime_ms = int(round(1000 * (time.perf_counter() - start)))
    return rep


# ---------------------------------------------------------------------------
# samplers

def _band(rng, avg, size):
    return avg * (1 + rng.uniform(-SPREAD, SPREAD, size))


def _an_margin(fv: FlavorVectorAn):
    c = fv.contour_offset
    return min([tj.imag + c for tj in fv.t] + [sj.imag - c for sj in fv.s])


def sample_an(m, n, r, sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, seed=0,
              cfg: NumericsConfig = DEFAULT_CONFIG, *, Z=0j, Y=0, both_sides=True):
    """Balanced A_n data feasible on both sides of the A_n <-> A_m transformation.

    Imaginary parts of t (shifted by -Im(Z)/(n+1)) and of s (shifted by
    +Im(Z)/(n+1)) scatter around (m+1) Im(sigma+tau) / (2(m+n+2)) and are
    rescaled to add up exactly; the last s and the last b then absorb the
    remaining balancing residuals.
    """
    params = ModularParams(sigma, tau, r)
    if m < 0 or n < 0:
        raise SamplerError("m and n must be non-negative")
    h = params.st.imag
    size = m + n + 2
    avg = (m + 1) * h / (2 * size)
    if avg * MARGIN <= 10 * cfg.pole_guard:
        raise SamplerError(f"Im(sigma+tau) = {h:.3g} leaves no room for the sampling band")
    c = complex(Z).imag / (n + 1)
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(MAX_TRIES):
        im = _band(rng, avg, 2 * size)
        im *= (m + 1) * h / im.sum()
        t = rng.uniform(-0.5, 0.5, size) + 1j * (im[:size] - c)
        s = rng.uniform(-0.5, 0.5, size) + 1j * (im[size:] + c)
        s[-1] = (m + 1) * params.st - t.sum() - s[:-1].sum()
        a = rng.integers(0, r, size)
        b = rng.integers(0, r, size)
        b[-1] = canonical_mod(-(a.sum() + b[:-1].sum()), r)
        fv = FlavorVectorAn(m, n, t, s, a, b, Z, Y)
        try:
            fv.check_balancing(params)
            check_an_contour(fv, params, cfg)
            if _an_margin(fv) < MARGIN * avg:
                raise SamplerError("contour margin too small")
            if both_sides:
                dual = an_dual(fv, params)
                check_an_contour(dual, params, cfg)
                if dual.n > 0 and _an_margin(dual) < MARGIN * avg:
                    raise SamplerError("contour margin too small on the dual side")
        except InfeasibleError as exc:
            last = exc
            continue
        return fv
    raise SamplerError(f"no admissible A_{n} sample after {MAX_TRIES} draws ({last})")


def sample_bcn(m, n, r, sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, seed=0,
               cfg: NumericsConfig = DEFAULT_CONFIG, *, both_sides=True):
    """Balanced BC_n data with 0 < Im(t_i) < Im(sigma+tau)/2 for every i."""
    params = ModularParams(sigma, tau, r)
    if m < 0 or n < 0:
        raise SamplerError("m and n must be non-negative")
    h = params.st.imag
    size = 2 * m + 2 * n + 4
    avg = (m + 1) * h / size
    if avg * MARGIN <= 10 * cfg.pole_guard:
        raise SamplerError(f"Im(sigma+tau) = {h:.3g} leaves no room for the sampling band")
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(MAX_TRIES):
        im = _band(rng, avg, size)
        im *= (m + 1) * h / im.sum()
        t = rng.uniform(-0.5, 0.5, size) + 1j * im
        t[-1] = (m + 1) * params.st - t[:-1].sum()
        a = rng.integers(0, r, size)
        a[-1] = canonical_mod(-a[:-1].sum(), r)
        fv = FlavorVectorBCn(m, n, t, a)
        try:
            fv.check_balancing(params)
            margin = min(min(x.imag for x in fv.t), min(h / 2 - x.imag for x in fv.t))
            if margin < MARGIN * avg:
                raise SamplerError("contour margin too small")
            check_bcn_contour(fv, params, cfg)
            if both_sides:
                check_bcn_contour(bcn_dual(fv, params), params, cfg)
        except InfeasibleError as exc:
            last = exc
            continue
        return fv
    raise SamplerError(f"no admissible BC_{n} sample after {MAX_TRIES} draws ({last})")


# ---------------------------------------------------------------------------
# A_n

def verify_an_transform(m, n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                        sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, Z=0j, Y=0, tol=1e-6):
    """I^m_{A_n}(Z,Y|t,a;s,b) against I^n_{A_m}(Z+T, Y+A | dual data) times the cross product."""
    params = ModularParams(sigma, tau, r)
    name = "an_transform"
    state = {}

    def body():
        fv = sample_an(m, n, r, sigma, tau, seed, cfg, Z=Z, Y=Y)
        state["fv"] = fv.to_dict()
        lhs = an_sum_integral(fv, params, cfg)
        dual = an_dual(fv, params)
        rhs_int = an_sum_integral(dual, params, cfg)
        rhs = rhs_int.value * an_cross_product(fv, params, cfg)
        return lhs.value, rhs, lhs.est_rel_error, rhs_int.est_rel_error, {
            "nodes_lhs": lhs.nodes_used, "nodes_rhs": rhs_int.nodes_used}

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, m=m, n=n, Z=complex(Z), Y=Y,
                       flavor=jsonable(state.get("fv")))
    return rep


def verify_an_involution(m, n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                         sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-8):
    """Apply the transformation to the dual data and land back on the original.

    The dual of the dual is the original configuration, so the theorem read
    backwards predicts I(dual) = I(original) * prod Gamma(sigma+tau-t_i-s_j, -a_i-b_j).
    Both sum/integrals are computed independently.
    """
    params = ModularParams(sigma, tau, r)
    name = "an_involution"
    state = {}

    def body():
        fv = sample_an(m, n, r, sigma, tau, seed, cfg)
        state["fv"] = fv.to_dict()
        dual = an_dual(fv, params)
        back = an_dual(dual, params)
        close = lambda u, v: max(abs(x - y) for x, y in zip(u, v)) < 1e-12
        same = (back.m == fv.m and back.n == fv.n and close(back.t, fv.t) and close(back.s, fv.s)
                and abs(back.Z - fv.Z) < 1e-12
                and all(canonical_mod(x - y, r) == 0 for x, y in zip(back.a + back.b, fv.a + fv.b))
                and canonical_mod(back.Y - fv.Y, r) == 0)
        orig = an_sum_integral(fv, params, cfg)
        lhs = an_sum_integral(dual, params, cfg)
        rhs = orig.value * an_cross_product(dual, params, cfg)
        details = {"double_dual_is_identity": same}
        if not same:
            details.update(extra_ok=False, extra_reason="dual of the dual differs from the input")
        return lhs.value, rhs, lhs.est_rel_error, orig.est_rel_error, details

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, m=m, n=n, flavor=jsonable(state.get("fv")))
    return rep


def an_evaluation_rhs(fv: FlavorVectorAn, params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG):
    """prod_j Gamma(T-t_j, A-a_j) Gamma(S-s_j, B-b_j) prod_{i,j} Gamma(t_i+s_j, a_i+b_j)."""
    t, s = np.array(fv.t), np.array(fv.s)
    a, b = np.array(fv.a), np.array(fv.b)
    one = lens_gamma(np.concatenate([fv.T - t, fv.S - s]),
                     np.concatenate([fv.A - a, fv.sum_b - b]), params, cfg)
    return complex(np.prod(one)) * an_cross_product(fv, params, cfg)


def verify_an_evaluation(n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                         sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-8):
    """m = 0 sum/integral against its closed product."""
    params = ModularParams(sigma, tau, r)
    name = "an_evaluation"
    state = {}

    def body():
        fv = sample_an(0, n, r, sigma, tau, seed, cfg, both_sides=False)
        state["fv"] = fv.to_dict()
        lhs = an_sum_integral(fv, params, cfg)
        return lhs.value, an_evaluation_rhs(fv, params, cfg), lhs.est_rel_error, 0.0, {
            "nodes_lhs": lhs.nodes_used}

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, n=n, flavor=jsonable(state.get("fv")))
    return rep


# ---------------------------------------------------------------------------
# BC_n

def verify_elliptic_beta(r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                         sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-8, sym_tol=1e-12):
    """The elliptic beta sum/integral (BC_1, m = 0) against prod_{i<j} Gamma(t_i+t_j).

    Also checks the symmetry z -> -z, y -> r-y of the integrand and that the
    sum truncated to y <= r/2 (with doubled weights) reproduces the full sum.
    """
    params = ModularParams(sigma, tau, r)
    name = "elliptic_beta"
    state = {}

    def body():
        fv = sample_bcn(0, 1, r, sigma, tau, seed, cfg, both_sides=False)
        state["fv"] = fv.to_dict()
        lhs = bcn_sum_integral(fv, params, cfg)
        rhs = bcn_pair_product(fv, params, cfg)

        rng = np.random.default_rng(seed)
        zs = rng.uniform(0, 1, 16) + 0j
        sym = 0.0
        for y in range(r):
            f = bcn_integrand(zs[None, :], (y,), fv, params, cfg)
            g = bcn_integrand(-zs[None, :], (canonical_mod(r - y, r),), fv, params, cfg)
            sym = max(sym, float(np.max(np.abs(f - g) / np.abs(f))))

        nodes = max(lhs.nodes_used, cfg.quad_start_nodes)
        spec = ContourSpec.uniform(1, 0.0)
        per_y = [integrate_periodic(lambda z, y=y: bcn_integrand(z, (y,), fv, params, cfg), spec, nodes)
                 for y in range(r)]
        full = sum(per_y)
        trunc = per_y[0]
        for y in range(1, r // 2 + 1):
            trunc += per_y[y] if 2 * y == r else 2 * per_y[y]
        trunc_err = abs(trunc - full) / abs(full)
        details = {"symmetry_err": sym, "truncation_err": trunc_err, "nodes_lhs": lhs.nodes_used}
        if sym > sym_tol or trunc_err > sym_tol:
            details.update(extra_ok=False,
                           extra_reason=f"symmetry/truncation check {max(sym, trunc_err):.3e} > {sym_tol:.0e}")
        return lhs.value, rhs, lhs.est_rel_error, 0.0, details

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, flavor=jsonable(state.get("fv")))
    return rep


def verify_bcn_transform(m, n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                         sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-6):
    """I^m_{BC_n}(t, a) against I^n_{BC_m}((sigma+tau)/2 - t, -a) prod_{i<j} Gamma(t_i+t_j)."""
    params = ModularParams(sigma, tau, r)
    name = "bcn_transform"
    state = {}

    def body():
        fv = sample_bcn(m, n, r, sigma, tau, seed, cfg)
        state["fv"] = fv.to_dict()
        lhs = bcn_sum_integral(fv, params, cfg)
        rhs_int = bcn_sum_integral(bcn_dual(fv, params), params, cfg)
        rhs = rhs_int.value * bcn_pair_product(fv, params, cfg)
        return lhs.value, rhs, lhs.est_rel_error, rhs_int.est_rel_error, {
            "nodes_lhs": lhs.nodes_used, "nodes_rhs": rhs_int.nodes_used}

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, m=m, n=n, flavor=jsonable(state.get("fv")))
    return rep


def verify_bcn_evaluation(n, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                          sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-8):
    """m = 0 BC_n sum/integral against prod_{i<j} Gamma(t_i+t_j, a_i+a_j)."""
    params = ModularParams(sigma, tau, r)
    name = "bcn_evaluation"
    state = {}

    def body():
        fv = sample_bcn(0, n, r, sigma, tau, seed, cfg, both_sides=False)
        state["fv"] = fv.to_dict()
        lhs = bcn_sum_integral(fv, params, cfg)
        return lhs.value, bcn_pair_product(fv, params, cfg), lhs.est_rel_error, 0.0, {
            "nodes_lhs": lhs.nodes_used}

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, n=n, flavor=jsonable(state.get("fv")))
    return rep


def verify_bc1_as_a1(m, r, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                     sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-10):
    """I^m_{BC_1}(t, a) against the A_1 sum/integral with t split into halves."""
    params = ModularParams(sigma, tau, r)
    name = "bc1_as_a1"
    state = {}

    def body():
        fv = sample_bcn(m, 1, r, sigma, tau, seed, cfg, both_sides=False)
        state["fv"] = fv.to_dict()
        lhs = bcn_sum_integral(fv, params, cfg)
        rhs = an_sum_integral(bc1_as_a1(fv), params, cfg)
        return lhs.value, rhs.value, lhs.est_rel_error, rhs.est_rel_error, None

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, m=m, flavor=jsonable(state.get("fv")))
    return rep


# ---------------------------------------------------------------------------
# limits

LIMIT_CFG = NumericsConfig(pole_guard=1e-5, quad_max_nodes=32768)


def _limit_report(name, sigma, tau, r, seed, cfg, deltas, tol, one):
    start = time.perf_counter()
    rep = VerificationReport(name, {}, tol=tol, seed=seed)
    rows = []
    try:
        for d in deltas:
            rows.append(one(d))
    except InfeasibleError as exc:
        rep.failure_reason = f"{type(exc).__name__}: {exc}"
        rep.infeasible = True
    else:
        errs = [compare(lhs, rhs, tol)[1] for lhs, rhs, _ in rows]
        lhs, rhs, qerr = rows[-1]
        rep.lhs, rep.rhs, rep.quad_err_lhs = lhs, rhs, qerr
        rep.abs_err, rep.rel_err, ok = compare(lhs, rhs, tol)
        trend = all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
        rep.passed = ok and trend
        rep.details = {"deltas": list(deltas), "rel_errs": errs, "decreasing": trend}
        if not ok:
            rep.failure_reason = f"ratio off by {rep.rel_err:.3e} at the smallest delta"
        elif not trend:
            rep.failure_reason = "error does not decrease with delta"
    rep.params = _echo(name, sigma, tau, r, seed, cfg, deltas=list(deltas))
    rep.runtime_ms = int(round(1000 * (time.perf_counter() - start)))
    return rep


def verify_an_limit(r, seed=0, cfg: NumericsConfig = LIMIT_CFG, *, deltas=(1e-2, 1e-3),
                    sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=5e-3):
    """Pinching t_0 + s_0 = delta in I^0_{A_1}; the normalised value tends to I^0_{A_0}.

    The surviving variables sum to Z - s_0 (the residue sits at z = -t_0 -> s_0),
    with discrete constraint Y - b_0.  delta is taken purely imaginary so the
    contour stays pinched symmetrically between the two colliding pole
    sequences.  The finite-delta error is first order in delta.
    """
    params = ModularParams(sigma, tau, r)
    h = params.st.imag

    def one(delta):
        rng = np.random.default_rng(seed)
        eps = abs(delta)
        x0 = rng.uniform(-0.5, 0.5)
        t0, s0 = -x0 + 0.5j * eps, x0 + 0.5j * eps
        b0 = int(rng.integers(0, r))
        a0 = -b0
        # remaining entries: m = 0, n = 1 has three t and three s
        rest = rng.uniform(-0.5, 0.5, 4) + 1j * h / 4 * (1 + rng.uniform(-SPREAD, SPREAD, 4))
        t = [t0, rest[0], rest[1]]
        s = [s0, rest[2], params.st - (t0 + s0) - rest[0] - rest[1] - rest[2]]
        a = [a0] + list(rng.integers(0, r, 2))
        b = [b0, int(rng.integers(0, r)), 0]
        b[2] = canonical_mod(-(sum(a) + b[0] + b[1]), r)
        fv = FlavorVectorAn(0, 1, t, s, a, b)
        full = an_sum_integral(fv, params, cfg)
        den = lens_gamma(t0 + s0, 0, params, cfg)
        for i in (1, 2):
            den *= lens_gamma(t0 + s[i], -b0 + b[i], params, cfg)
            den *= lens_gamma(t[i] + s0, a[i] + b0, params, cfg)
        reduced = FlavorVectorAn(0, 0, t[1:], s[1:], a[1:], b[1:], fv.Z - s0, fv.Y - b0)
        red = an_sum_integral(reduced, params, cfg, check=False)
        return full.value / den, red.value, full.est_rel_error

    return _limit_report("an_limit", sigma, tau, r, seed, cfg, deltas, tol, one)


def verify_bcn_limit(r, seed=0, cfg: NumericsConfig = LIMIT_CFG, *, deltas=(1e-2, 1e-3),
                     sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=5e-3):
    """Pinching t_0 + t_1 = delta in I^0_{BC_1}; the normalised value tends to I^0_{BC_0} = 1."""
    params = ModularParams(sigma, tau, r)
    h = params.st.imag

    def one(delta):
        rng = np.random.default_rng(seed)
        eps = abs(delta)
        x0 = rng.uniform(-0.5, 0.5)
        t0, t1 = -x0 + 0.5j * eps, x0 + 0.5j * eps
        a1 = int(rng.integers(0, r))
        a0 = -a1
        rest = rng.uniform(-0.5, 0.5, 4) + 1j * h / 4 * (1 + rng.uniform(-SPREAD, SPREAD, 4))
        rest[-1] = params.st - (t0 + t1) - rest[:-1].sum()
        t = [t0, t1] + list(rest)
        a = [a0, a1] + list(rng.integers(0, r, 4))
        a[-1] = canonical_mod(-sum(a[:-1]), r)
        fv = FlavorVectorBCn(0, 1, t, a)
        full = bcn_sum_integral(fv, params, cfg)
        den = lens_gamma(t0 + t1, 0, params, cfg)
        for i in range(2, 6):
            den *= lens_gamma(t0 + t[i], -a1 + a[i], params, cfg)
            den *= lens_gamma(t1 + t[i], a1 + a[i], params, cfg)
        reduced = FlavorVectorBCn(0, 0, t[2:], a[2:])
        red = bcn_sum_integral(reduced, params, cfg, check=False)
        return full.value / den, red.value, full.est_rel_error

    return _limit_report("bcn_limit", sigma, tau, r, seed, cfg, deltas, tol, one)


# ---------------------------------------------------------------------------
# determinant lemmas

def _theta_k(k, z, m, params, cfg):
    return (lens_theta1 if k == 1 else lens_theta2)(z, m, params, cfg)


def _det_sample(rng, n, r):
    def cplx(size):
        return rng.uniform(-0.5, 0.5, size) + 1j * rng.uniform(-0.2, 0.2, size)
    return (complex(cplx(1)[0]), cplx(n), cplx(n), rng.integers(0, r, n), rng.integers(0, r, n))


def frobenius_sides(n, k, t, x, w, c, d, params, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Both sides of the Frobenius-type theta determinant formula."""
    th = lambda z, m: _theta_k(k, z, m, params, cfg)
    r = params.r
    th_t = th(t, 0)
    xw = x[:, None] + w[None, :]
    cd = c[:, None] + d[None, :]
    den = th(xw, cd)
    mat = th(t + xw, cd) / (th_t * den)
    lhs = complex(np.linalg.det(mat))
    rhs = th(t + x.sum() + w.sum(), c.sum() + d.sum()) / th_t / np.prod(den)
    for i in range(n):
        for j in range(i + 1, n):
            rhs *= (np.exp(2j * np.pi * (x[j] + w[j] - c[j] - d[j]) / r)
                    * th(x[i] - x[j], c[i] - c[j]) * th(w[i] - w[j], d[i] - d[j]))
    return lhs, complex(rhs), float(np.min(np.abs(den))), abs(th_t)


def cauchy_sides(n, k, x, w, c, d, params, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Both sides of the Cauchy-type determinant of 1/theta_k(x_i +- w_j, c_i +- d_j)."""
    th = lambda z, m: _theta_k(k, z, m, params, cfg)
    r = params.r

    def pm(x1, c1, x2, c2):
        return th(x1 + x2, c1 + c2) * th(x1 - x2, c1 - c2)

    den = pm(x[:, None], c[:, None], w[None, :], d[None, :])
    lhs = complex(np.linalg.det(1 / den))
    rhs = 1 / np.prod(den)
    for i in range(n):
        for j in range(i + 1, n):
            rhs *= (pm(x[i], c[i], x[j], c[j]) * pm(w[i], d[i], w[j], d[j])
                    * np.exp(2j * np.pi * (x[j] - w[i] - c[j] + d[i] + r / 2) / r))
    return lhs, complex(rhs), float(np.min(np.abs(den)))


DEGENERATE = 1e-6


def verify_frobenius_det(n, r, k, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                         sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-10):
    params = ModularParams(sigma, tau, r)
    name = "frobenius_det"
    state = {}

    def body():
        rng = np.random.default_rng(seed)
        for _ in range(MAX_TRIES):
            t, x, w, c, d = _det_sample(rng, n, r)
            lhs, rhs, dmin, tmin = frobenius_sides(n, k, t, x, w, c, d, params, cfg)
            if min(dmin, tmin) > DEGENERATE and abs(rhs) > 0:
                state.update(t=t, x=list(x), w=list(w), c=[int(v) for v in c], d=[int(v) for v in d])
                return lhs, rhs, 0.0, 0.0, None
        raise SamplerError(f"only degenerate determinant samples after {MAX_TRIES} draws")

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, n=n, k=k, sample=jsonable(state))
    return rep


def verify_cauchy_det(n, r, k, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                      sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-10):
    params = ModularParams(sigma, tau, r)
    name = "cauchy_det"
    state = {}

    def body():
        rng = np.random.default_rng(seed)
        for _ in range(MAX_TRIES):
            _, x, w, c, d = _det_sample(rng, n, r)
            lhs, rhs, dmin = cauchy_sides(n, k, x, w, c, d, params, cfg)
            if dmin > DEGENERATE and abs(rhs) > 0 and np.isfinite(rhs):
                state.update(x=list(x), w=list(w), c=[int(v) for v in c], d=[int(v) for v in d])
                return lhs, rhs, 0.0, 0.0, None
        raise SamplerError(f"only degenerate determinant samples after {MAX_TRIES} draws")

    rep = _run(name, None, seed, tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, n=n, k=k, sample=jsonable(state))
    return rep


# ---------------------------------------------------------------------------
# kernel identities

def residue_constant(params: ModularParams, cfg: NumericsConfig = DEFAULT_CONFIG, delta=1e-4):
    """Richardson-extrapolated delta * Gamma(delta, 0) as delta -> 0."""
    cfg = cfg.replace(pole_guard=min(cfg.pole_guard, delta * 1e-3))
    f1 = delta * lens_gamma(delta, 0, params, cfg)
    f2 = delta / 2 * lens_gamma(delta / 2, 0, params, cfg)
    return 2 * f2 - f1


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def kernel_identity_errors(params: ModularParams, samples, seed, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Worst relative error of each kernel identity over ``samples`` random points."""
    r, sg, tu, st = params.r, params.sigma, params.tau, params.st
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1, 1, samples) + 1j * rng.uniform(0.05, 0.95, samples) * st.imag
    m = rng.integers(0, r, samples)
    G = lens_gamma(z, m, params, cfg)
    th1 = lens_theta1(z, m, params, cfg)
    th2 = lens_theta2(z, m, params, cfg)
    errs = {}
    errs["reflection"] = _rel(G * lens_gamma(st - z, -m, params, cfg), np.ones_like(G))
    for n in (1, 2, 3):
        r1, r2_ = G.copy(), G.copy()
        for j in range(n):
            r1 = r1 * lens_theta1(z + j * sg, m - j, params, cfg)
            r2_ = r2_ * lens_theta2(z + j * tu, m + j, params, cfg)
        errs[f"shift_sigma_{n}"] = _rel(lens_gamma(z + n * sg, m - n, params, cfg), r1)
        errs[f"shift_tau_{n}"] = _rel(lens_gamma(z + n * tu, m + n, params, cfg), r2_)
    errs["periodic_z"] = _rel(lens_gamma(z + 2 * r, m, params, cfg), G)
    errs["periodic_m"] = _rel(lens_gamma(z, m + r, params, cfg), G)
    errs["theta_periodic"] = max(
        _rel(lens_theta1(z + 2 * r, m, params, cfg), th1),
        _rel(lens_theta1(z, m + r, params, cfg), th1),
        _rel(lens_theta2(z + 2 * r, m, params, cfg), th2),
        _rel(lens_theta2(z, m + r, params, cfg), th2))
    ph = np.exp(-2j * np.pi * (z - m) / r)
    errs["theta_reflection"] = max(
        _rel(lens_theta1(-z, -m, params, cfg), -th1 * ph),
        _rel(lens_theta2(-z, -m, params, cfg), -th2 * ph))
    qp = 0.0
    for n in (1, 2, 3):
        qp = max(qp,
                 _rel(lens_theta1(z + n * tu, m + n, params, cfg),
                      th1 * np.exp(-n * 1j * np.pi * (2 * z + (n - 1) * tu + r - 2 * m - n + 1) / r)),
                 _rel(lens_theta2(z + n * sg, m - n, params, cfg),
                      th2 * np.exp(-n * 1j * np.pi * (2 * z + (n - 1) * sg + r - 2 * m + n - 1) / r)))
    for n in (1, 2):
        qp = max(qp,
                 _rel(lens_theta1(z + r * n * tu, m, params, cfg),
                      th1 * np.exp(-n * 1j * np.pi * (2 * z + tu * (r * n - 1) + 1))),
                 _rel(lens_theta2(z + r * n * sg, m, params, cfg),
                      th2 * np.exp(-n * 1j * np.pi * (2 * z + sg * (r * n - 1) + 1))))
    errs["theta_quasi_periodic"] = qp
    one = params.with_r(1)
    errs["r1_reduction"] = _rel(lens_gamma(z, 0, one, cfg), gamma1(z, sg, tu, cfg))
    fact = (np.exp(phi_e(z, m, params))
            * gamma1(z + sg * m, r * sg, st, cfg, check_poles=False)
            * gamma1(z + tu * (r - m), r * tu, st, cfg, check_poles=False))
    errs["factorization"] = _rel(G, fact)
    errs["phi_e_forms"] = _rel(np.exp(phi_e(z, m, params, form="first")), np.exp(phi_e(z, m, params)))
    errs["r2_forms"] = float(np.max(np.abs(r2(z, m, sg, tu, r) - r2_sum_form(z, m, sg, tu, r))
                                    / np.maximum(1.0, np.abs(r2(z, m, sg, tu, r)))))
    return errs


def verify_kernel_suite(r, samples=200, seed=0, cfg: NumericsConfig = DEFAULT_CONFIG, *,
                        sigma=DEFAULT_SIGMA, tau=DEFAULT_TAU, tol=1e-10, residue_tol=1e-6):
    """Every kernel identity plus the residue constant; fails if any one fails."""
    params = ModularParams(sigma, tau, r)
    name = "kernel_suite"

    def body():
        errs = kernel_identity_errors(params, samples, seed, cfg)
        res = residue_constant(params, cfg)
        target = 1j / (2 * math.pi * lambda_const(params, cfg))
        res_err = abs(res / target - 1)
        worst = max(errs, key=errs.get)
        details = {"errors": errs, "residue_err": res_err, "worst": worst}
        if errs[worst] > tol:
            details.update(extra_ok=False, extra_reason=f"{worst}: {errs[worst]:.3e} > {tol:.0e}")
        # the residue constant is the compared pair; its tolerance differs
        return res, target, 0.0, 0.0, details

    rep = _run(name, None, seed, residue_tol, body)
    rep.params = _echo(name, sigma, tau, r, seed, cfg, samples=samples, identity_tol=tol)
    return rep

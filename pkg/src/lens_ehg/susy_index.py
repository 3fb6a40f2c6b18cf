"""Lens indices of SU(N_c) and Sp(2N_c) SQCD and their Seiberg duals.

Physical data (ranks, flavor fugacities, baryon fugacity) is mapped onto the
A_n and BC_n sum/integrals.  R-charges are kept as exact fractions so the
charge bookkeeping can be checked without rounding.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, InfeasibleError
from .identities import VerificationReport, _echo, compare, jsonable
from .kernel import DEFAULT_CONFIG, ModularParams, NumericsConfig, canonical_mod, lambda_const, lens_gamma
from .quadrature import ContourSpec, ValueWithError, refine_until
from .sumint import (FlavorVectorAn, FlavorVectorBCn, an_cross_product, an_dual, an_sum_integral,
                     bcn_dual, bcn_pair_product, bcn_sum_integral, check_an_contour, enumerate_tuples)
from ._parallel import ordered_map

TRACE_TOL = 1e-12


# ---------------------------------------------------------------------------
# charges

def r_q(Nc, Nf):
    """R-charge of the SU(N_c) electric quarks."""
    return 1 - Fraction(Nc, Nf)


def r_Q(Nc, Nf):
    """R-charge of the SU dual quarks, N_c / N_f."""
    return Fraction(Nc, Nf)


def r_B(Nc, Nf):
    """Baryon charge of the SU dual quarks, N_c / (N_f - N_c)."""
    return Fraction(Nc, Nf - Nc)


def sp_r_q(Nc, Nf):
    """R-charge of the Sp(2N_c) electric quarks, 1 - (N_c+1)/N_f."""
    return 1 - Fraction(Nc + 1, Nf)


def sp_r_Q(Nc, Nf):
    return Fraction(Nc + 1, Nf)


def dual_rank(group, Nc, Nf):
    return Nf - Nc if group == "SU" else Nf - Nc - 2


# ---------------------------------------------------------------------------
# theory data

@dataclass(frozen=True)
class GaugeTheorySpec:
    """SQCD data.  For Sp only ``tbar`` (2 N_f entries) and ``abar`` are used."""

    group: str
    Nc: int
    Nf: int
    r: int
    sigma: complex
    tau: complex
    tbar: tuple
    abar: tuple
    sbar: tuple = ()
    bbar: tuple = ()
    baryon_B: complex = 0.01j
    n_B: int = 0

    def __post_init__(self):
        group = self.group.upper() if self.group.lower() == "su" else self.group.capitalize()
        if group not in ("SU", "Sp"):
            raise ConfigurationError(f"unknown gauge group {self.group!r}; use SU or Sp")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "tbar", tuple(complex(x) for x in self.tbar))
        object.__setattr__(self, "sbar", tuple(complex(x) for x in self.sbar))
        object.__setattr__(self, "abar", tuple(int(x) for x in self.abar))
        object.__setattr__(self, "bbar", tuple(int(x) for x in self.bbar))
        object.__setattr__(self, "baryon_B", complex(self.baryon_B))
        if self.r < 1:
            raise ConfigurationError("r must be a positive integer")
        if group == "SU":
            if self.Nc < 2:
                raise ConfigurationError("SU(N_c) needs N_c >= 2")
            if self.Nf <= self.Nc:
                raise ConfigurationError(f"SU duality needs N_f > N_c (got N_f={self.Nf}, N_c={self.Nc})")
            for name in ("tbar", "sbar", "abar", "bbar"):
                if len(getattr(self, name)) != self.Nf:
                    raise ConfigurationError(f"{name} must have N_f = {self.Nf} entries")
            self._traceless("tbar", "sbar")
            self._holonomies("abar", "bbar")
        else:
            if self.Nc < 1:
                raise ConfigurationError("Sp(2N_c) needs N_c >= 1")
            if self.Nf <= self.Nc + 1:
                raise ConfigurationError(f"Sp duality needs N_f > N_c + 1 (got N_f={self.Nf}, N_c={self.Nc})")
            for name in ("tbar", "abar"):
                if len(getattr(self, name)) != 2 * self.Nf:
                    raise ConfigurationError(f"{name} must have 2 N_f = {2 * self.Nf} entries")
            self._traceless("tbar")
            self._holonomies("abar")

    def _traceless(self, *names):
        for name in names:
            tr = sum(getattr(self, name))
            if abs(tr) > TRACE_TOL:
                raise ConfigurationError(f"{name} must be traceless, sum is {tr:.3g}")

    def _holonomies(self, *names):
        for name in names:
            tot = canonical_mod(sum(getattr(self, name)), self.r)
            if tot != 0:
                raise ConfigurationError(f"{name} must sum to 0 mod r, got {tot}")

    @property
    def params(self):
        return ModularParams(self.sigma, self.tau, self.r)

    @property
    def R(self):
        return (self.sigma + self.tau) / 2

    @property
    def dual_Nc(self):
        return dual_rank(self.group, self.Nc, self.Nf)

    def to_dict(self):
        d = {"group": self.group, "Nc": self.Nc, "Nf": self.Nf, "r": self.r,
             "sigma": self.sigma, "tau": self.tau, "tbar": list(self.tbar), "abar": list(self.abar)}
        if self.group == "SU":
            d.update(sbar=list(self.sbar), bbar=list(self.bbar), baryon_B=self.baryon_B, n_B=self.n_B)
        return jsonable(d)


def random_spec(group, Nc, Nf, r, sigma=0.07 + 0.34j, tau=-0.04 + 0.37j, seed=0, *,
                spread=0.15, baryon_B=0.01j, n_B=0):
    """Traceless flavor fugacities with small imaginary parts.

    Imaginary parts are at most ``spread`` times the R-charge shift
    r_q Im(sigma+tau)/2, which keeps every quark inside the contour band.
    """
    rng = np.random.default_rng(seed)
    h = (complex(sigma) + complex(tau)).imag
    size = Nf if group.upper() == "SU" else 2 * Nf
    rq = float(r_q(Nc, Nf) if group.upper() == "SU" else sp_r_q(Nc, Nf))
    width = spread * rq * h / 2

    def traceless():
        v = rng.uniform(-0.3, 0.3, size) + 1j * rng.uniform(-width, width, size)
        v = v - v.mean()
        v[-1] = -v[:-1].sum()
        return v

    def holonomy():
        a = rng.integers(0, r, size)
        a[-1] = canonical_mod(-a[:-1].sum(), r)
        return a

    if group.upper() == "SU":
        return GaugeTheorySpec("SU", Nc, Nf, r, sigma, tau, traceless(), holonomy(),
                               traceless(), holonomy(), baryon_B, n_B)
    return GaugeTheorySpec("Sp", Nc, Nf, r, sigma, tau, traceless(), holonomy())


# ---------------------------------------------------------------------------
# SU(N_c)

def _check_quantized(spec: GaugeTheorySpec):
    nt = spec.dual_Nc
    if spec.n_B % nt != 0:
        raise ConfigurationError(
            f"baryon holonomy n_B = {spec.n_B} violates the quantization condition: "
            f"it must be a multiple of N_f - N_c = {nt}")


def map_su_electric(spec: GaugeTheorySpec) -> FlavorVectorAn:
    """A_{N_c-1} data with m = N_f - N_c - 1 and Z = Y = 0.

    t = tbar + r_q R + B, s = sbar + r_q R - B, a = abar + n_B, b = bbar - n_B.
    """
    if spec.group != "SU":
        raise ConfigurationError("map_su_electric needs an SU spec")
    _check_quantized(spec)
    shift = float(r_q(spec.Nc, spec.Nf)) * spec.R
    B, nB = spec.baryon_B, spec.n_B
    t = [x + shift + B for x in spec.tbar]
    s = [x + shift - B for x in spec.sbar]
    # Sum(t + s) = 2 N_f r_q R = (N_f - N_c)(sigma+tau) up to rounding; put it back exactly
    s[-1] = (spec.Nf - spec.Nc) * spec.params.st - sum(t) - sum(s[:-1])
    a = [x + nB for x in spec.abar]
    b = [x - nB for x in spec.bbar]
    return FlavorVectorAn(spec.Nf - spec.Nc - 1, spec.Nc - 1, t, s, a, b)


def map_su_magnetic(spec: GaugeTheorySpec) -> FlavorVectorAn:
    """Dual SU(N_f - N_c) data: t~ = -tbar + r_Q R + r_B B, a~ = -abar + r_B n_B, etc."""
    if spec.group != "SU":
        raise ConfigurationError("map_su_magnetic needs an SU spec")
    _check_quantized(spec)
    Nc, Nf = spec.Nc, spec.Nf
    rb = r_B(Nc, Nf)
    shift = float(r_Q(Nc, Nf)) * spec.R
    B = float(rb) * spec.baryon_B
    nB = rb * spec.n_B
    if nB.denominator != 1:
        raise ConfigurationError(f"r_B n_B = {nB} is not an integer (quantization condition)")
    nB = int(nB)
    t = [-x + shift + B for x in spec.tbar]
    s = [-x + shift - B for x in spec.sbar]
    s[-1] = Nc * spec.params.st - sum(t) - sum(s[:-1])
    a = [-x + nB for x in spec.abar]
    b = [-x - nB for x in spec.bbar]
    return FlavorVectorAn(Nc - 1, Nf - Nc - 1, t, s, a, b)


def su_tilde_map(fv: FlavorVectorAn, Nc, Nf, n_B=0, r=None) -> FlavorVectorAn:
    """t~ = T/(N_f-N_c) - t, s~ = S/(N_f-N_c) - s, straight from the electric data.

    The holonomy sums are only fixed mod r, so the integer shift is taken as
    N_f n_B / (N_f - N_c), which the quantization condition makes integral.
    """
    nt = Nf - Nc
    k = Fraction(Nf * n_B, nt)
    if k.denominator != 1:
        raise ConfigurationError(f"N_f n_B / (N_f - N_c) = {k} is not an integer (quantization condition)")
    k = int(k)
    if r is not None and (canonical_mod(fv.A - nt * k, r) or canonical_mod(fv.sum_b + nt * k, r)):
        raise ConfigurationError("holonomy sums do not match the baryon holonomy n_B")
    return FlavorVectorAn(fv.n, fv.m, [fv.T / nt - x for x in fv.t], [fv.S / nt - x for x in fv.s],
                          [k - x for x in fv.a], [-k - x for x in fv.b])


def su_meson_product(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG):
    return an_cross_product(map_su_electric(spec), spec.params, cfg)


def su_electric_index(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG) -> ValueWithError:
    """Electric lens index, evaluated as I^{N_f-N_c-1}_{A_{N_c-1}}(0, 0 | t, a; s, b)."""
    return an_sum_integral(map_su_electric(spec), spec.params, cfg)


def su_electric_index_one_loop(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG) -> ValueWithError:
    """Electric lens index assembled from the vector and quark one-loop factors.

    Uses the barred fugacities and (B, n_B) directly instead of the mapped
    A_n data, as an independent route to the same number.
    """
    _check_quantized(spec)
    params, Nc = spec.params, spec.Nc
    fv = map_su_electric(spec)
    check_an_contour(fv, params, cfg)
    rq = float(r_q(Nc, spec.Nf)) * spec.R
    tb, sb = np.array(spec.tbar), np.array(spec.sbar)
    # same rounding fix as the map so both routes see identical arguments
    sb[-1] = fv.s[-1] - rq + spec.baryon_B
    ab, bb = np.array(spec.abar), np.array(spec.bbar)
    B, nB = spec.baryon_B, spec.n_B

    def term(z, ys):
        ys = np.asarray(ys)
        quark = lens_gamma(tb[None, :, None] + z[:, None, :] + B + rq,
                           (ab[None, :] + ys[:, None] + nB)[:, :, None], params, cfg)
        anti = lens_gamma(sb[None, :, None] - z[:, None, :] - B + rq,
                          (bb[None, :] - ys[:, None] - nB)[:, :, None], params, cfg)
        val = np.prod(quark.reshape(-1, z.shape[1]), axis=0) * np.prod(anti.reshape(-1, z.shape[1]), axis=0)
        for i in range(Nc):
            for j in range(i + 1, Nc):
                val = val * lens_gamma(z[i] - z[j], ys[i] - ys[j], params, cfg, inverse=True)
                val = val * lens_gamma(z[j] - z[i], ys[j] - ys[i], params, cfg, inverse=True)
        return val

    tuples = enumerate_tuples(Nc - 1, spec.r, 0)

    def integrand(free):
        z = np.vstack([free, -np.sum(free, axis=0, keepdims=True)])
        return np.sum(ordered_map(lambda ys: term(z, ys), tuples), axis=0)

    res = refine_until(integrand, ContourSpec.uniform(Nc - 1, 0.0), cfg)
    pref = lambda_const(params, cfg) ** (Nc - 1) / math.factorial(Nc)
    return ValueWithError(pref * res.value, res.est_rel_error, res.nodes_used, res.converged)


def su_magnetic_index(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG) -> ValueWithError:
    """Meson product times I^{N_c-1}_{A_{N_f-N_c-1}}(0, 0 | t~, a~; s~, b~)."""
    mag = an_sum_integral(map_su_magnetic(spec), spec.params, cfg)
    val = su_meson_product(spec, cfg) * mag.value
    return ValueWithError(val, mag.est_rel_error, mag.nodes_used, mag.converged)


# ---------------------------------------------------------------------------
# Sp(2N_c)

def map_sp_electric(spec: GaugeTheorySpec) -> FlavorVectorBCn:
    """BC_{N_c} data with m = N_f - N_c - 2: t = tbar + r'_q R, a = abar."""
    if spec.group != "Sp":
        raise ConfigurationError("map_sp_electric needs an Sp spec")
    shift = float(sp_r_q(spec.Nc, spec.Nf)) * spec.R
    t = [x + shift for x in spec.tbar]
    t[-1] = (spec.Nf - spec.Nc - 1) * spec.params.st - sum(t[:-1])
    return FlavorVectorBCn(spec.Nf - spec.Nc - 2, spec.Nc, t, spec.abar)


def map_sp_magnetic(spec: GaugeTheorySpec) -> FlavorVectorBCn:
    """Dual BC data: t~ = -tbar + r'_Q R = (sigma+tau)/2 - t, a~ = -a."""
    return bcn_dual(map_sp_electric(spec), spec.params)


def sp_electric_index(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG) -> ValueWithError:
    return bcn_sum_integral(map_sp_electric(spec), spec.params, cfg)


def sp_magnetic_index(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG) -> ValueWithError:
    """prod_{i<j} Gamma(t_i + t_j, a_i + a_j) times I^{N_c}_{BC_{N_f-N_c-2}}(t~, -a)."""
    fv = map_sp_electric(spec)
    mag = bcn_sum_integral(bcn_dual(fv, spec.params), spec.params, cfg)
    val = bcn_pair_product(fv, spec.params, cfg) * mag.value
    return ValueWithError(val, mag.est_rel_error, mag.nodes_used, mag.converged)


# ---------------------------------------------------------------------------
# duality

def _same_theorem_instance(spec: GaugeTheorySpec):
    """Check that the magnetic data is the transformation-rule image of the electric data.

    For SU the dual side of the A_n transformation has its integration
    variables summing to T; shifting them by T/(N_f-N_c) gives the tilde data.
    """
    params = spec.params
    if spec.group == "SU":
        el = map_su_electric(spec)
        mag = map_su_magnetic(spec)
        dual = an_dual(el, params)
        nt = spec.dual_Nc
        shift = dual.Z / nt
        k = spec.Nf * spec.n_B // nt
        ok = (max(abs(x + shift - y) for x, y in zip(dual.t, mag.t)) < 1e-10
              and max(abs(x - shift - y) for x, y in zip(dual.s, mag.s)) < 1e-10
              and canonical_mod(dual.Y - nt * k, spec.r) == 0
              and all(canonical_mod(x + k - y, spec.r) == 0 for x, y in zip(dual.a, mag.a))
              and all(canonical_mod(x - k - y, spec.r) == 0 for x, y in zip(dual.b, mag.b))
              and (mag.m, mag.n) == (dual.m, dual.n))
        tilde = su_tilde_map(el, spec.Nc, spec.Nf, spec.n_B, spec.r)
        ok = ok and max(abs(x - y) for x, y in zip(tilde.t + tilde.s, mag.t + mag.s)) < 1e-10
        ok = ok and all(canonical_mod(x - y, spec.r) == 0 for x, y in zip(tilde.a + tilde.b, mag.a + mag.b))
        return ok
    el = map_sp_electric(spec)
    mag = map_sp_magnetic(spec)
    tilde = [-x + float(sp_r_Q(spec.Nc, spec.Nf)) * spec.R for x in spec.tbar]
    return max(abs(x - y) for x, y in zip(tilde[:-1], mag.t[:-1])) < 1e-10 and (mag.m, mag.n) == (el.n, el.m)


def charge_bookkeeping(Nc, Nf):
    """Exact relations between the electric and magnetic charges."""
    nt = Nf - Nc
    return {
        "r_Q_is_r_q_at_dual_rank": r_Q(Nc, Nf) == r_q(nt, Nf),
        "quark_R_sum": 2 * Nf * r_q(Nc, Nf) == 2 * nt,
        "dual_quark_R_sum": Nf * r_Q(Nc, Nf) == Nc,
        "meson_R": 2 * r_q(Nc, Nf) + 2 * r_Q(Nc, Nf) == 2,
        "sp_R_sum": sp_r_q(Nc, Nf) + sp_r_Q(Nc, Nf) == 1,
    }


def check_seiberg_duality(spec: GaugeTheorySpec, cfg: NumericsConfig = DEFAULT_CONFIG, *, tol=1e-6):
    """Electric against magnetic lens index for one theory."""
    name = f"seiberg_{spec.group.lower()}"
    start = time.perf_counter()
    rep = VerificationReport(name, {}, tol=tol)
    try:
        same = _same_theorem_instance(spec)
        if spec.group == "SU":
            el, mag = su_electric_index(spec, cfg), su_magnetic_index(spec, cfg)
        else:
            el, mag = sp_electric_index(spec, cfg), sp_magnetic_index(spec, cfg)
    except InfeasibleError as exc:
        rep.failure_reason = f"{type(exc).__name__}: {exc}"
        rep.infeasible = True
    else:
        rep.lhs, rep.rhs = el.value, mag.value
        rep.quad_err_lhs, rep.quad_err_rhs = el.est_rel_error, mag.est_rel_error
        rep.abs_err, rep.rel_err, rep.passed = compare(el.value, mag.value, tol)
        rep.details = {"theorem_instance_matches": same, "dual_Nc": spec.dual_Nc}
        if not same:
            rep.passed = False
            rep.failure_reason = "magnetic data is not the transformation image of the electric data"
        elif not rep.passed:
            rep.failure_reason = f"relative error {rep.rel_err:.3e} exceeds tolerance {tol:.1e}"
    rep.params = _echo(name, spec.sigma, spec.tau, spec.r, None, cfg, theory=spec.to_dict())
    rep.runtime_ms = int(round(1000 * (time.perf_counter() - start)))
    return rep

"""Trapezoidal quadrature on straight, 1-periodic contours.

Integrands take a complex array of shape ``(dim, K)`` holding K nodes and
return K values.  Every integrand in this package is periodic along the
real direction of each contour, so the equispaced rule converges
geometrically with rate set by the distance to the nearest pole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, EvaluationError
from .kernel import DEFAULT_CONFIG, NumericsConfig

# nodes handed to the integrand per call
BLOCK = 8192


@dataclass(frozen=True)
class ContourSpec:
    """Product of straight segments [i*c, period + i*c], one per variable."""

    dim: int
    imag_offsets: tuple = field(default=())
    period: float = 1.0

    def __post_init__(self):
        offs = tuple(float(c) for c in self.imag_offsets)
        if self.dim < 0:
            raise DomainError("contour dimension must be non-negative")
        if len(offs) != self.dim:
            raise DomainError(f"expected {self.dim} offsets, got {len(offs)}")
        object.__setattr__(self, "imag_offsets", offs)

    @classmethod
    def uniform(cls, dim, offset=0.0):
        return cls(dim, (offset,) * dim)


@dataclass(frozen=True)
class ValueWithError:
    value: complex
    est_rel_error: float
    nodes_used: int
    converged: bool


def _axis_nodes(spec, axis, n, phase=0.0):
    k = np.arange(n)
    return spec.period * (k + phase) / n + 1j * spec.imag_offsets[axis]


def _grid_indices(dim, n, only_new=False):
    """Index tuples of the n^dim grid in axis-major (C) order.

    With ``only_new`` the indices with every component even are dropped:
    those nodes already belong to the grid with n/2 points per axis.
    """
    idx = np.indices((n,) * dim).reshape(dim, -1)
    if only_new:
        keep = np.any(idx % 2 == 1, axis=0)
        idx = idx[:, keep]
    return idx


def _sum_at(f, spec, n, idx, phase=0.0):
    axes = [_axis_nodes(spec, a, n, phase) for a in range(spec.dim)]
    total = 0j
    for lo in range(0, idx.shape[1], BLOCK):
        block = idx[:, lo:lo + BLOCK]
        pts = np.stack([axes[a][block[a]] for a in range(spec.dim)])
        vals = np.asarray(f(pts), dtype=complex)
        if not np.all(np.isfinite(vals)):
            bad = int(np.argmin(np.isfinite(vals)))
            where = tuple(complex(v) for v in pts[:, bad])
            raise EvaluationError(f"non-finite integrand value at node {where}", location=where)
        total += complex(np.sum(vals))
    return total


def _call0(f):
    val = complex(np.asarray(f(np.empty((0, 1), dtype=complex)), dtype=complex).ravel()[0])
    if not math.isfinite(abs(val)):
        raise EvaluationError("non-finite integrand value", location=())
    return val


def integrate_periodic(f, spec: ContourSpec, nodes_per_axis: int, phase=0.0):
    """Tensor trapezoidal rule with ``nodes_per_axis`` points per variable.

    The rule is the mean of f over the grid, i.e. the integral over the unit
    period.  ``phase`` shifts every node by phase/N along the real axis.
    """
    if spec.dim == 0:
        return _call0(f)
    n = int(nodes_per_axis)
    idx = _grid_indices(spec.dim, n)
    return _sum_at(f, spec, n, idx, phase) / n ** spec.dim


def refine_until(f, spec: ContourSpec, cfg: NumericsConfig = DEFAULT_CONFIG):
    """Double the nodes per axis until two successive levels agree.

    Nodes of the coarser grid are reused.  The returned error estimate is the
    relative difference of the last two levels; ``converged`` is False when
    ``quad_max_nodes`` was reached first.
    """
    if spec.dim == 0:
        return ValueWithError(_call0(f), 0.0, 0, True)
    d = spec.dim
    n = cfg.quad_start_nodes
    total = _sum_at(f, spec, n, _grid_indices(d, n))
    value = total / n ** d
    err = math.inf
    while n < cfg.quad_max_nodes:
        n *= 2
        total += _sum_at(f, spec, n, _grid_indices(d, n, only_new=True))
        new = total / n ** d
        scale = abs(new)
        err = abs(new - value) / scale if scale > 0 else abs(new - value)
        value = new
        if err <= cfg.quad_tol:
            return ValueWithError(value, err, n, True)
    return ValueWithError(value, err, n, err <= cfg.quad_tol)


def nearest_pole_distance(poles: Sequence[complex], spec: ContourSpec):
    """Smallest distance from the listed poles to any contour segment.

    Each segment covers a whole period, so after reducing a pole modulo the
    period only its vertical offset matters.
    """
    poles = np.asarray(list(poles) if not isinstance(poles, np.ndarray) else poles, dtype=complex)
    if poles.size == 0 or spec.dim == 0:
        return math.inf
    offs = np.asarray(spec.imag_offsets)
    return float(np.min(np.abs(poles.imag[:, None] - offs[None, :])))

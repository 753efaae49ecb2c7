"""Closed-form function families and node-wise sampling onto grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DECAY_RATIO, ConvexFnGrid, GridSpec, LogConcaveFnGrid
from .validation import check_convex, check_log_concave

__all__ = [
    "Gaussian",
    "ExponentialBox",
    "BoxIndicator",
    "PolyhedralQuadratic",
    "Product",
    "sample",
]


def _vec(x, dim):
    return np.broadcast_to(np.asarray(x, dtype=float), (dim,))


def _inside(mesh, lo, hi, tol):
    dim = len(mesh)
    lo, hi = _vec(lo, dim), _vec(hi, dim)
    ok = np.ones(mesh[0].shape, dtype=bool)
    for x, a, b in zip(mesh, lo, hi):
        ok &= (x >= a - tol) & (x <= b + tol)
    return ok


@dataclass(frozen=True)
class Gaussian:
    """``exp(-sum((x - mean)**2 / (2 var)))`` with diagonal covariance."""

    mean: object = 0.0
    var: object = 1.0

    def potential(self, mesh, tol=0.0):
        dim = len(mesh)
        m, v = _vec(self.mean, dim), _vec(self.var, dim)
        return sum((x - mk) ** 2 / (2 * vk) for x, mk, vk in zip(mesh, m, v))


@dataclass(frozen=True)
class ExponentialBox:
    """``exp(-<slope, x - lo>)`` restricted to the box ``[lo, hi]``.

    ``hi`` may be ``inf`` on an axis, giving a one-sided exponential there.
    """

    slope: object = 1.0
    lo: object = 0.0
    hi: object = np.inf

    def potential(self, mesh, tol=0.0):
        dim = len(mesh)
        s, lo = _vec(self.slope, dim), _vec(self.lo, dim)
        phi = sum(sk * (x - a) for x, sk, a in zip(mesh, s, lo))
        return np.where(_inside(mesh, self.lo, self.hi, tol), phi, np.inf)


@dataclass(frozen=True)
class BoxIndicator:
    """Convex indicator of ``[lo, hi]``: 0 inside, ``+inf`` outside."""

    lo: object = -1.0
    hi: object = 1.0

    def potential(self, mesh, tol=0.0):
        return np.where(_inside(mesh, self.lo, self.hi, tol), 0.0, np.inf)


@dataclass(frozen=True)
class PolyhedralQuadratic:
    """``max_j(<a_j, x - center> + b_j) + eps * |x - center|**2``.

    With ``eps = 0`` and slopes ``+-1`` this gives ``|x|``-type potentials.
    """

    slopes: object
    intercepts: object
    eps: float = 0.0
    center: object = 0.0

    def potential(self, mesh, tol=0.0):
        dim = len(mesh)
        a = np.asarray(self.slopes, dtype=float).reshape(-1, dim)
        b = np.broadcast_to(np.asarray(self.intercepts, dtype=float), (a.shape[0],))
        c = _vec(self.center, dim)
        rel = [x - ck for x, ck in zip(mesh, c)]
        affine = np.max(
            [sum(aj[k] * rel[k] for k in range(dim)) + bj for aj, bj in zip(a, b)], axis=0
        )
        return affine + self.eps * sum(r * r for r in rel)


@dataclass(frozen=True)
class Product:
    """Tensor product: ``phi(x) = sum_k factor_k(x_k)`` with 1-D factors."""

    factors: tuple

    def potential(self, mesh, tol=0.0):
        if len(self.factors) != len(mesh):
            raise ValueError(f"{len(self.factors)} factors for a {len(mesh)}-D grid")
        return sum(f.potential([x], tol) for f, x in zip(self.factors, mesh))


def sample(descriptor, spec: GridSpec, kind: str = "logconcave", decay_ratio=DECAY_RATIO):
    """Evaluate ``descriptor`` at every node of ``spec``.

    ``kind="logconcave"`` returns ``exp(-phi)`` as a :class:`LogConcaveFnGrid`;
    ``kind="convex"`` returns ``phi`` itself.  The result is validated and
    :class:`InvariantViolation` is raised for a mis-specified descriptor.
    """
    tol = 1e-9 * min(spec.h)
    phi = np.asarray(descriptor.potential(spec.mesh(), tol), dtype=float)
    phi = np.broadcast_to(phi, spec.shape)
    if kind == "convex":
        return check_convex(ConvexFnGrid(spec, phi))
    if kind == "logconcave":
        with np.errstate(over="ignore"):
            f = LogConcaveFnGrid(spec, np.exp(-phi))
        return check_log_concave(f, decay_ratio=decay_ratio)
    raise ValueError(f"kind must be 'logconcave' or 'convex', got {kind!r}")

"""Polar mass ``F(z) = int f^z``, its gradient, Santaló points and λ-splits.

With a relative plan the dual samples are ``y = z + y'`` for a fixed set of
offsets ``y'``, and ``L^z phi(z + y') = L phi(y') - <z, y'>``.  So

    F(z) = h^n * sum_{y'} exp(<z, y'> - L phi(y'))

is an exactly smooth convex function of ``z`` (a sum of exponentials of
affine functions) and ``grad F(z) = h^n * sum y' exp(...)``, which is the
first moment of ``f^z`` about ``z``.  :class:`PolarMass` evaluates both
from one cached transform; :func:`polar_mass` goes through a fresh polar.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    AffineSubspace,
    Hyperplane,
    LogConcaveFnGrid,
    _as_point,
    exact_sum,
    half_space_masses,
    integrate,
    moment,
)
from .exceptions import (
    DegenerateMarginal,
    NotConvergedWarning,
    PlanMismatch,
    SubspaceOutsideSupport,
)
from .legendre import ConjugatePlan, legendre_nd, polar

__all__ = [
    "PolarMass",
    "SantaloResult",
    "LambdaSplit",
    "polar_mass",
    "polar_mass_gradient",
    "santalo_point",
    "lambda_split",
]


def polar_mass(f: LogConcaveFnGrid, z, plan: ConjugatePlan | None = None) -> float:
    """``integrate(polar(f, z, plan))``."""
    return integrate(polar(f, z, plan, warn=False))


def polar_mass_gradient(f: LogConcaveFnGrid, z, plan: ConjugatePlan | None = None) -> np.ndarray:
    """``int (y - z) f^z(y) dy``, i.e. ``(barycenter(f^z) - z) * mass(f^z)``."""
    return moment(polar(f, z, plan, warn=False), about=z)


class PolarMass:
    """``F`` and ``grad F`` for one function and one relative plan."""

    def __init__(self, f: LogConcaveFnGrid, plan: ConjugatePlan | None = None):
        plan = ConjugatePlan.default(f.spec) if plan is None else plan
        if not plan.relative:
            raise PlanMismatch("the polar-mass functional needs a relative plan")
        self.f = f
        self.plan = plan
        dim = f.spec.dim
        psi = legendre_nd(f.potential(), np.zeros(dim), plan).values
        offsets = [plan.target.relative_nodes(k, 0.0) for k in range(dim)]
        self._psi = psi.ravel()
        self._y = [y.ravel() for y in np.meshgrid(*offsets, indexing="ij")]
        self._vol = plan.target.cell_volume
        self.evaluations = 0

    def _weights(self, z):
        z = _as_point(z, self.f.spec.dim)
        e = -self._psi
        for zk, yk in zip(z, self._y):
            e = e + zk * yk
        top = float(e.max())
        return top, np.exp(e - top)

    def value(self, z) -> float:
        self.evaluations += 1
        top, w = self._weights(z)
        with np.errstate(over="ignore"):
            return self._vol * math.exp(min(top, 709.0)) * exact_sum(w) if top <= 709 else math.inf

    def gradient(self, z) -> np.ndarray:
        top, w = self._weights(z)
        scale = self._vol * math.exp(min(top, 709.0))
        return np.array([scale * exact_sum(w * yk) for yk in self._y])

    __call__ = value


@dataclass(frozen=True)
class SantaloResult:
    z_star: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    subspace: AffineSubspace = AffineSubspace()


def _start_point(f: LogConcaveFnGrid, G: AffineSubspace) -> np.ndarray:
    """Barycenter of ``f`` restricted to ``G`` (the slice through the nearest nodes)."""
    spec = f.spec
    index = [slice(None)] * spec.dim
    for a, c in G.fixed:
        if not spec.lo[a] <= c <= spec.hi[a]:
            raise SubspaceOutsideSupport(f"G fixes x[{a}] = {c}, outside the grid")
        index[a] = spec.nearest_index(a, c)
    piece = f.values[tuple(index)]
    if not (piece > 0).any():
        raise SubspaceOutsideSupport("f vanishes on the grid nodes of G")
    z = G.project(np.zeros(spec.dim))
    free = G.free_axes(spec.dim)
    total = exact_sum(piece)
    for j, k in enumerate(free):
        shape = [1] * len(free)
        shape[j] = -1
        z[k] = exact_sum(piece * spec.nodes(k).reshape(shape)) / total
    return z


def santalo_point(
    f: LogConcaveFnGrid,
    G: AffineSubspace | None = None,
    plan: ConjugatePlan | None = None,
    *,
    tol_grad: float | None = None,
    rel_tol: float = 1e-7,
    max_iters: int = 500,
    armijo: float = 1e-4,
    shrink: float = 0.5,
    z0=None,
    functional: PolarMass | None = None,
) -> SantaloResult:
    """Minimize ``F`` over ``G`` (default: the whole space).

    Projected gradient descent with Barzilai-Borwein trial steps and
    Armijo backtracking, clamped to the grid box.  Stops once the
    ``G``-projected gradient is at most ``tol_grad`` (default
    ``rel_tol * F``).  A run that stops early still returns a result, with
    ``converged=False`` and a :class:`NotConvergedWarning`.
    """
    G = AffineSubspace.whole_space() if G is None else G
    spec = f.spec
    F = PolarMass(f, plan) if functional is None else functional
    z = _start_point(f, G) if z0 is None else G.project(_as_point(z0, spec.dim))
    lo, hi = np.array(spec.lo), np.array(spec.hi)

    def clamp(p):
        return G.project(np.clip(p, lo, hi))

    def target(fz):
        return rel_tol * fz if tol_grad is None else tol_grad

    z = clamp(z)
    fz = F.value(z)
    g = G.project_vector(F.gradient(z))
    step = 1.0 / max(fz, 1e-300)
    it = 0
    while it < max_iters and np.linalg.norm(g) > target(fz):
        it += 1
        t = step
        accepted = False
        for _ in range(60):
            cand = clamp(z - t * g)
            fc = F.value(cand)
            if fc <= fz + armijo * float(g @ (cand - z)) and fc < fz:
                accepted = True
                break
            t *= shrink
        if not accepted:
            break
        g_new = G.project_vector(F.gradient(cand))
        s, y = cand - z, g_new - g
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else t
        z, fz, g = cand, fc, g_new
    norm = float(np.linalg.norm(g))
    converged = norm <= target(fz)
    if not converged:
        warnings.warn(
            f"Santalo point search stopped after {it} iterations with projected "
            f"gradient {norm:.3e} > {target(fz):.3e}",
            NotConvergedWarning,
            stacklevel=2,
        )
    return SantaloResult(z, fz, norm, it, converged, G)


@dataclass(frozen=True)
class LambdaSplit:
    hyperplane: Hyperplane
    achieved_lambda: float
    target_lambda: float
    raw_offset: float


def _marginal(f: LogConcaveFnGrid, axis: int) -> np.ndarray:
    lines = np.moveaxis(f.values, axis, 0).reshape(f.spec.count[axis], -1)
    return np.array([exact_sum(row) for row in lines])


def lambda_split(f: LogConcaveFnGrid, axis: int, lam: float,
                 tol_split: float = 1e-9) -> LambdaSplit:
    """Hyperplane ``{x[axis] = c}`` with ``int_{x[axis] >= c} f = lam * int f``.

    The offset is found by bisection on the cell-model cumulative marginal,
    then snapped to the nearest interior node; ``achieved_lambda`` is
    recomputed after snapping.
    """
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    spec = f.spec
    m = _marginal(f, axis)
    total = math.fsum(m)
    if not total > 0:
        raise DegenerateMarginal(f"marginal along axis {axis} is identically zero")
    x, h = spec.nodes(axis), spec.h[axis]

    def upper(c):
        cover = np.clip((x + h / 2 - c) / h, 0.0, 1.0)
        return math.fsum(m * cover) / total

    a, b = spec.lo[axis] - h / 2, spec.hi[axis] + h / 2
    c = 0.5 * (a + b)
    for _ in range(200):
        c = 0.5 * (a + b)
        p = upper(c)
        if abs(p - lam) <= tol_split or b - a <= 1e-15 * max(1.0, abs(c)):
            break
        if p > lam:
            a = c
        else:
            b = c
    i = min(max(spec.nearest_index(axis, c), 1), spec.count[axis] - 2)
    plane = Hyperplane(axis, spec.node(axis, i))
    plus, minus = half_space_masses(f, plane)
    return LambdaSplit(plane, plus / (plus + minus), lam, c)

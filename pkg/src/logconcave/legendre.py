"""Discrete Legendre transforms and polars of log-concave functions.

The one-dimensional kernel computes ``max_i (x_i * y_j - v_i)`` for every
``y_j``.  The fast path builds the lower convex hull of the points
``(x_i, v_i)`` and sweeps the sorted ``y`` values with a pointer that only
moves forward, which costs ``O(N + M)`` per line.  The float maximum only
picks a few candidates; their values are then compared exactly and the
winner is rounded upward (see ``_exact``).  The result is the smallest
double at or above the exact discrete maximum, whichever path computed it.

An n-D transform about ``z`` is a sequence of 1-D transforms, one axis at a
time, last axis first.  Partial maxima are passed between axes without
rounding, so the factorized result equals the all-pairs maximum bit for
bit."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _exact
from .core import (
    ConvexFnGrid,
    GridSpec,
    LogConcaveFnGrid,
    _as_point,
)
from .exceptions import (
    AllInfinite,
    BoundaryArgmaxWarning,
    PlanMismatch,
    SupportWarning,
)
from .validation import check_log_concave

__all__ = [
    "ConjugatePlan",
    "conjugate_1d",
    "conjugate_1d_brute",
    "legendre_nd",
    "legendre_brute",
    "polar",
    "double_conjugate",
]

# f^z values below this fraction of the peak do not count for the boundary warning
_RELEVANT_LOG_RATIO = -np.log(1e-6)


def _lines(method):
    if method == "fast":
        return _exact.lines_fast
    if method == "brute":
        return _exact.lines_brute
    raise ValueError(f"method must be 'fast' or 'brute', got {method!r}")


def _run_lines(method, lines, a, b, final):
    """Apply a kernel to float lines or expansion lines (last axis = slots)."""
    if lines.ndim == 2:
        lines = lines[..., None]
    return _lines(method)(np.ascontiguousarray(lines), a, b, final)


def _check_increasing(x, name):
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if x.size > 1 and not (np.diff(x) > 0).all():
        raise ValueError(f"{name} must be strictly increasing")
    return x


def conjugate_1d(values, xs, ys, method="fast", return_argmax=False):
    """Discrete conjugate ``g(y) = max_i (xs[i] * y - values[i])``.

    ``values`` may contain ``inf`` (outside the domain) but needs at least
    one finite entry.  Both methods return identical floats.  With
    ``return_argmax`` the index of the smallest maximizer is returned too.
    """
    v = np.ascontiguousarray(values, dtype=float)
    xs = _check_increasing(xs, "xs")
    ys = _check_increasing(ys, "ys")
    if v.shape != xs.shape:
        raise ValueError(f"values shape {v.shape} != xs shape {xs.shape}")
    if np.isnan(v).any() or (v == -np.inf).any():
        raise ValueError("values must lie in R u {+inf}")
    if not np.isfinite(v).any():
        raise AllInfinite("conjugate of a function that is +inf everywhere")
    out, _, arg = _run_lines(method, v[None, :], xs, ys, True)
    return (out[0], arg[0]) if return_argmax else out[0]


def conjugate_1d_brute(values, xs, ys, return_argmax=False):
    """O(N*M) reference for :func:`conjugate_1d`."""
    return conjugate_1d(values, xs, ys, method="brute", return_argmax=return_argmax)


@dataclass(frozen=True)
class ConjugatePlan:
    """Source grid, dual grid and how the dual grid is anchored.

    With ``relative=True`` (the default) ``target`` holds the offsets
    ``y - z``; a transform about ``z`` lands on ``target.shifted(z)``.
    This keeps the dual sample set fixed relative to ``z``, so the polar
    mass is a smooth convex function of ``z``.  With ``relative=False``
    ``target`` holds absolute coordinates.
    """

    source: GridSpec
    target: GridSpec
    relative: bool = True
    boundary_tol: float = 1e-3

    @classmethod
    def default(cls, source: GridSpec, scale: float = 1.0, count=None):
        """Centered dual grid: per-axis half-width ``scale * (hi - lo) / 2``."""
        half = [scale * (b - a) / 2 for a, b in zip(source.lo, source.hi)]
        count = source.count if count is None else count
        return cls(source, GridSpec.centered(half, count))

    def output_spec(self, z) -> GridSpec:
        z = _as_point(z, self.source.dim)
        return self.target.shifted(z) if self.relative else self.target

    def dual_offsets(self, axis: int, z_k: float) -> np.ndarray:
        if self.relative:
            return self.target.relative_nodes(axis, 0.0)
        return self.target.relative_nodes(axis, z_k)

    def back(self, z, onto: GridSpec | None = None) -> "ConjugatePlan":
        """Plan for the inverse transform, landing on ``onto`` (default: the source)."""
        onto = self.source if onto is None else onto
        return ConjugatePlan(self.output_spec(z), onto, relative=False,
                             boundary_tol=self.boundary_tol)

    def centered_back(self, z, grid: GridSpec) -> "ConjugatePlan":
        """Inverse plan landing on ``grid`` re-centred at ``z``."""
        return ConjugatePlan(self.output_spec(z), grid, relative=True,
                             boundary_tol=self.boundary_tol)


def _resolve(phi_spec, z, plan):
    z = np.zeros(phi_spec.dim) if z is None else _as_point(z, phi_spec.dim)
    plan = ConjugatePlan.default(phi_spec) if plan is None else plan
    if plan.source != phi_spec:
        raise PlanMismatch(f"plan source {plan.source} does not match grid {phi_spec}")
    if plan.target.dim != phi_spec.dim:
        raise PlanMismatch("plan target has the wrong dimension")
    return z, plan


def _transform(values, spec, z, plan, method):
    """Factorized transform; returns (psi, touches_boundary) on the output grid.

    Between axes the partial maxima travel as exact expansions, so only
    the last axis rounds.
    """
    cur = np.asarray(values, dtype=float)[..., None]
    hits = None
    for step, k in enumerate(reversed(range(spec.dim))):
        a = spec.relative_nodes(k, z[k])
        b = plan.dual_offsets(k, z[k])
        moved = np.moveaxis(cur, k, -2)
        lead = moved.shape[:-2]
        lines = moved.reshape((-1,) + moved.shape[-2:])
        psi, exp, arg = _run_lines(method, lines, a, b, step == spec.dim - 1)
        psi = psi.reshape(lead + (b.size,))
        arg = arg.reshape(lead + (b.size,))
        on_edge = (arg == 0) | (arg == a.size - 1)
        if hits is not None:
            prev = np.moveaxis(hits, k, -1)
            on_edge |= np.take_along_axis(prev, np.maximum(arg, 0), axis=-1)
        hits = np.moveaxis(on_edge, -1, k)
        cur = np.moveaxis(-exp.reshape(lead + exp.shape[-2:]), -2, k)
    return np.moveaxis(psi, -1, k), hits


def legendre_nd(phi: ConvexFnGrid, z=None, plan: ConjugatePlan | None = None,
                method: str = "fast", warn: bool = True) -> ConvexFnGrid:
    """``L^z phi(y) = max_x <x - z, y - z> - phi(x)`` over the grid samples.

    The result lives on ``plan.output_spec(z)``.  A
    :class:`BoundaryArgmaxWarning` is issued when more than
    ``plan.boundary_tol`` of the non-negligible output nodes take their
    maximum on the edge of the source grid.
    """
    z, plan = _resolve(phi.spec, z, plan)
    psi, hits = _transform(phi.values, phi.spec, z, plan, method)
    if warn:
        _boundary_warning(psi, hits, plan)
    return ConvexFnGrid(plan.output_spec(z), psi)


def boundary_fraction(psi, hits) -> float:
    relevant = psi <= psi.min() + _RELEVANT_LOG_RATIO
    return float((hits & relevant).sum()) / float(relevant.sum())


def _boundary_warning(psi, hits, plan):
    frac = boundary_fraction(psi, hits)
    if frac > plan.boundary_tol:
        warnings.warn(
            f"conjugate maximum sits on the source boundary for {frac:.2%} of "
            "relevant target nodes; widen the source grid",
            BoundaryArgmaxWarning,
            stacklevel=3,
        )


def legendre_brute(phi: ConvexFnGrid, z=None, plan: ConjugatePlan | None = None) -> ConvexFnGrid:
    """All-pairs reference for :func:`legendre_nd` (no factorization)."""
    z, plan = _resolve(phi.spec, z, plan)
    spec, dim = phi.spec, phi.spec.dim
    a = [spec.relative_nodes(k, z[k]) for k in range(dim)]
    b = [plan.dual_offsets(k, z[k]) for k in range(dim)]
    src = np.array([x.ravel() for x in np.meshgrid(*a, indexing="ij")])
    tgt = np.array([y.ravel() for y in np.meshgrid(*b, indexing="ij")])
    out = _exact.all_pairs(np.ascontiguousarray(phi.values.ravel()), src, tgt)
    shape = tuple(x.size for x in b)
    return ConvexFnGrid(plan.output_spec(z), out.reshape(shape))


def _in_support_interior(f: LogConcaveFnGrid, z) -> bool:
    idx = []
    for k in range(f.spec.dim):
        i = round((z[k] - f.spec.lo[k]) / f.spec.h[k])
        if not 0 < i < f.spec.count[k] - 1:
            return False
        idx.append(slice(i - 1, i + 2))
    return bool((f.values[tuple(idx)] > 0).all())


def polar(f: LogConcaveFnGrid, z=None, plan: ConjugatePlan | None = None,
          method: str = "fast", warn: bool = True) -> LogConcaveFnGrid:
    """Polar ``f^z(y) = exp(-L^z phi(y))`` with ``phi = -log f``."""
    z, plan = _resolve(f.spec, z, plan)
    if warn and not _in_support_interior(f, z):
        warnings.warn(f"polar center {z} is not inside the support", SupportWarning,
                      stacklevel=2)
    psi = legendre_nd(f.potential(), z, plan, method=method, warn=warn)
    with np.errstate(over="ignore"):
        g = LogConcaveFnGrid(psi.spec, np.exp(-psi.values))
    return check_log_concave(g, decay_ratio=None)


def double_conjugate(phi: ConvexFnGrid, z=None, plan: ConjugatePlan | None = None,
                     method: str = "fast") -> ConvexFnGrid:
    """``L^z L^z phi`` back on ``phi``'s grid: the discrete closed convex envelope."""
    z, plan = _resolve(phi.spec, z, plan)
    once = legendre_nd(phi, z, plan, method=method, warn=False)
    return legendre_nd(once, z, plan.back(z), method=method, warn=False)

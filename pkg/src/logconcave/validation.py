"""Input validation helpers for grid functions.

These mirror the ``check_array`` family in scikit-learn: each helper either
returns its (possibly converted) input or raises.
"""

from __future__ import annotations

import numpy as np

from .core import (
    DECAY_RATIO,
    EPS_CONV,
    EPS_LC,
    ConvexFnGrid,
    GridSpec,
    Hyperplane,
    LogConcaveFnGrid,
)
from .exceptions import GridMismatch, InvariantViolation


_TINY = np.finfo(float).tiny


def _lines(values: np.ndarray, axis: int) -> np.ndarray:
    v = np.moveaxis(values, axis, -1)
    return v.reshape(-1, v.shape[-1])


def log_concavity_defect(f: LogConcaveFnGrid, axes=None) -> float:
    """Worst relative violation of ``v[i]**2 >= v[i-1] * v[i+1]``.

    Only interior nodes whose neighbours are normal (not subnormal) floats
    count; below ``tiny`` a value keeps too few bits for a log test.  Returns 0 when
    the function is log-concave along every axis-aligned line.
    """
    worst = 0.0
    axes = range(f.spec.dim) if axes is None else axes
    for axis in axes:
        lines = _lines(f.values, axis)
        left, mid, right = lines[:, :-2], lines[:, 1:-1], lines[:, 2:]
        mask = (left >= _TINY) & (right >= _TINY)
        if not mask.any():
            continue
        # compare in log space to avoid underflow of the products
        with np.errstate(divide="ignore"):
            gap = np.log(left[mask]) + np.log(right[mask]) - 2 * np.log(mid[mask])
        worst = max(worst, float(np.max(gap, initial=-np.inf)))
    return max(worst, 0.0)


def boundary_ratio(f: LogConcaveFnGrid) -> float:
    """Largest boundary value over the largest value overall."""
    v = f.values
    top = v.max()
    edge = 0.0
    for axis in range(v.ndim):
        edge = max(edge, float(np.take(v, 0, axis=axis).max()))
        edge = max(edge, float(np.take(v, -1, axis=axis).max()))
    return edge / top


def check_log_concave(
    f: LogConcaveFnGrid,
    eps_lc: float = EPS_LC,
    decay_ratio: float | None = DECAY_RATIO,
    axes=None,
) -> LogConcaveFnGrid:
    """Raise :class:`InvariantViolation` unless ``f`` is log-concave on lines
    and decays towards the grid boundary.

    ``eps_lc`` is relative, so the allowed log-gap is ``-log(1 - eps_lc)``.
    Pass ``decay_ratio=None`` to skip the boundary test.
    """
    if not isinstance(f, LogConcaveFnGrid):
        raise TypeError(f"expected LogConcaveFnGrid, got {type(f).__name__}")
    defect = log_concavity_defect(f, axes)
    if defect > -np.log1p(-eps_lc):
        raise InvariantViolation(
            f"not log-concave along grid lines (log-gap {defect:.3e})"
        )
    if decay_ratio is not None:
        r = boundary_ratio(f)
        if r > decay_ratio:
            raise InvariantViolation(
                f"boundary value ratio {r:.3e} exceeds decay ratio {decay_ratio:.1e}"
            )
    return f


def convexity_defect(phi: ConvexFnGrid) -> float:
    """Worst excess of ``phi[i]`` over its neighbours' midpoint, finite triples only."""
    worst = 0.0
    for axis in range(phi.spec.dim):
        lines = _lines(phi.values, axis)
        left, mid, right = lines[:, :-2], lines[:, 1:-1], lines[:, 2:]
        mask = np.isfinite(left) & np.isfinite(right) & np.isfinite(mid)
        if mask.any():
            excess = mid[mask] - 0.5 * (left[mask] + right[mask])
            worst = max(worst, float(excess.max()))
    return max(worst, 0.0)


def finite_runs_contiguous(phi: ConvexFnGrid) -> bool:
    """True when the finite nodes on every axis-aligned line form one index interval."""
    for axis in range(phi.spec.dim):
        finite = np.isfinite(_lines(phi.values, axis))
        # count False->True transitions; more than one start means a gap
        starts = finite[:, 1:] & ~finite[:, :-1]
        n_starts = starts.sum(axis=1) + finite[:, 0]
        if (n_starts > 1).any():
            return False
    return True


def check_convex(phi: ConvexFnGrid, eps_conv: float = EPS_CONV) -> ConvexFnGrid:
    """Raise unless ``phi`` is discretely convex along lines with contiguous domain.

    The tolerance is ``eps_conv`` times the range of the finite values.
    """
    if not isinstance(phi, ConvexFnGrid):
        raise TypeError(f"expected ConvexFnGrid, got {type(phi).__name__}")
    if not finite_runs_contiguous(phi):
        raise InvariantViolation("effective domain is not an interval on some line")
    finite = phi.values[np.isfinite(phi.values)]
    scale = float(finite.max() - finite.min())
    defect = convexity_defect(phi)
    if defect > eps_conv * scale:
        raise InvariantViolation(f"not convex along grid lines (excess {defect:.3e})")
    return phi


def check_hyperplane(plane: Hyperplane, spec: GridSpec) -> int:
    """Return the node index of ``plane`` on ``spec``; the offset must be strictly inside."""
    c = plane.index_on(spec)
    if not 0 < c < spec.count[plane.axis] - 1:
        raise InvariantViolation(f"hyperplane offset {plane.offset} is on the grid edge")
    return c


def check_same_spacing(*fs) -> None:
    first = fs[0].spec
    for g in fs[1:]:
        if not first.same_spacing(g.spec):
            raise GridMismatch(f"grid spacings differ: {first.h} vs {g.spec.h}")


def check_point(z, spec: GridSpec) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (spec.dim,):
        raise ValueError(f"point must have {spec.dim} coordinates, got {z.shape}")
    if not np.isfinite(z).all():
        raise ValueError("point has non-finite coordinates")
    return z

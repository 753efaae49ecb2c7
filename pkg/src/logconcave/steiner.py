"""Steiner symmetrization, Asplund products, homotheties and the Prékopa check.

Rearrangement model
-------------------
A grid line is read as a step function: node ``i`` carries its value on a
cell of width ``h``.  The symmetric decreasing rearrangement of that step
function about a node is again a step function whose breakpoints fall on
half-cells.  Averaging it over each cell gives the node values

    center       <- v[0]
    nodes +-j    <- (v[2j-1] + v[2j]) / 2          (v sorted descending)

so the output is exactly symmetric and leaves a line that is already
symmetric decreasing about the center unchanged bit for bit.  The rounding
residual of each pair average is carried into the next pair, so the line
sum is kept to far below one ulp.  A pure permutation of
the values cannot be symmetric once the values are distinct, which is why
the construction averages.

Values that do not fit in the symmetric window are laid out on the longer
side in decreasing order; they must be negligible or
:class:`CenterTooCloseToEdge` is raised.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numba
import numpy as np

from .core import (
    ConvexFnGrid,
    GridSpec,
    Hyperplane,
    LogConcaveFnGrid,
    integrate,
)
from .exceptions import CenterTooCloseToEdge, GridMismatch
from .validation import check_hyperplane, check_same_spacing

__all__ = [
    "SPILL_TOL",
    "EPS_INEQ",
    "rearrange_line",
    "rearrange_lines",
    "steiner_symmetrize",
    "steiner_symmetrize_convex",
    "layer_cake_line",
    "asplund_product",
    "asplund_product_log",
    "homothety",
    "homothety_grid",
    "PrekopaReport",
    "prekopa_check",
]

SPILL_TOL = 1e-6
EPS_INEQ = 1e-6
_LOG2 = float(np.log(2.0))


def _place(sorted_lines, pairs, c, spill_tol_test):
    """Lay out center, mirrored pairs and overflow on lines of length n."""
    n_lines, n = sorted_lines.shape
    w = min(c, n - 1 - c)
    out = np.empty_like(sorted_lines)
    out[:, c] = sorted_lines[:, 0]
    out[:, c + 1 : c + w + 1] = pairs
    out[:, c - w : c] = pairs[:, ::-1]
    rest = sorted_lines[:, 2 * w + 1 :]
    if rest.shape[1]:
        spill_tol_test(rest)
        if n - 1 - c > c:
            out[:, c + w + 1 :] = rest
        else:
            out[:, : c - w] = rest[:, ::-1]
    return out


@numba.njit(cache=True)
def _exact_pairs(s, w):  # pragma: no cover - compiled
    # Pair averages with the rounding residual of each pair carried into the
    # next one (error-free TwoSum), so the line total survives exactly.
    n_lines = s.shape[0]
    out = np.empty((n_lines, w))
    for line in range(n_lines):
        carry = 0.0
        prev = s[line, 0]
        for j in range(w):
            a = s[line, 2 * j + 1]
            b = s[line, 2 * j + 2]
            x = a + b
            bv = x - a
            e1 = (a - (x - bv)) + (b - bv)
            y = x + carry
            bv = y - x
            e2 = (x - (y - bv)) + (carry - bv)
            p = 0.5 * y
            if p > prev:
                p = prev
            if p < 0.0:
                p = 0.0
            carry = e1 + e2 + (y - 2.0 * p)
            out[line, j] = p
            prev = p
    return out


def rearrange_lines(lines, center_index: int, spill_tol: float = SPILL_TOL, ref=None):
    """Row-wise :func:`rearrange_line` on a 2-D array of nonnegative values."""
    lines = np.asarray(lines, dtype=float)
    n = lines.shape[1]
    c = int(center_index)
    if not 0 <= c < n:
        raise ValueError(f"center index {c} outside 0..{n - 1}")
    w = min(c, n - 1 - c)
    s = -np.sort(-lines, axis=1)
    pairs = _exact_pairs(np.ascontiguousarray(s), w)
    top = float(lines.max(initial=0.0)) if ref is None else float(ref)

    def spill(rest):
        worst = float(rest.max(initial=0.0))
        if worst > spill_tol * top:
            raise CenterTooCloseToEdge(
                f"rearranged support does not fit around index {c}: value {worst:.3e} "
                f"would spill (peak {top:.3e})"
            )

    return _place(s, pairs, c, spill)


def rearrange_line(profile, center_index: int, spill_tol: float = SPILL_TOL, ref=None):
    """Symmetric decreasing rearrangement of one line about ``center_index``.

    >>> rearrange_line([0.0, 1.0, 2.0, 4.0, 2.0, 1.0, 0.0], 3).tolist()
    [0.0, 1.0, 2.0, 4.0, 2.0, 1.0, 0.0]
    """
    v = np.asarray(profile, dtype=float)
    if v.ndim != 1:
        raise ValueError("profile must be one-dimensional")
    if (v < 0).any() or not np.isfinite(v).all():
        raise ValueError("profile values must be finite and nonnegative")
    return rearrange_lines(v[None, :], center_index, spill_tol, ref)[0]


def _apply_along(values, axis, fn):
    moved = np.moveaxis(values, axis, -1)
    lines = moved.reshape(-1, moved.shape[-1])
    out = fn(lines).reshape(moved.shape)
    return np.moveaxis(out, -1, axis)


def steiner_symmetrize(f: LogConcaveFnGrid, plane: Hyperplane,
                       spill_tol: float = SPILL_TOL) -> LogConcaveFnGrid:
    """Rearrange every line parallel to ``plane``'s normal about the plane.

    The plane offset must be an interior node of ``f``'s grid
    (:class:`OffsetNotOnGrid` otherwise).  Spill is measured against the
    global peak of ``f``.
    """
    c = check_hyperplane(plane, f.spec)
    peak = float(f.values.max())
    out = _apply_along(
        f.values, plane.axis, lambda L: rearrange_lines(L, c, spill_tol, ref=peak)
    )
    return LogConcaveFnGrid(f.spec, out)


def steiner_symmetrize_convex(phi: ConvexFnGrid, plane: Hyperplane,
                              spill_tol: float = SPILL_TOL) -> ConvexFnGrid:
    """``-log S_H e^{-phi}``, computed in log space.

    Pairs combine as ``-log((e^-a + e^-b) / 2)``, which is ``+inf`` only
    when both are ``+inf``.
    """
    c = check_hyperplane(plane, phi.spec)
    floor = float(phi.values.min())
    limit = floor - np.log(spill_tol)

    def run(lines):
        n = lines.shape[1]
        w = min(c, n - 1 - c)
        s = np.sort(lines, axis=1)
        a, b = s[:, 1 : 2 * w : 2], s[:, 2 : 2 * w + 1 : 2]
        with np.errstate(invalid="ignore"):
            pairs = _LOG2 - np.logaddexp(-a, -b)

        def spill(rest):
            if (rest < limit).any():
                raise CenterTooCloseToEdge(
                    f"rearranged sublevel sets do not fit around index {c}"
                )

        return _place(s, pairs, c, spill)

    return ConvexFnGrid(phi.spec, _apply_along(phi.values, plane.axis, run))


def layer_cake_line(profile, center_index: int, thresholds: int = 1000):
    """Independent oracle for one line: sweep superlevel sets.

    For each threshold ``t`` the set ``{v > t}`` has ``m`` cells; its
    symmetral is the centred interval of length ``m`` cells.  Integrating
    the indicators over ``t`` and averaging over each node's cell gives the
    rearranged node values up to the threshold step.
    """
    v = np.asarray(profile, dtype=float)
    n, c = v.size, int(center_index)
    top = float(v.max())
    ts = (np.arange(thresholds) + 0.5) * (top / thresholds)
    dt = top / thresholds
    counts = (v[None, :] > ts[:, None]).sum(axis=1)
    # cell of node j spans [j - 1/2, j + 1/2] (in cells, relative to c);
    # the symmetral spans [-m/2, m/2]; overlap length over the unit cell
    pos = np.arange(n) - c
    lo = np.maximum(pos[None, :] - 0.5, -counts[:, None] / 2)
    hi = np.minimum(pos[None, :] + 0.5, counts[:, None] / 2)
    overlap = np.clip(hi - lo, 0.0, 1.0)
    return dt * overlap.sum(axis=0)


# ---------------------------------------------------------------- Asplund


def _product_spec(fs: GridSpec, gs: GridSpec) -> GridSpec:
    count = tuple(a + b - 1 for a, b in zip(fs.count, gs.count))
    lo = tuple(a + b for a, b in zip(fs.lo, gs.lo))
    hi = tuple(a + b for a, b in zip(fs.hi, gs.hi))
    return GridSpec(lo, hi, count)


def _sup_convolve(a, b, combine, better, fill):
    # loop over the smaller operand, slide the larger one
    if a.size < b.size:
        a, b = b, a
    shape = tuple(p + q - 1 for p, q in zip(a.shape, b.shape))
    out = np.full(shape, fill)
    for idx in np.ndindex(b.shape):
        bv = b[idx]
        if bv == fill:
            continue
        window = tuple(slice(i, i + m) for i, m in zip(idx, a.shape))
        better(out[window], combine(a, bv), out=out[window])
    return out


def asplund_product(f: LogConcaveFnGrid, g: LogConcaveFnGrid) -> LogConcaveFnGrid:
    """``(f * g)(x) = max_{x1 + x2 = x} f(x1) g(x2)`` over node pairs.

    Both grids need the same spacing; the result lives on the grid whose
    bounds are the sums of the input bounds.
    """
    check_same_spacing(f, g)
    out = _sup_convolve(f.values, g.values, np.multiply, np.maximum, 0.0)
    return LogConcaveFnGrid(_product_spec(f.spec, g.spec), out)


def asplund_product_log(f: LogConcaveFnGrid, g: LogConcaveFnGrid) -> LogConcaveFnGrid:
    """Second route: ``exp(-(phi box psi))`` with an infimal convolution of potentials."""
    check_same_spacing(f, g)
    phi, psi = f.potential().values, g.potential().values
    inf_conv = _sup_convolve(phi, psi, np.add, np.minimum, np.inf)
    return LogConcaveFnGrid(_product_spec(f.spec, g.spec), np.exp(-inf_conv))


def homothety_grid(lam: float, spec: GridSpec) -> GridSpec:
    """Grid with ``spec``'s spacing that covers ``lam * box(spec)``."""
    lo, hi, count = [], [], []
    for a, b, n, h in zip(spec.lo, spec.hi, spec.count, spec.h):
        m = int(np.ceil(lam * (n - 1) - 1e-9)) + 1
        lo.append(lam * a)
        hi.append(lam * a + (m - 1) * h)
        count.append(m)
    return GridSpec(tuple(lo), tuple(hi), tuple(count))


def _interp_potential(phi: np.ndarray, spec: GridSpec, points):
    """Multilinear interpolation of ``phi`` at ``points``; ``inf`` outside.

    A corner carrying ``inf`` poisons the result only when its weight is
    positive, so exact node hits never produce ``inf * 0``.
    """
    dim = spec.dim
    base, frac = [], []
    outside = np.zeros(points[0].shape, dtype=bool)
    for k in range(dim):
        t = (points[k] - spec.lo[k]) / spec.h[k]
        r = np.round(t)
        t = np.where(np.abs(t - r) <= 1e-9, r, t)
        n = spec.count[k]
        outside |= (t < 0) | (t > n - 1)
        tc = np.clip(t, 0, n - 1)
        i = np.minimum(np.floor(tc).astype(np.int64), n - 2) if n > 1 else np.zeros_like(tc, dtype=np.int64)
        base.append(i)
        frac.append(tc - i)
    total = np.zeros(points[0].shape)
    for corner in itertools.product((0, 1), repeat=dim):
        w = np.ones(points[0].shape)
        idx = []
        for k, bit in enumerate(corner):
            w = w * (frac[k] if bit else 1.0 - frac[k])
            idx.append(np.minimum(base[k] + bit, spec.count[k] - 1))
        val = phi[tuple(idx)]
        live = w > 0
        contrib = np.where(live, w * np.where(live, val, 0.0), 0.0)
        total = total + contrib
    total[outside] = np.inf
    return total


def homothety(lam: float, f: LogConcaveFnGrid, spec: GridSpec | None = None) -> LogConcaveFnGrid:
    """``(lam . f)(x) = f(x / lam) ** lam`` with linear interpolation of ``-log f``.

    ``spec`` defaults to :func:`homothety_grid`; a supplied grid must have
    ``f``'s spacing.
    """
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    spec = homothety_grid(lam, f.spec) if spec is None else spec
    if not spec.same_spacing(f.spec):
        raise GridMismatch("homothety output grid must share the input spacing")
    phi = f.potential().values
    pts = [x / lam for x in spec.mesh()]
    with np.errstate(invalid="ignore", over="ignore"):
        interp = _interp_potential(phi, f.spec, pts)
        values = np.exp(-lam * interp)
    return LogConcaveFnGrid(spec, values)


@dataclass(frozen=True)
class PrekopaReport:
    lam: float
    lhs: float
    rhs: float
    ok: bool

    @property
    def slack(self) -> float:
        return self.lhs / self.rhs - 1.0


def prekopa_check(f: LogConcaveFnGrid, g: LogConcaveFnGrid, lam: float,
                  eps_ineq: float = EPS_INEQ) -> PrekopaReport:
    """Both sides of ``int (lam.f) * ((1-lam).g) >= (int f)**lam (int g)**(1-lam)``."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    check_same_spacing(f, g)
    h = asplund_product(homothety(lam, f), homothety(1 - lam, g))
    lhs = integrate(h)
    rhs = integrate(f) ** lam * integrate(g) ** (1 - lam)
    return PrekopaReport(lam, lhs, rhs, bool(lhs >= rhs * (1 - eps_ineq)))

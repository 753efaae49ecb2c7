"""Grid representation of convex and log-concave functions.

Functions live on uniform tensor grids of dimension 1 to 3.  Node ``i`` on
axis ``k`` sits at ``lo[k] + i * h[k]``.  Convex potentials take values in
``R u {+inf}`` and are stored as float arrays where IEEE ``inf`` is the
+infinity tag; log-concave functions are stored by their nonnegative values.

Integrals use the cell-sum rule ``prod(h) * sum(values)``: every node owns a
cell of width ``h`` centred on it.  Sums are exactly rounded (``math.fsum``)
so the result does not depend on summation order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import (
    GridCapExceeded,
    InvariantViolation,
    MassOutOfRange,
    OffsetNotOnGrid,
)

__all__ = [
    "DEFAULT_GRID_CAP",
    "EPS_LC",
    "EPS_CONV",
    "DECAY_RATIO",
    "MASS_FLOOR",
    "MASS_CEIL",
    "GridSpec",
    "ExtendedValue",
    "ConvexFnGrid",
    "LogConcaveFnGrid",
    "Hyperplane",
    "AffineSubspace",
    "exact_sum",
    "integrate",
    "moment",
    "barycenter",
    "symmetry_defect",
    "half_space_masses",
    "mirror_pairs",
]

DEFAULT_GRID_CAP = 2**24
EPS_LC = 1e-9
EPS_CONV = 1e-9
DECAY_RATIO = 1e-6
MASS_FLOOR = 1e-300
MASS_CEIL = 1e300

# offsets closer than this fraction of h to a node count as on the node
_SNAP_TOL = 1e-9


def grid_cap() -> int:
    env = os.environ.get("LOGCONCAVE_GRID_CAP")
    return int(env) if env else DEFAULT_GRID_CAP


def exact_sum(values) -> float:
    """Correctly rounded sum of an array, independent of element order."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned uniform grid: per axis ``lo``, ``hi`` and node ``count``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    count: tuple[int, ...]
    h: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        count = tuple(int(v) for v in np.atleast_1d(self.count))
        if not (len(lo) == len(hi) == len(count)):
            raise ValueError("lo, hi and count must have the same length")
        if not 1 <= len(lo) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(lo)}")
        for k, (a, b, n) in enumerate(zip(lo, hi, count)):
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"axis {k}: need finite lo < hi, got [{a}, {b}]")
            if n < 3:
                raise ValueError(f"axis {k}: need at least 3 nodes, got {n}")
        if math.prod(count) > grid_cap():
            raise GridCapExceeded(
                f"grid has {math.prod(count)} nodes, cap is {grid_cap()}"
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "count", count)
        object.__setattr__(
            self, "h", tuple((b - a) / (n - 1) for a, b, n in zip(lo, hi, count))
        )

    @classmethod
    def uniform(cls, lo, hi, count, dim=1):
        """Same bounds on every axis."""
        return cls((lo,) * dim, (hi,) * dim, (count,) * dim)

    @classmethod
    def centered(cls, half_width, count):
        """Grid symmetric about 0 with an odd node count, so 0 is the middle node.

        ``half_width`` and ``count`` may be scalars or per-axis sequences.
        """
        half_width = np.atleast_1d(np.asarray(half_width, dtype=float))
        count = np.atleast_1d(np.asarray(count, dtype=int))
        dim = max(half_width.size, count.size)
        half_width = np.broadcast_to(half_width, (dim,))
        count = np.broadcast_to(count, (dim,))
        lo, hi, cnt = [], [], []
        for w, n in zip(half_width, count):
            n = int(n) | 1
            m = n // 2
            top = float(w)
            # need lo + m*h == 0 exactly, with h recomputed as (hi - lo) / (n - 1)
            for _ in range(8):
                step = (2 * top) / (n - 1)
                if -top + m * step == 0.0:
                    break
                top = m * step
            lo.append(-top)
            hi.append(top)
            cnt.append(n)
        return cls(tuple(lo), tuple(hi), tuple(cnt))

    @property
    def dim(self) -> int:
        return len(self.count)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.count

    @property
    def size(self) -> int:
        return math.prod(self.count)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.h)

    @property
    def extent(self) -> float:
        """Largest axis length, used to scale point tolerances."""
        return max(b - a for a, b in zip(self.lo, self.hi))

    def nodes(self, axis: int) -> np.ndarray:
        return self.lo[axis] + np.arange(self.count[axis]) * self.h[axis]

    def node(self, axis: int, index: int) -> float:
        return self.lo[axis] + index * self.h[axis]

    def nearest_index(self, axis: int, x: float) -> int:
        i = round((x - self.lo[axis]) / self.h[axis])
        return int(min(max(i, 0), self.count[axis] - 1))

    def index_of(self, axis: int, x: float) -> int:
        """Index of the node at ``x``; raises if ``x`` is not a node."""
        i = round((x - self.lo[axis]) / self.h[axis])
        if not 0 <= i < self.count[axis]:
            raise OffsetNotOnGrid(f"offset {x} lies outside axis {axis}")
        if abs(self.node(axis, i) - x) > _SNAP_TOL * self.h[axis]:
            raise OffsetNotOnGrid(
                f"offset {x} is not a node of axis {axis} (nearest {self.node(axis, i)})"
            )
        return int(i)

    def relative_nodes(self, axis: int, z: float) -> np.ndarray:
        """Node coordinates minus ``z``, computed from index differences.

        When ``z`` is itself a node the result is exactly antisymmetric about
        that node, which keeps mirror symmetry bit-exact through transforms.
        """
        i0 = round((z - self.lo[axis]) / self.h[axis])
        return (np.arange(self.count[axis]) - i0) * self.h[axis] + (
            self.node(axis, i0) - z
        )

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*(self.nodes(k) for k in range(self.dim)), indexing="ij")

    def shifted(self, z) -> "GridSpec":
        z = _as_point(z, self.dim)
        return GridSpec(
            tuple(a + s for a, s in zip(self.lo, z)),
            tuple(b + s for b, s in zip(self.hi, z)),
            self.count,
        )

    def scaled(self, factor: float) -> "GridSpec":
        return GridSpec(
            tuple(a * factor for a in self.lo),
            tuple(b * factor for b in self.hi),
            self.count,
        )

    def contains(self, point) -> bool:
        point = _as_point(point, self.dim)
        return all(a <= p <= b for a, p, b in zip(self.lo, point, self.hi))

    def same_spacing(self, other: "GridSpec", rtol: float = 1e-12) -> bool:
        return self.dim == other.dim and all(
            abs(a - b) <= rtol * max(abs(a), abs(b)) for a, b in zip(self.h, other.h)
        )


def _as_point(z, dim: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {z.shape}")
    return z


@dataclass(frozen=True)
class ExtendedValue:
    """A value in ``R u {+inf}``."""

    finite: bool
    value: float = 0.0

    def __post_init__(self):
        if self.finite and not math.isfinite(self.value):
            raise ValueError("finite ExtendedValue needs a finite value")

    @classmethod
    def of(cls, x: float) -> "ExtendedValue":
        if math.isnan(x) or x == -math.inf:
            raise ValueError(f"{x} is not in R u {{+inf}}")
        return cls(True, float(x)) if math.isfinite(x) else cls.plus_infinity()

    @classmethod
    def plus_infinity(cls) -> "ExtendedValue":
        return cls(False, 0.0)

    def __float__(self):
        return self.value if self.finite else math.inf

    def __add__(self, other):
        other = other if isinstance(other, ExtendedValue) else ExtendedValue.of(other)
        if self.finite and other.finite:
            return ExtendedValue.of(self.value + other.value)
        return ExtendedValue.plus_infinity()

    __radd__ = __add__

    def __str__(self):
        return repr(self.value) if self.finite else "inf"


def _freeze(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True, order="C")
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ConvexFnGrid:
    """Extended-real potential ``phi`` sampled on a grid.

    The container only enforces properness (no NaN, no ``-inf``, at least
    one finite node).  Discrete convexity is checked by
    :func:`logconcave.validation.check_convex`, because the transforms here
    are defined for non-convex input as well.
    """

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.spec.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {self.spec.shape}")
        if np.isnan(values).any():
            raise InvariantViolation("convex function has NaN values")
        if (values == -np.inf).any():
            raise InvariantViolation("convex function takes the value -inf")
        if not np.isfinite(values).any():
            from .exceptions import AllInfinite

            raise AllInfinite("convex function is +inf everywhere")
        object.__setattr__(self, "values", _freeze(values))

    @property
    def domain(self) -> np.ndarray:
        """Boolean mask of the effective domain ``{phi < inf}``."""
        return np.isfinite(self.values)

    def at(self, index) -> ExtendedValue:
        return ExtendedValue.of(float(self.values[index]))

    def in_epigraph(self, index, r: float) -> bool:
        return r >= self.values[index]

    def to_logconcave(self) -> "LogConcaveFnGrid":
        with np.errstate(over="ignore"):
            return LogConcaveFnGrid(self.spec, np.exp(-self.values))


@dataclass(frozen=True, eq=False)
class LogConcaveFnGrid:
    """Nonnegative function ``f = exp(-phi)`` sampled on a grid.

    Construction checks finiteness, nonnegativity and the mass range.
    Log-concavity along lines and boundary decay are checked by
    :func:`logconcave.validation.check_log_concave`.
    """

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.spec.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {self.spec.shape}")
        if not np.isfinite(values).all():
            raise InvariantViolation("log-concave function has non-finite values")
        if (values < 0).any():
            raise InvariantViolation("log-concave function has negative values")
        object.__setattr__(self, "values", _freeze(values))
        m = self.mass
        if not MASS_FLOOR < m < MASS_CEIL:
            raise MassOutOfRange(f"mass {m!r} outside ({MASS_FLOOR}, {MASS_CEIL})")

    @property
    def mass(self) -> float:
        return integrate(self)

    @property
    def support(self) -> np.ndarray:
        return self.values > 0

    def potential(self) -> ConvexFnGrid:
        """``-log f`` with ``+inf`` exactly where ``f == 0``."""
        with np.errstate(divide="ignore"):
            return ConvexFnGrid(self.spec, -np.log(self.values))

    def scaled(self, alpha: float) -> "LogConcaveFnGrid":
        return LogConcaveFnGrid(self.spec, alpha * self.values)


@dataclass(frozen=True)
class Hyperplane:
    """``H = {x[axis] == offset}`` with normal ``e_axis``.

    ``H+`` is ``{x[axis] >= offset}`` and ``H-`` is ``{x[axis] <= offset}``.
    """

    axis: int
    offset: float

    def normal(self, dim: int) -> np.ndarray:
        u = np.zeros(dim)
        u[self.axis] = 1.0
        return u

    def index_on(self, spec: GridSpec) -> int:
        if not 0 <= self.axis < spec.dim:
            raise ValueError(f"axis {self.axis} out of range for dimension {spec.dim}")
        return spec.index_of(self.axis, self.offset)

    def snapped(self, spec: GridSpec) -> "Hyperplane":
        """Move the offset to the nearest node of ``spec``."""
        i = spec.nearest_index(self.axis, self.offset)
        return Hyperplane(self.axis, spec.node(self.axis, i))

    def contains(self, point) -> bool:
        return float(np.asarray(point)[self.axis]) == self.offset


@dataclass(frozen=True)
class AffineSubspace:
    """Intersection of the axis-aligned hyperplanes ``x[axis] == offset``."""

    fixed: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        fixed = tuple((int(a), float(c)) for a, c in self.fixed)
        axes = [a for a, _ in fixed]
        if len(set(axes)) != len(axes):
            raise ValueError("fixed axes must be distinct")
        object.__setattr__(self, "fixed", fixed)

    @classmethod
    def whole_space(cls) -> "AffineSubspace":
        return cls(())

    @classmethod
    def from_hyperplanes(cls, planes: Sequence[Hyperplane]) -> "AffineSubspace":
        return cls(tuple((p.axis, p.offset) for p in planes))

    @property
    def fixed_axes(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.fixed)

    def free_axes(self, dim: int) -> tuple[int, ...]:
        fixed = set(self.fixed_axes)
        return tuple(k for k in range(dim) if k not in fixed)

    def project(self, z) -> np.ndarray:
        z = np.array(z, dtype=float)
        for a, c in self.fixed:
            z[a] = c
        return z

    def project_vector(self, v) -> np.ndarray:
        """Orthogonal projection of a direction onto the subspace's span."""
        v = np.array(v, dtype=float)
        for a, _ in self.fixed:
            v[a] = 0.0
        return v

    def contains(self, z) -> bool:
        z = np.asarray(z)
        return all(z[a] == c for a, c in self.fixed)

    def within(self, plane: Hyperplane) -> bool:
        return (plane.axis, plane.offset) in self.fixed

    def snapped(self, spec: GridSpec) -> "AffineSubspace":
        return AffineSubspace(
            tuple(
                (a, spec.node(a, spec.nearest_index(a, c))) for a, c in self.fixed
            )
        )


def integrate(f) -> float:
    """Cell-sum quadrature ``prod(h) * sum(values)``, exactly rounded."""
    return f.spec.cell_volume * exact_sum(f.values)


def moment(f, about=None) -> np.ndarray:
    """First moments ``integral (x - about) f(x) dx`` per axis."""
    spec = f.spec
    about = np.zeros(spec.dim) if about is None else _as_point(about, spec.dim)
    out = np.empty(spec.dim)
    for k in range(spec.dim):
        shape = [1] * spec.dim
        shape[k] = -1
        rel = spec.relative_nodes(k, about[k]).reshape(shape)
        out[k] = spec.cell_volume * exact_sum(f.values * rel)
    return out


def barycenter(f) -> np.ndarray:
    m = integrate(f)
    if not m > MASS_FLOOR:
        raise MassOutOfRange(f"mass {m!r} too small for a barycenter")
    return moment(f) / m


def _line_view(values: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(values, axis, -1)


def mirror_pairs(count: int, center: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays ``(center + j, center - j)`` for every in-range ``j >= 1``."""
    m = min(center, count - 1 - center)
    j = np.arange(1, m + 1)
    return center + j, center - j


def symmetry_defect(f, plane: Hyperplane) -> float:
    """Largest ``|f(x' + t u) - f(x' - t u)|`` over mirrored node pairs."""
    c = plane.index_on(f.spec)
    lines = _line_view(f.values, plane.axis)
    right, left = mirror_pairs(f.spec.count[plane.axis], c)
    if right.size == 0:
        return 0.0
    a, b = lines[..., right], lines[..., left]
    both_inf = np.isinf(a) & np.isinf(b) & (a == b)
    with np.errstate(invalid="ignore"):
        diff = np.where(both_inf, 0.0, np.abs(a - b))
    return float(diff.max())


def half_space_masses(f, plane: Hyperplane) -> tuple[float, float]:
    """``(integral over H+, integral over H-)``.

    The cell of the node on ``H`` is split evenly between the two sides, so
    the two masses add up to ``integrate(f)``.
    """
    c = plane.index_on(f.spec)
    lines = _line_view(f.values, plane.axis)
    on = exact_sum(lines[..., c])
    plus = exact_sum(lines[..., c + 1 :])
    minus = exact_sum(lines[..., :c])
    vol = f.spec.cell_volume
    return vol * (plus + 0.5 * on), vol * (minus + 0.5 * on)

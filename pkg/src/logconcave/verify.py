"""Numerical checks of the Steiner-symmetrization argument for the
Blaschke-Santaló bound on log-concave functions.

The pipeline follows the recursion

    z_1 = s_{H_1}(f),            f_1^{z_1} = S_{H_1}(f^{z_1})
    H_i medial for f_{i-1},      z_i = s_{H_1 n ... n H_i}(f_{i-1}),
                                 f_i^{z_i} = S_{H_i}(f_{i-1}^{z_i})

with ``H_i`` orthogonal to ``e_{i-1}``.  Each ``f_i`` is recovered from its
polar by a second polar onto the lattice of ``f_{i-1}``, re-centred at the
node nearest ``z_i``.  All polars about
``z`` use a dual grid centred at ``z``, so every Steiner center is a node.
"""

from __future__ import annotations

import math
import traceback
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    AffineSubspace,
    GridSpec,
    Hyperplane,
    LogConcaveFnGrid,
    _as_point,
    exact_sum,
    half_space_masses,
    integrate,
    symmetry_defect,
)
from .exceptions import (
    HypothesisFailed,
    LogConcaveError,
    MassOutOfRange,
    NotUnconditional,
    SliceOutOfRange,
)
from .legendre import ConjugatePlan, polar
from .santalo import lambda_split, santalo_point
from .steiner import EPS_INEQ, asplund_product, homothety, steiner_symmetrize
from .steiner import _interp_potential

__all__ = [
    "EPS_SYM",
    "EPS_MONO",
    "EPS_TOT",
    "Verdict",
    "StepRecord",
    "PipelineReport",
    "run_pipeline",
    "SeparationReport",
    "verify_separation_lemma",
    "SliceReport",
    "slice_inequality_check",
    "slice_mass_triple",
    "BallLemmaReport",
    "ball_lemma_check",
    "ball_lemma_counterexample",
    "UnconditionalReport",
    "unconditional_product_check",
    "InvarianceReport",
    "verify_santalo_invariance",
]

EPS_SYM = 1e-12
EPS_MONO = 1e-6
EPS_TOT = 0.02
EPS_SLICE = 1e-6


@dataclass(frozen=True)
class Verdict:
    ok: bool
    value: float
    threshold: float
    detail: str = ""


# ----------------------------------------------------------------- helpers


def _centered_like(spec: GridSpec, scale: float = 1.0) -> GridSpec:
    half = [scale * (b - a) / 2 for a, b in zip(spec.lo, spec.hi)]
    return GridSpec.centered(half, spec.count)


def _plane_at(z, axis: int) -> Hyperplane:
    return Hyperplane(axis, float(z[axis]))


def _recovery_grid(spec: GridSpec, z, scale: float = 1.0) -> GridSpec:
    """``spec``'s lattice, ``scale`` times as wide, centred at the node nearest ``z``.

    A double polar reproduces ``f`` at its own nodes but only its
    piecewise-linear interpolant in between (an ``O(h^2)`` mass deficit),
    so the recovered function stays on the old lattice.  Coordinates of
    ``z`` fixed by snapped hyperplanes are nodes, which keeps the grid
    exactly symmetric about them.
    """
    z = _as_point(z, spec.dim)
    lo, hi, count = [], [], []
    for k in range(spec.dim):
        h = spec.h[k]
        c = spec.node(k, round((z[k] - spec.lo[k]) / h))
        m = max(1, round(scale * (spec.count[k] - 1) / 2))
        lo.append(c - m * h)
        hi.append(c + m * h)
        count.append(2 * m + 1)
    return GridSpec(tuple(lo), tuple(hi), tuple(count))


def _recover(s: LogConcaveFnGrid, z, grid: GridSpec) -> LogConcaveFnGrid:
    """``(s)^z`` on ``grid``."""
    return polar(s, z, ConjugatePlan(s.spec, grid, relative=False), warn=False)


def _relative_max_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class StepRecord:
    i: int
    axis: int
    offset: float
    z: tuple
    split_lambda: float
    mass: float
    polar_mass: float
    product: float
    involution_residual: float


@dataclass
class PipelineReport:
    dim: int
    lambda_1: float
    mass_0: float
    polar_mass_0: float
    product_0: float
    bound: float
    steps: list = field(default_factory=list)
    final_symmetry_defects: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None and all(v.ok for v in self.verdicts.values())

    @property
    def ratio_to_bound(self) -> float:
        return self.product_0 / self.bound

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["ratio_to_bound"] = self.ratio_to_bound
        return d


def run_pipeline(
    f: LogConcaveFnGrid,
    H1: Hyperplane | None = None,
    lam: float = 0.5,
    plan: ConjugatePlan | None = None,
    *,
    recover_scale: float = 1.0,
    eps_sym: float = EPS_SYM,
    eps_ineq: float = EPS_INEQ,
    eps_mono: float = EPS_MONO,
    eps_tot: float = EPS_TOT,
) -> PipelineReport:
    """Run the ``n``-step symmetrization recursion and check every claim on the way.

    ``H1`` defaults to the ``lam``-split of ``f`` along axis 0.  ``plan``
    supplies the dual offsets (its ``target``, centred at 0) and must be
    relative; its source must be ``f``'s grid.  Every ``4 lam (1 - lam)``
    factor uses the achieved split of ``f`` by ``H1``.

    Verdicts: ``monotone`` (products non-decreasing within ``eps_mono``),
    ``first_step`` (the first product is at least ``4 lam (1-lam)`` times
    the initial one), ``unconditional`` (final symmetry defects),
    ``bound`` (initial product against ``(2 pi)^n / (4 lam (1-lam))``) and
    ``final_product`` (final product against ``(2 pi)^n``).  An exception aborts
    the run; the partial report carries ``failure``.
    """
    dim = f.spec.dim
    plan = ConjugatePlan.default(f.spec) if plan is None else plan
    offsets = plan.target
    if H1 is None:
        H1 = lambda_split(f, 0, lam).hyperplane
    H1 = H1.snapped(f.spec)
    plus, minus = half_space_masses(f, H1)
    lam1 = plus / (plus + minus)
    factor = 4 * lam1 * (1 - lam1)
    report = PipelineReport(dim, lam1, integrate(f), math.nan, math.nan,
                            (2 * math.pi) ** dim / factor)
    try:
        G = AffineSubspace.from_hyperplanes([H1])
        plan_0 = ConjugatePlan(f.spec, offsets)
        if dim == 1:
            z = np.array([H1.offset])
        else:
            z = santalo_point(f, G, plan_0).z_star
        g = polar(f, z, plan_0, warn=False)
        report.polar_mass_0 = integrate(g)
        report.product_0 = report.mass_0 * report.polar_mass_0
        prev, planes = f, [H1]
        for i in range(1, dim + 1):
            axis = i - 1
            if i > 1:
                split = lambda_split(prev, axis, 0.5)
                planes = [p.snapped(prev.spec) for p in planes] + [split.hyperplane]
                G = AffineSubspace.from_hyperplanes(planes)
                plan_i = ConjugatePlan(prev.spec, offsets)
                z = santalo_point(prev, G, plan_i).z_star
                g = polar(prev, z, plan_i, warn=False)
            plane = planes[-1]
            p_plus, p_minus = half_space_masses(prev, plane.snapped(prev.spec))
            split_lam = p_plus / (p_plus + p_minus)
            s = steiner_symmetrize(g, _plane_at(z, axis))
            cur = _recover(s, z, _recovery_grid(prev.spec, z, recover_scale))
            back = polar(cur, z, ConjugatePlan(cur.spec, offsets), warn=False)
            mass, pmass = integrate(cur), integrate(s)
            report.steps.append(StepRecord(
                i, axis, float(plane.offset), tuple(float(v) for v in z), split_lam,
                mass, pmass, mass * pmass, _relative_max_diff(back.values, s.values),
            ))
            prev = cur
        peak = float(prev.values.max())
        report.final_symmetry_defects = [
            symmetry_defect(prev, _plane_at(z, k)) / peak for k in range(dim)
        ]
    except LogConcaveError as exc:
        report.failure = f"{type(exc).__name__}: {exc}"
        report.verdicts["aborted"] = Verdict(False, math.nan, math.nan,
                                             traceback.format_exception_only(type(exc), exc)[-1].strip())
        return report

    products = [report.product_0] + [s.product for s in report.steps]
    worst = min(b / a for a, b in zip(products[1:-1], products[2:])) if dim > 1 else 1.0
    report.verdicts["monotone"] = Verdict(worst >= 1 - eps_mono, worst, 1 - eps_mono,
                                          "min product_{i+1} / product_i")
    first = report.steps[0].product / (factor * report.product_0)
    report.verdicts["first_step"] = Verdict(first >= 1 - eps_ineq, first, 1 - eps_ineq,
                                            "product_1 / (4 lam (1-lam) product_0)")
    sym = max(report.final_symmetry_defects)
    report.verdicts["unconditional"] = Verdict(sym <= eps_sym, sym, eps_sym,
                                               "max relative symmetry defect of f_n")
    ratio = report.ratio_to_bound
    report.verdicts["bound"] = Verdict(ratio <= 1 + eps_tot, ratio, 1 + eps_tot,
                                       "product_0 / ((2 pi)^n / (4 lam (1-lam)))")
    last = products[-1] / (2 * math.pi) ** dim
    report.verdicts["final_product"] = Verdict(last <= 1 + eps_tot, last, 1 + eps_tot,
                                         "product_n / (2 pi)^n")
    return report


# ------------------------------------------------------- separation lemma


@dataclass(frozen=True)
class SeparationReport:
    lam: float
    lhs: float
    rhs: float
    ok: bool

    @property
    def slack(self) -> float:
        return self.lhs / self.rhs - 1.0


def verify_separation_lemma(f: LogConcaveFnGrid, z, H: Hyperplane,
                            plan: ConjugatePlan | None = None,
                            eps_ineq: float = EPS_INEQ) -> SeparationReport:
    """``int (S_H f)^z >= 4 lam (1 - lam) int f^z`` with ``lam`` measured on ``f^z``."""
    z = _as_point(z, f.spec.dim)
    H = H.snapped(f.spec)
    if float(z[H.axis]) != H.offset:
        z = z.copy()
        z[H.axis] = H.offset
    plan = ConjugatePlan.default(f.spec) if plan is None else plan
    fz = polar(f, z, plan, warn=False)
    plus, minus = half_space_masses(fz, _plane_at(z, H.axis))
    lam = plus / (plus + minus)
    sf = steiner_symmetrize(f, H)
    lhs = integrate(polar(sf, z, plan, warn=False))
    rhs = 4 * lam * (1 - lam) * integrate(fz)
    return SeparationReport(lam, lhs, rhs, bool(lhs >= rhs * (1 - eps_ineq)))


# ------------------------------------------------------ slice inequality


def _slice(values: np.ndarray, axis: int, index: int) -> np.ndarray:
    return np.take(values, index, axis=axis)


def _sub_spec(spec: GridSpec, axis: int) -> GridSpec:
    keep = [k for k in range(spec.dim) if k != axis]
    return GridSpec(tuple(spec.lo[k] for k in keep), tuple(spec.hi[k] for k in keep),
                    tuple(spec.count[k] for k in keep))


@dataclass(frozen=True)
class SliceReport:
    pairs: list
    worst_ratio: float
    ok: bool


def slice_inequality_check(f: LogConcaveFnGrid, z, H: Hyperplane,
                           plan: ConjugatePlan | None = None, samples: int = 20,
                           seed: int = 0, eps_slice: float = EPS_SLICE) -> SliceReport:
    """Node-wise check of the slice inequality behind the separation lemma.

    For sampled heights ``s, t > 0`` on the dual grid,

        (t/(s+t) . P_s) * (s/(s+t) . P_{-t})  <=  Q_{2st/(s+t)}

    where ``P_w`` is the slice of ``f^z`` at offset ``w`` along ``H``'s
    normal, ``Q_w`` the slice of ``(S_H f)^z``, ``.`` the homothety and
    ``*`` the Asplund product.  Heights off the grid are bracketed by two
    slices plus the next slice towards ``H``, and each node may use the
    largest ``Q`` value in its ``3^(n-1)`` neighbourhood on those slices;
    each ``P`` value is the smallest over its node and the two neighbouring
    slices (a one-cell allowance in every direction).
    The slices are taken in coordinates relative to ``z``.
    """
    z = _as_point(z, f.spec.dim)
    H = H.snapped(f.spec)
    z = z.copy()
    z[H.axis] = H.offset
    plan = ConjugatePlan.default(f.spec) if plan is None else plan
    axis = H.axis
    P = polar(f, z, plan, warn=False)
    Q = polar(steiner_symmetrize(f, H), z, plan, warn=False)
    Pv = _neighbour_min(P.values, axis)
    rel = plan.target
    c = rel.count[axis] // 2
    hw = rel.h[axis]
    top = rel.count[axis] - 1 - c
    rng = np.random.default_rng(seed)
    ks = rng.integers(1, top + 1, size=(samples, 2))
    worst = 0.0
    pairs = []
    for ks_, kt in ks:
        s, t = ks_ * hw, kt * hw
        w = 2 * s * t / (s + t)
        pos = w / hw
        if pos > top:
            raise SliceOutOfRange(f"height {w} is beyond the dual grid")
        lo_i = int(math.floor(pos + 1e-9))
        hi_i = min(lo_i + 1, top) if abs(pos - round(pos)) > 1e-9 else lo_i
        a, b = t / (s + t), s / (s + t)
        Ps = _slice(Pv, axis, c + ks_)
        Pt = _slice(Pv, axis, c - kt)
        Qn = np.maximum(_slice(Q.values, axis, c + lo_i), _slice(Q.values, axis, c + hi_i))
        Qn = np.maximum(Qn, _slice(Q.values, axis, c + max(lo_i - 1, 0)))
        if f.spec.dim == 1:
            lhs = float(Ps) ** a * float(Pt) ** b
            ratio = lhs / max(float(Qn), 1e-300) if lhs > 0 else 0.0
        else:
            sub = _sub_spec(rel, axis)
            left = _slice_product(Ps, Pt, a, b, sub)
            allow = _neighbour_max(Qn)
            mask = left > 0
            ratio = float(np.max(left[mask] / np.maximum(allow[mask], 1e-300), initial=0.0))
        worst = max(worst, ratio)
        pairs.append((float(s), float(t), ratio))
    return SliceReport(pairs, worst, bool(worst <= 1 + eps_slice))


def _slice_product(Ps, Pt, a, b, sub: GridSpec) -> np.ndarray:
    """``(a . Ps) * (b . Pt)`` resampled onto ``sub``."""
    with np.errstate(divide="ignore"):
        if not (Ps > 0).any() or not (Pt > 0).any():
            return np.zeros(sub.shape)
    fs = LogConcaveFnGrid(sub, Ps)
    ft = LogConcaveFnGrid(sub, Pt)
    prod = asplund_product(homothety(a, fs), homothety(b, ft))
    phi = prod.potential().values
    with np.errstate(invalid="ignore", over="ignore"):
        return np.exp(-_interp_potential(phi, prod.spec, sub.mesh()))


def _neighbour_min(v: np.ndarray, axis: int = 0) -> np.ndarray:
    """Smallest of each node and its two neighbours along ``axis``."""
    v = np.moveaxis(np.asarray(v, dtype=float), axis, 0)
    out = v.copy()
    np.minimum(out[1:], v[:-1], out=out[1:])
    np.minimum(out[:-1], v[1:], out=out[:-1])
    return np.moveaxis(out, 0, axis)


def _neighbour_max(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for ax in range(v.ndim):
        shifted = out.copy()
        sl_a = [slice(None)] * v.ndim
        sl_b = [slice(None)] * v.ndim
        sl_a[ax], sl_b[ax] = slice(1, None), slice(None, -1)
        np.maximum(shifted[tuple(sl_a)], out[tuple(sl_b)], out=shifted[tuple(sl_a)])
        np.maximum(shifted[tuple(sl_b)], out[tuple(sl_a)], out=shifted[tuple(sl_b)])
        out = shifted
    return out


# -------------------------------------------------------- three-function


@dataclass(frozen=True)
class BallLemmaReport:
    hypothesis_ok: bool
    worst_hypothesis_ratio: float
    lhs: float
    rhs: float
    ok: bool


def _half_line_mass(F: np.ndarray, h: float) -> float:
    # node 0 sits on the boundary and contributes half its cell
    return h * (0.5 * float(F[0]) + exact_sum(F[1:]))


def ball_lemma_check(F0, F1, F2, h: float, eps_ineq: float = EPS_INEQ,
                     eps_hyp: float = EPS_SLICE, max_points: int = 256) -> BallLemmaReport:
    """Three-function lemma on samples ``F_j(k h)``, ``k = 0, 1, ...``.

    Hypothesis: ``F0(2xy/(x+y)) >= F1(x)^(y/(x+y)) F2(y)^(x/(x+y))`` on
    sampled positive nodes ``x, y``, with a one-cell allowance at all three
    points for the lattice shifts of the discrete transforms: ``F1`` and
    ``F2`` take their smallest value over a node and its two neighbours,
    ``F0`` its largest over the two nodes bracketing ``2xy/(x+y)`` and the
    node before them.
    Raises :class:`HypothesisFailed` with the worst ``(x, y)`` otherwise.
    Conclusion: ``1/int F0 <= (1/int F1 + 1/int F2) / 2``.
    """
    F0, F1, F2 = (np.asarray(F, dtype=float) for F in (F0, F1, F2))
    n = F0.size
    if not (F0.shape == F1.shape == F2.shape) or n < 2:
        raise ValueError("F0, F1, F2 must be samples on one grid with at least 2 nodes")
    if (F0 < 0).any() or (F1 < 0).any() or (F2 < 0).any():
        raise ValueError("samples must be nonnegative")
    idx = np.unique(np.linspace(1, n - 1, min(max_points, n - 1)).round().astype(int))
    x = idx[:, None] * h
    y = idx[None, :] * h
    a, b = y / (x + y), x / (x + y)
    G1, G2 = _neighbour_min(F1), _neighbour_min(F2)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = np.exp(a * np.log(G1[idx][:, None]) + b * np.log(G2[idx][None, :]))
    rhs = np.nan_to_num(rhs, nan=0.0)
    pos = (2 * x * y / (x + y)) / h
    lo_i = np.floor(pos + 1e-9).astype(int)
    hi_i = np.minimum(np.ceil(pos - 1e-9).astype(int), n - 1)
    lhs = np.maximum(np.maximum(F0[lo_i], F0[hi_i]), F0[np.maximum(lo_i - 1, 0)]) * (1 + eps_hyp)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, rhs / lhs, 0.0)
    k = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = float(ratio[k])
    if worst > 1:
        wx, wy = float(x[k[0], 0]), float(y[0, k[1]])
        raise HypothesisFailed(
            f"hypothesis fails at x={wx:.6g}, y={wy:.6g}: "
            f"F0(2xy/(x+y)) = {float(lhs[k]) / (1 + eps_hyp):.6g} < {float(rhs[k]):.6g}",
            witness={"x": wx, "y": wy, "F0": float(lhs[k]) / (1 + eps_hyp),
                     "rhs": float(rhs[k])},
        )
    m0, m1, m2 = (_half_line_mass(F, h) for F in (F0, F1, F2))
    for m in (m0, m1, m2):
        if not m > 0 or not math.isfinite(m):
            raise MassOutOfRange(f"half-line mass {m!r} is not a positive finite number")
    left, right = 1 / m0, 0.5 * (1 / m1 + 1 / m2)
    return BallLemmaReport(True, worst, left, right, bool(left <= right * (1 + eps_ineq)))


def ball_lemma_counterexample(n: int = 65, h: float = 0.125):
    """A triple that violates the hypothesis of :func:`ball_lemma_check`.

    ``F1 = F2 = exp(-t)`` while ``F0 = exp(-2t)`` falls below their
    weighted geometric mean everywhere except at ``t = 0``.
    """
    t = np.arange(n) * h
    return np.exp(-2 * t), np.exp(-t), np.exp(-t), h


def slice_mass_triple(f: LogConcaveFnGrid, z, H: Hyperplane,
                      plan: ConjugatePlan | None = None):
    """``(F0, F1, F2, h)`` from slice masses, as in the separation lemma.

    ``F1(s)`` and ``F2(t)`` integrate the slices of ``f^z`` at ``+s`` and
    ``-t`` over ``H``; ``F0(w)`` integrates the slices of ``(S_H f)^z``.
    """
    z = _as_point(z, f.spec.dim).copy()
    H = H.snapped(f.spec)
    z[H.axis] = H.offset
    plan = ConjugatePlan.default(f.spec) if plan is None else plan
    P = polar(f, z, plan, warn=False)
    Q = polar(steiner_symmetrize(f, H), z, plan, warn=False)
    axis = H.axis
    c = plan.target.count[axis] // 2
    vol = plan.target.cell_volume / plan.target.h[axis]

    def masses(g):
        lines = np.moveaxis(g.values, axis, 0).reshape(g.spec.count[axis], -1)
        return np.array([vol * exact_sum(r) for r in lines])

    mp, mq = masses(P), masses(Q)
    return mq[c:], mp[c:], mp[c::-1], plan.target.h[axis]


# ----------------------------------------------------------- unconditional


@dataclass(frozen=True)
class UnconditionalReport:
    center: tuple
    symmetry_defects: list
    product: float
    ratio: float
    ok: bool


def unconditional_product_check(f: LogConcaveFnGrid, plan: ConjugatePlan | None = None,
                                center=None, eps_sym: float = EPS_SYM,
                                eps_tot: float = EPS_TOT) -> UnconditionalReport:
    """``int f * int f^c <= (2 pi)^n`` for ``f`` unconditional about ``c``.

    ``center`` defaults to the grid's middle node.  Raises
    :class:`NotUnconditional` when a relative symmetry defect exceeds
    ``eps_sym``.
    """
    spec = f.spec
    if center is None:
        center = [spec.node(k, spec.count[k] // 2) for k in range(spec.dim)]
    center = _as_point(center, spec.dim)
    peak = float(f.values.max())
    defects = [symmetry_defect(f, Hyperplane(k, float(center[k]))) / peak
               for k in range(spec.dim)]
    if max(defects) > eps_sym:
        raise NotUnconditional(f"symmetry defects {defects} exceed {eps_sym}")
    plan = ConjugatePlan.default(spec) if plan is None else plan
    product = integrate(f) * integrate(polar(f, center, plan, warn=False))
    ratio = product / (2 * math.pi) ** spec.dim
    return UnconditionalReport(tuple(center), defects, product, ratio,
                               bool(ratio <= 1 + eps_tot))


# --------------------------------------------------------------- invariance


@dataclass(frozen=True)
class InvarianceReport:
    z: tuple
    z_after: tuple
    drift: float
    tol: float
    polar_symmetry_defect: float
    ok: bool


def verify_santalo_invariance(f: LogConcaveFnGrid, G: AffineSubspace, H: Hyperplane,
                              plan: ConjugatePlan | None = None,
                              tol_pt: float | None = None,
                              recover_scale: float = 1.0) -> InvarianceReport:
    """``s_G(g) = s_G(f)`` where ``g^z = S_H(f^z)`` and ``z = s_G(f)``.

    Also reports the symmetry defect of ``g^z`` about ``H`` (relative to
    its peak), which must vanish because ``g`` is symmetric about ``H``.
    """
    spec = f.spec
    if not G.within(H):
        raise ValueError("G must lie inside H")
    plan = ConjugatePlan.default(spec) if plan is None else plan
    tol = 1e-3 * spec.extent if tol_pt is None else tol_pt
    z = santalo_point(f, G, plan).z_star
    s = steiner_symmetrize(polar(f, z, plan, warn=False), _plane_at(z, H.axis))
    g = _recover(s, z, _recovery_grid(spec, z, recover_scale))
    plan_g = ConjugatePlan(g.spec, plan.target)
    z_after = santalo_point(g, G, plan_g).z_star
    gz = polar(g, z, plan_g, warn=False)
    defect = symmetry_defect(gz, _plane_at(z, H.axis)) / float(gz.values.max())
    drift = float(np.linalg.norm(z_after - z))
    return InvarianceReport(tuple(z), tuple(z_after), drift, tol, defect,
                            bool(drift <= tol and defect <= 1e-12))


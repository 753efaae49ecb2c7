import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from logconcave import ConjugatePlan, ConvexFnGrid, GridSpec, LogConcaveFnGrid, polar
from logconcave.exceptions import AllInfinite, BoundaryArgmaxWarning, PlanMismatch, SupportWarning
from logconcave.legendre import conjugate_1d, double_conjugate, legendre_brute, legendre_nd


def _round_up(q: Fraction) -> float:
    c = float(q)
    return c if Fraction(c) >= q else math.nextafter(c, math.inf)


def _oracle(v, x, y):
    out = []
    for yj in y:
        best = max(Fraction(xi) * Fraction(yj) - Fraction(vi) for xi, vi in zip(x, v) if vi != math.inf)
        out.append(_round_up(best))
    return np.array(out)


@pytest.mark.parametrize("seed", range(6))
def test_conjugate_is_exact_maximum_rounded_up(seed):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(-3, 3, 40))
    v = (x - rng.normal()) ** 2 * rng.uniform(0.1, 5) + rng.normal(0, 1e-9, x.size)
    v[rng.integers(0, 40, 3)] = np.inf
    y = np.sort(rng.uniform(-10, 10, 30))
    expect = _oracle(v, x, y)
    for method in ("fast", "brute"):
        assert np.array_equal(conjugate_1d(v, x, y, method=method), expect)


def test_quadratic_is_self_conjugate():
    x = np.linspace(-4, 4, 801)
    y = np.linspace(-2, 2, 11)
    got = conjugate_1d(x * x / 2, x, y)
    np.testing.assert_allclose(got, y * y / 2, atol=1e-12)


def test_indicator_conjugates_to_support_function():
    x = np.linspace(-1, 1, 21)
    y = np.linspace(-3, 3, 13)
    assert np.array_equal(conjugate_1d(np.zeros_like(x), x, y), np.abs(y))


def test_argmax_prefers_smallest_index():
    x = np.array([-1.0, 0.0, 1.0])
    _, arg = conjugate_1d(np.zeros(3), x, np.array([0.0]), return_argmax=True)
    assert arg.tolist() == [0]


def test_input_validation():
    x = np.linspace(-1, 1, 5)
    with pytest.raises(AllInfinite):
        conjugate_1d(np.full(5, np.inf), x, x)
    with pytest.raises(ValueError):
        conjugate_1d(np.zeros(5), x[::-1], x)
    with pytest.raises(ValueError):
        conjugate_1d(np.zeros(4), x, x)
    with pytest.raises(ValueError):
        conjugate_1d(np.zeros(5), x, x, method="slow")


def test_plan_mismatch():
    spec = GridSpec.centered([1.0], [5])
    phi = ConvexFnGrid(spec, np.zeros(5))
    with pytest.raises(PlanMismatch):
        legendre_nd(phi, None, ConjugatePlan.default(GridSpec.centered([2.0], [5])))


def test_two_dimensional_gaussian_and_brute_agree():
    spec = GridSpec.centered([6.0, 6.0], [41, 41])
    X, Y = spec.mesh()
    phi = ConvexFnGrid(spec, (X * X + 2 * Y * Y) / 2 + 0.3 * X * Y)
    for z in ([0.0, 0.0], [0.3, -0.6]):
        assert np.array_equal(legendre_nd(phi, z, warn=False).values, legendre_brute(phi, z).values)


def test_relative_plan_lands_on_shifted_grid():
    spec = GridSpec.centered([4.0], [81])
    plan = ConjugatePlan.default(spec)
    phi = ConvexFnGrid(spec, spec.nodes(0) ** 2 / 2)
    out = legendre_nd(phi, [0.5], plan, warn=False)
    assert out.spec == plan.target.shifted([0.5])


def test_double_conjugate_is_convex_envelope():
    spec = GridSpec.centered([2.0], [21])
    x = spec.nodes(0)
    wavy = x * x + 0.05 * np.cos(15 * x)
    plan = ConjugatePlan(spec, GridSpec.centered([8.0], [161]))
    env = double_conjugate(ConvexFnGrid(spec, wavy), None, plan)
    assert (env.values <= wavy + 1e-12).all()
    assert np.max(np.abs(env.values - x * x)) < 0.06


def test_boundary_warning_for_truncated_source():
    spec = GridSpec.centered([1.0], [41])
    phi = ConvexFnGrid(spec, spec.nodes(0) ** 2 / 2)
    with pytest.warns(BoundaryArgmaxWarning):
        legendre_nd(phi, None, ConjugatePlan(spec, GridSpec.centered([5.0], [41])))


def test_polar_of_gaussian_and_support_warning(gaussian_1d):
    g = polar(gaussian_1d, [0.0])
    mid = g.spec.count[0] // 2
    assert g.values[mid] == 1.0
    with pytest.warns(SupportWarning):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryArgmaxWarning)
            f = LogConcaveFnGrid(gaussian_1d.spec, np.where(gaussian_1d.spec.nodes(0) < 0, 0.0, gaussian_1d.values))
            polar(f, [-1.0], warn=True)
